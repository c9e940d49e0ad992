#include "plurvec/analogy.hpp"

#include <algorithm>
#include <unordered_set>

#include "plurvec/error.hpp"

namespace plurvec {

namespace {

void check_dims(const VecRef& a, const VecRef& b, const char* what) {
    if (a.size() != b.size()) throw UsageError(std::string(what) + ": dimension mismatch");
}

} // namespace

std::string_view method_label(Method method) {
    switch (method) {
    case Method::only_b: return "Only-B";
    case Method::three_cos_add: return "3CosAdd";
    case Method::three_cos_avg: return "3CosAvg";
    case Method::cos_class_avg: return "CosClassAvg";
    }
    return "unknown";
}

std::string_view method_flag(Method method) {
    switch (method) {
    case Method::only_b: return "only-b";
    case Method::three_cos_add: return "3cosadd";
    case Method::three_cos_avg: return "3cosavg";
    case Method::cos_class_avg: return "cosclassavg";
    }
    return "unknown";
}

Method parse_method(std::string_view flag) {
    for (Method m : {Method::only_b, Method::three_cos_add, Method::three_cos_avg, Method::cos_class_avg}) {
        if (flag == method_flag(m)) return m;
    }
    throw UsageError("unknown method '" + std::string(flag) + "'");
}

Vector only_b(const VecRef& singular) { return singular; }

Vector three_cos_add(const VecRef& prime_singular, const VecRef& prime_plural, const VecRef& singular) {
    check_dims(prime_singular, prime_plural, "3CosAdd");
    check_dims(prime_singular, singular, "3CosAdd");
    return prime_plural - prime_singular + singular;
}

Vector three_cos_avg(const VecRef& avg_shift, const VecRef& singular) {
    check_dims(avg_shift, singular, "3CosAvg");
    return singular + avg_shift;
}

Vector cos_class_avg(const ClassShiftTable& classes, const ClassAssignment& class_of,
                     std::string_view singular_word, const VecRef& singular) {
    auto it = class_of.find(std::string(singular_word));
    if (it == class_of.end()) throw DataError("no class for '" + std::string(singular_word) + "'");
    const ClassShift* c = classes.find(it->second);
    if (!c) throw DataError("class '" + it->second + "' has no average shift");
    if (c->under_threshold) {
        throw DataError("class '" + it->second + "' has " + std::to_string(c->count) +
                        " members, below the minimum of " + std::to_string(classes.min_members));
    }
    check_dims(c->shift, singular, "CosClassAvg");
    return singular + c->shift;
}

PluralizerSpec PluralizerSpec::make_only_b() { return {}; }

PluralizerSpec PluralizerSpec::make_three_cos_add(WordId prime_singular, WordId prime_plural) {
    PluralizerSpec s;
    s.method = Method::three_cos_add;
    s.prime = std::make_pair(prime_singular, prime_plural);
    return s;
}

PluralizerSpec PluralizerSpec::make_three_cos_avg(Vector avg_shift) {
    PluralizerSpec s;
    s.method = Method::three_cos_avg;
    s.avg_shift = std::move(avg_shift);
    return s;
}

PluralizerSpec PluralizerSpec::make_cos_class_avg(ClassShiftTable classes, ClassAssignment class_of) {
    PluralizerSpec s;
    s.method = Method::cos_class_avg;
    s.classes = std::move(classes);
    s.class_of = std::move(class_of);
    return s;
}

void PluralizerSpec::validate(std::size_t dim) const {
    switch (method) {
    case Method::only_b: return;
    case Method::three_cos_add:
        if (!prime) throw UsageError("3CosAdd needs an explicit prime pair");
        return;
    case Method::three_cos_avg:
        if (static_cast<std::size_t>(avg_shift.size()) != dim) {
            throw UsageError("3CosAvg average shift has the wrong dimension");
        }
        return;
    case Method::cos_class_avg:
        if (classes.classes.empty()) throw UsageError("CosClassAvg needs class shifts");
        for (const auto& [label, c] : classes.classes) {
            if (static_cast<std::size_t>(c.shift.size()) != dim) {
                throw UsageError("class shift '" + label + "' has the wrong dimension");
            }
        }
        return;
    }
}

Vector PluralizerSpec::predict(const EmbeddingTable& table, WordId singular) const {
    const auto sg = table.vector(singular);
    switch (method) {
    case Method::only_b: return only_b(sg);
    case Method::three_cos_add:
        if (!prime) throw UsageError("3CosAdd needs an explicit prime pair");
        return three_cos_add(table.vector(prime->first), table.vector(prime->second), sg);
    case Method::three_cos_avg: return three_cos_avg(avg_shift, sg);
    case Method::cos_class_avg: return cos_class_avg(classes, class_of, table.word(singular), sg);
    }
    throw UsageError("unknown method");
}

std::vector<WordId> analogy_pool(const EmbeddingTable& table, const PairSet& pairs,
                                 std::vector<WordId> base_pool, bool filter_singulars) {
    if (base_pool.empty()) {
        base_pool.resize(table.size());
        for (WordId i = 0; i < table.size(); ++i) base_pool[i] = i;
    }
    if (!filter_singulars) return base_pool;
    std::unordered_set<WordId> singulars, plurals;
    for (const auto& p : pairs.pairs) {
        singulars.insert(p.singular);
        plurals.insert(p.plural);
    }
    std::erase_if(base_pool, [&](WordId id) { return singulars.count(id) && !plurals.count(id); });
    return base_pool;
}

PluralizerEvaluation evaluate_pluralizer(const PluralizerSpec& spec, const PairSet& pairs,
                                         const EmbeddingTable& table,
                                         const std::vector<WordId>& candidate_pool,
                                         const EvalOptions& options) {
    if (pairs.empty()) throw UsageError("no pairs to evaluate");
    if (candidate_pool.empty()) throw UsageError("empty candidate pool");
    spec.validate(table.dim());
    const CandidatePool pool(table, options.metric, candidate_pool);

    std::vector<Prediction> predictions(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        predictions[i].target = pairs.pairs[i].plural;
        try {
            predictions[i].vector = spec.predict(table, pairs.pairs[i].singular);
        } catch (const DataError& e) {
            predictions[i].failure = e.what();
        }
    }
    PluralizerEvaluation out;
    out.method = spec.method;
    out.report = rank_predictions(pool, predictions, options.ns, options.threads);
    return out;
}

} // namespace plurvec
