#include <doctest.h>

#include <algorithm>
#include <cstring>

#include "helpers.hpp"
#include "plurvec/analogy.hpp"
#include "plurvec/error.hpp"
#include "plurvec/synth.hpp"

using namespace plurvec;
using testutil::vec;

TEST_SUITE("analogy") {

TEST_CASE("only_b is the identity") {
    CHECK(only_b(vec({1, 2})) == vec({1, 2}));
    CHECK(only_b(vec({0, 0})).isZero());
    const Vector odd = vec({0.1, -3e-300});
    const Vector out = only_b(odd);
    CHECK(std::memcmp(out.data(), odd.data(), sizeof(double) * 2) == 0);
}

TEST_CASE("three_cos_add examples") {
    CHECK(three_cos_add(vec({1, 0}), vec({1, 1}), vec({2, 0})) == vec({2, 1}));
    CHECK(three_cos_add(vec({3, 3}), vec({3, 3}), vec({2, 5})) == vec({2, 5}));
    const Vector a = three_cos_add(vec({1, 0}), vec({1, 1}), vec({2, 0}));
    const Vector b = three_cos_add(vec({0, 1}), vec({2, 1}), vec({2, 0}));
    CHECK(a != b);
}

TEST_CASE("three_cos_avg examples") {
    CHECK(three_cos_avg(vec({2.0 / 3, 1}), vec({5, 5})).isApprox(vec({17.0 / 3, 6})));
    CHECK(three_cos_avg(vec({0, 0}), vec({5, 5})) == vec({5, 5}));
    const Vector shift = vec({0.3, -1.7, 2.2});
    const Vector sg = vec({4, 1, -2});
    CHECK(euclidean(three_cos_avg(shift, sg), sg) == doctest::Approx(shift.norm()).epsilon(1e-15));
}

TEST_CASE("cos_class_avg examples") {
    ClassShiftTable classes;
    classes.min_members = 1;
    classes.classes["A"] = {vec({1, 0}), 5, false};
    classes.classes["B"] = {vec({0, 2}), 5, false};
    classes.classes["C"] = {vec({0, 2}), 2, true};
    ClassAssignment of{{"x", "A"}, {"y", "B"}, {"z", "C"}};
    CHECK(cos_class_avg(classes, of, "x", vec({5, 5})) == vec({6, 5}));
    CHECK(cos_class_avg(classes, of, "x", vec({5, 5})) != cos_class_avg(classes, of, "y", vec({5, 5})));
    CHECK_THROWS_AS(cos_class_avg(classes, of, "nobody", vec({5, 5})), DataError);
    CHECK_THROWS_AS(cos_class_avg(classes, of, "z", vec({5, 5})), DataError);
}

TEST_CASE("property: single-class CosClassAvg equals 3CosAvg; self-prime 3CosAdd equals Only-B") {
    const Vector shift = testutil::random_matrix(6, 1, 4).col(0);
    ClassShiftTable classes;
    classes.classes["only"] = {shift, 10, false};
    ClassAssignment of;
    const auto m = testutil::random_matrix(6, 30, 5);
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
        const std::string w = "w" + std::to_string(i);
        of[w] = "only";
        const Vector sg = m.col(i);
        CHECK(cos_class_avg(classes, of, w, sg) == three_cos_avg(shift, sg));
        const Vector prime = m.col((i + 1) % m.cols());
        CHECK(three_cos_add(prime, prime, sg) == only_b(sg));
    }
}

TEST_CASE("Only-B scores 100 when each plural is its singular's nearest neighbor") {
    const auto t = testutil::table({{"a", vec({1, 0, 0})}, {"as", vec({0.99, 0.1, 0})}, {"b", vec({0, 1, 0})},
                                    {"bs", vec({0, 0.99, 0.1})}, {"c", vec({0, 0, 1})}, {"cs", vec({0.1, 0, 0.99})}});
    const auto p = testutil::pairs(t, {{"a", "as", ""}, {"b", "bs", ""}, {"c", "cs", ""}});
    EvalOptions opt;
    opt.ns = {1};
    // The singulars themselves are filtered so the nearest plural wins.
    const auto pool = analogy_pool(t, p, {}, true);
    const auto ev = evaluate_pluralizer(PluralizerSpec::make_only_b(), p, t, pool, opt);
    CHECK(ev.report.percent[0] == 100.0);
}

TEST_CASE("analogy_pool filter keeps the gold plurals") {
    const auto t = testutil::table({{"a", vec({1, 0})}, {"as", vec({1, 1})}, {"b", vec({0, 1})}, {"bs", vec({2, 1})},
                                    {"z", vec({3, 1})}});
    const auto p = testutil::pairs(t, {{"a", "as", ""}, {"b", "bs", ""}});
    const auto all = analogy_pool(t, p, {}, false);
    CHECK(all.size() == 5);
    const auto filtered = analogy_pool(t, p, {}, true);
    CHECK(filtered.size() == 3);
    CHECK(std::find(filtered.begin(), filtered.end(), t.require("a")) == filtered.end());
}

TEST_CASE("CosClassAvg beats 3CosAvg on class-structured data") {
    SynthSpec spec;
    spec.seed = 12;
    const auto data = gen_synth(spec);
    const auto classes = class_avg_shifts(data.pair_set, data.table);
    const auto of = class_assignment(data.pair_set, data.table);
    EvalOptions opt;
    opt.ns = {1, 2, 3, 10, 20};
    const auto pool = analogy_pool(data.table, data.pair_set, {}, false);
    const auto cca = evaluate_pluralizer(PluralizerSpec::make_cos_class_avg(classes, of), data.pair_set, data.table,
                                         pool, opt);
    const auto avg = evaluate_pluralizer(PluralizerSpec::make_three_cos_avg(avg_shift(data.pair_set, data.table)),
                                         data.pair_set, data.table, pool, opt);
    CHECK(cca.report.percent[0] >= 95.0);
    CHECK(cca.report.percent[0] > avg.report.percent[0]);
    for (std::size_t i = 0; i < opt.ns.size(); ++i) CHECK(cca.report.percent[i] >= avg.report.percent[i]);

    // Prediction error sits at the lexeme-noise scale.
    std::vector<double> err;
    for (const auto& pr : data.pair_set.pairs) {
        const Vector pred = cos_class_avg(classes, of, data.table.word(pr.singular), data.table.vector(pr.singular));
        err.push_back(euclidean(pred, data.table.vector(pr.plural)));
    }
    std::sort(err.begin(), err.end());
    const double med = err[err.size() / 2];
    CHECK(med < 4 * spec.lexeme_noise);
    CHECK(med > 0.25 * spec.lexeme_noise);
}

TEST_CASE("property: euclidean CosClassAvg ranks ignore a global translation") {
    SynthSpec spec;
    spec.classes = 4;
    spec.lexemes_per_class = 10;
    spec.dim = 8;
    spec.lexeme_noise = 0.5;
    spec.seed = 3;
    const auto data = gen_synth(spec);
    Matrix moved = data.table.vectors();
    moved.colwise() += testutil::random_matrix(8, 1, 99).col(0);
    const EmbeddingTable shifted(data.table.words(), moved);
    EvalOptions opt;
    opt.metric = Metric::euclidean;
    opt.ns = {1, 5};
    auto run = [&](const EmbeddingTable& t) {
        const auto classes = class_avg_shifts(data.pair_set, t);
        const auto of = class_assignment(data.pair_set, t);
        return evaluate_pluralizer(PluralizerSpec::make_cos_class_avg(classes, of), data.pair_set, t,
                                   analogy_pool(t, data.pair_set, {}, false), opt);
    };
    const auto a = run(data.table), b = run(shifted);
    for (std::size_t i = 0; i < a.report.outcomes.size(); ++i) {
        CHECK(a.report.outcomes[i].rank->rank == b.report.outcomes[i].rank->rank);
    }
}

TEST_CASE("property: evaluation is independent of pair order") {
    SynthSpec spec;
    spec.classes = 3;
    spec.lexemes_per_class = 8;
    spec.dim = 10;
    spec.lexeme_noise = 0.4;
    const auto data = gen_synth(spec);
    PairSet reversed = data.pair_set;
    std::reverse(reversed.pairs.begin(), reversed.pairs.end());
    EvalOptions opt;
    opt.ns = {1, 2};
    const auto pool = analogy_pool(data.table, data.pair_set, {}, false);
    const auto spec_a = PluralizerSpec::make_three_cos_avg(avg_shift(data.pair_set, data.table));
    const auto a = evaluate_pluralizer(spec_a, data.pair_set, data.table, pool, opt);
    const auto b = evaluate_pluralizer(spec_a, reversed, data.table, pool, opt);
    CHECK(a.report.percent == b.report.percent);
    const std::size_t n = a.report.outcomes.size();
    for (std::size_t i = 0; i < n; ++i) CHECK(a.report.outcomes[i].rank->rank == b.report.outcomes[n - 1 - i].rank->rank);
}

TEST_CASE("missing parameters are usage errors") {
    PluralizerSpec s;
    s.method = Method::three_cos_add;
    CHECK_THROWS_AS(s.validate(2), UsageError);
    CHECK_THROWS_AS(PluralizerSpec::make_three_cos_avg(vec({1, 2, 3})).validate(2), UsageError);
    CHECK_THROWS_AS(parse_method("4cosmul"), UsageError);
    CHECK(parse_method("cosclassavg") == Method::cos_class_avg);
}

}
