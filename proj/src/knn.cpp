#include "plurvec/knn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "plurvec/error.hpp"
#include "plurvec/parallel.hpp"

namespace plurvec {

namespace {

double seq_dot(const double* a, const double* b, Eigen::Index n) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double seq_distance(const double* a, const double* b, Eigen::Index n) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

} // namespace

std::string_view metric_name(Metric metric) {
    switch (metric) {
    case Metric::cosine: return "cosine";
    case Metric::euclidean: return "euclidean";
    case Metric::pearson: return "pearson";
    }
    return "unknown";
}

Metric parse_metric(std::string_view name) {
    if (name == "cosine") return Metric::cosine;
    if (name == "euclidean") return Metric::euclidean;
    if (name == "pearson") return Metric::pearson;
    throw UsageError("unknown metric '" + std::string(name) + "'");
}

bool higher_is_better(Metric metric) { return metric != Metric::euclidean; }

CandidatePool::CandidatePool(const EmbeddingTable& table, Metric metric, std::vector<WordId> ids)
    : table_(&table), metric_(metric), ids_(std::move(ids)) {
    if (ids_.empty()) {
        ids_.resize(table.size());
        std::iota(ids_.begin(), ids_.end(), WordId{0});
    }
    members_.reserve(ids_.size());
    for (WordId id : ids_) {
        if (id >= table.size()) throw UsageError("candidate id out of range");
        if (!members_.insert(id).second) {
            throw UsageError("duplicate candidate '" + table.word(id) + "'");
        }
    }
    prepared_.resize(static_cast<Eigen::Index>(table.dim()), static_cast<Eigen::Index>(ids_.size()));
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        try {
            prepared_.col(static_cast<Eigen::Index>(i)) = prepare(table.vector(ids_[i]));
        } catch (const UsageError& e) {
            throw DataError("candidate '" + table.word(ids_[i]) + "': " + e.what());
        }
    }
}

Vector CandidatePool::prepare(const VecRef& v) const {
    if (static_cast<std::size_t>(v.size()) != table_->dim()) {
        throw UsageError("query dim " + std::to_string(v.size()) + " != table dim " +
                         std::to_string(table_->dim()));
    }
    if (!v.allFinite()) throw DataError("non-finite query vector");
    switch (metric_) {
    case Metric::euclidean: return v;
    case Metric::cosine: {
        const double n = v.norm();
        if (n == 0.0) throw UsageError("zero vector under cosine");
        return v / n;
    }
    case Metric::pearson: {
        Vector centered = v.array() - v.mean();
        const double n = centered.norm();
        if (n == 0.0) throw UsageError("constant vector under pearson");
        return centered / n;
    }
    }
    return v;
}

double CandidatePool::score_prepared(const VecRef& query, const VecRef& candidate) const {
    if (metric_ == Metric::euclidean) return seq_distance(query.data(), candidate.data(), query.size());
    return std::clamp(seq_dot(query.data(), candidate.data(), query.size()), -1.0, 1.0);
}

std::vector<double> CandidatePool::scores(const VecRef& query) const {
    const Vector q = prepare(query);
    std::vector<double> out(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        out[i] = score_prepared(q, prepared_.col(static_cast<Eigen::Index>(i)));
    }
    return out;
}

bool CandidatePool::ranks_before(double score_a, std::string_view word_a, double score_b,
                                 std::string_view word_b) const {
    if (score_a != score_b) return higher_is_better(metric_) ? score_a > score_b : score_a < score_b;
    return word_a < word_b;
}

NeighborList top_k(const VecRef& query, const EmbeddingTable& table, std::size_t k, Metric metric,
                   const std::unordered_set<WordId>& exclude) {
    return top_k(CandidatePool(table, metric), query, k, exclude);
}

NeighborList top_k(const CandidatePool& pool, const VecRef& query, std::size_t k,
                   const std::unordered_set<WordId>& exclude) {
    if (k == 0) throw UsageError("top_k requires k >= 1");
    const auto scores = pool.scores(query);
    std::vector<std::size_t> order;
    order.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!exclude.count(pool.ids()[i])) order.push_back(i);
    }
    if (k > order.size()) {
        throw UsageError("k = " + std::to_string(k) + " exceeds " + std::to_string(order.size()) +
                         " candidates");
    }
    const auto& table = pool.table();
    auto before = [&](std::size_t a, std::size_t b) {
        return pool.ranks_before(scores[a], table.word(pool.ids()[a]), scores[b],
                                 table.word(pool.ids()[b]));
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), before);
    NeighborList out;
    out.metric = pool.metric();
    out.entries.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.entries.push_back({pool.ids()[order[i]], scores[order[i]]});
    return out;
}

RankResult rank_of(const VecRef& query, WordId target, const EmbeddingTable& table, Metric metric,
                   std::span<const ExtraCandidate> extra) {
    return rank_of(CandidatePool(table, metric), query, target, extra);
}

namespace {

struct RankScan {
    RankResult result;
    WordId best = 0;
};

RankScan scan_rank(const CandidatePool& pool, const VecRef& query, WordId target,
                   std::span<const ExtraCandidate> extra, bool admit_target) {
    const auto& table = pool.table();
    const Vector q = pool.prepare(query);
    const auto scores = pool.scores(query);

    std::vector<double> extra_scores(extra.size());
    for (std::size_t j = 0; j < extra.size(); ++j) {
        if (table.lookup(extra[j].word) && pool.contains(*table.lookup(extra[j].word))) {
            throw UsageError("extra candidate '" + extra[j].word + "' duplicates a pool word");
        }
        extra_scores[j] = pool.score_prepared(q, pool.prepare(extra[j].vector));
    }

    double target_score = 0.0;
    std::string_view target_word;
    std::size_t admitted = 0;
    if (target < table.size()) {
        target_word = table.word(target);
        if (pool.contains(target)) {
            const auto it = std::find(pool.ids().begin(), pool.ids().end(), target);
            target_score = scores[static_cast<std::size_t>(it - pool.ids().begin())];
        } else if (admit_target) {
            target_score = pool.score_prepared(q, pool.prepare(table.vector(target)));
            admitted = 1;
        } else {
            throw UsageError("target '" + table.word(target) + "' is not in the candidate pool");
        }
    } else if (target - table.size() < extra.size()) {
        target_score = extra_scores[target - table.size()];
        target_word = extra[target - table.size()].word;
    } else {
        throw UsageError("target id " + std::to_string(target) + " is not a candidate");
    }

    std::size_t better = 0;
    WordId best = target;
    double best_score = target_score;
    std::string_view best_word = target_word;
    auto visit = [&](WordId id, double s, std::string_view w) {
        if (id == target) return;
        if (pool.ranks_before(s, w, target_score, target_word)) ++better;
        if (pool.ranks_before(s, w, best_score, best_word)) {
            best = id;
            best_score = s;
            best_word = w;
        }
    };
    for (std::size_t i = 0; i < scores.size(); ++i) visit(pool.ids()[i], scores[i], table.word(pool.ids()[i]));
    for (std::size_t j = 0; j < extra.size(); ++j) visit(table.size() + j, extra_scores[j], extra[j].word);

    return {{target, better + 1, pool.size() + extra.size() + admitted}, best};
}

} // namespace

RankResult rank_of(const CandidatePool& pool, const VecRef& query, WordId target,
                   std::span<const ExtraCandidate> extra) {
    return scan_rank(pool, query, target, extra, false).result;
}

std::vector<double> topn_table(std::span<const RankResult> results, std::span<const std::size_t> ns) {
    if (results.empty()) throw UsageError("topn_table of an empty result list");
    std::vector<double> out;
    out.reserve(ns.size());
    for (std::size_t n : ns) {
        const auto hits = std::count_if(results.begin(), results.end(),
                                        [n](const RankResult& r) { return r.rank <= n; });
        out.push_back(100.0 * static_cast<double>(hits) / static_cast<double>(results.size()));
    }
    return out;
}

std::vector<double> topn_percent(std::span<const TargetOutcome> outcomes,
                                 std::span<const std::size_t> ns) {
    if (outcomes.empty()) throw UsageError("top-n of an empty outcome list");
    std::vector<double> out;
    out.reserve(ns.size());
    for (std::size_t n : ns) {
        const auto hits = std::count_if(outcomes.begin(), outcomes.end(), [n](const TargetOutcome& o) {
            return o.rank && o.rank->rank <= n;
        });
        out.push_back(100.0 * static_cast<double>(hits) / static_cast<double>(outcomes.size()));
    }
    return out;
}

TopNReport rank_predictions(const CandidatePool& pool, std::span<const Prediction> predictions,
                            std::span<const std::size_t> ns, unsigned threads) {
    if (predictions.empty()) throw UsageError("nothing to evaluate");
    TopNReport report;
    report.metric = pool.metric();
    report.ns.assign(ns.begin(), ns.end());
    report.outcomes.resize(predictions.size());
    parallel_for(predictions.size(), threads, [&](std::size_t i) {
        const auto& p = predictions[i];
        auto& o = report.outcomes[i];
        o.target = p.target;
        if (!p.vector) {
            o.failure = p.failure.empty() ? "no prediction" : p.failure;
            return;
        }
        if (!p.vector->allFinite()) {
            o.failure = "non-finite prediction";
            return;
        }
        try {
            auto scan = scan_rank(pool, *p.vector, p.target, {}, p.admit_target);
            o.rank = scan.result;
            o.best = scan.best;
        } catch (const Error& e) {
            o.failure = e.what();
        }
    });
    for (const auto& o : report.outcomes) report.failures += o.rank ? 0 : 1;
    report.percent = topn_percent(report.outcomes, ns);
    return report;
}

void write_neighbors_csv(std::ostream& out, std::string_view query, const NeighborList& list,
                         const EmbeddingTable& table, bool header) {
    if (header) out << "query,rank,word,score\n";
    char buf[64];
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f", list.entries[i].score);
        out << query << ',' << i + 1 << ',' << table.word(list.entries[i].id) << ',' << buf << '\n';
    }
}

} // namespace plurvec
