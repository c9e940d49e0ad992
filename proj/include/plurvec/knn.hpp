#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "plurvec/vecspace.hpp"

namespace plurvec {

enum class Metric { cosine, euclidean, pearson };

std::string_view metric_name(Metric metric);
Metric parse_metric(std::string_view name);
/// Similarities rank descending, distances ascending.
bool higher_is_better(Metric metric);

struct Neighbor {
    WordId id = 0;
    double score = 0.0;
};

struct NeighborList {
    std::optional<WordId> query_id; // nullopt for an external vector
    Metric metric = Metric::cosine;
    std::vector<Neighbor> entries;
};

struct RankResult {
    WordId target = 0;
    std::size_t rank = 0; // 1 = nearest
    std::size_t candidate_count = 0;
};

/// A candidate that is not a row of the table, e.g. the semantic vector of
/// a held-out test word. Extras get ids table.size(), table.size() + 1, ...
struct ExtraCandidate {
    std::string word;
    Vector vector;
};

/**
 * A set of table words whose vectors have been prepared for one metric:
 * unit-normalized for cosine, mean-centered and normalized for pearson,
 * raw for euclidean. The table must outlive the pool.
 *
 * Scores are accumulated sequentially in a fixed order, so identical inputs
 * give bit-identical scores regardless of memory alignment or threading.
 */
class CandidatePool {
public:
    /// An empty id list means every word of the table.
    CandidatePool(const EmbeddingTable& table, Metric metric, std::vector<WordId> ids = {});

    Metric metric() const { return metric_; }
    const EmbeddingTable& table() const { return *table_; }
    std::size_t size() const { return ids_.size(); }
    std::span<const WordId> ids() const { return ids_; }
    bool contains(WordId id) const { return members_.count(id) != 0; }

    Vector prepare(const VecRef& v) const;
    double score_prepared(const VecRef& query, const VecRef& candidate) const;
    /// Score of every pool member against the query, in ids() order.
    std::vector<double> scores(const VecRef& query) const;

    /// Strict ordering: better score first, then ascending word string.
    bool ranks_before(double score_a, std::string_view word_a, double score_b,
                      std::string_view word_b) const;

private:
    const EmbeddingTable* table_;
    Metric metric_;
    std::vector<WordId> ids_;
    std::unordered_set<WordId> members_;
    Matrix prepared_;
};

NeighborList top_k(const VecRef& query, const EmbeddingTable& table, std::size_t k, Metric metric,
                   const std::unordered_set<WordId>& exclude = {});
NeighborList top_k(const CandidatePool& pool, const VecRef& query, std::size_t k,
                   const std::unordered_set<WordId>& exclude = {});

RankResult rank_of(const VecRef& query, WordId target, const EmbeddingTable& table, Metric metric,
                   std::span<const ExtraCandidate> extra = {});
RankResult rank_of(const CandidatePool& pool, const VecRef& query, WordId target,
                   std::span<const ExtraCandidate> extra = {});

/// Percentage of results with rank <= n, for each n.
std::vector<double> topn_table(std::span<const RankResult> results, std::span<const std::size_t> ns);

/// One item to rank: a predicted vector and the word it should retrieve.
/// A prediction without a vector is a recorded failure. With admit_target
/// set, a target outside the pool competes as one extra candidate.
struct Prediction {
    WordId target = 0;
    std::optional<Vector> vector;
    std::string failure;
    bool admit_target = false;
};

struct TargetOutcome {
    WordId target = 0;
    std::optional<RankResult> rank;
    std::optional<WordId> best; // top-1 candidate
    std::string failure;
};

struct TopNReport {
    Metric metric = Metric::cosine;
    std::vector<std::size_t> ns;
    std::vector<double> percent;
    std::vector<TargetOutcome> outcomes;
    std::size_t failures = 0;
};

/// Top-n percentages where failed outcomes count as misses at every n.
std::vector<double> topn_percent(std::span<const TargetOutcome> outcomes,
                                 std::span<const std::size_t> ns);

TopNReport rank_predictions(const CandidatePool& pool, std::span<const Prediction> predictions,
                            std::span<const std::size_t> ns, unsigned threads = 1);

/// CSV rows "query,rank,word,score" with six-decimal scores.
void write_neighbors_csv(std::ostream& out, std::string_view query, const NeighborList& list,
                         const EmbeddingTable& table, bool header = true);

} // namespace plurvec
