#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "plurvec/analogy.hpp"
#include "plurvec/dlcomp.hpp"
#include "plurvec/fracss.hpp"
#include "plurvec/parallel.hpp"
#include "plurvec/report.hpp"
#include "plurvec/shifts.hpp"

namespace plurvec {

/// Settings shared by the end-to-end pipelines.
struct RunConfig {
    std::uint64_t seed = 0;
    std::optional<Metric> metric; // per-pipeline default when unset
    std::vector<std::size_t> ns;  // per-pipeline default when empty
    double ridge = 0.0;
    std::size_t min_class_size = 5;
    bool filter_singulars = false;
    unsigned threads = 1;

    /// Echoes every setting into the provenance record.
    void describe(Provenance& provenance) const;
};

// --- analogy -----------------------------------------------------------------

struct AnalogyRun {
    std::vector<Method> methods; // empty: Only-B, 3CosAvg, CosClassAvg (+3CosAdd with a prime)
    std::optional<std::pair<std::string, std::string>> prime;
};

struct AnalogyReport {
    Metric metric = Metric::cosine;
    std::vector<std::size_t> ns;
    std::size_t pool_size = 0;
    std::vector<PluralizerEvaluation> rows;
};

AnalogyReport pipeline_analogy(const EmbeddingTable& table, const PairSet& pairs, const RunConfig& config,
                               const AnalogyRun& run = {});

/// method,top<n>...,failures
void write_analogy_topn_csv(std::ostream& out, const AnalogyReport& report);
/// method,singular,plural,rank,candidates,best,failure
void write_analogy_ranks_csv(std::ostream& out, const AnalogyReport& report, const PairSet& pairs,
                             const EmbeddingTable& table);

// --- fracss ------------------------------------------------------------------

struct FracssReport {
    Metric metric = Metric::cosine;
    std::vector<std::size_t> ns;
    double train_fraction = 0.9;
    PairSplit split;
    LinearMap forward;
    LinearMap inverse;
    DiagonalProfile forward_profile;
    DiagonalProfile inverse_profile;
    ResidualProfile residuals; // forward predictions vs scale * singular on the training rows
    TopNReport forward_train, forward_test, inverse_train, inverse_test;
    double shorter_train = 0.0;
    double shorter_test = 0.0;
};

/// Seeded 90/10 split over pairs; forward and inverse maps fitted on the
/// training pairs and evaluated on both parts against the whole table.
FracssReport pipeline_fracss(const EmbeddingTable& table, const PairSet& pairs, const RunConfig& config,
                             double train_fraction = 0.9, double residual_scale = 0.57);

/// entry,row,col,value: one row per diagonal element.
void write_fracss_diagonal_csv(std::ostream& out, const LinearMap& map);
/// map,quantity,value
void write_fracss_profile_csv(std::ostream& out, const FracssReport& report);
/// direction,part,count,top<n>...
void write_fracss_topn_csv(std::ostream& out, const FracssReport& report);
/// singular,plural,part,singular_length,predicted_length,shorter
void write_fracss_lengths_csv(std::ostream& out, const FracssReport& report, const PairSet& pairs,
                              const EmbeddingTable& table);

// --- discriminative lexicon --------------------------------------------------

enum class SemanticSource { raw, cosclassavg, fracss };
std::string_view source_name(SemanticSource source);
SemanticSource parse_source(std::string_view name);

/// The word types of a comprehension run and their semantic targets.
struct DlSemantics {
    SemanticSource source = SemanticSource::raw;
    EmbeddingTable table;
    std::size_t fallbacks = 0; // plurals that kept their own embedding
};

/// Words of the run: present in the pair info, the lexicon and the
/// embeddings, in sorted order. Independent of the semantic source.
std::vector<std::string> dl_words(const EmbeddingTable& embeddings, const PronLexicon& lexicon,
                                  const PairInfo& info);

/**
 * Targets per word type. Singulars keep their embedding. Plurals take
 *   raw:          their own embedding,
 *   cosclassavg:  partner singular + the class shift of its class,
 *   fracss:       partner singular mapped by B fitted on all pairs,
 * falling back to their own embedding when the partner or class is unusable.
 */
DlSemantics dl_semantics(SemanticSource source, const std::vector<std::string>& words,
                         const EmbeddingTable& embeddings, const PairSet& pairs, const PairInfo& info,
                         const RunConfig& config);

struct DlLayout {
    std::vector<std::string> words;
    FormBuild form;
    std::map<std::string, WordRole> roles;
    SplitSpec split;
};

DlLayout dl_layout(const EmbeddingTable& embeddings, const PronLexicon& lexicon, const PairInfo& info,
                   std::uint64_t seed, double fraction = 0.70);

struct DlRun {
    SemanticSource source = SemanticSource::raw;
    std::size_t fallbacks = 0;
    LinearMap comprehension;
    std::size_t candidate_types = 0;
    EvalReport train;
    EvalReport test;
    std::vector<ErrorRecord> train_errors;
    std::vector<ErrorRecord> test_errors;
};

struct DlReport {
    DlLayout layout;
    std::vector<DlRun> runs;
};

DlReport pipeline_dl(const EmbeddingTable& embeddings, const PairSet& pairs, const PronLexicon& lexicon,
                     const PairInfo& info, const std::vector<SemanticSource>& sources, const RunConfig& config,
                     double fraction = 0.70);

/// source,part,tokens,candidates,top<n>...
void write_dl_accuracy_csv(std::ostream& out, const DlReport& report);
/// source,part,role,tokens,top1: accuracy per word category
void write_dl_categories_csv(std::ostream& out, const DlReport& report);
/// source,part,category,count
void write_dl_error_counts_csv(std::ostream& out, const DlReport& report);
/// source,part,token,gold,predicted,category,recall,overlap
void write_dl_errors_csv(std::ostream& out, const DlReport& report);
/// source,part,types,recognized: words with two or more pronunciations
void write_dl_multipron_csv(std::ostream& out, const DlReport& report);
/// metric,<source>... side by side, one row per (part, n)
void write_dl_comparison_csv(std::ostream& out, const DlReport& report);

} // namespace plurvec
