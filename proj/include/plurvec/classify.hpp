#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "plurvec/vecspace.hpp"

namespace plurvec {

/**
 * Multiclass linear discriminant analysis with a pooled, shrunk covariance
 *
 *   S = (1 - g) * S_pooled + g * (tr(S_pooled) / d) * I
 *
 * and class priors equal to the training proportions. The discriminant of
 * class k is x' S^-1 m_k - m_k' S^-1 m_k / 2 + log p_k.
 */
struct LdaModel {
    std::vector<std::string> labels; // sorted ascending
    Matrix means;                    // d x K
    Matrix covariance;               // shrunk pooled covariance
    std::vector<double> priors;
    double shrinkage = 0.0;
    Matrix weights;   // S^-1 m_k as columns
    Vector intercepts;
};

struct LdaPrediction {
    std::string label;
    std::vector<double> scores; // in model.labels order
};

/// vectors: one sample per row.
LdaModel fit_lda(const Matrix& vectors, std::span<const std::string> labels, double shrinkage = 1e-3);
/// argmax discriminant score; ties go to the lexicographically smallest label.
LdaPrediction predict_lda(const LdaModel& model, const VecRef& x);
std::vector<std::string> predict_lda_rows(const LdaModel& model, const Matrix& vectors);

struct ClassScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct ClassMetrics {
    double accuracy = 0.0;
    double weighted_f = 0.0; // per-class F1 weighted by gold support
    std::map<std::string, ClassScore> per_class;
};

ClassMetrics weighted_f(std::span<const std::string> predicted, std::span<const std::string> gold);

/// Always predicts the modal training label (lexicographic winner on ties).
struct MostFrequentBaseline {
    std::string label;
    std::vector<std::string> predict(std::size_t n) const { return std::vector<std::string>(n, label); }
};

MostFrequentBaseline baseline_most_frequent(std::span<const std::string> labels);

/// LDA against the baseline when both are scored on the training data.
struct TrainingEvaluation {
    ClassMetrics lda;
    ClassMetrics baseline;
    double ratio = 0.0; // lda weighted F / baseline weighted F (0 when undefined)
};

TrainingEvaluation evaluate_on_training(const Matrix& vectors, std::span<const std::string> labels,
                                        double shrinkage = 1e-3);

/// What to do with classes that have fewer samples than folds.
enum class SmallClassPolicy {
    strict,     // error
    train_only, // their samples stay in every training fold, never tested
};

struct CvSpec {
    std::size_t k = 5;
    std::uint64_t seed = 0;
    bool stratified = true;
    SmallClassPolicy small_classes = SmallClassPolicy::strict;
};

/// Test-sample indices per fold. Stratified folds deal each class's shuffled
/// members round-robin, so per-class fold sizes differ by at most one.
std::vector<std::vector<std::size_t>> make_folds(std::span<const std::string> labels, const CvSpec& spec);

struct FoldResult {
    std::size_t train_n = 0;
    std::size_t test_n = 0;
    ClassMetrics train;
    ClassMetrics test;
    double baseline_train_f = 0.0;
    double baseline_test_f = 0.0;
    std::size_t dropped_classes = 0; // classes with < 2 training samples in this fold
};

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

struct CvResult {
    std::vector<FoldResult> folds;
    MeanSd train_accuracy, test_accuracy, train_f, test_f;
    MeanSd baseline_train_f, baseline_test_f;
    MeanSd train_ratio, test_ratio;
    std::vector<std::string> small_classes;
};

CvResult stratified_cv(const Matrix& vectors, std::span<const std::string> labels, const CvSpec& spec,
                       double shrinkage = 1e-3, unsigned threads = 1);

/// fold,train_n,test_n,train_accuracy,train_f,test_accuracy,test_f,baseline_train_f,baseline_test_f
/// plus mean and sd rows.
void write_cv_csv(std::ostream& out, const CvResult& result);

struct LabeledVectors {
    std::vector<std::string> words;
    std::vector<std::string> labels;
    Matrix vectors; // one row per sample
};

/// Reads `word<TAB>label<TAB>v1..vd` rows, skipping `#` lines; label_column is 1-based and the
/// remaining columns after the word are the vector.
LabeledVectors load_labeled_vectors(const std::filesystem::path& path, std::size_t label_column = 2);
LabeledVectors parse_labeled_vectors(std::istream& in, std::size_t label_column = 2);

} // namespace plurvec
