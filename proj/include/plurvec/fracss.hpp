#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "plurvec/analogy.hpp"
#include "plurvec/knn.hpp"
#include "plurvec/shifts.hpp"

namespace plurvec {

/// A dense d_in x d_out map applied to row vectors: y = x B.
struct LinearMap {
    Matrix matrix;
    double ridge = 0.0;
    double rank_tolerance = 0.0;
    std::size_t train_rows = 0;
    std::size_t rank = 0;
    double residual = 0.0; // ||X B - Y||_F on the training rows

    std::size_t d_in() const { return static_cast<std::size_t>(matrix.rows()); }
    std::size_t d_out() const { return static_cast<std::size_t>(matrix.cols()); }
};

/**
 * Least-squares map from the rows of X to the rows of Y.
 *
 * Solved through a thin SVD X = U S V^T: B = V f(S) U^T Y with
 * f(s) = s / (s^2 + ridge) for ridge > 0, and f(s) = 1/s above the rank
 * tolerance (0 below it) for ridge == 0, which yields the minimum-norm
 * solution when X^T X is singular. The default tolerance is
 * eps * max(t, d) * s_max.
 */
LinearMap fit_linear_map(const Matrix& x, const Matrix& y, double ridge = 0.0,
                         std::optional<double> rank_tolerance = {});

/// The same fit in the plural -> singular direction.
LinearMap fit_inverse(const Matrix& x, const Matrix& y, double ridge = 0.0,
                      std::optional<double> rank_tolerance = {});

Vector apply_map(const LinearMap& map, const VecRef& v);
/// Applies the map to every row.
Matrix apply_map_rows(const LinearMap& map, const Matrix& rows);

struct DiagonalProfile {
    double diag_mean = 0.0;
    double diag_sd = 0.0;
    double offdiag_mean = 0.0;
    double offdiag_sd = 0.0;
};

DiagonalProfile diagonal_profile(const LinearMap& map);

/// Residuals of the predictions against a scaled-identity approximation,
/// E = X B - scale * X, summarized over all entries and per row.
struct ResidualProfile {
    double scale = 0.0;
    double element_mean = 0.0;
    double element_sd = 0.0;
    double row_mean_of_means = 0.0;
    double row_mean_of_sds = 0.0;
    Matrix residuals;
};

ResidualProfile residual_profile(const LinearMap& map, const Matrix& x, double scale);

/// Text format: "d_in d_out ridge" header, then d_in rows of d_out values.
void write_linear_map(std::ostream& out, const LinearMap& map);
LinearMap read_linear_map(std::istream& in);
void save_linear_map(const std::filesystem::path& path, const LinearMap& map);
LinearMap load_linear_map(const std::filesystem::path& path);

/// Singular (or plural) vectors of the selected pairs as rows.
Matrix singular_rows(const PairSet& pairs, const EmbeddingTable& table);
Matrix plural_rows(const PairSet& pairs, const EmbeddingTable& table);

struct PairSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Seeded uniform split of n pair indices; round(train_fraction * n) go to train.
PairSplit split_pairs(std::size_t n, double train_fraction, std::uint64_t seed);
PairSet subset(const PairSet& pairs, const std::vector<std::size_t>& indices);

/// Predicts each pair's plural with the map and ranks it in the pool.
TopNReport evaluate_map(const LinearMap& map, const PairSet& pairs, const EmbeddingTable& table,
                        const std::vector<WordId>& candidate_pool, const EvalOptions& options);
/// Same, predicting singulars from plurals with an inverse map.
TopNReport evaluate_inverse_map(const LinearMap& map, const PairSet& pairs,
                                const EmbeddingTable& table,
                                const std::vector<WordId>& candidate_pool,
                                const EvalOptions& options);

/// Fraction of pairs whose predicted plural is shorter than the singular.
double fraction_shorter(const LinearMap& map, const PairSet& pairs, const EmbeddingTable& table);

} // namespace plurvec
