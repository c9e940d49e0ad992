#include "plurvec/fracss.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "plurvec/error.hpp"
#include "plurvec/stats.hpp"

namespace plurvec {

LinearMap fit_linear_map(const Matrix& x, const Matrix& y, double ridge,
                         std::optional<double> rank_tolerance) {
    if (x.rows() != y.rows()) {
        throw UsageError("fit: X has " + std::to_string(x.rows()) + " rows, Y has " +
                         std::to_string(y.rows()));
    }
    if (x.rows() == 0 || x.cols() == 0 || y.cols() == 0) throw UsageError("fit: empty design");
    if (!x.allFinite() || !y.allFinite()) throw DataError("fit: non-finite input");
    if (!(ridge >= 0.0)) throw UsageError("fit: ridge must be >= 0");

    Matrix u, v;
    Vector s;
    {
        Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u = svd.matrixU();
        v = svd.matrixV();
        s = svd.singularValues();
    }
    // Eigen 3.4.0's divide-and-conquer SVD can break down on matrices with
    // many repeated singular values (binary form matrices); Jacobi is exact there.
    if (!u.allFinite() || !v.allFinite() || !s.allFinite()) {
        Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd(x, Eigen::ComputeThinU |
                                                                                     Eigen::ComputeThinV);
        u = svd.matrixU();
        v = svd.matrixV();
        s = svd.singularValues();
    }
    const double s_max = s.size() ? s[0] : 0.0;
    const double tol = rank_tolerance.value_or(std::numeric_limits<double>::epsilon() *
                                               static_cast<double>(std::max(x.rows(), x.cols())) * s_max);

    Vector factor(s.size());
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] > tol) ++rank;
        if (ridge > 0.0) {
            factor[i] = s[i] / (s[i] * s[i] + ridge);
        } else {
            factor[i] = s[i] > tol ? 1.0 / s[i] : 0.0;
        }
    }

    LinearMap map;
    map.matrix = v * factor.asDiagonal() * (u.transpose() * y);
    if (!map.matrix.allFinite()) throw DataError("fit: the solve produced non-finite values");
    map.ridge = ridge;
    map.rank_tolerance = tol;
    map.train_rows = static_cast<std::size_t>(x.rows());
    map.rank = rank;
    map.residual = (x * map.matrix - y).norm();
    return map;
}

LinearMap fit_inverse(const Matrix& x, const Matrix& y, double ridge,
                      std::optional<double> rank_tolerance) {
    return fit_linear_map(y, x, ridge, rank_tolerance);
}

Vector apply_map(const LinearMap& map, const VecRef& v) {
    if (static_cast<std::size_t>(v.size()) != map.d_in()) {
        throw UsageError("apply_map: vector dim " + std::to_string(v.size()) + " != map input dim " +
                         std::to_string(map.d_in()));
    }
    return map.matrix.transpose() * v;
}

Matrix apply_map_rows(const LinearMap& map, const Matrix& rows) {
    if (static_cast<std::size_t>(rows.cols()) != map.d_in()) {
        throw UsageError("apply_map: row dim does not match map input dim");
    }
    return rows * map.matrix;
}

DiagonalProfile diagonal_profile(const LinearMap& map) {
    const auto& b = map.matrix;
    if (b.rows() != b.cols() || b.rows() == 0) throw UsageError("diagonal profile needs a square map");
    std::vector<double> diag, off;
    diag.reserve(static_cast<std::size_t>(b.rows()));
    off.reserve(static_cast<std::size_t>(b.size() - b.rows()));
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
        for (Eigen::Index i = 0; i < b.rows(); ++i) (i == j ? diag : off).push_back(b(i, j));
    }
    DiagonalProfile p;
    p.diag_mean = mean(diag);
    p.diag_sd = sample_sd(diag);
    if (!off.empty()) {
        p.offdiag_mean = mean(off);
        p.offdiag_sd = sample_sd(off);
    }
    return p;
}

ResidualProfile residual_profile(const LinearMap& map, const Matrix& x, double scale) {
    ResidualProfile r;
    r.scale = scale;
    if (map.d_in() != map.d_out()) throw UsageError("residual profile needs a square map");
    r.residuals = apply_map_rows(map, x) - scale * x;
    if (r.residuals.size() == 0) return r;
    const double n = static_cast<double>(r.residuals.size());
    r.element_mean = r.residuals.mean();
    r.element_sd = r.residuals.size() > 1
                       ? std::sqrt((r.residuals.array() - r.element_mean).square().sum() / (n - 1.0))
                       : 0.0;
    double means = 0.0, sds = 0.0;
    for (Eigen::Index i = 0; i < r.residuals.rows(); ++i) {
        const Vector row = r.residuals.row(i).transpose();
        const double m = row.mean();
        means += m;
        if (row.size() > 1) sds += std::sqrt((row.array() - m).square().sum() / static_cast<double>(row.size() - 1));
    }
    r.row_mean_of_means = means / static_cast<double>(r.residuals.rows());
    r.row_mean_of_sds = sds / static_cast<double>(r.residuals.rows());
    return r;
}

void write_linear_map(std::ostream& out, const LinearMap& map) {
    out << map.d_in() << ' ' << map.d_out() << ' ' << format_double(map.ridge) << '\n';
    for (Eigen::Index i = 0; i < map.matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < map.matrix.cols(); ++j) {
            if (j) out << ' ';
            out << format_double(map.matrix(i, j));
        }
        out << '\n';
    }
}

LinearMap read_linear_map(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("linear map file is empty");
    std::istringstream header(line);
    std::size_t rows = 0, cols = 0;
    double ridge = 0.0;
    if (!(header >> rows >> cols >> ridge) || rows == 0 || cols == 0) {
        throw DataError("malformed linear map header '" + line + "'");
    }
    LinearMap map;
    map.ridge = ridge;
    map.matrix.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) throw DataError("linear map truncated at row " + std::to_string(i));
        std::istringstream ss(line);
        for (std::size_t j = 0; j < cols; ++j) {
            std::string tok;
            if (!(ss >> tok)) throw DataError("linear map row " + std::to_string(i) + " too short");
            try {
                std::size_t used = 0;
                map.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::stod(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::logic_error&) {
                throw DataError("linear map: bad value '" + tok + "'");
            }
        }
        std::string extra;
        if (ss >> extra) throw DataError("linear map row " + std::to_string(i) + " too long");
    }
    if (!map.matrix.allFinite()) throw DataError("linear map has non-finite entries");
    return map;
}

void save_linear_map(const std::filesystem::path& path, const LinearMap& map) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    write_linear_map(out, map);
}

LinearMap load_linear_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open linear map '" + path.string() + "'");
    return read_linear_map(in);
}

namespace {

Matrix gather_rows(const PairSet& pairs, const EmbeddingTable& table, bool plural) {
    Matrix out(static_cast<Eigen::Index>(pairs.size()), static_cast<Eigen::Index>(table.dim()));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs.pairs[i];
        out.row(static_cast<Eigen::Index>(i)) = table.vector(plural ? p.plural : p.singular).transpose();
    }
    return out;
}

TopNReport evaluate_direction(const LinearMap& map, const PairSet& pairs, const EmbeddingTable& table,
                              const std::vector<WordId>& candidate_pool, const EvalOptions& options,
                              bool inverse) {
    if (pairs.empty()) throw UsageError("no pairs to evaluate");
    if (candidate_pool.empty()) throw UsageError("empty candidate pool");
    const CandidatePool pool(table, options.metric, candidate_pool);
    std::vector<Prediction> predictions(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs.pairs[i];
        predictions[i].target = inverse ? p.singular : p.plural;
        predictions[i].vector = apply_map(map, table.vector(inverse ? p.plural : p.singular));
    }
    return rank_predictions(pool, predictions, options.ns, options.threads);
}

} // namespace

Matrix singular_rows(const PairSet& pairs, const EmbeddingTable& table) {
    return gather_rows(pairs, table, false);
}

Matrix plural_rows(const PairSet& pairs, const EmbeddingTable& table) {
    return gather_rows(pairs, table, true);
}

PairSplit split_pairs(std::size_t n, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
        throw UsageError("train fraction must be in (0, 1]");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    PairSplit split;
    split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

PairSet subset(const PairSet& pairs, const std::vector<std::size_t>& indices) {
    PairSet out;
    out.source = pairs.source;
    out.pairs.reserve(indices.size());
    for (std::size_t i : indices) out.pairs.push_back(pairs.pairs.at(i));
    return out;
}

TopNReport evaluate_map(const LinearMap& map, const PairSet& pairs, const EmbeddingTable& table,
                        const std::vector<WordId>& candidate_pool, const EvalOptions& options) {
    return evaluate_direction(map, pairs, table, candidate_pool, options, false);
}

TopNReport evaluate_inverse_map(const LinearMap& map, const PairSet& pairs,
                                const EmbeddingTable& table,
                                const std::vector<WordId>& candidate_pool,
                                const EvalOptions& options) {
    return evaluate_direction(map, pairs, table, candidate_pool, options, true);
}

double fraction_shorter(const LinearMap& map, const PairSet& pairs, const EmbeddingTable& table) {
    if (pairs.empty()) throw UsageError("no pairs");
    std::size_t shorter = 0;
    for (const auto& p : pairs.pairs) {
        const auto sg = table.vector(p.singular);
        if (apply_map(map, sg).norm() < sg.norm()) ++shorter;
    }
    return static_cast<double>(shorter) / static_cast<double>(pairs.size());
}

} // namespace plurvec
