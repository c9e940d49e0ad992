#pragma once

#include <initializer_list>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "plurvec/shifts.hpp"
#include "plurvec/vecspace.hpp"

namespace testutil {

using plurvec::Matrix;
using plurvec::Vector;

inline Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

inline plurvec::EmbeddingTable table(std::vector<std::pair<std::string, Vector>> entries) {
    std::vector<std::string> words;
    Matrix m(entries.front().second.size(), static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) {
        words.push_back(entries[i].first);
        m.col(static_cast<Eigen::Index>(i)) = entries[i].second;
    }
    return plurvec::EmbeddingTable(std::move(words), std::move(m));
}

inline plurvec::EmbeddingTable random_table(std::size_t n, std::size_t dim, std::uint64_t seed,
                                            const std::string& prefix = "w") {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<std::string> words;
    Matrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        words.push_back(prefix + std::to_string(i));
        for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = g(rng);
    }
    return plurvec::EmbeddingTable(std::move(words), std::move(m));
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = g(rng);
    return m;
}

/// Binds string pairs that are all present in the table.
inline plurvec::PairSet pairs(const plurvec::EmbeddingTable& t,
                              std::vector<std::tuple<std::string, std::string, std::string>> items) {
    std::vector<plurvec::WordPair> wp;
    for (auto& [s, p, l] : items) wp.push_back({s, p, l.empty() ? std::nullopt : std::optional<std::string>(l)});
    return plurvec::bind_pairs(wp, t).set;
}

} // namespace testutil
