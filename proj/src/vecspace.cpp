#include "plurvec/vecspace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "plurvec/error.hpp"

namespace plurvec {

namespace {

void check_same_dim(const VecRef& u, const VecRef& v, const char* what) {
    if (u.size() != v.size()) {
        throw UsageError(std::string(what) + ": dimension mismatch (" + std::to_string(u.size()) +
                         " vs " + std::to_string(v.size()) + ")");
    }
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

} // namespace

AxisRef::AxisRef(std::size_t dim_, std::size_t index_) : dim(dim_), index(index_) {
    if (dim == 0 || index >= dim) {
        throw UsageError("axis index " + std::to_string(index) + " out of range for dim " +
                         std::to_string(dim));
    }
}

AxisRef AxisRef::last(std::size_t dim) {
    if (dim == 0) throw UsageError("axis of a zero-dimensional space");
    return AxisRef(dim, dim - 1);
}

EmbeddingTable::EmbeddingTable(std::vector<std::string> words, Matrix vectors)
    : words_(std::move(words)), vectors_(std::move(vectors)) {
    if (vectors_.rows() == 0) throw DataError("embedding dimension must be positive");
    if (static_cast<std::size_t>(vectors_.cols()) != words_.size()) {
        throw DataError("embedding table has " + std::to_string(words_.size()) + " words but " +
                        std::to_string(vectors_.cols()) + " vectors");
    }
    if (!vectors_.allFinite()) throw DataError("embedding table contains a non-finite value");
    index_.reserve(words_.size());
    for (WordId id = 0; id < words_.size(); ++id) {
        if (words_[id].empty()) throw DataError("empty word string");
        if (!index_.emplace(words_[id], id).second) {
            throw DataError("duplicate word '" + words_[id] + "'");
        }
    }
}

std::optional<WordId> EmbeddingTable::lookup(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

WordId EmbeddingTable::require(std::string_view word) const {
    if (auto id = lookup(word)) return *id;
    throw DataError("word '" + std::string(word) + "' not in embedding table");
}

EmbeddingTable EmbeddingTable::normalized() const {
    Matrix out = vectors_;
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        double n = out.col(c).norm();
        if (n == 0.0) throw DataError("cannot normalize zero vector of '" + words_[c] + "'");
        out.col(c) /= n;
    }
    return EmbeddingTable(words_, std::move(out));
}

EmbeddingTable parse_embeddings(std::istream& in, std::optional<std::size_t> expected_dim) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("embedding file is empty");
    auto header = split_ws(line);
    std::size_t count = 0, dim = 0;
    if (header.size() != 2 || !parse_number(header[0], count) || !parse_number(header[1], dim) ||
        dim == 0) {
        throw DataError("malformed embedding header '" + line + "' (expected 'count dim')");
    }
    if (expected_dim && *expected_dim != dim) {
        throw DataError("embedding dimension " + std::to_string(dim) + " differs from expected " +
                        std::to_string(*expected_dim));
    }

    std::vector<std::string> words;
    words.reserve(count);
    Matrix vectors(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(count));
    std::size_t lineno = 1;
    while (words.size() < count && std::getline(in, line)) {
        ++lineno;
        auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() != dim + 1) {
            throw DataError("line " + std::to_string(lineno) + ": row arity " +
                            std::to_string(fields.size() - 1) + " != dim " + std::to_string(dim));
        }
        const auto col = static_cast<Eigen::Index>(words.size());
        for (std::size_t k = 0; k < dim; ++k) {
            double v = 0;
            if (!parse_number(fields[k + 1], v) || !std::isfinite(v)) {
                throw DataError("line " + std::to_string(lineno) + ": bad value '" +
                                std::string(fields[k + 1]) + "'");
            }
            vectors(static_cast<Eigen::Index>(k), col) = v;
        }
        words.emplace_back(fields[0]);
    }
    if (words.size() != count) {
        throw DataError("header declares " + std::to_string(count) + " rows, file has " +
                        std::to_string(words.size()));
    }
    while (std::getline(in, line)) {
        if (!split_ws(line).empty()) throw DataError("embedding file has rows beyond declared count");
    }
    return EmbeddingTable(std::move(words), std::move(vectors));
}

EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               std::optional<std::size_t> expected_dim) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embeddings '" + path.string() + "'");
    return parse_embeddings(in, expected_dim);
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_embeddings(std::ostream& out, const EmbeddingTable& table) {
    out << table.size() << ' ' << table.dim() << '\n';
    for (WordId id = 0; id < table.size(); ++id) {
        out << table.word(id);
        auto v = table.vector(id);
        for (Eigen::Index k = 0; k < v.size(); ++k) out << ' ' << format_double(v[k]);
        out << '\n';
    }
}

void save_embeddings(const std::filesystem::path& path, const EmbeddingTable& table) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    write_embeddings(out, table);
}

double cosine(const VecRef& u, const VecRef& v) {
    check_same_dim(u, v, "cosine");
    const double nu = u.norm(), nv = v.norm();
    if (nu == 0.0 || nv == 0.0) throw UsageError("cosine of a zero-norm vector");
    return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

double euclidean(const VecRef& u, const VecRef& v) {
    check_same_dim(u, v, "euclidean");
    return norm(u - v);
}

double norm(const VecRef& v) { return v.norm(); }

double angle_to_axis(const VecRef& v, const AxisRef& axis) {
    if (static_cast<std::size_t>(v.size()) != axis.dim) {
        throw UsageError("angle_to_axis: vector dim " + std::to_string(v.size()) +
                         " != axis dim " + std::to_string(axis.dim));
    }
    const double n = v.norm();
    if (n == 0.0) throw UsageError("angle of a zero vector is undefined");
    const double c = std::clamp(v[static_cast<Eigen::Index>(axis.index)] / n, -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

Vector mean_vector(std::span<const Vector> rows) {
    if (rows.empty()) throw UsageError("mean of an empty vector set");
    Vector acc = Vector::Zero(rows.front().size());
    for (const auto& r : rows) {
        if (r.size() != acc.size()) throw UsageError("mean_vector: dimension mismatch");
        acc += r;
    }
    return acc / static_cast<double>(rows.size());
}

} // namespace plurvec
