#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace plurvec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VecRef = Eigen::Ref<const Vector>;
using WordId = std::size_t;

/// One of the standard basis axes e_index of a dim-dimensional space.
struct AxisRef {
    std::size_t dim = 0;
    std::size_t index = 0;

    AxisRef(std::size_t dim, std::size_t index);
    /// The last axis, e_dim.
    static AxisRef last(std::size_t dim);
};

/**
 * Immutable word -> vector map.
 *
 * Vectors are stored as the columns of a dim x size matrix so that a word's
 * vector is a contiguous block. Word ids are the row order of the source
 * file and never change.
 */
class EmbeddingTable {
public:
    EmbeddingTable(std::vector<std::string> words, Matrix vectors);

    std::size_t dim() const { return static_cast<std::size_t>(vectors_.rows()); }
    std::size_t size() const { return words_.size(); }

    const std::vector<std::string>& words() const { return words_; }
    const std::string& word(WordId id) const { return words_.at(id); }

    std::optional<WordId> lookup(std::string_view word) const;
    /// Like lookup() but a miss is a DataError naming the word.
    WordId require(std::string_view word) const;

    auto vector(WordId id) const { return vectors_.col(static_cast<Eigen::Index>(id)); }
    const Matrix& vectors() const { return vectors_; }

    /// Copy of the table with every vector scaled to unit length.
    EmbeddingTable normalized() const;

private:
    std::vector<std::string> words_;
    Matrix vectors_;
    std::unordered_map<std::string, WordId> index_;
};

/// Parses the word2vec text layout: a "count dim" header, then one
/// "word v1 ... vdim" line per word.
EmbeddingTable parse_embeddings(std::istream& in, std::optional<std::size_t> expected_dim = {});
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               std::optional<std::size_t> expected_dim = {});

/// Writes the text layout. Values use the shortest decimal form that reads
/// back to the same double, so load -> save -> load is lossless.
void write_embeddings(std::ostream& out, const EmbeddingTable& table);
void save_embeddings(const std::filesystem::path& path, const EmbeddingTable& table);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double value);

double cosine(const VecRef& u, const VecRef& v);
double euclidean(const VecRef& u, const VecRef& v);
double norm(const VecRef& v);
/// Angle in degrees between v and the given basis axis.
double angle_to_axis(const VecRef& v, const AxisRef& axis);
Vector mean_vector(std::span<const Vector> rows);

} // namespace plurvec
