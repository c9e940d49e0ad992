#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "plurvec/knn.hpp"
#include "plurvec/shifts.hpp"

namespace plurvec {

enum class Method { only_b, three_cos_add, three_cos_avg, cos_class_avg };

std::string_view method_label(Method method); // "Only-B", "3CosAdd", ...
std::string_view method_flag(Method method);  // "only-b", "3cosadd", ...
Method parse_method(std::string_view flag);

using ClassAssignment = std::unordered_map<std::string, std::string>;

/// The singular vector itself.
Vector only_b(const VecRef& singular);
/// prime_plural - prime_singular + singular.
Vector three_cos_add(const VecRef& prime_singular, const VecRef& prime_plural, const VecRef& singular);
/// singular + average shift.
Vector three_cos_avg(const VecRef& avg_shift, const VecRef& singular);
/// singular + the average shift of the singular's class. Missing
/// assignments, unknown classes and under-threshold classes are DataErrors.
Vector cos_class_avg(const ClassShiftTable& classes, const ClassAssignment& class_of,
                     std::string_view singular_word, const VecRef& singular);

/// A configured pluralizer. Build one through the factories so that the
/// parameters the method needs are present.
struct PluralizerSpec {
    Method method = Method::only_b;
    Vector avg_shift;                          // three_cos_avg
    ClassShiftTable classes;                   // cos_class_avg
    ClassAssignment class_of;                  // cos_class_avg
    std::optional<std::pair<WordId, WordId>> prime; // three_cos_add

    static PluralizerSpec make_only_b();
    static PluralizerSpec make_three_cos_add(WordId prime_singular, WordId prime_plural);
    static PluralizerSpec make_three_cos_avg(Vector avg_shift);
    static PluralizerSpec make_cos_class_avg(ClassShiftTable classes, ClassAssignment class_of);

    /// Throws UsageError when required parameters are missing or sized wrong.
    void validate(std::size_t dim) const;
    Vector predict(const EmbeddingTable& table, WordId singular) const;
};

struct EvalOptions {
    Metric metric = Metric::cosine;
    std::vector<std::size_t> ns{2, 3, 10, 20};
    /// Drop every dataset singular (other than a pair's own plural) from the pool.
    bool filter_singulars = false;
    unsigned threads = 1;
};

struct PluralizerEvaluation {
    Method method = Method::only_b;
    TopNReport report; // outcomes in pair order
};

/// Candidate pool for pluralizer evaluation. An empty base pool means the
/// whole table.
std::vector<WordId> analogy_pool(const EmbeddingTable& table, const PairSet& pairs,
                                 std::vector<WordId> base_pool, bool filter_singulars);

/// Predicts each pair's plural and ranks the gold plural in the pool.
/// A pair whose prediction fails is recorded and counts as a miss.
PluralizerEvaluation evaluate_pluralizer(const PluralizerSpec& spec, const PairSet& pairs,
                                         const EmbeddingTable& table,
                                         const std::vector<WordId>& candidate_pool,
                                         const EvalOptions& options);

} // namespace plurvec
