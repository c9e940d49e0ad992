#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "plurvec/vecspace.hpp"

namespace plurvec {

/// A singular/plural pair as written in a pairs file.
struct WordPair {
    std::string singular;
    std::string plural;
    std::optional<std::string> label;
};

/// Reads `singular<TAB>plural[<TAB>class]` lines. Blank lines are skipped.
std::vector<WordPair> parse_pairs(std::istream& in);
std::vector<WordPair> load_pairs(const std::filesystem::path& path);
void write_pairs(std::ostream& out, const std::vector<WordPair>& pairs);

struct Pair {
    WordId singular = 0;
    WordId plural = 0;
    std::optional<std::string> label;
};

struct PairSet {
    std::vector<Pair> pairs;
    std::string source;

    bool empty() const { return pairs.empty(); }
    std::size_t size() const { return pairs.size(); }
};

struct LookupMiss {
    std::size_t pair_index = 0;
    std::string word;
};

struct BoundPairs {
    PairSet set;
    std::vector<LookupMiss> misses; // pairs with a missing word are left out
};

/// Resolves words against the table. Missing words are reported, not
/// thrown; a duplicate (singular, plural) pair is a DataError.
BoundPairs bind_pairs(const std::vector<WordPair>& pairs, const EmbeddingTable& table,
                      std::string source = {});

Vector shift_vector(const Pair& pair, const EmbeddingTable& table);

/// Mean of plurals minus mean of singulars.
Vector avg_shift(const PairSet& pairs, const EmbeddingTable& table);
/// Mean of the individual shift vectors. Equal to avg_shift() up to rounding.
Vector mean_of_shifts(const PairSet& pairs, const EmbeddingTable& table);

struct ClassShift {
    Vector shift;
    std::size_t count = 0;
    bool under_threshold = false;
};

struct ClassShiftTable {
    std::map<std::string, ClassShift> classes;
    std::size_t min_members = 5;

    const ClassShift* find(const std::string& label) const;
    std::vector<std::string> under_threshold() const;
};

ClassShiftTable class_avg_shifts(const PairSet& pairs, const EmbeddingTable& table,
                                 std::size_t min_members = 5);

/// singular word -> class label, from the labels of a pair set.
std::unordered_map<std::string, std::string> class_assignment(const PairSet& pairs,
                                                              const EmbeddingTable& table);

struct PairShiftRecord {
    WordId singular = 0;
    WordId plural = 0;
    double singular_length = 0.0;
    double plural_length = 0.0;
    double shift_length = 0.0;
    std::optional<double> singular_angle;
    std::optional<double> plural_angle;
    std::optional<double> shift_angle; // undefined for a zero shift
};

struct GroupSummary {
    std::size_t n = 0;
    double median = 0.0;
    double mean = 0.0;
    double sd = 0.0;
};

struct ShiftStats {
    std::vector<PairShiftRecord> records;
    GroupSummary singular_length, plural_length, shift_length;
    GroupSummary singular_angle, plural_angle, shift_angle;
    std::size_t undefined_angles = 0; // zero-length vectors of any kind
    Vector average_shift;
    double average_shift_length = 0.0;
    std::optional<double> average_shift_angle;
};

ShiftStats shift_stats(const PairSet& pairs, const EmbeddingTable& table, const AxisRef& axis);

/// Per-pair rows: singular,plural,sg_length,pl_length,shift_length,sg_angle,pl_angle,shift_angle.
/// The columns double as the length/angle scatter exports.
void write_shift_records_csv(std::ostream& out, const ShiftStats& stats, const EmbeddingTable& table);
/// Aggregate rows: quantity,n,median,mean,sd.
void write_shift_summary_csv(std::ostream& out, const ShiftStats& stats);
/// label,count,under_threshold,length,v1..vd
void write_class_shifts_csv(std::ostream& out, const ClassShiftTable& classes);
/// `word<TAB>class<TAB>v1..vd` rows of shift vectors, keyed by singular, for
/// external projection tools. Unlabeled pairs get class "-".
void write_labeled_shifts(std::ostream& out, const PairSet& pairs, const EmbeddingTable& table);

} // namespace plurvec
