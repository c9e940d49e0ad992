#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "plurvec/fracss.hpp"
#include "plurvec/knn.hpp"

namespace plurvec {

using Pronunciation = std::vector<std::string>;

/// Uppercases a phone symbol and strips ARPABET stress digits (AH0 -> AH).
std::string normalize_phone(std::string_view phone);

/// word -> pronunciation variants, in file order, duplicates collapsed.
class PronLexicon {
public:
    void add(const std::string& word, Pronunciation phones);

    const std::vector<Pronunciation>* find(const std::string& word) const;
    bool contains(const std::string& word) const { return entries_.count(word) != 0; }
    std::size_t size() const { return entries_.size(); }
    const std::map<std::string, std::vector<Pronunciation>>& entries() const { return entries_; }

private:
    std::map<std::string, std::vector<Pronunciation>> entries_;
};

/// Reads `WORD<TAB>PHONE PHONE ...` lines; a word may appear on several lines.
PronLexicon parse_lexicon(std::istream& in);
PronLexicon load_lexicon(const std::filesystem::path& path);
void write_lexicon(std::ostream& out, const PronLexicon& lexicon);

using TriphoneSet = std::set<std::string>;

/// Pads the phones with '#' on both sides and collects every consecutive
/// 3-gram, rendered hyphen-joined ("#-S-IH"). A single phone p gives "#-p-#".
TriphoneSet triphones_of(std::span<const std::string> phones);

/// Triphone string -> dense column index.
class TriphoneSpace {
public:
    std::size_t add(const std::string& triphone);
    std::optional<std::size_t> find(const std::string& triphone) const;
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> names_;
};

struct FormToken {
    std::string word;
    std::size_t pronunciation = 0; // index into the lexicon's variants
};

/// Binary token x triphone matrix, stored as the sorted column list of each row.
struct FormMatrix {
    std::vector<FormToken> tokens;
    std::vector<std::vector<std::size_t>> rows;
    std::size_t columns = 0;

    Matrix dense() const;
    Matrix dense(std::span<const std::size_t> row_indices) const;
    TriphoneSet triphones(std::size_t row, const TriphoneSpace& space) const;
};

struct FormBuild {
    FormMatrix form;
    TriphoneSpace space;
};

/// One row per (word, pronunciation). Columns are numbered by first
/// occurrence over the tokens; triphones new in the same token are numbered
/// in lexicographic order.
FormBuild build_form_matrix(const PronLexicon& lexicon, std::span<const std::string> words);

struct PairInfoEntry {
    bool plural = false;
    std::optional<std::string> partner; // "-" in the file
};

using PairInfo = std::map<std::string, PairInfoEntry>;

/// Reads `word<TAB>{singular|plural}<TAB>partner-or-dash` lines.
PairInfo parse_pair_info(std::istream& in);
PairInfo load_pair_info(const std::filesystem::path& path);
void write_pair_info(std::ostream& out, const PairInfo& info);

enum class WordRole { singular, seen_stem_plural, unseen_stem_plural };
std::string_view role_name(WordRole role);

/// A plural is seen-stem when its partner singular is among the words.
std::map<std::string, WordRole> assign_roles(std::span<const std::string> words, const PairInfo& info);

enum class Part { train, test };

struct SplitSpec {
    std::vector<Part> parts; // one per form token
    std::uint64_t seed = 0;
    double fraction = 0.70;
};

/**
 * Singulars and unseen-stem plurals always train. Seen-stem plural types are
 * shuffled with the seed and round(fraction * count) of them train; the rest,
 * with all their pronunciations, are test items.
 */
SplitSpec make_split(const FormMatrix& form, const std::map<std::string, WordRole>& roles,
                     std::uint64_t seed, double fraction = 0.70);

std::vector<std::size_t> rows_in(const SplitSpec& split, Part part);

/// token_word, pronunciation, role, part
void write_split_tsv(std::ostream& out, const FormMatrix& form, const SplitSpec& split,
                     const std::map<std::string, WordRole>& roles);

/// F with C F ~= S, solved like the singular -> plural maps.
LinearMap fit_comprehension(const Matrix& c_train, const Matrix& s_train, double ridge = 0.0);

struct TokenOutcome {
    std::size_t row = 0; // form matrix row
    std::string gold;
    std::optional<RankResult> rank;
    std::string predicted; // top-1 candidate
};

struct EvalReport {
    Metric metric = Metric::pearson;
    std::vector<std::size_t> ns;
    std::vector<double> percent;
    std::vector<TokenOutcome> outcomes;
    std::size_t multi_pron_types = 0;      // evaluated types with >= 2 pronunciations
    std::size_t multi_pron_recognized = 0; // ... with at least one token at rank 1
};

/**
 * Predicts semantics for each listed form row and ranks the row's word among
 * the candidate types. A word outside the candidate list competes as one
 * extra candidate, so a test token chooses among the training types plus
 * itself.
 */
EvalReport evaluate_comprehension(const LinearMap& comprehension, const FormMatrix& form,
                                  std::span<const std::size_t> rows, const EmbeddingTable& semantics,
                                  const std::vector<WordId>& candidate_types, const PronLexicon& lexicon,
                                  Metric metric = Metric::pearson,
                                  std::vector<std::size_t> ns = {1, 2, 3, 4, 5}, unsigned threads = 1);

struct RecallOverlap {
    double recall = 0.0;
    double overlap = 0.0;
};

/// recall = |t & p| / |p|, overlap = |t & p| / min(|t|, |p|).
RecallOverlap recall_overlap(const TriphoneSet& target, const TriphoneSet& predicted);

enum class ErrorCategory { singular_confusion, similar_sounding, other };
std::string_view category_name(ErrorCategory category);

struct ErrorRecord {
    std::string token;
    std::string gold;
    std::string predicted;
    ErrorCategory category = ErrorCategory::other;
    double recall = 0.0;
    double overlap = 0.0;
};

/// Singular confusion when the prediction is the token's own singular;
/// otherwise similar-sounding when overlap > 0.3 and recall > 0.2. The
/// predicted word's best-overlapping pronunciation is compared.
ErrorRecord classify_error(const FormToken& token, const std::string& predicted, const PairInfo& info,
                           const PronLexicon& lexicon);

/// token,gold,predicted,category,recall,overlap
void write_errors_csv(std::ostream& out, const std::vector<ErrorRecord>& errors);

} // namespace plurvec
