#include "plurvec/dlcomp.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "plurvec/error.hpp"
#include "plurvec/parallel.hpp"

namespace plurvec {

namespace {

std::string strip_cr(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, '\t')) out.push_back(field);
    return out;
}

std::string token_label(const FormToken& t) { return t.word + "/" + std::to_string(t.pronunciation + 1); }

} // namespace

std::string normalize_phone(std::string_view phone) {
    std::string out(phone);
    while (!out.empty() && std::isdigit(static_cast<unsigned char>(out.back()))) out.pop_back();
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

void PronLexicon::add(const std::string& word, Pronunciation phones) {
    if (word.empty()) throw DataError("lexicon: empty word");
    if (phones.empty()) throw DataError("lexicon: '" + word + "' has an empty pronunciation");
    for (const auto& p : phones) {
        if (p.empty() || p == "#" || p.find_first_of(" \t-") != std::string::npos) {
            throw DataError("lexicon: bad phone symbol '" + p + "' for '" + word + "'");
        }
    }
    auto& variants = entries_[word];
    if (std::find(variants.begin(), variants.end(), phones) == variants.end()) {
        variants.push_back(std::move(phones));
    }
}

const std::vector<Pronunciation>* PronLexicon::find(const std::string& word) const {
    auto it = entries_.find(word);
    return it == entries_.end() ? nullptr : &it->second;
}

PronLexicon parse_lexicon(std::istream& in) {
    PronLexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw DataError("lexicon line " + std::to_string(lineno) + ": expected WORD<TAB>PHONES");
        }
        Pronunciation phones;
        std::istringstream ss(line.substr(tab + 1));
        std::string ph;
        while (ss >> ph) {
            auto norm = normalize_phone(ph);
            if (norm.empty()) throw DataError("lexicon line " + std::to_string(lineno) + ": empty phone");
            phones.push_back(std::move(norm));
        }
        lex.add(line.substr(0, tab), std::move(phones));
    }
    return lex;
}

PronLexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open lexicon '" + path.string() + "'");
    return parse_lexicon(in);
}

void write_lexicon(std::ostream& out, const PronLexicon& lexicon) {
    for (const auto& [word, variants] : lexicon.entries()) {
        for (const auto& v : variants) {
            out << word << '\t';
            for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
            out << '\n';
        }
    }
}

TriphoneSet triphones_of(std::span<const std::string> phones) {
    if (phones.empty()) throw UsageError("triphones of an empty phone list");
    std::vector<std::string_view> padded;
    padded.reserve(phones.size() + 2);
    padded.push_back("#");
    for (const auto& p : phones) padded.push_back(p);
    padded.push_back("#");
    TriphoneSet out;
    for (std::size_t i = 0; i + 2 < padded.size(); ++i) {
        std::string t;
        t.append(padded[i]).append("-").append(padded[i + 1]).append("-").append(padded[i + 2]);
        out.insert(std::move(t));
    }
    return out;
}

std::size_t TriphoneSpace::add(const std::string& triphone) {
    auto [it, fresh] = index_.emplace(triphone, names_.size());
    if (fresh) names_.push_back(triphone);
    return it->second;
}

std::optional<std::size_t> TriphoneSpace::find(const std::string& triphone) const {
    auto it = index_.find(triphone);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Matrix FormMatrix::dense() const {
    std::vector<std::size_t> all(rows.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return dense(all);
}

Matrix FormMatrix::dense(std::span<const std::size_t> row_indices) const {
    Matrix c = Matrix::Zero(static_cast<Eigen::Index>(row_indices.size()), static_cast<Eigen::Index>(columns));
    for (std::size_t i = 0; i < row_indices.size(); ++i) {
        for (std::size_t col : rows.at(row_indices[i])) {
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) = 1.0;
        }
    }
    return c;
}

TriphoneSet FormMatrix::triphones(std::size_t row, const TriphoneSpace& space) const {
    TriphoneSet out;
    for (std::size_t col : rows.at(row)) out.insert(space.names().at(col));
    return out;
}

FormBuild build_form_matrix(const PronLexicon& lexicon, std::span<const std::string> words) {
    FormBuild out;
    for (const auto& w : words) {
        const auto* variants = lexicon.find(w);
        if (!variants) throw DataError("no pronunciation for '" + w + "'");
        for (std::size_t v = 0; v < variants->size(); ++v) {
            const auto tri = triphones_of((*variants)[v]);
            std::vector<std::size_t> cols;
            cols.reserve(tri.size());
            for (const auto& t : tri) cols.push_back(out.space.add(t));
            std::sort(cols.begin(), cols.end());
            out.form.tokens.push_back({w, v});
            out.form.rows.push_back(std::move(cols));
        }
    }
    out.form.columns = out.space.size();
    return out;
}

PairInfo parse_pair_info(std::istream& in) {
    PairInfo info;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto f = split_tabs(line);
        if (f.size() != 3 || f[0].empty() || (f[1] != "singular" && f[1] != "plural") || f[2].empty()) {
            throw DataError("pair-info line " + std::to_string(lineno) +
                            ": expected word<TAB>{singular|plural}<TAB>partner-or-dash");
        }
        PairInfoEntry e;
        e.plural = f[1] == "plural";
        if (f[2] != "-") e.partner = f[2];
        if (!info.emplace(f[0], e).second) {
            throw DataError("pair-info line " + std::to_string(lineno) + ": duplicate word '" + f[0] + "'");
        }
    }
    return info;
}

PairInfo load_pair_info(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open pair info '" + path.string() + "'");
    return parse_pair_info(in);
}

void write_pair_info(std::ostream& out, const PairInfo& info) {
    for (const auto& [word, e] : info) {
        out << word << '\t' << (e.plural ? "plural" : "singular") << '\t' << e.partner.value_or("-") << '\n';
    }
}

std::string_view role_name(WordRole role) {
    switch (role) {
    case WordRole::singular: return "singular";
    case WordRole::seen_stem_plural: return "seen-stem";
    case WordRole::unseen_stem_plural: return "unseen-stem";
    }
    return "unknown";
}

std::map<std::string, WordRole> assign_roles(std::span<const std::string> words, const PairInfo& info) {
    std::unordered_set<std::string> present(words.begin(), words.end());
    std::map<std::string, WordRole> roles;
    for (const auto& w : words) {
        auto it = info.find(w);
        if (it == info.end()) throw DataError("no pair info for '" + w + "'");
        if (!it->second.plural) {
            roles[w] = WordRole::singular;
            continue;
        }
        const auto& partner = it->second.partner;
        bool seen = false;
        if (partner && present.count(*partner)) {
            auto pit = info.find(*partner);
            seen = pit != info.end() && !pit->second.plural;
        }
        roles[w] = seen ? WordRole::seen_stem_plural : WordRole::unseen_stem_plural;
    }
    return roles;
}

SplitSpec make_split(const FormMatrix& form, const std::map<std::string, WordRole>& roles,
                     std::uint64_t seed, double fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw UsageError("split fraction must lie in [0, 1]");
    std::vector<std::string> seen_types;
    {
        std::set<std::string> uniq;
        for (const auto& t : form.tokens) {
            auto it = roles.find(t.word);
            if (it == roles.end()) throw DataError("no role for '" + t.word + "'");
            if (it->second == WordRole::seen_stem_plural && uniq.insert(t.word).second) seen_types.push_back(t.word);
        }
    }
    if (seen_types.empty()) throw DataError("no seen-stem plurals to split");
    std::sort(seen_types.begin(), seen_types.end());
    std::mt19937_64 rng(seed);
    std::shuffle(seen_types.begin(), seen_types.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(seen_types.size())));
    const std::unordered_set<std::string> test_types(seen_types.begin() + static_cast<std::ptrdiff_t>(n_train),
                                                     seen_types.end());
    SplitSpec split;
    split.seed = seed;
    split.fraction = fraction;
    split.parts.reserve(form.tokens.size());
    for (const auto& t : form.tokens) split.parts.push_back(test_types.count(t.word) ? Part::test : Part::train);
    return split;
}

std::vector<std::size_t> rows_in(const SplitSpec& split, Part part) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < split.parts.size(); ++i) {
        if (split.parts[i] == part) out.push_back(i);
    }
    return out;
}

void write_split_tsv(std::ostream& out, const FormMatrix& form, const SplitSpec& split,
                     const std::map<std::string, WordRole>& roles) {
    for (std::size_t i = 0; i < form.tokens.size(); ++i) {
        const auto& t = form.tokens[i];
        out << t.word << '\t' << t.pronunciation + 1 << '\t' << role_name(roles.at(t.word)) << '\t'
            << (split.parts[i] == Part::train ? "train" : "test") << '\n';
    }
}

LinearMap fit_comprehension(const Matrix& c_train, const Matrix& s_train, double ridge) {
    return fit_linear_map(c_train, s_train, ridge);
}

EvalReport evaluate_comprehension(const LinearMap& comprehension, const FormMatrix& form,
                                  std::span<const std::size_t> rows, const EmbeddingTable& semantics,
                                  const std::vector<WordId>& candidate_types, const PronLexicon& lexicon,
                                  Metric metric, std::vector<std::size_t> ns, unsigned threads) {
    if (comprehension.d_in() != form.columns) throw UsageError("comprehension map does not match form columns");
    if (comprehension.d_out() != semantics.dim()) throw UsageError("comprehension map does not match semantics");
    const CandidatePool pool(semantics, metric, candidate_types);
    const Matrix c = form.dense(rows);
    const Matrix predicted = c * comprehension.matrix;

    std::vector<Prediction> predictions(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        predictions[i].target = semantics.require(form.tokens.at(rows[i]).word);
        predictions[i].vector = predicted.row(static_cast<Eigen::Index>(i)).transpose();
        predictions[i].admit_target = true;
    }
    const auto ranked = rank_predictions(pool, predictions, ns, threads);

    EvalReport report;
    report.metric = metric;
    report.ns = ns;
    report.percent = ranked.percent;
    report.outcomes.resize(rows.size());
    std::map<std::string, bool> multi;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& o = report.outcomes[i];
        const auto& r = ranked.outcomes[i];
        o.row = rows[i];
        o.gold = form.tokens[rows[i]].word;
        o.rank = r.rank;
        if (r.best) o.predicted = semantics.word(*r.best);
        const auto* variants = lexicon.find(o.gold);
        if (variants && variants->size() >= 2) {
            auto& hit = multi[o.gold];
            hit = hit || (o.rank && o.rank->rank == 1);
        }
    }
    report.multi_pron_types = multi.size();
    report.multi_pron_recognized = static_cast<std::size_t>(
        std::count_if(multi.begin(), multi.end(), [](const auto& kv) { return kv.second; }));
    return report;
}

RecallOverlap recall_overlap(const TriphoneSet& target, const TriphoneSet& predicted) {
    if (target.empty() || predicted.empty()) throw UsageError("recall/overlap of an empty triphone set");
    std::size_t shared = 0;
    for (const auto& t : predicted) shared += target.count(t);
    const double s = static_cast<double>(shared);
    return {s / static_cast<double>(predicted.size()),
            s / static_cast<double>(std::min(target.size(), predicted.size()))};
}

std::string_view category_name(ErrorCategory category) {
    switch (category) {
    case ErrorCategory::singular_confusion: return "singular-confusion";
    case ErrorCategory::similar_sounding: return "similar-sounding";
    case ErrorCategory::other: return "other";
    }
    return "unknown";
}

ErrorRecord classify_error(const FormToken& token, const std::string& predicted, const PairInfo& info,
                           const PronLexicon& lexicon) {
    if (predicted == token.word) throw UsageError("classify_error: prediction is correct");
    ErrorRecord rec;
    rec.token = token_label(token);
    rec.gold = token.word;
    rec.predicted = predicted;

    const auto* gold_variants = lexicon.find(token.word);
    const auto* pred_variants = lexicon.find(predicted);
    if (gold_variants && token.pronunciation < gold_variants->size() && pred_variants) {
        const auto target = triphones_of((*gold_variants)[token.pronunciation]);
        bool first = true;
        for (const auto& v : *pred_variants) {
            const auto ro = recall_overlap(target, triphones_of(v));
            if (first || ro.overlap > rec.overlap || (ro.overlap == rec.overlap && ro.recall > rec.recall)) {
                rec.recall = ro.recall;
                rec.overlap = ro.overlap;
                first = false;
            }
        }
    }

    auto it = info.find(token.word);
    const bool own_singular = it != info.end() && it->second.plural && it->second.partner == predicted;
    if (own_singular) {
        rec.category = ErrorCategory::singular_confusion;
    } else if (rec.overlap > 0.3 && rec.recall > 0.2) {
        rec.category = ErrorCategory::similar_sounding;
    } else {
        rec.category = ErrorCategory::other;
    }
    return rec;
}

void write_errors_csv(std::ostream& out, const std::vector<ErrorRecord>& errors) {
    out << "token,gold,predicted,category,recall,overlap\n";
    char buf[64];
    for (const auto& e : errors) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f", e.recall, e.overlap);
        out << e.token << ',' << e.gold << ',' << e.predicted << ',' << category_name(e.category) << ','
            << buf << '\n';
    }
}

} // namespace plurvec
