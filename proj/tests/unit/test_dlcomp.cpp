#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "plurvec/dlcomp.hpp"
#include "plurvec/error.hpp"
#include "plurvec/synth.hpp"

using namespace plurvec;

namespace {

std::vector<std::string> phones(const std::string& text) {
    std::istringstream s(text);
    std::vector<std::string> out;
    std::string p;
    while (s >> p) out.push_back(p);
    return out;
}

TriphoneSet tri(const std::string& text) {
    const auto p = phones(text);
    return triphones_of(p);
}

PronLexicon lexicon_of(const std::vector<std::pair<std::string, std::string>>& entries) {
    PronLexicon lex;
    for (const auto& [w, p] : entries) lex.add(w, phones(p));
    return lex;
}

PairInfo bribe_info() {
    PairInfo info;
    info["bribe"] = {false, std::string("bribes")};
    info["bribes"] = {true, std::string("bribe")};
    info["tribe"] = {false, std::string("tribes")};
    info["tribes"] = {true, std::string("tribe")};
    return info;
}

} // namespace

TEST_SUITE("dlcomp") {

TEST_CASE("triphones_of examples") {
    CHECK(tri("S IH T IY Z") == TriphoneSet{"#-S-IH", "S-IH-T", "IH-T-IY", "T-IY-Z", "IY-Z-#"});
    CHECK(tri("T UW") == TriphoneSet{"#-T-UW", "T-UW-#"});
    CHECK(tri("AE") == TriphoneSet{"#-AE-#"});
    CHECK_THROWS_AS(triphones_of(std::vector<std::string>{}), UsageError);
}

TEST_CASE("property: triphone set size and shape") {
    const auto lex = gen_synth_lexicon(gen_synth({}).pairs, {}).lexicon;
    for (const auto& [word, variants] : lex.entries()) {
        for (const auto& p : variants) {
            const auto t = triphones_of(p);
            CHECK(t.size() >= 1);
            CHECK(t.size() <= p.size() + 2);
            for (const auto& x : t) CHECK(std::count(x.begin(), x.end(), '-') == 2);
        }
    }
}

TEST_CASE("lexicon parsing strips stress and keeps variants") {
    std::istringstream in("cities\tS IH1 T IY0 Z\nreports\tR IH0 P AO1 R T S\nreports\tR IY0 P AO1 R T S\n");
    const auto lex = parse_lexicon(in);
    CHECK(lex.find("cities")->front() == phones("S IH T IY Z"));
    CHECK(lex.find("reports")->size() == 2);
    std::istringstream bad("word\t\n");
    CHECK_THROWS_AS(parse_lexicon(bad), DataError);
}

TEST_CASE("form matrix rows") {
    const auto lex = lexicon_of({{"bribes", "B R AY B Z"}, {"tribes", "T R AY B Z"}, {"ox", "AA K S"}});
    const std::vector<std::string> words{"bribes", "tribes", "ox"};
    const auto fb = build_form_matrix(lex, words);
    REQUIRE(fb.form.rows.size() == 3);
    std::vector<std::size_t> shared;
    std::set_intersection(fb.form.rows[0].begin(), fb.form.rows[0].end(), fb.form.rows[1].begin(),
                          fb.form.rows[1].end(), std::back_inserter(shared));
    CHECK(shared.size() == 3);
    std::set<std::string> names;
    for (auto c : shared) names.insert(fb.space.names()[c]);
    CHECK(names == std::set<std::string>{"R-AY-B", "AY-B-Z", "B-Z-#"});
    const Matrix c = fb.form.dense();
    CHECK(c.row(2).sum() == 3.0);
    for (std::size_t r = 0; r < 3; ++r) CHECK(fb.form.triphones(r, fb.space) == triphones_of(*lex.find(words[r])->begin()));
}

TEST_CASE("disjoint triphones give a block structure; variants give extra rows") {
    const auto lex = lexicon_of({{"a", "AA B"}, {"b", "CH D"}, {"c", "EH F G"}, {"c", "EH F K"}});
    const std::vector<std::string> words{"a", "b", "c"};
    const auto fb = build_form_matrix(lex, words);
    REQUIRE(fb.form.tokens.size() == 4);
    CHECK(fb.form.tokens[2].word == "c");
    CHECK(fb.form.tokens[3].word == "c");
    CHECK(fb.form.tokens[3].pronunciation == 1);
    const Matrix c = fb.form.dense();
    CHECK((c.topRows(2) * c.bottomRows(2).transpose()).isZero());
    CHECK(c(0, Eigen::all).dot(c(1, Eigen::all)) == 0.0);
    CHECK(c.rowwise().sum() == testutil::vec({2, 2, 3, 3}));
}

TEST_CASE("splits") {
    PronLexicon lex;
    PairInfo info;
    std::vector<std::string> words;
    const char* vowels[] = {"AA", "EH", "IY", "OW", "UW"};
    for (int i = 0; i < 10; ++i) {
        const std::string s = "s" + std::to_string(i), p = s + "z";
        lex.add(s, {"K", vowels[i % 5], "T" + std::to_string(i)});
        lex.add(p, {"K", vowels[i % 5], "T" + std::to_string(i), "S"});
        info[s] = {false, p};
        info[p] = {true, s};
        words.push_back(s);
        words.push_back(p);
    }
    lex.add("s0z", {"K", "AA", "D", "S"});
    lex.add("lone", {"L", "OW", "N", "Z"});
    info["lone"] = {true, std::string("lon")};
    words.push_back("lone");
    const auto fb = build_form_matrix(lex, words);
    const auto roles = assign_roles(words, info);
    CHECK(roles.at("lone") == WordRole::unseen_stem_plural);
    CHECK(roles.at("s3z") == WordRole::seen_stem_plural);
    const auto split = make_split(fb.form, roles, 11, 0.7);
    std::set<std::string> train_types, test_types;
    for (std::size_t r = 0; r < fb.form.tokens.size(); ++r) {
        const auto& w = fb.form.tokens[r].word;
        const auto role = roles.at(w);
        if (role != WordRole::seen_stem_plural) CHECK(split.parts[r] == Part::train);
        else (split.parts[r] == Part::train ? train_types : test_types).insert(w);
    }
    CHECK(train_types.size() == 7);
    CHECK(test_types.size() == 3);
    for (const auto& w : train_types) CHECK_FALSE(test_types.count(w));
    for (const auto& w : test_types) {
        const auto singular = *info.at(w).partner;
        CHECK(roles.at(singular) == WordRole::singular);
    }
    CHECK(make_split(fb.form, roles, 11, 0.7).parts == split.parts);
    // Both pronunciations of s0z share a part.
    std::set<Part> s0z;
    for (std::size_t r = 0; r < fb.form.tokens.size(); ++r)
        if (fb.form.tokens[r].word == "s0z") s0z.insert(split.parts[r]);
    CHECK(s0z.size() == 1);
}

TEST_CASE("comprehension on a disjoint lexicon trains perfectly") {
    const auto lex = lexicon_of({{"a", "AA B"}, {"b", "CH D"}, {"c", "EH F G"}, {"d", "HH JH"}});
    const std::vector<std::string> words{"a", "b", "c", "d"};
    const auto fb = build_form_matrix(lex, words);
    const auto sem = testutil::random_table(4, 6, 3, "x");
    const EmbeddingTable named(words, sem.vectors());
    const Matrix s = named.vectors().transpose();
    const auto f = fit_comprehension(fb.form.dense(), s);
    std::vector<std::size_t> rows{0, 1, 2, 3};
    std::vector<WordId> cands{0, 1, 2, 3};
    const auto report = evaluate_comprehension(f, fb.form, rows, named, cands, lex);
    CHECK(report.percent[0] == 100.0);
    for (std::size_t i = 1; i < report.percent.size(); ++i) CHECK(report.percent[i] >= report.percent[i - 1]);
}

TEST_CASE("comprehension ranks match rank_of per token") {
    const auto data = gen_synth({.classes = 4, .lexemes_per_class = 10, .dim = 12, .seed = 5});
    const auto lexdata = gen_synth_lexicon(data.pairs, {.seed = 6});
    const auto words = data.table.words();
    const auto fb = build_form_matrix(lexdata.lexicon, words);
    std::vector<std::size_t> rows(fb.form.tokens.size());
    std::iota(rows.begin(), rows.end(), 0);
    Matrix s(static_cast<Eigen::Index>(rows.size()), 12);
    for (auto r : rows) s.row(static_cast<Eigen::Index>(r)) = data.table.vector(data.table.require(fb.form.tokens[r].word)).transpose();
    const auto f = fit_comprehension(fb.form.dense(), s);
    std::vector<WordId> cands(data.table.size());
    std::iota(cands.begin(), cands.end(), 0);
    const auto report = evaluate_comprehension(f, fb.form, rows, data.table, cands, lexdata.lexicon);
    const Matrix pred = fb.form.dense() * f.matrix;
    for (std::size_t i = 0; i < rows.size(); i += 5) {
        const auto gold = data.table.require(fb.form.tokens[rows[i]].word);
        const auto expect = rank_of(Vector(pred.row(static_cast<Eigen::Index>(rows[i])).transpose()), gold, data.table,
                                    Metric::pearson);
        CHECK(report.outcomes[i].rank->rank == expect.rank);
    }
}

TEST_CASE("recall_overlap examples") {
    const auto a = tri("B R AY B Z"), b = tri("T R AY B Z");
    const auto r = recall_overlap(a, b);
    CHECK(r.recall == doctest::Approx(0.6));
    CHECK(r.overlap == doctest::Approx(0.6));
    CHECK(recall_overlap(a, b).overlap == recall_overlap(b, a).overlap);
    const auto same = recall_overlap(a, a);
    CHECK(same.recall == 1.0);
    CHECK(same.overlap == 1.0);
    const auto none = recall_overlap(a, tri("OW K"));
    CHECK(none.recall == 0.0);
    CHECK(none.overlap == 0.0);
}

TEST_CASE("classify_error examples") {
    const auto lex = lexicon_of({{"bribe", "B R AY B"}, {"bribes", "B R AY B Z"}, {"tribe", "T R AY B"},
                                 {"tribes", "T R AY B Z"}, {"yak", "Y AE K"}, {"ox", "AA K S"}});
    auto info = bribe_info();
    const FormToken token{"bribes", 0};
    CHECK(classify_error(token, "bribe", info, lex).category == ErrorCategory::singular_confusion);
    const auto similar = classify_error(token, "tribes", info, lex);
    CHECK(similar.category == ErrorCategory::similar_sounding);
    CHECK(similar.recall == doctest::Approx(0.6));
    CHECK(classify_error(token, "yak", info, lex).category == ErrorCategory::other);
}

TEST_CASE("pair info parsing") {
    std::istringstream in("cat\tsingular\tcats\ncats\tplural\tcat\nmice\tplural\t-\n");
    const auto info = parse_pair_info(in);
    CHECK(info.at("cats").plural);
    CHECK_FALSE(info.at("mice").partner.has_value());
    std::istringstream bad("cat\tdual\tcats\n");
    CHECK_THROWS_AS(parse_pair_info(bad), DataError);
}

}
