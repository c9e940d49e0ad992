#include <doctest.h>

#include <cmath>
#include <sstream>

#include "plurvec/error.hpp"
#include "plurvec/shifts.hpp"
#include "plurvec/synth.hpp"

using namespace plurvec;

TEST_SUITE("synth") {

TEST_CASE("noise-free shifts equal the class shifts") {
    SynthSpec spec;
    spec.classes = 5;
    spec.lexemes_per_class = 6;
    spec.dim = 10;
    spec.lexeme_noise = 0.0;
    spec.measurement_noise = 0.0;
    const auto data = gen_synth(spec);
    for (const auto& p : data.pair_set.pairs) {
        const Vector expected = data.true_shifts.at(*p.label);
        CHECK((shift_vector(p, data.table) - expected).norm() <= 1e-12);
    }
}

TEST_CASE("class averages recover the true shift within the sampling bound") {
    SynthSpec spec;
    spec.classes = 4;
    spec.lexemes_per_class = 100;
    spec.seed = 31;
    const auto data = gen_synth(spec);
    const auto classes = class_avg_shifts(data.pair_set, data.table);
    // Per-coordinate noise sd of one shift, from the norm-scaled generator.
    const double sd = std::sqrt(spec.lexeme_noise * spec.lexeme_noise +
                                spec.measurement_noise * spec.measurement_noise) /
                      std::sqrt(static_cast<double>(spec.dim));
    const double bound = 3 * sd / std::sqrt(static_cast<double>(spec.lexemes_per_class));
    for (const auto& [label, c] : classes.classes) {
        CHECK((c.shift - data.true_shifts.at(label)).cwiseAbs().maxCoeff() <= bound);
    }
}

TEST_CASE("seeded determinism") {
    SynthSpec a;
    a.classes = 3;
    a.lexemes_per_class = 5;
    a.dim = 6;
    auto b = a;
    b.seed = a.seed + 1;
    CHECK(gen_synth(a).table.vectors() == gen_synth(a).table.vectors());
    CHECK(gen_synth(a).table.vectors() != gen_synth(b).table.vectors());
    CHECK(gen_linear_synth({.pairs = 20, .dim = 4}).y == gen_linear_synth({.pairs = 20, .dim = 4}).y);
}

TEST_CASE("invalid specs") {
    SynthSpec s;
    s.classes = 0;
    CHECK_THROWS_AS(gen_synth(s), UsageError);
    s = {};
    s.lexeme_noise = -1;
    CHECK_THROWS_AS(gen_synth(s), UsageError);
}

TEST_CASE("random_orthogonal is orthogonal") {
    const Matrix q = random_orthogonal(12, 4);
    CHECK((q.transpose() * q - Matrix::Identity(12, 12)).norm() <= 1e-12);
}

TEST_CASE("synthetic lexicon follows plural allomorphy") {
    SynthSpec spec;
    spec.classes = 3;
    spec.lexemes_per_class = 30;
    const auto data = gen_synth(spec);
    const auto lex = gen_synth_lexicon(data.pairs, {.unseen_stems = 4, .variant_fraction = 0.0, .seed = 2});
    std::size_t missing = 0;
    for (std::size_t i = 0; i < data.pairs.size(); ++i) {
        const auto& p = data.pairs[i];
        const auto* pl = lex.lexicon.find(p.plural);
        REQUIRE(pl);
        CHECK(lex.pair_info.at(p.plural).plural);
        const auto* sg = lex.lexicon.find(p.singular);
        if (!sg) {
            ++missing;
            continue;
        }
        const auto& s = sg->front();
        const auto& q = pl->front();
        CHECK(std::equal(s.begin(), s.end(), q.begin()));
        const std::string last = s.back();
        const bool sibilant = last == "S" || last == "Z" || last == "SH" || last == "ZH" || last == "CH" || last == "JH";
        const bool voiceless = last == "P" || last == "T" || last == "K" || last == "F" || last == "TH";
        if (sibilant) {
            CHECK(q.size() == s.size() + 2);
            CHECK(q.back() == "Z");
        } else {
            CHECK(q.size() == s.size() + 1);
            CHECK(q.back() == (voiceless ? "S" : "Z"));
        }
    }
    CHECK(missing == 4);
}

}
