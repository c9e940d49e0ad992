#include "plurvec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "plurvec/error.hpp"

namespace plurvec {

namespace {

Vector gaussian(std::mt19937_64& rng, std::size_t dim, double sd) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = sd * nd(rng);
    return v;
}

Vector gaussian_scaled(std::mt19937_64& rng, std::size_t dim, double length) {
    return gaussian(rng, dim, length / std::sqrt(static_cast<double>(dim)));
}

Vector unit(std::mt19937_64& rng, std::size_t dim) {
    for (;;) {
        Vector v = gaussian(rng, dim, 1.0);
        const double n = v.norm();
        if (n > 0.0) return v / n;
    }
}

std::string numbered(const char* prefix, std::size_t i, int width) {
    std::string digits_text = std::to_string(i);
    if (digits_text.size() < static_cast<std::size_t>(width)) digits_text.insert(0, width - digits_text.size(), '0');
    return prefix + digits_text;
}

int digits(std::size_t n) {
    int d = 1;
    while (n >= 10) {
        n /= 10;
        ++d;
    }
    return d;
}

} // namespace

void SynthSpec::validate() const {
    if (classes == 0 || lexemes_per_class == 0) throw UsageError("synth: counts must be >= 1");
    if (dim == 0) throw UsageError("synth: dim must be >= 1");
    for (double s : {centroid_scale, lexeme_spread, class_shift_scale, lexeme_noise, measurement_noise}) {
        if (!(s >= 0.0)) throw UsageError("synth: scales must be >= 0");
    }
    if (!(shared_shift >= 0.0 && shared_shift <= 1.0)) throw UsageError("synth: shared_shift must lie in [0, 1]");
}

SynthData gen_synth(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    const Vector common = unit(rng, spec.dim);
    const int cw = digits(spec.classes - 1);
    const int lw = digits(spec.lexemes_per_class - 1);

    std::vector<std::string> words;
    const std::size_t n = spec.classes * spec.lexemes_per_class;
    Matrix vectors(static_cast<Eigen::Index>(spec.dim), static_cast<Eigen::Index>(2 * n));
    std::vector<WordPair> pairs;
    std::map<std::string, Vector> true_shifts;

    Eigen::Index col = 0;
    for (std::size_t c = 0; c < spec.classes; ++c) {
        const std::string label = numbered("class", c, cw);
        const Vector centroid = gaussian_scaled(rng, spec.dim, spec.centroid_scale);
        Vector direction = spec.shared_shift * common + (1.0 - spec.shared_shift) * unit(rng, spec.dim);
        if (direction.norm() == 0.0) direction = common;
        const Vector shift = spec.class_shift_scale * direction.normalized();
        true_shifts[label] = shift;
        for (std::size_t l = 0; l < spec.lexemes_per_class; ++l) {
            const std::string sg = numbered("c", c, cw) + numbered("w", l, lw);
            const Vector v_sg = centroid + gaussian_scaled(rng, spec.dim, spec.lexeme_spread);
            const Vector v_pl = v_sg + shift + gaussian_scaled(rng, spec.dim, spec.lexeme_noise) +
                                gaussian_scaled(rng, spec.dim, spec.measurement_noise);
            words.push_back(sg);
            vectors.col(col++) = v_sg;
            words.push_back(sg + "s");
            vectors.col(col++) = v_pl;
            pairs.push_back({sg, sg + "s", label});
        }
    }
    EmbeddingTable table(std::move(words), std::move(vectors));
    auto bound = bind_pairs(pairs, table, "synth");
    return {std::move(table), std::move(pairs), std::move(bound.set), std::move(true_shifts)};
}

Matrix random_orthogonal(std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix g(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = nd(rng);
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        if (r(j, j) < 0) q.col(j) *= -1.0;
    }
    return q;
}

LinearSynthData gen_linear_synth(const LinearSynthSpec& spec) {
    if (spec.pairs == 0 || spec.dim == 0) throw UsageError("linear synth: sizes must be >= 1");
    if (!(spec.x_sd > 0.0) || !(spec.noise_sd >= 0.0)) throw UsageError("linear synth: bad scales");
    const auto d = static_cast<Eigen::Index>(spec.dim);
    const auto t = static_cast<Eigen::Index>(spec.pairs);
    Matrix b = spec.mapping.value_or(Matrix(0.57 * Matrix::Identity(d, d)));
    if (b.rows() != d || b.cols() != d) throw UsageError("linear synth: mapping must be dim x dim");

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix x(t, d), noise(t, d);
    for (Eigen::Index i = 0; i < t; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = spec.x_sd * nd(rng);
    }
    for (Eigen::Index i = 0; i < t; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) noise(i, j) = spec.noise_mean + spec.noise_sd * nd(rng);
    }
    Matrix y = x * b + noise;

    const int w = digits(spec.pairs - 1);
    std::vector<std::string> words;
    std::vector<WordPair> pairs;
    Matrix vectors(d, 2 * t);
    for (Eigen::Index i = 0; i < t; ++i) {
        const auto s = numbered("s", static_cast<std::size_t>(i), w);
        const auto p = numbered("p", static_cast<std::size_t>(i), w);
        words.push_back(s);
        words.push_back(p);
        vectors.col(2 * i) = x.row(i).transpose();
        vectors.col(2 * i + 1) = y.row(i).transpose();
        pairs.push_back({s, p, std::nullopt});
    }
    EmbeddingTable table(std::move(words), std::move(vectors));
    auto bound = bind_pairs(pairs, table, "linear-synth");
    return {std::move(x), std::move(y), std::move(b), std::move(table), std::move(bound.set)};
}

namespace {

const std::vector<std::string>& consonants() {
    static const std::vector<std::string> c{"B", "CH", "D", "DH", "F", "G", "HH", "JH", "K", "L", "M", "N",
                                            "NG", "P", "R", "S", "SH", "T", "TH", "V", "W", "Y", "Z", "ZH"};
    return c;
}

const std::vector<std::string>& vowels() {
    static const std::vector<std::string> v{"AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER",
                                            "EY", "IH", "IY", "OW", "OY", "UH", "UW"};
    return v;
}

bool is_vowel(const std::string& p) {
    return std::find(vowels().begin(), vowels().end(), p) != vowels().end();
}

Pronunciation plural_of(const Pronunciation& stem) {
    static const std::set<std::string> sibilant{"S", "Z", "SH", "ZH", "CH", "JH"};
    static const std::set<std::string> voiceless{"P", "T", "K", "F", "TH"};
    Pronunciation pl = stem;
    if (sibilant.count(stem.back())) {
        pl.push_back("IH");
        pl.push_back("Z");
    } else if (voiceless.count(stem.back())) {
        pl.push_back("S");
    } else {
        pl.push_back("Z");
    }
    return pl;
}

} // namespace

SynthLexicon gen_synth_lexicon(const std::vector<WordPair>& pairs, const SynthLexiconSpec& spec) {
    if (spec.min_phones == 0 || spec.max_phones < spec.min_phones) throw UsageError("synth lexicon: bad phone range");
    if (spec.unseen_stems > pairs.size()) throw UsageError("synth lexicon: more unseen stems than pairs");
    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<std::size_t> len(spec.min_phones, spec.max_phones);
    std::uniform_int_distribution<std::size_t> pick_c(0, consonants().size() - 1);
    std::uniform_int_distribution<std::size_t> pick_v(0, vowels().size() - 1);
    std::bernoulli_distribution variant(spec.variant_fraction);

    auto random_stem = [&] {
        Pronunciation p;
        const std::size_t n = len(rng);
        bool vowel = std::bernoulli_distribution(0.3)(rng);
        for (std::size_t i = 0; i < n; ++i) {
            p.push_back(vowel ? vowels()[pick_v(rng)] : consonants()[pick_c(rng)]);
            vowel = !vowel;
        }
        return p;
    };
    auto vary = [&](const Pronunciation& p) {
        Pronunciation q = p;
        for (auto& ph : q) {
            if (is_vowel(ph)) {
                std::string other;
                do other = vowels()[pick_v(rng)]; while (other == ph);
                ph = other;
                break;
            }
        }
        return q;
    };

    SynthLexicon out;
    std::set<Pronunciation> used;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        Pronunciation stem;
        do stem = random_stem(); while (used.count(stem) || used.count(plural_of(stem)));
        const Pronunciation pl = plural_of(stem);
        used.insert(stem);
        used.insert(pl);

        const bool unseen = i < spec.unseen_stems;
        if (!unseen) {
            out.lexicon.add(pairs[i].singular, stem);
            out.pair_info[pairs[i].singular] = {false, pairs[i].plural};
        }
        out.lexicon.add(pairs[i].plural, pl);
        out.pair_info[pairs[i].plural] = {true, pairs[i].singular};

        if (variant(rng)) {
            const Pronunciation alt = vary(stem);
            if (!used.count(alt) && !used.count(plural_of(alt))) {
                used.insert(alt);
                used.insert(plural_of(alt));
                if (!unseen) out.lexicon.add(pairs[i].singular, alt);
                out.lexicon.add(pairs[i].plural, plural_of(alt));
            }
        }
    }
    return out;
}

} // namespace plurvec
