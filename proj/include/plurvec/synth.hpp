#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plurvec/dlcomp.hpp"
#include "plurvec/shifts.hpp"

namespace plurvec {

/**
 * Class-structured plural data:
 *
 *   singular = class centroid + lexeme spread
 *   plural   = singular + class shift + lexeme noise + measurement noise
 *
 * Every scale is the expected Euclidean length of the corresponding random
 * vector (each coordinate has SD scale / sqrt(dim)); class shifts have
 * length exactly class_shift_scale. shared_shift mixes a direction common to
 * all classes into every class shift (0 = independent directions).
 */
struct SynthSpec {
    std::size_t classes = 20;
    std::size_t lexemes_per_class = 50;
    std::size_t dim = 50;
    double centroid_scale = 2.0;
    double lexeme_spread = 0.5;
    double class_shift_scale = 1.0;
    double shared_shift = 0.0;
    double lexeme_noise = 0.05;
    double measurement_noise = 0.01;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SynthData {
    EmbeddingTable table;
    std::vector<WordPair> pairs; // labeled
    PairSet pair_set;
    std::map<std::string, Vector> true_shifts; // class label -> shift
};

/// Fully determined by the spec, seed included. Words are named
/// "c<class>w<lexeme>" with plural "c<class>w<lexeme>s"; classes "class<k>".
SynthData gen_synth(const SynthSpec& spec);

/// Paired data related by a linear map: Y = X B + noise, X ~ N(0, x_sd^2)
/// per coordinate, noise ~ N(noise_mean, noise_sd^2) per coordinate.
struct LinearSynthSpec {
    std::size_t pairs = 2000;
    std::size_t dim = 50;
    double x_sd = 0.2;
    double noise_mean = -0.001;
    double noise_sd = 0.08;
    std::optional<Matrix> mapping; // default 0.57 * I
    std::uint64_t seed = 1;
};

struct LinearSynthData {
    Matrix x;
    Matrix y;
    Matrix mapping;
    EmbeddingTable table; // "s<i>" rows are X, "p<i>" rows are Y
    PairSet pair_set;
};

LinearSynthData gen_linear_synth(const LinearSynthSpec& spec);

/// Random orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Matrix random_orthogonal(std::size_t dim, std::uint64_t seed);

/**
 * A pronunciation lexicon and pair info for the words of a synthetic pair
 * set. Stems are random ARPABET strings; plurals add S, Z or IH Z by the
 * English allomorphy of the final phone. The first unseen_stems pairs lose
 * their singular (plural only, unseen stem); variant_fraction of the words
 * get a second pronunciation with one vowel changed.
 */
struct SynthLexiconSpec {
    std::size_t min_phones = 3;
    std::size_t max_phones = 6;
    std::size_t unseen_stems = 0;
    double variant_fraction = 0.05;
    std::uint64_t seed = 1;
};

struct SynthLexicon {
    PronLexicon lexicon;
    PairInfo pair_info;
};

SynthLexicon gen_synth_lexicon(const std::vector<WordPair>& pairs, const SynthLexiconSpec& spec);

} // namespace plurvec
