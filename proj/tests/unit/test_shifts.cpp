#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "helpers.hpp"
#include "plurvec/error.hpp"
#include "plurvec/shifts.hpp"
#include "plurvec/stats.hpp"
#include "plurvec/synth.hpp"

using namespace plurvec;
using testutil::vec;

namespace {

// n random labeled pairs over `classes` classes.
std::pair<EmbeddingTable, PairSet> random_pairs(std::size_t n, std::size_t dim, std::size_t classes,
                                                std::uint64_t seed, const Vector* plural_offset = nullptr) {
    const Matrix sg = testutil::random_matrix(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n), seed);
    Matrix pl = testutil::random_matrix(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n), seed + 1);
    if (plural_offset) pl.colwise() += *plural_offset;
    std::vector<std::string> words;
    Matrix all(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(2 * n));
    std::vector<WordPair> wp;
    for (std::size_t i = 0; i < n; ++i) {
        words.push_back("s" + std::to_string(i));
        words.push_back("p" + std::to_string(i));
        all.col(static_cast<Eigen::Index>(2 * i)) = sg.col(static_cast<Eigen::Index>(i));
        all.col(static_cast<Eigen::Index>(2 * i + 1)) = pl.col(static_cast<Eigen::Index>(i));
        wp.push_back({words[2 * i], words[2 * i + 1], "k" + std::to_string(i % classes)});
    }
    EmbeddingTable t(words, all);
    auto set = bind_pairs(wp, t).set;
    return {std::move(t), std::move(set)};
}

double rel(const Vector& a, const Vector& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

} // namespace

TEST_SUITE("shifts") {

TEST_CASE("pairs file parsing") {
    std::istringstream in("cat\tcats\tanimal\n\ndog\tdogs\n");
    const auto p = parse_pairs(in);
    REQUIRE(p.size() == 2);
    CHECK(p[0].label == std::optional<std::string>("animal"));
    CHECK_FALSE(p[1].label.has_value());
    std::istringstream bad("cat\n");
    CHECK_THROWS_AS(parse_pairs(bad), DataError);
    std::istringstream empty_label("cat\tcats\t\n");
    CHECK_THROWS_AS(parse_pairs(empty_label), DataError);
}

TEST_CASE("binding reports misses and rejects duplicate pairs") {
    const auto t = testutil::table({{"cat", vec({0, 0})}, {"cats", vec({0, 2})}});
    const auto b = bind_pairs({{"cat", "cats", {}}, {"dog", "dogs", {}}}, t);
    CHECK(b.set.size() == 1);
    REQUIRE(b.misses.size() == 2);
    CHECK(b.misses[0].word == "dog");
    CHECK(b.misses[1].word == "dogs");
    CHECK(b.misses[0].pair_index == 1);
    CHECK_THROWS_AS(bind_pairs({{"cat", "cats", {}}, {"cat", "cats", {}}}, t), DataError);
}

TEST_CASE("shift_vector examples") {
    const auto t = testutil::table({{"a", vec({0, 0})}, {"as", vec({0, 2})}, {"b", vec({1, 2})},
                                    {"bs", vec({3, 1})}, {"c", vec({4, 4})}, {"cs", vec({4, 4})}});
    const auto p = testutil::pairs(t, {{"a", "as", ""}, {"b", "bs", ""}, {"c", "cs", ""}});
    CHECK(shift_vector(p.pairs[0], t) == vec({0, 2}));
    CHECK(shift_vector(p.pairs[1], t) == vec({2, -1}));
    CHECK(shift_vector(p.pairs[2], t).isZero());
}

TEST_CASE("avg_shift examples") {
    const auto t = testutil::table({{"a", vec({0, 0})}, {"as", vec({0, 2})}, {"b", vec({2, 0})}, {"bs", vec({2, 4})}});
    const auto both = testutil::pairs(t, {{"a", "as", ""}, {"b", "bs", ""}});
    CHECK(avg_shift(both, t).isApprox(vec({0, 3})));
    const auto one = testutil::pairs(t, {{"b", "bs", ""}});
    CHECK(avg_shift(one, t) == vec({0, 4}));
    CHECK_THROWS_AS(avg_shift(PairSet{}, t), UsageError);
}

TEST_CASE("class_avg_shifts examples") {
    const auto t = testutil::table({{"a", vec({0, 0})}, {"as", vec({1, 0})}, {"b", vec({0, 2})}, {"bs", vec({1, 2})},
                                    {"c", vec({5, 5})}, {"cs", vec({5, 7})}});
    const auto p = testutil::pairs(t, {{"a", "as", "A"}, {"b", "bs", "A"}, {"c", "cs", "B"}});
    const auto classes = class_avg_shifts(p, t, 1);
    REQUIRE(classes.classes.size() == 2);
    CHECK(classes.find("A")->shift.isApprox(vec({1, 0})));
    CHECK(classes.find("A")->count == 2);
    CHECK(classes.find("B")->shift.isApprox(vec({0, 2})));
    const auto strict = class_avg_shifts(p, t, 5);
    CHECK(strict.find("A")->under_threshold);
    CHECK(strict.under_threshold() == std::vector<std::string>{"A", "B"});
    const auto unlabeled = testutil::pairs(t, {{"a", "as", ""}});
    CHECK_THROWS_AS(class_avg_shifts(unlabeled, t), DataError);
}

TEST_CASE("shift_stats on a zero shift") {
    const auto t = testutil::table({{"a", vec({3, 4})}, {"as", vec({3, 4})}});
    const auto p = testutil::pairs(t, {{"a", "as", ""}});
    const auto s = shift_stats(p, t, AxisRef::last(2));
    REQUIRE(s.records.size() == 1);
    CHECK(s.records[0].singular_length == 5.0);
    CHECK(s.records[0].plural_length == 5.0);
    CHECK(s.records[0].shift_length == 0.0);
    CHECK_FALSE(s.records[0].shift_angle.has_value());
    CHECK(s.undefined_angles == 1);
    CHECK(s.shift_angle.n == 0);
}

TEST_CASE("shift_stats on generator data recovers the shift length") {
    SynthSpec spec;
    spec.classes = 1;
    spec.lexemes_per_class = 200;
    spec.seed = 9;
    const auto data = gen_synth(spec);
    const auto s = shift_stats(data.pair_set, data.table, AxisRef::last(spec.dim));
    CHECK(s.shift_length.median == doctest::Approx(data.true_shifts.begin()->second.norm()).epsilon(0.02));
    std::vector<double> lengths;
    for (const auto& r : s.records) lengths.push_back(r.shift_length);
    std::sort(lengths.begin(), lengths.end());
    CHECK(s.shift_length.median == (lengths[99] + lengths[100]) / 2);
    for (const auto& r : s.records) {
        CHECK(*r.singular_angle >= 0.0);
        CHECK(*r.singular_angle <= 180.0);
    }
}

TEST_CASE("property: difference of means equals mean of differences") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto [t, p] = random_pairs(100, 12, 4, seed * 10);
        CHECK(rel(avg_shift(p, t), mean_of_shifts(p, t)) <= 1e-12);
    }
}

TEST_CASE("property: translating plurals translates the average shift") {
    const Vector c = testutil::random_matrix(6, 1, 77).col(0);
    const auto [t0, p0] = random_pairs(60, 6, 3, 5);
    const auto [t1, p1] = random_pairs(60, 6, 3, 5, &c);
    CHECK(rel(avg_shift(p1, t1), Vector(avg_shift(p0, t0) + c)) <= 1e-12);
}

TEST_CASE("property: class averages are restricted averages and weight back to the global one") {
    const auto [t, p] = random_pairs(90, 5, 4, 31);
    const auto classes = class_avg_shifts(p, t, 1);
    Vector weighted = Vector::Zero(5);
    for (const auto& [label, c] : classes.classes) {
        PairSet only;
        for (const auto& pr : p.pairs)
            if (pr.label == label) only.pairs.push_back(pr);
        CHECK(rel(c.shift, avg_shift(only, t)) <= 1e-12);
        weighted += static_cast<double>(c.count) * c.shift;
    }
    weighted /= static_cast<double>(p.size());
    CHECK(rel(weighted, avg_shift(p, t)) <= 1e-12);
}

TEST_CASE("record CSV has one row per pair") {
    const auto [t, p] = random_pairs(7, 3, 2, 4);
    const auto s = shift_stats(p, t, AxisRef(3, 0));
    std::ostringstream out;
    write_shift_records_csv(out, s, t);
    const auto text = out.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 8);
}

}
