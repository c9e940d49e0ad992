#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "plurvec/error.hpp"
#include "plurvec/knn.hpp"

using namespace plurvec;
using testutil::vec;

namespace {

EmbeddingTable abc() { return testutil::table({{"a", vec({1, 0})}, {"b", vec({0, 1})}, {"c", vec({1, 1})}}); }

std::vector<std::string> words_of(const NeighborList& list, const EmbeddingTable& t) {
    std::vector<std::string> out;
    for (const auto& e : list.entries) out.push_back(t.word(e.id));
    return out;
}

// Full sort oracle with the documented tie rule.
std::vector<WordId> full_sort(const EmbeddingTable& t, const Vector& q, Metric metric) {
    std::vector<double> s(t.size());
    for (WordId i = 0; i < t.size(); ++i) {
        const Vector v = t.vector(i);
        switch (metric) {
        case Metric::cosine: s[i] = cosine(q, v); break;
        case Metric::euclidean: s[i] = euclidean(q, v); break;
        case Metric::pearson: {
            const Vector a = q.array() - q.mean(), b = v.array() - v.mean();
            s[i] = cosine(a, b);
            break;
        }
        }
    }
    std::vector<WordId> ids(t.size());
    std::iota(ids.begin(), ids.end(), WordId{0});
    std::sort(ids.begin(), ids.end(), [&](WordId x, WordId y) {
        if (std::abs(s[x] - s[y]) > 1e-12) return metric == Metric::euclidean ? s[x] < s[y] : s[x] > s[y];
        return t.word(x) < t.word(y);
    });
    return ids;
}

} // namespace

TEST_SUITE("knn") {

TEST_CASE("top_k examples") {
    const auto t = abc();
    CHECK(words_of(top_k(vec({1, 1}), t, 3, Metric::cosine), t) == std::vector<std::string>{"c", "a", "b"});
    CHECK(words_of(top_k(vec({0.9, 0.1}), t, 1, Metric::cosine), t) == std::vector<std::string>{"a"});
    CHECK(words_of(top_k(vec({1, 1}), t, 1, Metric::cosine, {t.require("c")}), t) == std::vector<std::string>{"a"});
    CHECK_THROWS_AS(top_k(vec({1, 1}), t, 0, Metric::cosine), UsageError);
    CHECK_THROWS_AS(top_k(vec({1, 1}), t, 4, Metric::cosine), UsageError);
    CHECK_THROWS_AS(top_k(vec({1, 1, 1}), t, 1, Metric::cosine), UsageError);
}

TEST_CASE("rank_of examples") {
    const auto t = testutil::table({{"a", vec({1, 0})}, {"b", vec({0, 1})}});
    CHECK(rank_of(vec({0.6, 0.8}), t.require("a"), t, Metric::cosine).rank == 2);
    CHECK(rank_of(vec({0, 1}), t.require("b"), t, Metric::cosine).rank == 1);
    const auto r = rank_of(vec({0.6, 0.8}), t.require("a"), t, Metric::euclidean);
    CHECK(r.candidate_count == 2);
    CHECK(r.rank >= 1);
}

TEST_CASE("rank_of with an extra candidate") {
    const auto t = testutil::table({{"a", vec({1, 0})}, {"b", vec({0, 1})}});
    std::vector<ExtraCandidate> extra{{"x", vec({0.6, 0.8})}};
    const auto r = rank_of(vec({0.6, 0.8}), t.size(), t, Metric::cosine, extra);
    CHECK(r.rank == 1);
    CHECK(r.candidate_count == 3);
    std::vector<ExtraCandidate> dup{{"a", vec({1, 1})}};
    CHECK_THROWS_AS(rank_of(vec({1, 0}), 0, t, Metric::cosine, dup), UsageError);
}

TEST_CASE("topn_table examples") {
    std::vector<RankResult> r{{0, 1, 3}, {1, 1, 3}, {2, 3, 3}};
    const std::vector<std::size_t> ns{1, 2, 3};
    const auto p = topn_table(r, ns);
    CHECK(p[0] == doctest::Approx(66.6667).epsilon(1e-4));
    CHECK(p[1] == doctest::Approx(66.6667).epsilon(1e-4));
    CHECK(p[2] == 100.0);
    std::vector<RankResult> ones{{0, 1, 5}, {1, 1, 5}};
    for (double x : topn_table(ones, ns)) CHECK(x == 100.0);
    std::vector<RankResult> five{{0, 5, 9}};
    const std::vector<std::size_t> n1{1};
    CHECK(topn_table(five, n1)[0] == 0.0);
}

TEST_CASE("property: top_k and rank_of agree with a full sort") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto t = testutil::random_table(50, 6, seed);
        const Vector q = testutil::random_matrix(6, 1, seed + 100).col(0);
        for (Metric m : {Metric::cosine, Metric::euclidean, Metric::pearson}) {
            const auto oracle = full_sort(t, q, m);
            const auto got = top_k(q, t, t.size(), m);
            for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(got.entries[i].id == oracle[i]);
            for (std::size_t i = 0; i < oracle.size(); i += 7) CHECK(rank_of(q, oracle[i], t, m).rank == i + 1);
        }
    }
}

TEST_CASE("property: pearson equals cosine of centered vectors") {
    const auto m = testutil::random_matrix(9, 40, 3);
    std::vector<std::string> words;
    for (int i = 0; i < 40; ++i) words.push_back("w" + std::to_string(i));
    Matrix centered = m;
    for (Eigen::Index j = 0; j < m.cols(); ++j) centered.col(j).array() -= m.col(j).mean();
    const EmbeddingTable raw(words, m), cen(words, centered);
    const Vector q = testutil::random_matrix(9, 1, 8).col(0);
    const Vector qc = q.array() - q.mean();
    const auto pearson = CandidatePool(raw, Metric::pearson).scores(q);
    const auto cos = CandidatePool(cen, Metric::cosine).scores(qc);
    for (std::size_t i = 0; i < pearson.size(); ++i) CHECK(std::abs(pearson[i] - cos[i]) <= 1e-12);
}

TEST_CASE("property: top-n is monotone and results are thread-independent") {
    const auto t = testutil::random_table(120, 5, 21);
    const CandidatePool pool(t, Metric::cosine);
    std::vector<Prediction> preds;
    for (WordId i = 0; i < 60; ++i) {
        Prediction p;
        p.target = i;
        p.vector = Vector(t.vector(i) + 0.8 * testutil::random_matrix(5, 1, i).col(0));
        preds.push_back(p);
    }
    const std::vector<std::size_t> ns{1, 2, 5, 10, 50};
    const auto one = rank_predictions(pool, preds, ns, 1);
    const auto many = rank_predictions(pool, preds, ns, 4);
    for (std::size_t i = 1; i < one.percent.size(); ++i) CHECK(one.percent[i] >= one.percent[i - 1]);
    CHECK(one.percent == many.percent);
    for (std::size_t i = 0; i < preds.size(); ++i) CHECK(one.outcomes[i].rank->rank == many.outcomes[i].rank->rank);
}

TEST_CASE("failed predictions count as misses") {
    const auto t = abc();
    const CandidatePool pool(t, Metric::cosine);
    std::vector<Prediction> preds(2);
    preds[0].target = 0;
    preds[0].vector = vec({1, 0});
    preds[1].target = 1;
    preds[1].failure = "no class";
    const std::vector<std::size_t> ns{1, 3};
    const auto r = rank_predictions(pool, preds, ns);
    CHECK(r.failures == 1);
    CHECK(r.percent == std::vector<double>{50.0, 50.0});
    CHECK(r.outcomes[1].failure == "no class");
}

}
