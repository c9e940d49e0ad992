#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "plurvec/error.hpp"
#include "plurvec/vecspace.hpp"

using namespace plurvec;
using testutil::vec;

TEST_SUITE("vecspace") {

TEST_CASE("load parses the word2vec text layout") {
    std::istringstream in("2 3\na 1 0 0\nb 0 1 0\n");
    const auto t = parse_embeddings(in);
    CHECK(t.dim() == 3);
    CHECK(t.words() == std::vector<std::string>{"a", "b"});
    CHECK(t.vector(t.require("b"))[1] == 1.0);
}

TEST_CASE("load rejects duplicates, bad arity, counts and dims") {
    std::istringstream dup("1 2\na 1 0\na 0 1\n");
    CHECK_THROWS_AS(parse_embeddings(dup), DataError);
    std::istringstream arity("2 3\na 1 0\nb 0 1 0\n");
    CHECK_THROWS_AS(parse_embeddings(arity), DataError);
    std::istringstream count("3 2\na 1 0\nb 0 1\n");
    CHECK_THROWS_AS(parse_embeddings(count), DataError);
    std::istringstream dim("1 2\na 1 0\n");
    CHECK_THROWS_AS(parse_embeddings(dim, 3), DataError);
    std::istringstream junk("1 2\na 1 x\n");
    CHECK_THROWS_AS(parse_embeddings(junk), DataError);
    std::istringstream nan("1 2\na 1 nan\n");
    CHECK_THROWS_AS(parse_embeddings(nan), DataError);
}

TEST_CASE("lookup misses are explicit") {
    const auto t = testutil::table({{"a", vec({1, 0})}});
    CHECK_FALSE(t.lookup("zz").has_value());
    CHECK_THROWS_AS(t.require("zz"), DataError);
}

TEST_CASE("cosine examples") {
    CHECK(cosine(vec({3, -2}), vec({3, -2})) == doctest::Approx(1.0));
    CHECK(cosine(vec({1, 0}), vec({0, 1})) == 0.0);
    CHECK(cosine(vec({1, 1}), vec({1, 0})) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
    CHECK_THROWS_AS(cosine(vec({0, 0}), vec({1, 0})), UsageError);
    CHECK_THROWS_AS(cosine(vec({1, 0, 0}), vec({1, 0})), UsageError);
    CHECK(cosine(vec({1e8, 1}), vec({1e8, 1})) <= 1.0);
}

TEST_CASE("euclidean and norm examples") {
    CHECK(euclidean(vec({2, 7}), vec({2, 7})) == 0.0);
    CHECK(euclidean(vec({0, 0}), vec({3, 4})) == 5.0);
    CHECK(euclidean(vec({1, 1}), vec({2, 2})) == doctest::Approx(std::sqrt(2.0)));
    CHECK(norm(vec({0, 0, 0})) == 0.0);
    CHECK(norm(vec({3, 4})) == 5.0);
    CHECK(norm(vec({0, 0, 1})) == 1.0);
}

TEST_CASE("angle_to_axis examples") {
    const auto axis = AxisRef::last(3);
    CHECK(angle_to_axis(vec({0, 0, 1}), axis) == 0.0);
    CHECK(angle_to_axis(vec({1, 2, 0}), axis) == doctest::Approx(90.0));
    CHECK(angle_to_axis(vec({0, 1, 1}), axis) == doctest::Approx(45.0));
    CHECK(angle_to_axis(vec({0, 0, -1}), axis) == doctest::Approx(180.0));
    CHECK_THROWS_AS(angle_to_axis(vec({0, 0, 0}), axis), UsageError);
    CHECK_THROWS_AS(AxisRef(3, 3), UsageError);
}

TEST_CASE("mean_vector examples") {
    std::vector<Vector> two{vec({0, 0}), vec({2, 2})};
    CHECK(mean_vector(two).isApprox(vec({1, 1})));
    std::vector<Vector> one{vec({4, -1})};
    CHECK(mean_vector(one) == vec({4, -1}));
    std::vector<Vector> opposite{vec({1.5, -2}), vec({-1.5, 2})};
    CHECK(mean_vector(opposite).isZero());
    CHECK_THROWS_AS(mean_vector(std::vector<Vector>{}), UsageError);
}

TEST_CASE("property: cosine symmetry and scale invariance; angle scale invariance") {
    const auto m = testutil::random_matrix(8, 200, 11);
    const auto axis = AxisRef(8, 2);
    for (Eigen::Index i = 0; i + 1 < m.cols(); i += 2) {
        const Vector u = m.col(i), v = m.col(i + 1);
        CHECK(cosine(u, v) == cosine(v, u));
        const double alpha = 0.1 + static_cast<double>(i);
        CHECK(std::abs(cosine(alpha * u, v) - cosine(u, v)) <= 1e-12);
        CHECK(std::abs(angle_to_axis(alpha * u, axis) - angle_to_axis(u, axis)) <= 1e-9);
        CHECK(norm(u - v) == euclidean(u, v));
    }
}

TEST_CASE("property: save/load round trip is text-identical") {
    const auto t = testutil::random_table(30, 7, 5);
    std::ostringstream first;
    write_embeddings(first, t);
    std::istringstream in(first.str());
    const auto back = parse_embeddings(in);
    CHECK(back.vectors() == t.vectors());
    std::ostringstream second;
    write_embeddings(second, back);
    CHECK(first.str() == second.str());
}

TEST_CASE("normalized gives unit vectors") {
    const auto t = testutil::random_table(10, 4, 2).normalized();
    for (WordId i = 0; i < t.size(); ++i) CHECK(norm(t.vector(i)) == doctest::Approx(1.0).epsilon(1e-14));
}

}
