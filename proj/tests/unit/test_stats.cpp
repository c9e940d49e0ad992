#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "plurvec/error.hpp"
#include "plurvec/stats.hpp"

using namespace plurvec;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed, double shift = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(shift, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

// Exhaustive within-block permutation p-value.
double friedman_oracle(const std::vector<std::vector<double>>& groups) {
    const std::size_t k = groups.size(), n = groups.front().size();
    auto stat = [&](const std::vector<std::vector<double>>& g) {
        std::vector<double> sums(k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> block(k);
            for (std::size_t j = 0; j < k; ++j) block[j] = g[j][i];
            const auto r = average_ranks(block);
            for (std::size_t j = 0; j < k; ++j) sums[j] += r[j];
        }
        double ss = 0.0;
        for (double s : sums) ss += s * s;
        return 12.0 / (static_cast<double>(n * k * (k + 1))) * ss - 3.0 * static_cast<double>(n * (k + 1));
    };
    const double observed = stat(groups);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<std::size_t>> perms;
    do perms.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));
    std::size_t total = 0, hits = 0;
    std::vector<std::size_t> choice(n, 0);
    while (true) {
        auto g = groups;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < k; ++j) g[j][i] = groups[perms[choice[i]][j]][i];
        ++total;
        if (stat(g) >= observed - 1e-9) ++hits;
        std::size_t i = 0;
        while (i < n && ++choice[i] == perms.size()) choice[i++] = 0;
        if (i == n) break;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

} // namespace

TEST_SUITE("stats") {

TEST_CASE("wilcoxon examples") {
    const std::vector<double> a{1, 2, 3};
    const auto r = wilcoxon_signed_rank(a);
    CHECK(r.statistic == 6.0);
    CHECK(r.p_value == doctest::Approx(0.25));
    CHECK(r.method == TestMethod::wilcoxon_exact);
    const std::vector<double> sym{-1, 1};
    const auto s = wilcoxon_signed_rank(sym);
    CHECK(s.statistic == 1.5);
    CHECK(s.p_value == 1.0);
    const std::vector<double> zeros{0, 0, 1, 2, 3};
    const auto z = wilcoxon_signed_rank(zeros);
    CHECK(z.dropped_zeros == 2);
    CHECK(z.n == 3);
    CHECK(wilcoxon_signed_rank(a, Alternative::greater).p_value == doctest::Approx(0.125));
    CHECK(wilcoxon_signed_rank(a, Alternative::less).p_value == 1.0);
}

TEST_CASE("wilcoxon exact and normal agree at n = 50") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto d = random_values(50, seed, 0.2);
        const auto exact = wilcoxon_signed_rank(d, Alternative::two_sided, 50);
        const auto normal = wilcoxon_signed_rank(d, Alternative::two_sided, 0);
        CHECK(exact.method == TestMethod::wilcoxon_exact);
        CHECK(normal.method == TestMethod::wilcoxon_normal);
        CHECK(std::abs(exact.p_value - normal.p_value) <= 0.02);
    }
    CHECK(wilcoxon_signed_rank(random_values(25, 1)).method == TestMethod::wilcoxon_exact);
    CHECK(wilcoxon_signed_rank(random_values(26, 1)).method == TestMethod::wilcoxon_normal);
}

TEST_CASE("property: wilcoxon p ignores monotone transforms") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto d = random_values(12, seed, 0.3);
        const double p = wilcoxon_signed_rank(d).p_value;
        for (auto& x : d) x = x * x * x + 2.0 * x;
        CHECK(wilcoxon_signed_rank(d).p_value == p);
    }
}

TEST_CASE("property: the exact null distribution sums to one") {
    for (std::size_t n = 1; n <= 10; ++n) {
        std::vector<double> d = random_values(n, n);
        d[0] = d.size() > 1 ? -d[1] : d[0]; // a tie in |x|
        std::vector<double> abs(d.size());
        std::transform(d.begin(), d.end(), abs.begin(), [](double x) { return std::abs(x); });
        const auto ranks = average_ranks(abs);
        double total = 0.0;
        for (const auto& [w, p] : wilcoxon_null_distribution(ranks)) total += p;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("friedman examples") {
    const std::vector<std::vector<double>> same{{1, 1}, {2, 2}, {3, 3}};
    CHECK(friedman(same).statistic == doctest::Approx(4.0));
    const std::vector<std::vector<double>> ties{{5, 1, 2}, {5, 1, 2}, {5, 1, 2}};
    const auto t = friedman(ties);
    CHECK(t.statistic == 0.0);
    CHECK(t.p_value == 1.0);
    CHECK_THROWS_AS(friedman({{1, 2}, {3, 4}}), UsageError);
    CHECK_THROWS_AS(friedman({{1, 2}, {3, 4}, {5}}), DataError);
}

TEST_CASE("friedman exact p matches a permutation oracle") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        std::vector<std::vector<double>> g{random_values(5, seed), random_values(5, seed + 10, 0.8),
                                           random_values(5, seed + 20, 0.4)};
        const auto r = friedman(g);
        CHECK(r.method == TestMethod::friedman_exact);
        CHECK(std::abs(r.p_value - friedman_oracle(g)) <= 1e-9);
        const auto chi2 = friedman(g, 0);
        CHECK(chi2.method == TestMethod::friedman_chi2);
        CHECK(chi2.statistic == r.statistic);
        CHECK(chi2.p_value == doctest::Approx(chi_square_sf(r.statistic, 2.0)));
    }
}

TEST_CASE("property: friedman ignores within-subject monotone transforms") {
    std::vector<std::vector<double>> g{random_values(30, 1), random_values(30, 2, 0.5), random_values(30, 3, 1.0),
                                       random_values(30, 4)};
    const auto base = friedman(g);
    for (std::size_t i = 0; i < 30; ++i) {
        const double a = 0.5 + static_cast<double>(i), b = static_cast<double>(i) - 7.0;
        for (auto& col : g) col[i] = std::exp(a * col[i] / 10.0) + b;
    }
    const auto moved = friedman(g);
    CHECK(moved.statistic == doctest::Approx(base.statistic).epsilon(1e-12));
    CHECK(moved.p_value == doctest::Approx(base.p_value).epsilon(1e-12));
}

TEST_CASE("bonferroni examples") {
    const std::vector<double> p{0.01, 0.4};
    const auto adj = bonferroni(p, 2);
    CHECK(adj[0] == doctest::Approx(0.02));
    CHECK(adj[1] == doctest::Approx(0.8));
    const std::vector<double> big{0.9};
    CHECK(bonferroni(big, 3)[0] == 1.0);
    const std::vector<double> single{0.03};
    CHECK(bonferroni(single, 1) == single);
    CHECK_THROWS_AS(bonferroni(p, 1), UsageError);
}

TEST_CASE("medians") {
    const std::vector<double> odd{3, 1, 2}, even{4, 1, 3, 2};
    CHECK(median(odd) == 2.0);
    CHECK(median(even) == 2.5);
    auto v = random_values(1000, 5);
    const double m = median(v);
    std::sort(v.begin(), v.end());
    CHECK(m == (v[499] + v[500]) / 2);
    const auto md = medians_and_deltas({{1, 2, 3}, {2, 3, 4, 5}, {10}});
    CHECK(md.medians == std::vector<double>{2, 3.5, 10});
    REQUIRE(md.deltas.size() == 3);
    CHECK(md.deltas[0].delta == 1.5);
    CHECK(md.deltas[2].first == 1);
    CHECK(md.deltas[2].second == 2);
}

TEST_CASE("results serialize to json") {
    std::ostringstream out;
    write_test_result_json(out, wilcoxon_signed_rank(std::vector<double>{1, 2, 3}));
    CHECK(out.str().find("\"statistic\": 6") != std::string::npos);
    CHECK(out.str().find("\"method\": \"wilcoxon-exact\"") != std::string::npos);
}

}
