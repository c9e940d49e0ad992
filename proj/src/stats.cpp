#include "plurvec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <string>

#include <boost/math/special_functions/gamma.hpp>
#include <json.hpp>

#include "plurvec/error.hpp"

namespace plurvec {

std::string_view method_name(TestMethod method) {
    switch (method) {
    case TestMethod::friedman_exact: return "friedman-exact";
    case TestMethod::friedman_chi2: return "friedman-chi2";
    case TestMethod::wilcoxon_exact: return "wilcoxon-exact";
    case TestMethod::wilcoxon_normal: return "wilcoxon-normal";
    }
    return "unknown";
}

Alternative parse_alternative(std::string_view name) {
    if (name == "two-sided") return Alternative::two_sided;
    if (name == "greater") return Alternative::greater;
    if (name == "less") return Alternative::less;
    throw UsageError("unknown alternative '" + std::string(name) + "'");
}

double mean(std::span<const double> values) {
    if (values.empty()) throw UsageError("mean of an empty sample");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double median(std::span<const double> values) {
    if (values.empty()) throw UsageError("median of an empty sample");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
        i = j + 1;
    }
    return ranks;
}

namespace {

/// Counts of sign assignments per doubled rank sum (index = 2W).
std::vector<double> signed_rank_counts(std::span<const double> ranks) {
    std::size_t total = 0;
    std::vector<std::size_t> doubled;
    doubled.reserve(ranks.size());
    for (double r : ranks) {
        doubled.push_back(static_cast<std::size_t>(std::lround(2.0 * r)));
        total += doubled.back();
    }
    std::vector<double> counts(total + 1, 0.0);
    counts[0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t r : doubled) {
        for (std::size_t s = reach + 1; s-- > 0;) {
            if (counts[s] != 0.0) counts[s + r] += counts[s];
        }
        reach += r;
    }
    return counts;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

} // namespace

std::vector<std::pair<double, double>> wilcoxon_null_distribution(std::span<const double> ranks) {
    const auto counts = signed_rank_counts(ranks);
    const double total = std::ldexp(1.0, static_cast<int>(ranks.size()));
    std::vector<std::pair<double, double>> out;
    for (std::size_t s = 0; s < counts.size(); ++s) {
        if (counts[s] != 0.0) out.emplace_back(0.5 * static_cast<double>(s), counts[s] / total);
    }
    return out;
}

TestResult wilcoxon_signed_rank(std::span<const double> differences, Alternative alternative,
                                std::size_t exact_max_n) {
    std::vector<double> nonzero;
    for (double d : differences) {
        if (!std::isfinite(d)) throw DataError("wilcoxon: non-finite difference");
        if (d != 0.0) nonzero.push_back(d);
    }
    TestResult res;
    res.dropped_zeros = differences.size() - nonzero.size();
    res.sidedness = alternative == Alternative::two_sided ? Sidedness::two : Sidedness::one;
    if (nonzero.empty()) throw UsageError("wilcoxon: all differences are zero");

    const std::size_t n = nonzero.size();
    std::vector<double> magnitudes(n);
    std::transform(nonzero.begin(), nonzero.end(), magnitudes.begin(), [](double d) { return std::abs(d); });
    const auto ranks = average_ranks(magnitudes);
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (nonzero[i] > 0) w += ranks[i];
    }
    res.statistic = w;
    res.n = n;

    double p_upper = 0.0, p_lower = 0.0;
    if (n <= exact_max_n) {
        res.method = TestMethod::wilcoxon_exact;
        const auto counts = signed_rank_counts(ranks);
        const auto w2 = static_cast<std::size_t>(std::lround(2.0 * w));
        const double total = std::ldexp(1.0, static_cast<int>(n));
        double up = 0.0, low = 0.0;
        for (std::size_t s = 0; s < counts.size(); ++s) {
            if (s >= w2) up += counts[s];
            if (s <= w2) low += counts[s];
        }
        p_upper = up / total;
        p_lower = low / total;
    } else {
        res.method = TestMethod::wilcoxon_normal;
        const double nn = static_cast<double>(n);
        const double mu = nn * (nn + 1.0) / 4.0;
        double tie_term = 0.0;
        auto sorted = magnitudes;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j < n && sorted[j] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i);
            tie_term += t * t * t - t;
            i = j;
        }
        const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
        const double sd = std::sqrt(var);
        p_upper = normal_sf((w - mu - 0.5) / sd);
        p_lower = normal_sf((mu - w - 0.5) / sd);
    }
    switch (alternative) {
    case Alternative::greater: res.p_value = p_upper; break;
    case Alternative::less: res.p_value = p_lower; break;
    case Alternative::two_sided: res.p_value = std::min(1.0, 2.0 * std::min(p_upper, p_lower)); break;
    }
    res.p_value = std::clamp(res.p_value, 0.0, 1.0);
    return res;
}

double chi_square_sf(double x, double dof) {
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

namespace {

double friedman_statistic(const std::vector<double>& rank_sums, std::size_t n) {
    const double k = static_cast<double>(rank_sums.size());
    const double nn = static_cast<double>(n);
    double ss = 0.0;
    for (double r : rank_sums) ss += r * r;
    return 12.0 / (nn * k * (k + 1.0)) * ss - 3.0 * nn * (k + 1.0);
}

} // namespace

TestResult friedman(const std::vector<std::vector<double>>& groups, std::uint64_t exact_limit) {
    const std::size_t k = groups.size();
    if (k < 3) throw UsageError("friedman needs at least 3 groups");
    const std::size_t n = groups.front().size();
    if (n == 0) throw UsageError("friedman needs at least one subject");
    for (const auto& g : groups) {
        if (g.size() != n) throw DataError("friedman: ragged groups");
    }

    // Doubled within-subject ranks, one row per subject.
    std::vector<std::vector<long>> block_ranks(n, std::vector<long>(k));
    std::vector<double> rank_sums(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(k);
        for (std::size_t j = 0; j < k; ++j) {
            row[j] = groups[j][i];
            if (!std::isfinite(row[j])) throw DataError("friedman: non-finite value");
        }
        const auto r = average_ranks(row);
        for (std::size_t j = 0; j < k; ++j) {
            block_ranks[i][j] = std::lround(2.0 * r[j]);
            rank_sums[j] += r[j];
        }
    }

    TestResult res;
    res.statistic = friedman_statistic(rank_sums, n);
    res.n = n;
    res.sidedness = Sidedness::one;

    double perms_per_block = 1.0;
    for (std::size_t j = 2; j <= k; ++j) perms_per_block *= static_cast<double>(j);
    const double total = std::pow(perms_per_block, static_cast<double>(n));

    if (total <= static_cast<double>(exact_limit)) {
        res.method = TestMethod::friedman_exact;
        std::map<std::vector<long>, double> dist{{std::vector<long>(k, 0), 1.0}};
        for (const auto& block : block_ranks) {
            auto perm = block;
            std::sort(perm.begin(), perm.end());
            std::vector<std::vector<long>> arrangements;
            do {
                arrangements.push_back(perm);
            } while (std::next_permutation(perm.begin(), perm.end()));
            // Repeated values collapse in next_permutation; weight each distinct
            // arrangement by how many of the k! orderings produce it.
            const double weight = perms_per_block / static_cast<double>(arrangements.size());
            std::map<std::vector<long>, double> next;
            for (const auto& [sums, count] : dist) {
                for (const auto& a : arrangements) {
                    auto s = sums;
                    for (std::size_t j = 0; j < k; ++j) s[j] += a[j];
                    next[s] += count * weight;
                }
            }
            dist = std::move(next);
        }
        const double tol = 1e-9 * std::max(1.0, std::abs(res.statistic));
        double tail = 0.0;
        for (const auto& [sums, count] : dist) {
            std::vector<double> r(k);
            for (std::size_t j = 0; j < k; ++j) r[j] = 0.5 * static_cast<double>(sums[j]);
            if (friedman_statistic(r, n) >= res.statistic - tol) tail += count;
        }
        res.p_value = std::clamp(tail / total, 0.0, 1.0);
    } else {
        res.method = TestMethod::friedman_chi2;
        res.p_value = chi_square_sf(res.statistic, static_cast<double>(k - 1));
    }
    return res;
}

std::vector<double> bonferroni(std::span<const double> p_values, std::size_t comparisons) {
    if (comparisons < p_values.size()) {
        throw UsageError("bonferroni: comparisons must be >= number of p-values");
    }
    std::vector<double> out;
    out.reserve(p_values.size());
    for (double p : p_values) out.push_back(std::min(1.0, p * static_cast<double>(comparisons)));
    return out;
}

MedianSummary medians_and_deltas(const std::vector<std::vector<double>>& groups) {
    MedianSummary out;
    for (const auto& g : groups) {
        if (g.empty()) throw UsageError("medians_and_deltas: empty group");
        out.medians.push_back(median(g));
    }
    for (std::size_t a = 0; a < groups.size(); ++a) {
        for (std::size_t b = a + 1; b < groups.size(); ++b) {
            out.deltas.push_back({a, b, out.medians[b] - out.medians[a]});
        }
    }
    return out;
}

void write_test_result_json(std::ostream& out, const TestResult& result) {
    nlohmann::ordered_json j;
    j["statistic"] = result.statistic;
    j["p_value"] = result.p_value;
    j["method"] = std::string(method_name(result.method));
    j["n"] = result.n;
    j["sidedness"] = result.sidedness == Sidedness::one ? "one" : "two";
    j["dropped_zeros"] = result.dropped_zeros;
    out << j.dump(2) << '\n';
}

} // namespace plurvec
