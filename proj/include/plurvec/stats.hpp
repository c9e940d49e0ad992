#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace plurvec {

enum class Sidedness { one, two };

/// Alternative hypothesis for signed-rank tests on differences x.
/// greater: x tends to be positive; less: x tends to be negative.
enum class Alternative { two_sided, greater, less };

enum class TestMethod { friedman_exact, friedman_chi2, wilcoxon_exact, wilcoxon_normal };

std::string_view method_name(TestMethod method);
Alternative parse_alternative(std::string_view name);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    TestMethod method = TestMethod::wilcoxon_exact;
    std::size_t n = 0;
    Sidedness sidedness = Sidedness::two;
    std::size_t dropped_zeros = 0;
};

// Descriptive helpers.
double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> values);
/// Median, averaging the two middle values for even counts.
double median(std::span<const double> values);
/// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/**
 * Wilcoxon signed-rank test on paired differences.
 *
 * Zero differences are dropped and counted. W is the sum of the ranks of the
 * positive differences (average ranks for ties in |x|). The p-value is exact,
 * by enumeration of the 2^n sign assignments, for n <= exact_max_n and uses
 * the tie-corrected normal approximation with continuity correction above.
 */
TestResult wilcoxon_signed_rank(std::span<const double> differences,
                                Alternative alternative = Alternative::two_sided,
                                std::size_t exact_max_n = 25);

/// Null distribution of W for the given ranks: (w, probability) pairs in
/// ascending w, over all equally likely sign assignments.
std::vector<std::pair<double, double>> wilcoxon_null_distribution(std::span<const double> ranks);

/**
 * Friedman test for k >= 3 matched groups of n subjects; groups[j][i] is
 * subject i under treatment j. Ranks within each subject use average ranks.
 *
 * Statistic: 12 / (n k (k+1)) * sum_j R_j^2 - 3 n (k+1).
 * When (k!)^n <= exact_limit the p-value is the exact within-subject
 * permutation probability; otherwise it is the chi-square(k-1) tail.
 */
TestResult friedman(const std::vector<std::vector<double>>& groups,
                    std::uint64_t exact_limit = 2'000'000);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double dof);

/// min(1, p * m) for every p.
std::vector<double> bonferroni(std::span<const double> p_values, std::size_t comparisons);

struct MedianDelta {
    std::size_t first = 0;
    std::size_t second = 0;
    double delta = 0.0; // median(second) - median(first)
};

struct MedianSummary {
    std::vector<double> medians;
    std::vector<MedianDelta> deltas; // every pair first < second
};

MedianSummary medians_and_deltas(const std::vector<std::vector<double>>& groups);

/// {"statistic":..,"p_value":..,"method":..,"n":..,"sidedness":..,"dropped_zeros":..}
void write_test_result_json(std::ostream& out, const TestResult& result);

} // namespace plurvec
