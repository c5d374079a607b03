#pragma once
#include <vector>
#include <functional>
#include <cstdint>
#include <string>

namespace popdyn {

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0; // unbiased
    double se = 0.0;       // of the mean
};

Summary summarize(const std::vector<double>& xs);

// Kolmogorov-Smirnov distance of a sample against a cdf. Sorts a copy.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

// two-sample KS distance (max ecdf gap)
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct Chi2Result {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    int bins_used = 0;
};

// observed counts vs expected counts (same total); bins with expected < min_expected
// are pooled into their neighbor so the asymptotic chi-square approximation holds
Chi2Result chi2_test(const std::vector<double>& observed,
                     const std::vector<double>& expected,
                     double min_expected = 5.0,
                     int dof_reduction = 1);

// two-sample chi-square homogeneity test on aligned count vectors
Chi2Result chi2_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                           double min_expected = 5.0);

// equal-width binning of values in [lo, hi); out-of-range values clamp to edge bins
std::vector<double> bin_counts(const std::vector<double>& xs, double lo, double hi, int nbins);

// expected bin masses for equal-width bins under a cdf (tails folded into edge bins)
std::vector<double> bin_expected(const std::function<double(double)>& cdf,
                                 double lo, double hi, int nbins, double total);

// z-score |a-b| / sqrt(sa^2 + sb^2); returns 0 when both SEs vanish and a == b
double z_score(double a, double sa, double b, double sb);

} // namespace popdyn
