#pragma once
#include <vector>
#include <string>
#include <cstdint>
#include "popdyn/rng.hpp"

namespace popdyn {

// Offspring law on {0,1,2,...} held as a finite pmf. Named families with
// infinite support (geometric, poisson) are truncated where the remaining
// tail mass drops below 1e-12 and then renormalized, so every law here sums
// to 1 exactly in double precision.
class OffspringLaw {
public:
    static OffspringLaw from_pmf(std::vector<double> pmf, std::string label = "pmf");
    // success probability 1/2 on {0,1,2,...}: p_k = 2^{-(k+1)}
    static OffspringLaw geometric_half();
    static OffspringLaw poisson(double mean);

    double pmf(std::size_t k) const { return k < p_.size() ? p_[k] : 0.0; }
    const std::vector<double>& pmf() const { return p_; }
    std::size_t max_k() const { return p_.size() - 1; }
    const std::string& label() const { return label_; }

    double mean() const { return mean_; }
    double variance() const { return var_; }
    double second_moment() const { return m2_; }

    std::uint64_t sample(RngStream& rng) const { return rng.sample_cdf(cdf_); }

    // law of the long-lived line: p'_k = k p_k / mean (requires mean > 0)
    OffspringLaw size_biased() const;

private:
    std::vector<double> p_, cdf_;
    std::string label_;
    double mean_ = 0.0, var_ = 0.0, m2_ = 0.0;
    void finalize();
};

struct LawMoments {
    double mean = 0.0;
    double variance = 0.0;
    double second_moment = 0.0;
};
LawMoments law_moments(const OffspringLaw& law);

// probability generating function f(s) = sum_k p_k s^k, s in [0,1]
double pgf_eval(const OffspringLaw& law, double s);
// n-fold composition f_n(s) = f(f_{n-1}(s)), f_0(s) = s
double pgf_iterate(const OffspringLaw& law, double s, int n);

// smallest fixed point of f on [0,1]: monotone iteration from 0, with a
// bisection fallback when contraction near the root is too slow; the result
// satisfies |f(q) - q| < 1e-12
double extinction_probability(const OffspringLaw& law);

} // namespace popdyn
