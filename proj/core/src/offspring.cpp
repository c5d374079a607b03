#include "popdyn/offspring.hpp"
#include <cmath>
#include <stdexcept>
#include <numeric>

namespace popdyn {

void OffspringLaw::finalize() {
    if (p_.empty()) throw std::invalid_argument("OffspringLaw: empty pmf");
    double sum = 0.0;
    for (double x : p_) {
        if (x < 0.0 || !std::isfinite(x))
            throw std::invalid_argument("OffspringLaw: pmf entries must be finite and >= 0");
        sum += x;
    }
    if (sum <= 0.0) throw std::invalid_argument("OffspringLaw: pmf sums to zero");
    for (double& x : p_) x /= sum;
    // strip a zero tail so max_k is meaningful
    while (p_.size() > 1 && p_.back() == 0.0) p_.pop_back();

    cdf_.resize(p_.size());
    double c = 0.0;
    for (std::size_t k = 0; k < p_.size(); ++k) {
        c += p_[k];
        cdf_[k] = c;
    }
    cdf_.back() = 1.0;

    mean_ = 0.0;
    m2_ = 0.0;
    for (std::size_t k = 0; k < p_.size(); ++k) {
        mean_ += static_cast<double>(k) * p_[k];
        m2_ += static_cast<double>(k) * static_cast<double>(k) * p_[k];
    }
    var_ = m2_ - mean_ * mean_;
}

OffspringLaw OffspringLaw::from_pmf(std::vector<double> pmf, std::string label) {
    OffspringLaw law;
    law.p_ = std::move(pmf);
    law.label_ = std::move(label);
    law.finalize();
    return law;
}

OffspringLaw OffspringLaw::geometric_half() {
    // tail beyond k is 2^{-(k+1)}; stop once that is below 1e-12
    std::vector<double> p;
    double tail = 1.0;
    for (std::size_t k = 0;; ++k) {
        double pk = std::pow(0.5, static_cast<double>(k) + 1.0);
        p.push_back(pk);
        tail -= pk;
        if (tail < 1e-12) break;
    }
    return from_pmf(std::move(p), "geometric(1/2)");
}

OffspringLaw OffspringLaw::poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
    if (mean == 0.0) return from_pmf({1.0}, "poisson(0)");
    std::vector<double> p;
    double pk = std::exp(-mean);
    double tail = 1.0;
    for (std::size_t k = 0;; ++k) {
        p.push_back(pk);
        tail -= pk;
        if (tail < 1e-12 && static_cast<double>(k) > mean) break;
        pk *= mean / (static_cast<double>(k) + 1.0);
        if (p.size() > 4096) break; // paranoia for huge means
    }
    return from_pmf(std::move(p), "poisson(" + std::to_string(mean) + ")");
}

OffspringLaw OffspringLaw::size_biased() const {
    if (!(mean_ > 0.0)) throw std::domain_error("size_biased: law has zero mean");
    std::vector<double> p(p_.size(), 0.0);
    for (std::size_t k = 1; k < p_.size(); ++k)
        p[k] = static_cast<double>(k) * p_[k] / mean_;
    return from_pmf(std::move(p), label_ + " size-biased");
}

LawMoments law_moments(const OffspringLaw& law) {
    return {law.mean(), law.variance(), law.second_moment()};
}

double pgf_eval(const OffspringLaw& law, double s) {
    if (s < 0.0 || s > 1.0) throw std::domain_error("pgf_eval: s must lie in [0,1]");
    const auto& p = law.pmf();
    double acc = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) acc = acc * s + p[k];
    return acc;
}

double pgf_iterate(const OffspringLaw& law, double s, int n) {
    if (n < 0) throw std::invalid_argument("pgf_iterate: n must be >= 0");
    double x = s;
    for (int i = 0; i < n; ++i) x = pgf_eval(law, x);
    return x;
}

double extinction_probability(const OffspringLaw& law) {
    // subcritical/critical: the smallest fixed point is 1, and the pmf was
    // renormalized so f(1) = 1 holds to full precision
    if (law.mean() <= 1.0) return 1.0;

    double s = 0.0;
    for (int it = 0; it < 20000; ++it) {
        double fs = pgf_eval(law, s);
        if (std::fabs(fs - s) < 1e-12) return s;
        s = fs;
    }
    // contraction too slow (root close to 1): binary search for the first
    // point where f(x) - x <= 0; f - id is convex, positive on [0,q), and
    // nonpositive on [q,1]
    double lo = s, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (pgf_eval(law, mid) - mid <= 0.0) hi = mid; else lo = mid;
        if (hi - lo < 1e-16) break;
    }
    return hi;
}

} // namespace popdyn
