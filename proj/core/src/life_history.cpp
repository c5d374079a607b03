#include "popdyn/life_history.hpp"
#include <cmath>
#include <stdexcept>

namespace popdyn {

void LifeHistory::validate() const {
    if (age.size() < 2 || age.size() != fecundity.size() || age.size() != death_cdf.size())
        throw std::invalid_argument("LifeHistory: grids must align and have >= 2 points");
    if (age.front() < 0.0) throw std::invalid_argument("LifeHistory: ages must be >= 0");
    for (std::size_t i = 1; i < age.size(); ++i)
        if (!(age[i] > age[i - 1]))
            throw std::invalid_argument("LifeHistory: ages must be strictly increasing");
    for (std::size_t i = 0; i < age.size(); ++i) {
        if (fecundity[i] < 0.0) throw std::invalid_argument("LifeHistory: fecundity < 0");
        if (death_cdf[i] < 0.0 || death_cdf[i] > 1.0)
            throw std::invalid_argument("LifeHistory: death cdf outside [0,1]");
        if (i > 0 && death_cdf[i] < death_cdf[i - 1] - 1e-12)
            throw std::invalid_argument("LifeHistory: death cdf must be nondecreasing");
    }
}

namespace {
// e^{-alpha s} m(s)(1-L(s)) integrated by trapezoid, plus an exponential tail
// fitted to the last two integrand values (exact when the tail really is
// exponential, as for constant fecundity with exponential lifetimes)
double transform_residual(const LifeHistory& lh, double alpha) {
    const std::size_t n = lh.age.size();
    double acc = 0.0;
    double prev = std::exp(-alpha * lh.age[0]) * lh.fecundity[0] * (1.0 - lh.death_cdf[0]);
    double last = prev, second_last = prev;
    for (std::size_t i = 1; i < n; ++i) {
        double cur = std::exp(-alpha * lh.age[i]) * lh.fecundity[i] * (1.0 - lh.death_cdf[i]);
        acc += 0.5 * (prev + cur) * (lh.age[i] - lh.age[i - 1]);
        second_last = prev;
        prev = cur;
        last = cur;
    }
    if (last > 0.0 && second_last > last) {
        double h = lh.age[n - 1] - lh.age[n - 2];
        double beta = std::log(second_last / last) / h;
        if (beta > 0.0) acc += last / beta;
    }
    return acc;
}
} // namespace

double LifeHistory::net_reproduction() const {
    validate();
    return transform_residual(*this, 0.0);
}

double solve_malthusian(const LifeHistory& lh) {
    lh.validate();
    if (transform_residual(lh, 0.0) <= 1.0)
        throw std::domain_error("solve_malthusian: net reproduction <= 1, no positive growth root");
    double lo = 0.0, hi = 1.0;
    while (transform_residual(lh, hi) > 1.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) throw std::runtime_error("solve_malthusian: failed to bracket the root");
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
        mid = 0.5 * (lo + hi);
        double r = transform_residual(lh, mid);
        if (std::fabs(r - 1.0) < 1e-10) return mid;
        if (r > 1.0) lo = mid; else hi = mid;
    }
    return mid;
}

LifeHistory make_exponential_life_history(double b, double d, double horizon, double step) {
    if (!(b >= 0.0) || !(d > 0.0) || !(horizon > 0.0) || !(step > 0.0))
        throw std::invalid_argument("make_exponential_life_history: bad parameters");
    LifeHistory lh;
    for (double s = 0.0; s <= horizon + 0.5 * step; s += step) {
        lh.age.push_back(s);
        lh.fecundity.push_back(b);
        lh.death_cdf.push_back(-std::expm1(-d * s));
    }
    return lh;
}

} // namespace popdyn
