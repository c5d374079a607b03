#pragma once
#include <vector>

namespace popdyn {

// Age-structured reproduction profile on a grid: fecundity intensity m(s) and
// lifetime distribution function L(s) sampled at the same ages. The grid is
// assumed fine enough that trapezoid quadrature resolves the integrals; past
// the last age the net maternity e^{-alpha s} m(s)(1 - L(s)) is extended by an
// exponential tail fitted to the last two grid values.
struct LifeHistory {
    std::vector<double> age;       // strictly increasing, age[0] >= 0
    std::vector<double> fecundity; // m(s) >= 0
    std::vector<double> death_cdf; // L(s) in [0,1], nondecreasing

    void validate() const;
    // net reproduction R0 = int m(s)(1 - L(s)) ds (alpha = 0 transform)
    double net_reproduction() const;
};

// growth exponent alpha > 0 solving  int_0^inf e^{-alpha s} m(s)(1-L(s)) ds = 1,
// by bisection until the residual is below 1e-10.
// Throws std::domain_error when net reproduction <= 1 (no positive root).
double solve_malthusian(const LifeHistory& lh);

// convenience constructor for constant fecundity b and exponential lifetime
// with hazard d, tabulated on [0, horizon] with the given step
LifeHistory make_exponential_life_history(double b, double d, double horizon, double step);

} // namespace popdyn
