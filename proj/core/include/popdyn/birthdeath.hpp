#pragma once
#include <vector>
#include <cstdint>
#include "popdyn/rng.hpp"

namespace popdyn {

// ---- linear birth-death chain: per-capita birth rate b, death rate d ----

struct BdPath {
    std::vector<double> t;        // event times, starting at 0
    std::vector<std::uint64_t> n; // population after each event
    bool capped = false;          // stopped at the event cap
};

BdPath bd_gillespie(double b, double d, std::uint64_t x0, double tmax, RngStream& rng,
                    std::uint64_t max_events = 20000000ULL);

// population at time tmax only (no path storage)
std::uint64_t bd_final_value(double b, double d, std::uint64_t x0, double tmax, RngStream& rng,
                             std::uint64_t max_events = 20000000ULL);

// transition probabilities from a single ancestor: returns p_0, p_1, ..., cut
// once the remaining tail is below tail_tol. Closed geometric-with-atom form;
// b = d uses the critical limit expressions.
std::vector<double> bd_law(double b, double d, double t, double tail_tol = 1e-10);

// E[e^{-theta X_t}] from x0 ancestors
double bd_laplace(double b, double d, double x0, double t, double theta);

struct BdMoments {
    double mean = 0.0;
    double second_moment = 0.0;
    double variance = 0.0;
};
BdMoments bd_moments(double b, double d, double x0, double t);

// ---- continuous-state branching with immigration ----

struct CsbpParams {
    double m = 0.0;     // linear drift (branching mean rate)
    double gamma = 1.0; // branching noise level: diffusion term sqrt(2 gamma x)
    double c = 0.0;     // immigration rate
};

struct CsbpPath {
    std::vector<double> t;
    std::vector<double> x;
    bool absorbed = false; // hit 0 with no immigration
};

// Euler scheme with full truncation: drift and noise read max(X,0); with
// c = 0 the state is clamped at 0 permanently once it falls to or below 0
CsbpPath csbp_simulate(const CsbpParams& params, double x0, double tmax, double dt,
                       RngStream& rng, int record_every = 1);

// exponent u(t, theta) with E[e^{-theta X_t}] = e^{-x0 u(t, theta)}; solves
// u' = m u - gamma u^2, u(0) = theta
double csbp_laplace(double m, double gamma, double theta, double t);

// ---- critical-limit diagnostics for the scaled chain ----

struct CriticalBdLimit {
    double survival = 0.0;    // P_hat(X_t > 0); compare with 1/(1+bt)
    double survival_se = 0.0;
    double ks_distance = 0.0; // X_t / t given survival vs Exp(mean b)
    std::uint64_t survivors = 0;
    bool inconclusive = false;
};
CriticalBdLimit critical_bd_conditioned_limit(double b, double t, std::uint64_t reps,
                                              std::uint64_t seed, int threads = 0);

} // namespace popdyn
