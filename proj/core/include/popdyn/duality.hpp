#pragma once
#include "popdyn/rng.hpp"
#include "popdyn/matrix.hpp"
#include <cstdint>
#include <string>
#include <vector>

namespace popdyn {

// rows sum to zero, off-diagonals nonnegative; K <= 12 keeps the set-valued
// dual (on 2^K states) within exact-exponential reach
void validate_generator(const Matrix& q, double tol = 1e-9);

// e^{tQ}, row-stochastic up to the truncation tolerance of uniformization
Matrix matrix_exp_transition(const Matrix& q, double t);

// stationary row vector of an irreducible generator, by replacing one balance
// equation with the normalization constraint
std::vector<double> stationary_of_generator(const Matrix& q);

// generator H of the set-valued chain on subsets of {0..K-1} (bitmask index):
//   A -> A u {j} at rate sum_{l in A} q(j,l)     for j not in A
//   A -> A \ {j} at rate sum_{l not in A} q(j,l) for j in A
// The chain satisfies P(X_t = l | X_0 = j) = P(j in A_t | A_0 = {l}).
Matrix set_dual_generator(const Matrix& q);

struct DualityCheck {
    double lhs = 0.0;  // [e^{tQ}]_{jl}
    double rhs = 0.0;  // sum over sets A containing j of [e^{tH}]_{{l},A}
    double diff = 0.0;
};
DualityCheck verify_mc_duality(const Matrix& q, std::size_t j, std::size_t l, double t);

struct DualityCase {
    std::string label;
    double lhs = 0.0;
    double rhs = 0.0;
    double diff = 0.0;
};
std::string duality_report_json(const std::vector<DualityCase>& cases);

// all off-diagonal rates drawn from U(lo, hi) with lo > 0, hence irreducible
Matrix random_irreducible_generator(std::size_t K, RngStream& rng, double lo = 0.1,
                                    double hi = 1.1);

// E[p_t^n] for the neutral two-allele diffusion dp = sqrt(gamma p(1-p)) dW via
// its block-counting dual: a pure death chain from n with rates
// gamma k(k-1)/2, so E[p_t^n] = sum_k P(N_t = k) p0^k. The death-chain law
// comes from the uniformized exponential on states {1..n}.
double wf_moment_dual_exact(double p0, double gamma, std::uint64_t n, double t);

// Monte-Carlo estimate of the same moment from Euler-Maruyama paths of the
// diffusion itself; returns (mean, standard error)
struct McMoment {
    double mean = 0.0;
    double se = 0.0;
};
McMoment wf_moment_dual_mc(double p0, double gamma, std::uint64_t n, double t, double dt,
                           std::uint64_t reps, std::uint64_t seed, int threads = 1);

} // namespace popdyn
