#pragma once
#include <vector>
#include "popdyn/ode.hpp"
#include "popdyn/matrix.hpp"

namespace popdyn {

// logistic growth; evaluated from the closed form, not integrated
// x(t) = N x0 e^{alpha t} / (N + x0 (e^{alpha t} - 1))
double logistic_value(double alpha, double capacity, double x0, double t);
OdeTrajectory logistic_solve(double alpha, double capacity, double x0, double tmax, double dt);

struct LotkaVolterraResult {
    OdeTrajectory traj;
    bool coexistence = false;             // 1/a21 > K1/K2 > a12
    std::vector<double> interior_fixed_point; // empty when not coexisting
};
// competitive two-species model
//   dx1/dt = r1 x1 (1 - (x1 + a12 x2)/K1)
//   dx2/dt = r2 x2 (1 - (x2 + a21 x1)/K2)
// Throws std::runtime_error if a component exceeds 1e12 (blow-up guard).
LotkaVolterraResult lotka_volterra_integrate(double r1, double r2, double k1, double k2,
                                             double a12, double a21,
                                             double x10, double x20, double tmax, double dt);

struct SirResult {
    OdeTrajectory traj; // states S, I, R
    double r0 = 0.0;    // beta * S(0) / gamma
};
SirResult sir_integrate(double beta, double gamma, double s0, double i0, double r0_state,
                        double tmax, double dt);

// Fitness for replicator dynamics. Diploid: symmetric payoff matrix V, mean
// fitness Vbar = p'Vp, marginal V(i) = (Vp)_i. A haploid vector v embeds as
// V_ij = v_i + v_j, which makes p_i(V(i) - Vbar) equal the haploid field
// p_i(v_i - vbar) while keeping the rate identity dVbar/dt = 2 Var_p(V).
struct FitnessSpec {
    Matrix V;
    static FitnessSpec diploid(Matrix v);
    static FitnessSpec haploid(const std::vector<double>& v);
    std::size_t types() const { return V.n; }
    double marginal(const std::vector<double>& p, std::size_t i) const;
    double mean(const std::vector<double>& p) const;
    double variance(const std::vector<double>& p) const; // Var_p(V(.))
};

// off-diagonal row-stochastic mutation kernel: q(j,i) = rate share j -> i
struct MutationKernel {
    Matrix q;
    void validate() const; // zero diagonal, rows sum to 1 over i != j
};

struct ReplicatorResult {
    OdeTrajectory traj;          // states p(t); series: mean_fitness, fitness_variance
};
// selection-mutation flow on the simplex,
//   dp_i/dt = p_i (V(i) - Vbar) + m (sum_{j != i} q(j,i) p_j - p_i)
// RK4 with per-step renormalization; a pre-renormalization simplex violation
// larger than 1e-6 aborts with std::runtime_error.
ReplicatorResult replicator_integrate(const FitnessSpec& fitness, const MutationKernel& kernel,
                                      double m, std::vector<double> p0, double tmax, double dt,
                                      int record_every = 1);

// half the simplex (Shahshahani) gradient of mean fitness at an interior p:
// component i is p_i (V(i) - Vbar). Throws std::domain_error on the boundary.
std::vector<double> shahshahani_gradient(const FitnessSpec& fitness, const std::vector<double>& p);

void validate_simplex(const std::vector<double>& p, double tol = 1e-9);

} // namespace popdyn
