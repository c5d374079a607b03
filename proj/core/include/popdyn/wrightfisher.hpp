#pragma once
#include "popdyn/rng.hpp"
#include "popdyn/matrix.hpp"
#include "popdyn/ode.hpp"
#include <vector>
#include <cstdint>

namespace popdyn {

// Discrete Wright-Fisher chain on K alleles. One generation runs the
// three-stage cycle: viability selection on Hardy-Weinberg genotype
// frequencies, then mutation, then multinomial resampling of N individuals
// (2N gene copies when diploid_sampling is set).
struct WfChainSpec {
    std::uint64_t N = 100;
    std::size_t K = 2;
    Matrix mutation;   // row-stochastic, mutation(i,j) = P(allele i copies as j)
    Matrix viability;  // symmetric positive genotype viabilities V(i,j)
    bool diploid_sampling = false;

    static WfChainSpec neutral(std::uint64_t N, std::size_t K);
    void validate() const;
};

std::vector<double> wf_chain_step(const WfChainSpec& spec, const std::vector<double>& p,
                                  RngStream& rng);

// run `ngen` generations, recording every `record_every`-th state (and the last)
OdeTrajectory wf_chain_run(const WfChainSpec& spec, std::vector<double> p0,
                           std::uint64_t ngen, RngStream& rng, std::uint64_t record_every = 1);

// K-allele Wright-Fisher diffusion
//   dp_i = [ (theta/2)(nu_i - p_i) + p_i((sigma p)_i - p' sigma p) ] dt + noise,
// noise covariance gamma * p_i(delta_ij - p_j). When the mutation_rates matrix
// is non-empty it replaces the house-of-cards drift with
//   sum_j (p_j q_ji - p_i q_ij).
// Stationary law without selection: Dirichlet(theta nu / gamma); with selection
// the density picks up the factor exp(p' sigma p / gamma).
struct WfDiffusionSpec {
    std::size_t K = 2;
    double gamma = 1.0;
    double theta = 0.0;
    std::vector<double> nu;  // simplex; required when theta > 0
    Matrix sigma;            // selection; empty means neutral
    Matrix mutation_rates;   // optional general q_ij >= 0, zero diagonal

    void validate() const;
};

// Euler-Maruyama with the covariance square root taken spectrally (eigenvalue
// floor at zero; the matrix is PSD exactly on the simplex). Coordinates are
// clipped to [0,1] and renormalized after each step; coordinates pinned at the
// boundary contribute no noise, which is also the degenerate limit of the
// covariance, so a failed factorization falls back to freezing them.
OdeTrajectory wf_diffusion_simulate(const WfDiffusionSpec& spec, std::vector<double> p0,
                                    double tmax, double dt, RngStream& rng,
                                    int record_every = 1);

// Neutral two-allele absorption experiment on the diffusion timescale
// (one time unit = N generations). Mean generations to fixation or loss from
// frequency p approaches N * (-(p ln p + (1-p) ln(1-p))); the fraction fixing
// at allele 1 approaches p0.
struct FixationResult {
    double mean_generations = 0.0;
    double se_generations = 0.0;
    double fixed_at_one = 0.0;        // fraction of replicates absorbing at p = 1
    double fixed_at_one_se = 0.0;
    std::uint64_t reps = 0;
};
FixationResult wf_fixation_experiment(std::uint64_t N, double p0, std::uint64_t reps,
                                      std::uint64_t seed, int threads = 1, double dt = 1e-4);

std::vector<double> dirichlet_sample(const std::vector<double>& theta, RngStream& rng);

// E[prod p_i^{k_i}] under Dirichlet(theta):
//   Gamma(|theta|)/Gamma(|theta|+|k|) * prod Gamma(theta_i+k_i)/Gamma(theta_i)
double dirichlet_moment(const std::vector<double>& theta, const std::vector<int>& k);

// Two-allele stationary density of the diffusion on a midpoint grid:
// exp(p' sigma p / gamma) times the Dirichlet(theta nu / gamma) density,
// normalized by midpoint quadrature. `mass` holds per-cell probabilities.
struct DensityTable {
    std::vector<double> p;        // cell midpoints
    std::vector<double> density;  // normalized pdf at midpoints
    std::vector<double> mass;     // cell probabilities, sums to 1
};
DensityTable selection_stationary_density(const WfDiffusionSpec& spec, std::size_t cells);

// Closed linear ODE system for the neutral-with-mutation mixed moments
// m_k = E[prod p_i^{k_i}]:
//   dm_k/dt = (gamma/2)[ sum_i k_i(k_i-1) m_{k-e_i} - |k|(|k|-1) m_k ]
//           + (theta/2)[ sum_i nu_i k_i m_{k-e_i} - |k| m_k ].
// The requested index set is closed under k -> k - e_i before integrating.
struct MomentOdeResult {
    std::vector<std::vector<int>> indices;  // closure, order matches y components
    OdeTrajectory traj;
};
MomentOdeResult wf_moment_ode(double gamma, double theta, const std::vector<double>& nu,
                              std::vector<std::vector<int>> indices,
                              const std::vector<double>& p0, double tmax, double dt,
                              int record_every = 1);

} // namespace popdyn
