#pragma once
#include "popdyn/rng.hpp"
#include "popdyn/matrix.hpp"
#include "popdyn/offspring.hpp"
#include <cstdint>
#include <limits>
#include <vector>

namespace popdyn {

// Finite torus (Z/L)^d with a symmetric, finitely supported migration kernel;
// p(0) = 0 and the offsets wrap. Sites are indexed in mixed radix, coordinate
// i contributing coord_i * L^i.
struct TorusLattice {
    std::size_t d = 1;
    std::size_t L = 2;
    std::vector<std::vector<int>> offsets;
    std::vector<double> probs;

    static TorusLattice nearest_neighbor(std::size_t d, std::size_t L);
    void validate() const;
    std::size_t sites() const;
    std::vector<int> coords(std::size_t site) const;
    std::size_t index(const std::vector<int>& c) const;
    std::size_t neighbor(std::size_t site, std::size_t offset_idx) const;
    std::size_t sample_neighbor(std::size_t site, RngStream& rng) const;
    // random-walk generator rate*(P - I) as a dense sites() x sites() matrix
    Matrix rw_generator(double rate) const;
};

using SpinConfig = std::vector<std::uint8_t>;
using FreqConfig = std::vector<double>;

// Voter model: every site rings at rate 1, picks a kernel neighbor, adopts its
// opinion. One aggregated clock of rate sites() drives the whole lattice
// (same-opinion picks are thinned no-ops). Stops at consensus, T, or the
// event cap.
struct VoterPath {
    std::vector<double> t;
    std::vector<std::uint64_t> ones;  // magnetization at recorded times
    SpinConfig final_config;
    double final_time = 0.0;
    bool consensus = false;
    int consensus_value = -1;
    bool capped = false;
};
VoterPath voter_simulate(const TorusLattice& lat, SpinConfig eta0, double tmax, RngStream& rng,
                         std::uint64_t record_every = 1,
                         std::uint64_t max_events = 50'000'000);

// Coalescing random walkers started on `start_sites`, each jumping at
// `jump_rate` through the lattice kernel. Co-located pairs merge instantly
// when kappa is infinite, else each co-located pair merges at rate kappa.
struct DualWalkersPath {
    std::vector<std::size_t> sites;          // surviving walker positions at T
    std::vector<double> coalescence_times;
    std::size_t initial_count = 0;
};
DualWalkersPath coalescing_rw_dual(const TorusLattice& lat, std::vector<std::size_t> start_sites,
                                   double tmax, double jump_rate, double kappa, RngStream& rng);

// Two-sided Monte-Carlo check of the product-moment duality
//   E[prod_{x in A} eta_t(x)] = E[prod_{y in A_t} eta_0(y)],
// voter replicates on the left, instantly coalescing walkers from A on the
// right, both from the same fixed eta0.
struct DualityMcCheck {
    double lhs = 0.0, lhs_se = 0.0;
    double rhs = 0.0, rhs_se = 0.0;
    double z = 0.0;  // |lhs-rhs| / combined SE
};
DualityMcCheck voter_duality_check(const TorusLattice& lat, const SpinConfig& eta0,
                                   const std::vector<std::size_t>& a_sites, double t,
                                   std::uint64_t reps, std::uint64_t seed, int threads = 1);

// Stepping-stone system of interacting two-type Wright-Fisher diffusions:
//   dX(x) = [ c sum_k p_k (X(x+k) - X(x)) + s X(x)(1 - X(x)) ] dt
//         + sqrt(2 gamma X(x)(1 - X(x))) dW_x,
// Euler-Maruyama per site, clipped to [0,1]. Requires dt (c + gamma) < 0.05.
struct FreqPath {
    std::vector<double> t;
    std::vector<FreqConfig> x;
};
FreqPath stepping_stone_simulate(const TorusLattice& lat, double c, double gamma, double s,
                                 FreqConfig x0, double tmax, double dt, RngStream& rng,
                                 int record_every = 1);

// Delayed-coalescing-dual prediction for the two-point function from the
// constant profile theta: two walkers start at 0 and xi, jump at rate c, and
// each co-located pair coalesces at rate 2*gamma (the Ito rate matching the
// noise above); E[X_0(t) X_xi(t)] = theta P(coalesced) + theta^2 P(not).
struct TwoPointPrediction {
    double prediction = 0.0;
    double se = 0.0;
    double p_coalesced = 0.0;
};
TwoPointPrediction stepping_stone_moment_dual(const TorusLattice& lat, double c, double gamma,
                                              std::size_t xi_site, double theta, double t,
                                              std::uint64_t reps, std::uint64_t seed,
                                              int threads = 1);

// probability that two delayed-coalescing walkers never meet again:
// 2 q0 qe / (kappa + 2 q0 qe), with q0 the co-located jump rate and qe the
// escape probability of the difference walk
double escape_probability(double q0, double qe, double kappa);

// Branching random walk: each particle walks at walk_rate through the kernel
// and at rate branch_rate is replaced by an offspring-law number of particles
// on its site. Simulation tracks per-site counts.
struct BrwPath {
    std::vector<double> t;
    std::vector<std::uint64_t> total;
    std::vector<std::uint64_t> final_occupancy;
    bool capped = false;
    bool extinct = false;
};
BrwPath brw_simulate(const TorusLattice& lat, double branch_rate, const OffspringLaw& law,
                     double walk_rate, std::vector<std::uint64_t> x0, double tmax,
                     RngStream& rng, std::uint64_t cap = 1'000'000,
                     std::uint64_t record_every = 1);

// ensemble-mean occupancy against the semigroup formula
//   e^{branch_rate (m-1) t} * exp(t walk_rate (P - I)) x0
struct BrwMeanReport {
    std::vector<double> mc_mean;
    std::vector<double> mc_se;
    std::vector<double> predicted;
    double max_rel_err = 0.0;
    double max_z = 0.0;
};
BrwMeanReport brw_mean_check(const TorusLattice& lat, double branch_rate,
                             const OffspringLaw& law, double walk_rate,
                             const std::vector<std::uint64_t>& x0, double t,
                             std::uint64_t reps, std::uint64_t seed, int threads = 1);

// dense CSV grid of a lattice snapshot (d = 1 one row, d = 2 L rows; higher d
// flattens the leading coordinates into consecutive row blocks)
std::string lattice_csv(const TorusLattice& lat, const std::vector<double>& values);

constexpr double kInstantCoalescence = std::numeric_limits<double>::infinity();

} // namespace popdyn
