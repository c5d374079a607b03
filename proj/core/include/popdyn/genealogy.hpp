#pragma once
#include "popdyn/rng.hpp"
#include "popdyn/matrix.hpp"
#include <cstdint>
#include <string>
#include <vector>

namespace popdyn {

// Partition of {1..n} stored 0-based; blocks kept canonical: each block sorted
// ascending, blocks ordered by smallest element.
struct Partition {
    std::vector<std::vector<int>> blocks;

    static Partition singletons(std::size_t n);
    void canonicalize();
    std::size_t size() const { return blocks.size(); }
    // multiplicity vector a[j-1] = number of blocks of size j, j = 1..n
    std::vector<int> multiplicities(std::size_t n) const;
};

// Exchangeable coalescent realization run down to one block. partitions[e] is
// the state after the event at times[e]; the initial state is singletons.
struct CoalescentPath {
    std::size_t n = 0;
    std::vector<double> times;
    std::vector<Partition> partitions;

    double mrca_time() const { return times.empty() ? 0.0 : times.back(); }
};

// Kingman coalescent: each unordered pair of blocks merges at rate gamma, so
// the block count k drops at rate gamma k(k-1)/2 and the merging pair is
// uniform.
CoalescentPath kingman_sample(std::size_t n, double gamma, RngStream& rng);

// Finite measure on [0,1] given as an atom at 0 plus a piecewise-constant
// density (breaks[0] = 0 < ... < breaks[m] = 1, height[p] on piece p). The
// k-merger rate with b blocks,
//   lambda_{b,k} = atom (k = 2 only) + integral y^{k-2}(1-y)^{b-k} density dy,
// is evaluated exactly per piece through the regularized incomplete beta.
struct LambdaMeasure {
    double atom_at_zero = 0.0;
    std::vector<double> breaks;
    std::vector<double> height;

    static LambdaMeasure delta_zero(double weight);
    static LambdaMeasure uniform(double weight = 1.0);
    void validate() const;
    double total_mass() const;
    double merger_rate(std::uint64_t b, std::uint64_t k) const;
    // sum over k of C(b,k) lambda_{b,k}, the total event rate at b blocks
    double total_rate(std::uint64_t b) const;
};

// Lambda-coalescent: with b blocks, each k-subset of blocks merges at rate
// lambda_{b,k}; the event size is sampled from C(b,k) lambda_{b,k} and the
// subset uniformly.
CoalescentPath lambda_coalescent_sample(std::size_t n, const LambdaMeasure& lambda,
                                        RngStream& rng);

// event-list serialization: one row per merger (time, blocks remaining, the
// members of the block just formed, 1-based, joined with '+')
std::string coalescent_event_csv(const CoalescentPath& path);
// ultrametric Newick string; branch lengths = merger-time differences
std::string coalescent_newick(const CoalescentPath& path);

// Interacting particle systems on types {0..K-1}. Mutation is a rate matrix
// with zero diagonal (empty matrix = no mutation), acting independently per
// particle in both models.
struct ParticlePath {
    std::vector<double> t;
    std::vector<std::vector<std::uint64_t>> counts;  // per-type occupancy
    std::vector<int> final_types;
};

// Moran model: every ordered particle pair (i, j) resamples at rate gamma/2,
// with j adopting i's type. The per-ordered-pair rate gamma/2 makes the
// empirical measure law match lookdown_simulate at per-unordered-pair rate
// gamma.
ParticlePath moran_simulate(std::vector<int> init_types, std::size_t K, double gamma,
                            const Matrix& mutation_rates, double tmax, RngStream& rng);

// Lookdown model: for each i < j, particle j copies particle i at rate gamma.
// The empirical measure agrees with the Moran model only for exchangeable
// initial conditions; shuffle deterministic initial types before calling.
ParticlePath lookdown_simulate(std::vector<int> init_types, std::size_t K, double gamma,
                               const Matrix& mutation_rates, double tmax, RngStream& rng);

// Hoppe-urn sample of the allelic partition: customer i starts a new block
// with probability theta/(theta+i-1), otherwise joins a block proportionally
// to its size.
Partition ewens_sample(std::size_t n, double theta, RngStream& rng);

// Probability of the multiplicity vector a (a[j-1] blocks of size j):
//   n! Gamma(theta)/Gamma(n+theta) * prod_j theta^{a_j} / (j^{a_j} a_j!)
double ewens_probability(const std::vector<int>& a, double theta);

// Ranked or size-biased mass vector with the truncated remainder.
struct AtomVector {
    std::vector<double> xi;
    double remainder = 0.0;
};

// Stick-breaking with v_j iid Beta(1,theta), in size-biased order; stops when
// the remaining stick drops below eps. xi sums to 1 - remainder up to rounding
// (the remainder is maintained by subtraction, not reproduct).
AtomVector gem_sample(double theta, double eps, RngStream& rng);

// Ranked masses via the gamma-subordinator jump construction: the k-th
// largest jump is E1^{-1}(G_k/theta) for unit-Poisson arrivals G_k, cut at
// u_min = -log1p(-eps) so the expected missed mass is below eps of the total;
// kept jumps are normalized to sum 1 (relative bias of order eps).
AtomVector pd_sample_via_gamma(double theta, double eps, RngStream& rng);

// h_n = (n-1)! / ((1+theta)(2+theta)...(n-1+theta)), the probability that a
// size-n sample is monotypic
double homozygosity(std::size_t n, double theta);

} // namespace popdyn
