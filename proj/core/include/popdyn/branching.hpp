#pragma once
#include <vector>
#include <string>
#include <cstdint>
#include "popdyn/offspring.hpp"
#include "popdyn/matrix.hpp"
#include "popdyn/rng.hpp"

namespace popdyn {

// ---- generation-counting simulators ----

struct BgwPath {
    std::vector<std::uint64_t> z; // Z_0 .. Z_n (shorter if capped)
    bool capped = false;          // population cap exceeded; replicate flagged
    int extinct_at = -1;          // first generation with Z = 0, or -1
};

// simple branching process: each individual leaves an independent offspring
// count; sums are formed by per-individual sampling (no normal or compound
// shortcut), and a replicate whose population passes `cap` stops with the
// capped flag set instead of being approximated further
BgwPath simulate_bgw(const OffspringLaw& law, std::uint64_t z0, int ngen, RngStream& rng,
                     std::uint64_t cap = 1000000000ULL);

// extinction-by-generation-n indicator with an early survival cutoff:
// once Z >= survive_threshold the replicate is counted as surviving, which is
// wrong with probability at most q^threshold (q = extinction probability),
// so choose the threshold so that q^threshold is far below the target SE
bool bgw_extinct_by(const OffspringLaw& law, int ngen, RngStream& rng,
                    std::uint64_t survive_threshold);

struct BgwiPath {
    std::vector<std::uint64_t> x;
    std::vector<double> w; // x_n / m^n, the rescaled series
    bool capped = false;
};

// branching with immigration: X_n = offspring of X_{n-1} plus an independent
// immigration batch Y_n each generation
BgwiPath simulate_bgwi(const OffspringLaw& law, const OffspringLaw& immigration,
                       std::uint64_t x0, int ngen, RngStream& rng,
                       std::uint64_t cap = 1000000000ULL);

// independent offspring counts per (parent type, child type) cell
struct MultitypePath {
    std::vector<std::vector<std::uint64_t>> z; // z[n][type]
    bool capped = false;
};
MultitypePath simulate_multitype_bgw(const std::vector<std::vector<OffspringLaw>>& laws,
                                     std::vector<std::uint64_t> z0, int ngen, RngStream& rng,
                                     std::uint64_t cap = 1000000000ULL);

// ---- plane trees ----

struct PlaneTree {
    // nodes in creation order; traversal uses the children lists
    std::vector<int> parent;                // -1 at the root
    std::vector<std::vector<int>> children; // ordered
    std::vector<int> depth;
    std::vector<int> spine;                 // node ids of the distinguished line (may be empty)
    bool truncated = false;                 // growth stopped at max_size

    std::size_t size() const { return parent.size(); }
};

// genealogy of a branching population grown generation by generation until
// all lines die out or max_size nodes exist (then `truncated` is set)
PlaneTree sample_bgw_tree(const OffspringLaw& law, std::size_t max_size, RngStream& rng);

// tree with a distinguished infinite line: spine nodes reproduce by the
// size-biased law k p_k / m, a uniformly chosen child continues the spine,
// all other children start ordinary populations; grown for ngen generations
PlaneTree sample_size_biased_tree(const OffspringLaw& law, int ngen, std::size_t max_size,
                                  RngStream& rng);

// uniform plane tree with exactly n vertices (the shape law of the
// geometric(1/2) offspring tree conditioned on total size n). The cycle-lemma
// construction is used for n > 50; small n uses exact rejection on walk
// excursion lengths. Both are exposed for cross-checks.
PlaneTree sample_conditioned_geometric_tree(std::size_t n, RngStream& rng);
PlaneTree conditioned_tree_cycle_lemma(std::size_t n, RngStream& rng);
PlaneTree conditioned_tree_rejection(std::size_t n, RngStream& rng);

struct ContourHeight {
    std::vector<int> contour; // 2(size-1)+1 entries, depth-first edge walk
    std::vector<int> height;  // depth of each vertex in depth-first order
};
ContourHeight contour_and_height(const PlaneTree& tree);

std::vector<std::uint64_t> level_counts(const PlaneTree& tree);

// "[k child child ...]" nested child-count form, depth-first
std::string tree_brackets(const PlaneTree& tree);
// Newick-like with dotted child-index labels
std::string tree_newick(const PlaneTree& tree);

// ---- mean-matrix spectral data ----

struct PerronRoot {
    double rho = 0.0;
    std::vector<double> u; // Mu = rho u, sum u_i = 1
    std::vector<double> v; // v M = rho v, sum u_i v_i = 1
    int iterations = 0;
};

// power iteration for an entrywise-nonnegative primitive matrix; throws
// std::domain_error when no power of the sparsity pattern is strictly
// positive (periodic or reducible mean matrices have no spectral growth
// direction in this sense)
PerronRoot perron_frobenius(const Matrix& m, double tol = 1e-12, int max_iter = 100000);

// ---- critical-limit diagnostics ----

struct CriticalLimitEstimates {
    double n_survival = 0.0;  // n * P_hat(Z_n > 0)
    double n_survival_se = 0.0;
    double ks_distance = 0.0; // Z_n / n given survival vs Exp(mean sigma^2/2)
    std::uint64_t survivors = 0;
    bool inconclusive = false; // no surviving replicate
};

CriticalLimitEstimates critical_limit_estimates(const OffspringLaw& law, int n,
                                                std::uint64_t reps, std::uint64_t seed,
                                                int threads = 0);

} // namespace popdyn
