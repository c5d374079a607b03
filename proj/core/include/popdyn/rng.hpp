#pragma once
#include <cstdint>
#include <vector>
#include <cstddef>

namespace popdyn {

// Splittable counter-seeded generator. A stream is a pure function of
// (master_seed, stream_id): replicate k of an ensemble always draws the same
// numbers no matter which worker thread runs it or in what order. The state
// is xoshiro256**, seeded through two SplitMix64 passes so that nearby ids
// land in unrelated regions of the state space.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t next_u64();

    // uniform on [0,1) with 53 random bits
    double uniform();
    // uniform on {0, 1, ..., n-1}, unbiased (rejection on the top range)
    std::uint64_t uniform_below(std::uint64_t n);
    double exponential(double rate);
    double normal();                       // standard normal, polar method
    double gamma(double shape, double scale = 1.0);
    double beta(double a, double b);
    bool bernoulli(double p) { return uniform() < p; }

    // exact Binomial(n, p); geometric skips when the cheap side is thin,
    // otherwise a plain Bernoulli scan (n in this codebase stays <= ~1e4)
    std::uint64_t binomial(std::uint64_t n, double p);

    // sequential conditional binomial split of n into probs.size() cells
    std::vector<std::uint64_t> multinomial(std::uint64_t n, const std::vector<double>& probs);

    // index sample from a cdf table (upper_bound search)
    std::size_t sample_cdf(const std::vector<double>& cdf);

    std::uint64_t master_seed() const { return master_; }
    std::uint64_t stream_id() const { return id_; }

private:
    std::uint64_t s_[4];
    std::uint64_t master_, id_;
    double spare_normal_ = 0.0;
    bool have_spare_ = false;
};

// stable 64-bit hash for deriving sub-seeds from string tags
std::uint64_t hash_tag(const char* tag);
std::uint64_t mix64(std::uint64_t x);

} // namespace popdyn
