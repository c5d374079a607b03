#pragma once
#include "popdyn/rng.hpp"
#include <cstdint>
#include <vector>

namespace popdyn {

// Reed-Frost chain: in each generation every susceptible independently
// escapes all current infecteds with probability e^{-lambda I_t / N}, so
//   S_{t+1} ~ Bin(S_t, e^{-lambda I_t / N}),  I_{t+1} = S_t - S_{t+1},
// and infecteds recover after one generation. S + I + R is conserved.
struct ReedFrostPath {
    std::vector<std::uint64_t> s, i, r;
    std::uint64_t final_size() const { return r.empty() ? 0 : r.back(); }
};

ReedFrostPath reed_frost_simulate(std::uint64_t N, double lambda, std::uint64_t i0,
                                  RngStream& rng);

// Large-outbreak probability per lambda, with the outbreak called large when
// the final size exceeds sqrt(N) (separates O(1) subcritical clusters from
// Theta(N) outbreaks).
struct ThresholdRow {
    double lambda = 0.0;
    double p_large = 0.0;
    double se = 0.0;
    double mean_final_size = 0.0;
};
std::vector<ThresholdRow> reed_frost_threshold_scan(std::uint64_t N,
                                                    const std::vector<double>& lambdas,
                                                    std::uint64_t i0, std::uint64_t reps,
                                                    std::uint64_t seed, int threads = 1);

} // namespace popdyn
