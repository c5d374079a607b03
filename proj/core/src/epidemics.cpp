#include "popdyn/epidemics.hpp"
#include "popdyn/ensemble.hpp"
#include <cmath>
#include <stdexcept>

namespace popdyn {

ReedFrostPath reed_frost_simulate(std::uint64_t N, double lambda, std::uint64_t i0,
                                  RngStream& rng) {
    if (N == 0 || i0 == 0 || i0 > N) throw std::invalid_argument("reed_frost: need 1 <= I0 <= N");
    if (lambda < 0.0) throw std::invalid_argument("reed_frost: lambda >= 0");
    ReedFrostPath path;
    std::uint64_t s = N - i0, i = i0, r = 0;
    path.s.push_back(s);
    path.i.push_back(i);
    path.r.push_back(r);
    while (i > 0) {
        double escape = std::exp(-lambda * static_cast<double>(i) / static_cast<double>(N));
        std::uint64_t survivors = rng.binomial(s, escape);
        r += i;
        i = s - survivors;
        s = survivors;
        path.s.push_back(s);
        path.i.push_back(i);
        path.r.push_back(r);
    }
    return path;
}

std::vector<ThresholdRow> reed_frost_threshold_scan(std::uint64_t N,
                                                    const std::vector<double>& lambdas,
                                                    std::uint64_t i0, std::uint64_t reps,
                                                    std::uint64_t seed, int threads) {
    if (reps == 0) throw std::invalid_argument("reed_frost_threshold_scan: reps >= 1");
    const double cutoff = std::sqrt(static_cast<double>(N));
    std::vector<ThresholdRow> table;
    table.reserve(lambdas.size());
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        const double lambda = lambdas[li];
        // separate stream family per lambda so rows are independent
        std::string tag = "reed-frost-lambda-" + std::to_string(li);
        EnsembleSpec spec{derive_seed(seed, tag.c_str()), reps, threads};
        auto sizes = run_replicates<std::uint64_t>(spec, [&](std::uint64_t, RngStream& rng) {
            return reed_frost_simulate(N, lambda, i0, rng).final_size();
        });
        ThresholdRow row;
        row.lambda = lambda;
        double large = 0.0, total = 0.0;
        for (std::uint64_t fs : sizes) {
            total += static_cast<double>(fs);
            if (static_cast<double>(fs) > cutoff) large += 1.0;
        }
        row.p_large = large / static_cast<double>(reps);
        row.se = std::sqrt(row.p_large * (1.0 - row.p_large) / static_cast<double>(reps));
        row.mean_final_size = total / static_cast<double>(reps);
        table.push_back(row);
    }
    return table;
}

} // namespace popdyn
