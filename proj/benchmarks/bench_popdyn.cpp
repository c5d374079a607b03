// Microbenchmarks for the hot loops: raw variate generation, the per-event
// costs of the jump-chain simulators, per-step costs of the diffusion
// schemes, and the dense linear-algebra kernels behind the exact engines.
#include <benchmark/benchmark.h>

#include "popdyn/birthdeath.hpp"
#include "popdyn/branching.hpp"
#include "popdyn/duality.hpp"
#include "popdyn/epidemics.hpp"
#include "popdyn/genealogy.hpp"
#include "popdyn/rng.hpp"
#include "popdyn/spatial.hpp"
#include "popdyn/wrightfisher.hpp"

using namespace popdyn;

static void BM_RngUniform(benchmark::State& state) {
    RngStream rng(1, 0);
    double acc = 0.0;
    for (auto _ : state) acc += rng.uniform();
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_RngUniform);

static void BM_RngNormal(benchmark::State& state) {
    RngStream rng(1, 1);
    double acc = 0.0;
    for (auto _ : state) acc += rng.normal();
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_RngNormal);

static void BM_RngBinomial(benchmark::State& state) {
    RngStream rng(1, 2);
    std::uint64_t acc = 0;
    for (auto _ : state) acc += rng.binomial(100, 0.3);
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_RngBinomial);

static void BM_BgwPath(benchmark::State& state) {
    OffspringLaw law = OffspringLaw::geometric_half();
    RngStream rng(2, 0);
    for (auto _ : state) {
        BgwPath p = simulate_bgw(law, 1, static_cast<int>(state.range(0)), rng);
        benchmark::DoNotOptimize(p.z.data());
    }
}
BENCHMARK(BM_BgwPath)->Arg(20)->Arg(100);

static void BM_BdGillespie(benchmark::State& state) {
    RngStream rng(3, 0);
    for (auto _ : state) {
        BdPath p = bd_gillespie(1.05, 1.0, 20, 5.0, rng);
        benchmark::DoNotOptimize(p.n.data());
    }
}
BENCHMARK(BM_BdGillespie);

static void BM_BdLaw(benchmark::State& state) {
    for (auto _ : state) {
        auto law = bd_law(2.0, 1.0, 1.0);
        benchmark::DoNotOptimize(law.data());
    }
}
BENCHMARK(BM_BdLaw);

static void BM_CsbpPath(benchmark::State& state) {
    CsbpParams params{0.0, 1.0, 0.0};
    RngStream rng(4, 0);
    for (auto _ : state) {
        CsbpPath p = csbp_simulate(params, 1.0, 1.0, 1e-3, rng, 1000);
        benchmark::DoNotOptimize(p.x.data());
    }
}
BENCHMARK(BM_CsbpPath);

static void BM_WfDiffusionPath(benchmark::State& state) {
    WfDiffusionSpec spec;
    spec.K = static_cast<std::size_t>(state.range(0));
    spec.gamma = 1.0;
    spec.theta = 1.0;
    spec.nu.assign(spec.K, 1.0 / static_cast<double>(spec.K));
    std::vector<double> p0(spec.K, 1.0 / static_cast<double>(spec.K));
    RngStream rng(5, 0);
    for (auto _ : state) {
        OdeTrajectory t = wf_diffusion_simulate(spec, p0, 0.1, 1e-3, rng, 100);
        benchmark::DoNotOptimize(t.y.data());
    }
}
BENCHMARK(BM_WfDiffusionPath)->Arg(2)->Arg(4);

static void BM_MatrixExp(benchmark::State& state) {
    RngStream rng(6, 0);
    Matrix q = random_irreducible_generator(static_cast<std::size_t>(state.range(0)), rng);
    for (auto _ : state) {
        Matrix p = matrix_exp_transition(q, 1.0);
        benchmark::DoNotOptimize(p.a.data());
    }
}
BENCHMARK(BM_MatrixExp)->Arg(4)->Arg(8);

static void BM_SetDualExp(benchmark::State& state) {
    // 2^K-state dual generator exponential, the kernel behind the exact
    // duality sweeps
    RngStream rng(7, 0);
    Matrix q = random_irreducible_generator(5, rng);
    Matrix h = set_dual_generator(q);
    for (auto _ : state) {
        Matrix p = matrix_exp_transition(h, 1.0);
        benchmark::DoNotOptimize(p.a.data());
    }
}
BENCHMARK(BM_SetDualExp);

static void BM_KingmanPath(benchmark::State& state) {
    RngStream rng(8, 0);
    for (auto _ : state) {
        CoalescentPath p = kingman_sample(static_cast<std::size_t>(state.range(0)), 1.0, rng);
        benchmark::DoNotOptimize(p.times.data());
    }
}
BENCHMARK(BM_KingmanPath)->Arg(10)->Arg(50);

static void BM_EwensSample(benchmark::State& state) {
    RngStream rng(9, 0);
    for (auto _ : state) {
        Partition p = ewens_sample(50, 1.0, rng);
        benchmark::DoNotOptimize(p.blocks.data());
    }
}
BENCHMARK(BM_EwensSample);

static void BM_VoterPath(benchmark::State& state) {
    TorusLattice lat = TorusLattice::nearest_neighbor(1, 32);
    SpinConfig eta0(32, 0);
    for (std::size_t i = 0; i < 16; ++i) eta0[i] = 1;
    RngStream rng(10, 0);
    for (auto _ : state) {
        VoterPath p = voter_simulate(lat, eta0, 1.0, rng, 1000);
        benchmark::DoNotOptimize(p.final_config.data());
    }
}
BENCHMARK(BM_VoterPath);

static void BM_ReedFrost(benchmark::State& state) {
    RngStream rng(11, 0);
    for (auto _ : state) {
        ReedFrostPath p = reed_frost_simulate(10000, 1.5, 1, rng);
        benchmark::DoNotOptimize(p.r.data());
    }
}
BENCHMARK(BM_ReedFrost);

BENCHMARK_MAIN();
