#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "popdyn/wrightfisher.hpp"
#include "popdyn/duality.hpp"
#include "popdyn/specfun.hpp"
#include "popdyn/stats.hpp"

#include <cmath>
#include <vector>

using namespace popdyn;

// ---- discrete chain ---------------------------------------------------------

TEST_CASE("chain spec validation rejects malformed inputs") {
    WfChainSpec ok = WfChainSpec::neutral(50, 3);
    CHECK_NOTHROW(ok.validate());

    WfChainSpec bad_rows = ok;
    bad_rows.mutation(0, 0) = 0.5;  // row no longer sums to 1
    CHECK_THROWS_AS(bad_rows.validate(), std::invalid_argument);

    WfChainSpec bad_viab = ok;
    bad_viab.viability(0, 1) = 2.0;  // asymmetric
    CHECK_THROWS_AS(bad_viab.validate(), std::invalid_argument);

    WfChainSpec tiny = ok;
    tiny.K = 1;
    CHECK_THROWS_AS(tiny.validate(), std::invalid_argument);
}

TEST_CASE("neutral chain is a martingale with binomial sampling noise") {
    WfChainSpec spec = WfChainSpec::neutral(50, 2);
    RngStream rng(61, 0);
    const int reps = 20000;
    std::vector<double> p1;
    p1.reserve(reps);
    for (int r = 0; r < reps; ++r) {
        auto p = wf_chain_step(spec, {0.3, 0.7}, rng);
        REQUIRE(p.size() == 2);
        CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));
        p1.push_back(p[0]);
    }
    Summary s = summarize(p1);
    CHECK(std::abs(s.mean - 0.3) < 4 * s.se);
    // one-generation variance p(1-p)/N
    double var_target = 0.3 * 0.7 / 50.0;
    double var_se = s.variance * std::sqrt(2.0 / (reps - 1.0));
    CHECK(std::abs(s.variance - var_target) < 5 * var_se);
}

TEST_CASE("mutation acts as the stochastic matrix on the mean") {
    WfChainSpec spec = WfChainSpec::neutral(100, 2);
    spec.mutation(0, 0) = 0.2; spec.mutation(0, 1) = 0.8;
    spec.mutation(1, 0) = 0.0; spec.mutation(1, 1) = 1.0;
    spec.validate();
    RngStream rng(62, 0);
    const int reps = 20000;
    std::vector<double> p1;
    for (int r = 0; r < reps; ++r)
        p1.push_back(wf_chain_step(spec, {1.0, 0.0}, rng)[0]);
    Summary s = summarize(p1);
    CHECK(std::abs(s.mean - 0.2) < 4 * s.se);
}

TEST_CASE("chain trajectories stay on the simplex and record the endpoint") {
    WfChainSpec spec = WfChainSpec::neutral(30, 3);
    spec.diploid_sampling = true;
    RngStream rng(63, 0);
    OdeTrajectory traj = wf_chain_run(spec, {0.2, 0.3, 0.5}, 100, rng, 10);
    REQUIRE(traj.t.size() == traj.y.size());
    CHECK(traj.t.back() == doctest::Approx(100.0));
    for (const auto& p : traj.y) {
        double sum = 0.0;
        for (double v : p) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

// ---- diffusion ----------------------------------------------------------------

TEST_CASE("diffusion spec validation") {
    WfDiffusionSpec spec;
    spec.K = 2;
    spec.gamma = 1.0;
    CHECK_NOTHROW(spec.validate());

    WfDiffusionSpec no_nu = spec;
    no_nu.theta = 1.0;  // theta > 0 needs nu
    CHECK_THROWS_AS(no_nu.validate(), std::invalid_argument);

    WfDiffusionSpec bad_mut = spec;
    bad_mut.mutation_rates = Matrix(2);
    bad_mut.mutation_rates(0, 0) = 0.5;  // diagonal must be zero
    CHECK_THROWS_AS(bad_mut.validate(), std::invalid_argument);
}

TEST_CASE("neutral diffusion moments match the block-counting dual") {
    WfDiffusionSpec spec;
    spec.K = 2;
    spec.gamma = 1.0;
    const double p0 = 0.4, t = 1.0, dt = 2e-3;
    const int reps = 20000;
    RngStream rng(64, 0);
    std::vector<double> m2, m3;
    for (int r = 0; r < reps; ++r) {
        OdeTrajectory traj = wf_diffusion_simulate(spec, {p0, 1 - p0}, t, dt, rng, 1000);
        double p = traj.y.back()[0];
        m2.push_back(p * p);
        m3.push_back(p * p * p);
    }
    Summary s2 = summarize(m2), s3 = summarize(m3);
    // allow the O(dt) weak-error term on top of the Monte-Carlo band
    double allowance = 2.0 * spec.gamma * dt;
    CHECK(std::abs(s2.mean - wf_moment_dual_exact(p0, 1.0, 2, t)) < 4 * s2.se + allowance);
    CHECK(std::abs(s3.mean - wf_moment_dual_exact(p0, 1.0, 3, t)) < 4 * s3.se + allowance);
}

TEST_CASE("moment ode agrees with the dual chain and the frozen oracle") {
    // E[p^3] at p0 = 0.3, gamma = 1, t = 0.8; reference from expm of the
    // death chain computed independently
    const double oracle = 0.16227153034123057;
    CHECK(wf_moment_dual_exact(0.3, 1.0, 3, 0.8) == doctest::Approx(oracle).epsilon(1e-11));

    MomentOdeResult r = wf_moment_ode(1.0, 0.0, {}, {{3, 0}}, {0.3, 0.7}, 0.8, 1e-3);
    // locate E[p1^3] in the closed index set
    std::size_t pos = r.indices.size();
    for (std::size_t i = 0; i < r.indices.size(); ++i)
        if (r.indices[i] == std::vector<int>{3, 0}) pos = i;
    REQUIRE(pos < r.indices.size());
    CHECK(r.traj.y.back()[pos] == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("fixation experiment approaches the entropy formula") {
    const std::uint64_t N = 40;
    FixationResult fr = wf_fixation_experiment(N, 0.5, 1200, 707, 1, 2e-4);
    REQUIRE(fr.reps == 1200);
    double target = static_cast<double>(N) * std::log(2.0);  // ~27.7 generations
    CHECK(std::abs(fr.mean_generations - target) < 4 * fr.se_generations + 0.05 * target);
    CHECK(std::abs(fr.fixed_at_one - 0.5) < 4 * fr.fixed_at_one_se);
}

// ---- dirichlet helpers ----------------------------------------------------------

TEST_CASE("dirichlet moment formula") {
    // both match E[p^2] = 0.2 and E[pq] = 0.2 for Dirichlet(2,3)
    CHECK(dirichlet_moment({2.0, 3.0}, {1, 1}) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(dirichlet_moment({2.0, 3.0}, {2, 0}) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(dirichlet_moment({1.0, 1.0}, {1, 0}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(dirichlet_moment({2.0, 3.0}, {0, 0}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dirichlet sampling hits the mean vector") {
    RngStream rng(65, 0);
    const int reps = 20000;
    std::vector<double> c0, c1, c2;
    for (int r = 0; r < reps; ++r) {
        auto p = dirichlet_sample({1.0, 2.0, 3.0}, rng);
        REQUIRE(p.size() == 3);
        CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-12));
        c0.push_back(p[0]);
        c1.push_back(p[1]);
        c2.push_back(p[2]);
    }
    Summary s0 = summarize(c0), s1 = summarize(c1), s2 = summarize(c2);
    CHECK(std::abs(s0.mean - 1.0 / 6.0) < 4 * s0.se);
    CHECK(std::abs(s1.mean - 2.0 / 6.0) < 4 * s1.se);
    CHECK(std::abs(s2.mean - 3.0 / 6.0) < 4 * s2.se);
}

// ---- stationary density -----------------------------------------------------------

TEST_CASE("neutral stationary masses reproduce the beta law") {
    WfDiffusionSpec spec;
    spec.K = 2;
    spec.gamma = 1.0;
    spec.theta = 3.0;
    spec.nu = {1.0 / 3.0, 2.0 / 3.0};  // theta nu / gamma = (1, 2)
    DensityTable tab = selection_stationary_density(spec, 2000);
    REQUIRE(tab.p.size() == 2000);
    double total = 0.0;
    for (double m : tab.mass) total += m;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    // cell mass vs exact Beta(1,2) cdf increments; midpoint quadrature error
    double h = 1.0 / 2000.0;
    for (std::size_t i = 0; i < tab.p.size(); i += 157) {
        double lo = tab.p[i] - h / 2, hi = tab.p[i] + h / 2;
        double exact = beta_cdf(1.0, 2.0, hi) - beta_cdf(1.0, 2.0, lo);
        CHECK(tab.mass[i] == doctest::Approx(exact).epsilon(1e-5));
    }
}

TEST_CASE("selection tilts the stationary law toward the favored allele") {
    WfDiffusionSpec neutral;
    neutral.K = 2;
    neutral.gamma = 1.0;
    neutral.theta = 2.0;
    neutral.nu = {0.5, 0.5};
    WfDiffusionSpec sel = neutral;
    sel.sigma = Matrix(2);
    sel.sigma(0, 0) = 3.0;  // strong homozygote advantage for allele 1
    DensityTable tn = selection_stationary_density(neutral, 500);
    DensityTable ts = selection_stationary_density(sel, 500);
    double mean_n = 0.0, mean_s = 0.0;
    for (std::size_t i = 0; i < 500; ++i) {
        mean_n += tn.p[i] * tn.mass[i];
        mean_s += ts.p[i] * ts.mass[i];
    }
    CHECK(mean_n == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(mean_s > mean_n + 0.05);
}
