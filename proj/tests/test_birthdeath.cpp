#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "popdyn/birthdeath.hpp"
#include "popdyn/life_history.hpp"
#include "popdyn/stats.hpp"

#include <cmath>
#include <vector>

using namespace popdyn;

// ---- closed-form transition law --------------------------------------------
// reference values frozen from the exponential of a 601-state truncated
// generator (independent of the geometric-with-atom formulas used here)

TEST_CASE("supercritical transition law matches the truncated-generator oracle") {
    std::vector<double> law = bd_law(2.0, 1.0, 0.5);
    REQUIRE(law.size() >= 6);
    CHECK(law[0] == doctest::Approx(0.28236670080320486).epsilon(1e-10));
    CHECK(law[1] == doctest::Approx(0.31236180503534333).epsilon(1e-10));
    CHECK(law[2] == doctest::Approx(0.17640114468953025).epsilon(1e-10));
    CHECK(law[3] == doctest::Approx(0.09961961848778490).epsilon(1e-10));
    CHECK(law[4] == doctest::Approx(0.05625852601534037).epsilon(1e-10));
    CHECK(law[5] == doctest::Approx(0.03177106876600623).epsilon(1e-10));
    double sum = 0.0;
    for (double p : law) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("critical transition law matches the bt/(1+bt) family") {
    std::vector<double> law = bd_law(1.0, 1.0, 2.0);
    REQUIRE(law.size() >= 4);
    CHECK(law[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(law[1] == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(law[2] == doctest::Approx(2.0 / 27.0).epsilon(1e-12));
    CHECK(law[3] == doctest::Approx(4.0 / 81.0).epsilon(1e-12));
}

TEST_CASE("law moments agree with the moment formulas") {
    double b = 1.3, d = 0.6, t = 1.1;
    std::vector<double> law = bd_law(b, d, t, 1e-14);
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < law.size(); ++k) {
        m1 += static_cast<double>(k) * law[k];
        m2 += static_cast<double>(k) * static_cast<double>(k) * law[k];
    }
    BdMoments mom = bd_moments(b, d, 1.0, t);
    CHECK(mom.mean == doctest::Approx(std::exp((b - d) * t)).epsilon(1e-12));
    CHECK(m1 == doctest::Approx(mom.mean).epsilon(1e-9));
    CHECK(m2 == doctest::Approx(mom.second_moment).epsilon(1e-8));
    CHECK(mom.variance == doctest::Approx(mom.second_moment - mom.mean * mom.mean).epsilon(1e-10));
}

TEST_CASE("laplace transform matches the oracle and the law sum") {
    CHECK(bd_laplace(2.0, 1.0, 1.0, 0.5, 0.7)
          == doctest::Approx(0.49793443255891146).epsilon(1e-10));
    // x0 ancestors branch independently, so the transform is a power
    double one = bd_laplace(1.1, 0.9, 1.0, 0.8, 0.4);
    CHECK(bd_laplace(1.1, 0.9, 3.0, 0.8, 0.4) == doctest::Approx(one * one * one).epsilon(1e-12));
    // direct sum over the law must agree
    std::vector<double> law = bd_law(1.1, 0.9, 0.8, 1e-14);
    double s = 0.0;
    for (std::size_t k = 0; k < law.size(); ++k)
        s += law[k] * std::exp(-0.4 * static_cast<double>(k));
    CHECK(s == doctest::Approx(one).epsilon(1e-10));
}

// ---- jump-chain simulator ---------------------------------------------------

TEST_CASE("gillespie paths are unit-step jump chains with the right mean") {
    const double b = 1.2, d = 0.8, t = 1.0;
    RngStream rng(51, 0);
    std::vector<double> finals;
    for (int r = 0; r < 4000; ++r) {
        BdPath p = bd_gillespie(b, d, 3, t, rng);
        REQUIRE_FALSE(p.capped);
        REQUIRE(p.t.size() == p.n.size());
        REQUIRE(p.t[0] == 0.0);
        REQUIRE(p.n[0] == 3);
        for (std::size_t e = 1; e < p.n.size(); ++e) {
            CHECK(p.t[e] > p.t[e - 1]);
            std::int64_t diff = static_cast<std::int64_t>(p.n[e])
                              - static_cast<std::int64_t>(p.n[e - 1]);
            CHECK((diff == 1 || diff == -1));
        }
        finals.push_back(static_cast<double>(p.n.back()));
    }
    Summary s = summarize(finals);
    CHECK(std::abs(s.mean - 3.0 * std::exp((b - d) * t)) < 4 * s.se);
}

TEST_CASE("final-value helper has the transition-law distribution") {
    const double b = 2.0, d = 1.0, t = 0.5;
    std::vector<double> law = bd_law(b, d, t);
    const int reps = 30000;
    RngStream rng(52, 0);
    std::vector<double> obs(law.size() + 1, 0.0);
    for (int r = 0; r < reps; ++r) {
        std::uint64_t v = bd_final_value(b, d, 1, t, rng);
        if (v < law.size()) obs[v] += 1.0;
        else obs.back() += 1.0;
    }
    std::vector<double> expd;
    double used = 0.0;
    for (double p : law) { expd.push_back(p * reps); used += p; }
    expd.push_back((1.0 - used) * reps);
    CHECK(chi2_test(obs, expd).p_value > 1e-4);
}

// ---- continuous-state branching ---------------------------------------------
// exponent references frozen from rtol 1e-12 numerical integration of
// u' = m u - gamma u^2

TEST_CASE("laplace exponent matches integrated references") {
    CHECK(csbp_laplace(0.5, 1.0, 2.0, 1.5) == doctest::Approx(0.77432333243800711).epsilon(1e-9));
    CHECK(csbp_laplace(0.0, 1.0, 3.0, 2.0) == doctest::Approx(3.0 / 7.0).epsilon(1e-10));
    CHECK(csbp_laplace(-0.7, 0.4, 1.2, 3.0) == doctest::Approx(0.091742312694917765).epsilon(1e-9));
}

TEST_CASE("laplace exponent satisfies the flow property") {
    const double m = 0.5, g = 1.0, theta = 2.0;
    double via_s = csbp_laplace(m, g, csbp_laplace(m, g, theta, 0.6), 0.9);
    CHECK(csbp_laplace(m, g, theta, 1.5) == doctest::Approx(via_s).epsilon(1e-9));
}

TEST_CASE("diffusion paths have the branching mean and a real absorbing state") {
    CsbpParams sup{0.3, 1.0, 0.0};
    RngStream rng(53, 0);
    std::vector<double> finals;
    for (int r = 0; r < 3000; ++r) {
        CsbpPath p = csbp_simulate(sup, 1.0, 1.0, 1e-3, rng, 100);
        REQUIRE(p.t.size() == p.x.size());
        CHECK(p.t.back() == doctest::Approx(1.0).epsilon(1e-9));
        if (p.absorbed) CHECK(p.x.back() == 0.0);
        finals.push_back(p.x.back());
    }
    Summary s = summarize(finals);
    CHECK(std::abs(s.mean - std::exp(0.3)) < 4 * s.se);
}

TEST_CASE("strongly subcritical paths absorb; immigration never does") {
    RngStream rng(54, 0);
    CsbpParams sub{-1.0, 1.5, 0.0};
    int absorbed = 0;
    for (int r = 0; r < 200; ++r) {
        CsbpPath p = csbp_simulate(sub, 0.5, 8.0, 1e-3, rng, 1000);
        if (p.absorbed) {
            ++absorbed;
            CHECK(p.x.back() == 0.0);
        }
    }
    CHECK(absorbed > 150);

    CsbpParams imm{-1.0, 1.5, 0.8};
    for (int r = 0; r < 50; ++r) {
        CsbpPath p = csbp_simulate(imm, 0.5, 4.0, 1e-3, rng, 1000);
        CHECK_FALSE(p.absorbed);
    }
}

TEST_CASE("critical conditioned limit has exact survival scaling") {
    // p0(t) = bt/(1+bt) exactly, so survival * (1 + bt) centers on 1
    const double b = 1.0, t = 40.0;
    CriticalBdLimit lim = critical_bd_conditioned_limit(b, t, 200000, 606, 1);
    REQUIRE_FALSE(lim.inconclusive);
    double scaled = lim.survival * (1.0 + b * t);
    double scaled_se = lim.survival_se * (1.0 + b * t);
    CHECK(std::abs(scaled - 1.0) < 5 * scaled_se);
    CHECK(lim.ks_distance < 0.08);  // Yaglom limit at finite t plus KS noise
}

// ---- age-structured growth ---------------------------------------------------

TEST_CASE("exponential life history recovers the net rate") {
    // constant fecundity b, exponential lifetime hazard d: the growth-rate
    // equation reads b/(alpha + d) = 1, so alpha = b - d and R0 = b/d
    LifeHistory lh = make_exponential_life_history(2.0, 0.5, 30.0, 0.01);
    lh.validate();
    CHECK(lh.net_reproduction() == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(solve_malthusian(lh) == doctest::Approx(1.5).epsilon(1e-3));
}

TEST_CASE("subcritical life history has no growth exponent") {
    LifeHistory lh = make_exponential_life_history(0.4, 0.5, 40.0, 0.01);
    CHECK(lh.net_reproduction() < 1.0);
    CHECK_THROWS_AS(solve_malthusian(lh), std::domain_error);
}
