#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "popdyn/spatial.hpp"
#include "popdyn/duality.hpp"
#include "popdyn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

using namespace popdyn;

// ---- lattice ------------------------------------------------------------------

TEST_CASE("site indexing round-trips and neighbors wrap") {
    TorusLattice lat = TorusLattice::nearest_neighbor(2, 4);
    lat.validate();
    REQUIRE(lat.sites() == 16);
    for (std::size_t s = 0; s < lat.sites(); ++s)
        CHECK(lat.index(lat.coords(s)) == s);

    // neighbors of the origin on the 4x4 torus
    std::vector<std::size_t> nb;
    for (std::size_t k = 0; k < lat.offsets.size(); ++k) nb.push_back(lat.neighbor(0, k));
    std::sort(nb.begin(), nb.end());
    CHECK(nb == std::vector<std::size_t>{1, 3, 4, 12});
}

TEST_CASE("lattice validation rejects bad kernels") {
    TorusLattice self;
    self.d = 1;
    self.L = 4;
    self.offsets = {{0}};
    self.probs = {1.0};
    CHECK_THROWS(self.validate());  // p(0) must be 0

    TorusLattice unnorm;
    unnorm.d = 1;
    unnorm.L = 4;
    unnorm.offsets = {{1}, {-1}};
    unnorm.probs = {0.6, 0.6};
    CHECK_THROWS(unnorm.validate());
}

TEST_CASE("walk generator is conservative and symmetric for a symmetric kernel") {
    TorusLattice lat = TorusLattice::nearest_neighbor(1, 5);
    Matrix q = lat.rw_generator(2.0);
    REQUIRE(q.n == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < 5; ++j) {
            row += q(i, j);
            CHECK(q(i, j) == doctest::Approx(q(j, i)));
        }
        CHECK(row == doctest::Approx(0.0).epsilon(1e-14));
    }
    CHECK(q(0, 1) == doctest::Approx(1.0));  // rate * p(+1) = 2 * 0.5
    CHECK(q(0, 4) == doctest::Approx(1.0));
    CHECK(q(0, 2) == doctest::Approx(0.0));
}

TEST_CASE("neighbor sampling follows the kernel") {
    TorusLattice lat = TorusLattice::nearest_neighbor(1, 8);
    RngStream rng(91, 0);
    double up = 0.0;
    const int n = 40000;
    for (int i = 0; i < n; ++i)
        if (lat.sample_neighbor(3, rng) == 4) up += 1.0;
    CHECK(std::abs(up / n - 0.5) < 4 * 0.5 / std::sqrt(static_cast<double>(n)));
}

// ---- voter model -----------------------------------------------------------------

TEST_CASE("voter density is a martingale") {
    TorusLattice lat = TorusLattice::nearest_neighbor(1, 20);
    SpinConfig eta0(20, 0);
    for (int i = 0; i < 10; ++i) eta0[static_cast<std::size_t>(i)] = 1;
    const int reps = 3000;
    std::vector<double> dens;
    for (int r = 0; r < reps; ++r) {
        RngStream rng(92, static_cast<std::uint64_t>(r));
        VoterPath p = voter_simulate(lat, eta0, 1.0, rng, 50);
        REQUIRE(p.final_config.size() == 20);
        int ones = 0;
        for (auto v : p.final_config) ones += v;
        dens.push_back(ones / 20.0);
    }
    Summary s = summarize(dens);
    CHECK(std::abs(s.mean - 0.5) < 4 * s.se);
}

TEST_CASE("small voter systems reach consensus") {
    TorusLattice lat = TorusLattice::nearest_neighbor(1, 3);
    RngStream rng(93, 0);
    VoterPath p = voter_simulate(lat, {1, 0, 0}, 500.0, rng);
    REQUIRE(p.consensus);
    REQUIRE((p.consensus_value == 0 || p.consensus_value == 1));
    for (auto v : p.final_config) CHECK(static_cast<int>(v) == p.consensus_value);
    CHECK_FALSE(p.capped);
}

// ---- coalescing dual walkers --------------------------------------------------------

TEST_CASE("a single dual walker has the random-walk semigroup law") {
    TorusLattice lat = TorusLattice::nearest_neighbor(1, 6);
    Matrix p_t = matrix_exp_transition(lat.rw_generator(1.0), 0.7);
    const int reps = 30000;
    std::vector<double> obs(6, 0.0);
    for (int r = 0; r < reps; ++r) {
        RngStream rng(94, static_cast<std::uint64_t>(r));
        DualWalkersPath d = coalescing_rw_dual(lat, {2}, 0.7, 1.0, kInstantCoalescence, rng);
        REQUIRE(d.sites.size() == 1);
        REQUIRE(d.initial_count == 1);
        obs[d.sites[0]] += 1.0;
    }
    std::vector<double> expd(6);
    for (std::size_t j = 0; j < 6; ++j) expd[j] = p_t(2, j) * reps;
    CHECK(chi2_test(obs, expd, 5.0, 0).p_value > 1e-4);
}

TEST_CASE("zero merge rate keeps both walkers; instant merging removes one") {
    TorusLattice lat = TorusLattice::nearest_neighbor(1, 4);
    RngStream rng(95, 0);
    for (int r = 0; r < 100; ++r) {
        DualWalkersPath frozen = coalescing_rw_dual(lat, {0, 2}, 3.0, 1.0, 0.0, rng);
        CHECK(frozen.sites.size() == 2);
        CHECK(frozen.coalescence_times.empty());
    }
    int merged = 0;
    for (int r = 0; r < 200; ++r) {
        DualWalkersPath d = coalescing_rw_dual(lat, {0, 2}, 3.0, 1.0, kInstantCoalescence, rng);
        if (d.sites.size() == 1) {
            ++merged;
            REQUIRE(d.coalescence_times.size() == 1);
            CHECK(d.coalescence_times[0] <= 3.0);
        }
    }
    CHECK(merged > 150);  // two walkers on a 4-ring meet quickly
}

TEST_CASE("voter and dual walkers agree with the exact pair semigroup") {
    // ordered-pair chain on the 10-ring: distinct pairs move each walker at
    // rate 1, co-located pairs move as a single merged walker; expectation of
    // eta0(x) eta0(y) under e^{tG} is the exact value both simulators target
    const std::size_t L = 10;
    TorusLattice lat = TorusLattice::nearest_neighbor(1, L);
    SpinConfig eta0(L, 0);
    for (std::size_t i = 0; i < 5; ++i) eta0[i] = 1;
    const double t = 1.0;

    Matrix g(L * L);
    auto id = [&](std::size_t x, std::size_t y) { return x * L + y; };
    for (std::size_t x = 0; x < L; ++x) {
        for (std::size_t y = 0; y < L; ++y) {
            std::size_t s = id(x, y);
            std::size_t xl = (x + L - 1) % L, xr = (x + 1) % L;
            std::size_t yl = (y + L - 1) % L, yr = (y + 1) % L;
            if (x == y) {
                g(s, id(xl, yl)) += 0.5;
                g(s, id(xr, yr)) += 0.5;
                g(s, s) -= 1.0;
            } else {
                g(s, id(xl, y)) += 0.5;
                g(s, id(xr, y)) += 0.5;
                g(s, id(x, yl)) += 0.5;
                g(s, id(x, yr)) += 0.5;
                g(s, s) -= 2.0;
            }
        }
    }
    Matrix p_t = matrix_exp_transition(g, t);
    double exact = 0.0;
    for (std::size_t x = 0; x < L; ++x)
        for (std::size_t y = 0; y < L; ++y)
            exact += p_t(id(0, 3), id(x, y)) * eta0[x] * eta0[y];

    // dual side: product of eta0 over surviving walker positions at t
    const int reps = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int r = 0; r < reps; ++r) {
        RngStream rng(96, static_cast<std::uint64_t>(r));
        DualWalkersPath d = coalescing_rw_dual(lat, {0, 3}, t, 1.0, kInstantCoalescence, rng);
        double prod = 1.0;
        for (std::size_t s : d.sites) prod *= eta0[s];
        sum += prod;
        sumsq += prod * prod;
    }
    double mean = sum / reps;
    double se = std::sqrt((sumsq / reps - mean * mean) / reps);
    CHECK(std::abs(mean - exact) < 4 * se);

    // voter side: product of eta_t over the two probe sites
    const int vreps = 30000;
    double vsum = 0.0;
    for (int r = 0; r < vreps; ++r) {
        RngStream rng(97, static_cast<std::uint64_t>(r));
        VoterPath p = voter_simulate(lat, eta0, t, rng, 1000);
        vsum += static_cast<double>(p.final_config[0]) * p.final_config[3];
    }
    double vmean = vsum / vreps;
    double vse = std::sqrt(vmean * (1 - vmean) / vreps);
    CHECK(std::abs(vmean - exact) < 4 * vse);
}

TEST_CASE("two-sided duality check reports a small z") {
    TorusLattice lat = TorusLattice::nearest_neighbor(1, 8);
    SpinConfig eta0 = {1, 0, 1, 0, 1, 0, 1, 0};
    DualityMcCheck chk = voter_duality_check(lat, eta0, {1, 4}, 0.8, 20000, 404, 1);
    CHECK(chk.lhs > 0.0);
    CHECK(chk.rhs > 0.0);
    CHECK(chk.z < 4.0);
}

// ---- stepping stone ------------------------------------------------------------------

TEST_CASE("stepping stone rejects too-coarse steps and stays in [0,1]") {
    TorusLattice lat = TorusLattice::nearest_neighbor(1, 3);
    FreqConfig x0(3, 0.4);
    RngStream rng(98, 0);
    CHECK_THROWS(stepping_stone_simulate(lat, 20.0, 20.0, 0.0, x0, 1.0, 2e-3, rng));

    FreqPath p = stepping_stone_simulate(lat, 1.0, 1.0, 0.0, x0, 1.0, 5e-3, rng, 20);
    REQUIRE(p.t.size() == p.x.size());
    CHECK(p.t.back() == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& cfg : p.x)
        for (double v : cfg) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
}

TEST_CASE("selection pushes the allele upward") {
    TorusLattice lat = TorusLattice::nearest_neighbor(1, 4);
    FreqConfig x0(4, 0.5);
    const int reps = 2000;
    double mean_sel = 0.0;
    for (int r = 0; r < reps; ++r) {
        RngStream rng(99, static_cast<std::uint64_t>(r));
        FreqPath p = stepping_stone_simulate(lat, 0.5, 0.3, 2.0, x0, 2.0, 5e-3, rng, 1000);
        for (double v : p.x.back()) mean_sel += v;
    }
    mean_sel /= reps * 4.0;
    CHECK(mean_sel > 0.6);  // drift s x(1-x) with s = 2 over two time units
}

TEST_CASE("immobile dual walkers give exact two-point predictions") {
    TorusLattice lat = TorusLattice::nearest_neighbor(1, 5);
    const double theta = 0.3, gamma = 0.7, t = 1.2;

    // separated starts never meet when the jump rate is zero
    TwoPointPrediction apart = stepping_stone_moment_dual(lat, 0.0, gamma, 2, theta, t, 500, 505, 1);
    CHECK(apart.p_coalesced == doctest::Approx(0.0));
    CHECK(apart.prediction == doctest::Approx(theta * theta));

    // co-located starts merge at rate 2 gamma
    TwoPointPrediction together =
        stepping_stone_moment_dual(lat, 0.0, gamma, 0, theta, t, 40000, 506, 1);
    double pc = 1.0 - std::exp(-2.0 * gamma * t);
    double expect = theta * pc + theta * theta * (1.0 - pc);
    CHECK(std::abs(together.p_coalesced - pc) < 4 * std::sqrt(pc * (1 - pc) / 40000.0));
    CHECK(std::abs(together.prediction - expect) < 5 * together.se);
}

TEST_CASE("escape probability closed form") {
    CHECK(escape_probability(1.0, 0.5, 2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(escape_probability(1.0, 0.0, 2.0) == doctest::Approx(0.0));
}

// ---- branching random walk --------------------------------------------------------------

TEST_CASE("brw occupancy books balance and extinction empties the lattice") {
    TorusLattice lat = TorusLattice::nearest_neighbor(1, 4);
    OffspringLaw law = OffspringLaw::from_pmf({0.5, 0.0, 0.5});
    RngStream rng(100, 0);
    int extinct_seen = 0;
    for (int r = 0; r < 200; ++r) {
        BrwPath p = brw_simulate(lat, 1.0, law, 1.0, {2, 0, 0, 1}, 4.0, rng, 1000000, 50);
        std::uint64_t occ = 0;
        for (auto v : p.final_occupancy) occ += v;
        CHECK(occ == p.total.back());
        if (p.extinct) {
            ++extinct_seen;
            CHECK(occ == 0);
        }
    }
    CHECK(extinct_seen > 50);  // critical branching from 3 particles dies often
}

TEST_CASE("brw ensemble means track the branching-times-walk semigroup") {
    TorusLattice lat = TorusLattice::nearest_neighbor(1, 4);
    OffspringLaw law = OffspringLaw::from_pmf({0.5, 0.0, 0.5});  // critical, m = 1
    std::vector<std::uint64_t> x0 = {3, 0, 0, 1};
    BrwMeanReport rep = brw_mean_check(lat, 0.8, law, 1.0, x0, 1.0, 20000, 101, 1);
    REQUIRE(rep.mc_mean.size() == 4);
    REQUIRE(rep.predicted.size() == 4);
    double pred_total = 0.0;
    for (double v : rep.predicted) pred_total += v;
    CHECK(pred_total == doctest::Approx(4.0).epsilon(1e-9));  // mass conserved at m = 1
    CHECK(rep.max_z < 4.0);
    CHECK(rep.max_rel_err < 0.05);
}

// ---- csv rendering -------------------------------------------------------------------

TEST_CASE("lattice csv lays rows out by dimension") {
    TorusLattice ring = TorusLattice::nearest_neighbor(1, 4);
    std::string one = lattice_csv(ring, {1.0, 2.0, 3.0, 4.0});
    CHECK(std::count(one.begin(), one.end(), '\n') == 1);
    CHECK(std::count(one.begin(), one.end(), ',') == 3);

    TorusLattice grid = TorusLattice::nearest_neighbor(2, 2);
    std::string two = lattice_csv(grid, {1.0, 2.0, 3.0, 4.0});
    CHECK(std::count(two.begin(), two.end(), '\n') == 2);
}
