#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "popdyn/branching.hpp"
#include "popdyn/offspring.hpp"
#include "popdyn/stats.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

using namespace popdyn;

namespace {
// p0 = p1 = 1/4, p2 = 1/2: mean 5/4, extinction probability exactly 1/2
OffspringLaw skewed_law() { return OffspringLaw::from_pmf({0.25, 0.25, 0.5}); }
// p0 = p2 = 1/2: critical with offspring variance 1
OffspringLaw critical_law() { return OffspringLaw::from_pmf({0.5, 0.0, 0.5}); }
}

// ---- offspring laws and generating functions ------------------------------

TEST_CASE("from_pmf normalizes and exposes exact moments") {
    OffspringLaw law = OffspringLaw::from_pmf({0.5, 0.5, 1.0});  // unnormalized on purpose
    CHECK(law.pmf(0) == doctest::Approx(0.25));
    CHECK(law.pmf(2) == doctest::Approx(0.5));
    CHECK(law.pmf(9) == 0.0);
    OffspringLaw s = skewed_law();
    CHECK(s.mean() == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(s.second_moment() == doctest::Approx(2.25).epsilon(1e-14));
    CHECK(s.variance() == doctest::Approx(2.25 - 1.25 * 1.25).epsilon(1e-13));
}

TEST_CASE("named families have their textbook moments") {
    OffspringLaw g = OffspringLaw::geometric_half();
    CHECK(g.mean() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(g.variance() == doctest::Approx(2.0).epsilon(1e-9));
    OffspringLaw p = OffspringLaw::poisson(1.5);
    CHECK(p.mean() == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(p.variance() == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("law sampling matches the pmf") {
    OffspringLaw law = skewed_law();
    RngStream rng(4, 0);
    std::vector<double> hits(3, 0.0);
    const int n = 60000;
    for (int i = 0; i < n; ++i) hits[law.sample(rng)] += 1.0;
    std::vector<double> expected = {0.25 * n, 0.25 * n, 0.5 * n};
    CHECK(chi2_test(hits, expected, 5.0, 0).p_value > 1e-4);
}

TEST_CASE("size biasing reweights by the offspring count") {
    OffspringLaw sb = skewed_law().size_biased();
    CHECK(sb.pmf(0) == doctest::Approx(0.0));
    CHECK(sb.pmf(1) == doctest::Approx(0.25 / 1.25).epsilon(1e-13));
    CHECK(sb.pmf(2) == doctest::Approx(1.0 / 1.25).epsilon(1e-13));
}

TEST_CASE("pgf evaluation and iteration") {
    OffspringLaw law = skewed_law();
    for (double s : {0.0, 0.3, 0.7, 1.0}) {
        CHECK(pgf_eval(law, s) == doctest::Approx(0.25 + 0.25 * s + 0.5 * s * s).epsilon(1e-14));
    }
    double f1 = pgf_eval(law, 0.4);
    CHECK(pgf_iterate(law, 0.4, 0) == doctest::Approx(0.4));
    CHECK(pgf_iterate(law, 0.4, 2) == doctest::Approx(pgf_eval(law, f1)).epsilon(1e-14));
}

TEST_CASE("extinction probability is the smallest pgf fixed point") {
    CHECK(extinction_probability(skewed_law()) == doctest::Approx(0.5).epsilon(1e-11));
    CHECK(extinction_probability(critical_law()) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(extinction_probability(OffspringLaw::poisson(0.9)) == doctest::Approx(1.0).epsilon(1e-6));
    // supercritical Poisson root, frozen from a 30-digit fixed-point iteration
    double q = extinction_probability(OffspringLaw::poisson(1.5));
    CHECK(q == doctest::Approx(0.417188356134188614).epsilon(1e-10));
    CHECK(std::abs(pgf_eval(OffspringLaw::poisson(1.5), q) - q) < 1e-12);
}

// ---- simulators against exact finite-n quantities -------------------------

TEST_CASE("bgw population mean follows m^n") {
    OffspringLaw law = skewed_law();
    const int ngen = 8, reps = 5000;
    RngStream rng(21, 0);
    std::vector<double> zs;
    zs.reserve(reps);
    for (int r = 0; r < reps; ++r) {
        BgwPath path = simulate_bgw(law, 1, ngen, rng);
        REQUIRE_FALSE(path.capped);
        REQUIRE(path.z.size() == static_cast<std::size_t>(ngen) + 1);
        if (path.extinct_at >= 0) REQUIRE(path.z.back() == 0);
        zs.push_back(static_cast<double>(path.z.back()));
    }
    Summary s = summarize(zs);
    double target = std::pow(law.mean(), ngen);
    CHECK(std::abs(s.mean - target) < 4 * s.se);
}

TEST_CASE("extinction-by-n frequency matches the exact pgf iterate") {
    OffspringLaw law = skewed_law();
    const int ngen = 30, reps = 20000;
    double q_n = pgf_iterate(law, 0.0, ngen);  // exact P(Z_30 = 0)
    RngStream rng(22, 0);
    int extinct = 0;
    for (int r = 0; r < reps; ++r)
        // threshold 150: misclassification probability <= 0.5^150
        if (bgw_extinct_by(law, ngen, rng, 150)) ++extinct;
    double freq = static_cast<double>(extinct) / reps;
    double se = std::sqrt(q_n * (1 - q_n) / reps);
    CHECK(std::abs(freq - q_n) < 4 * se);
}

TEST_CASE("immigration mean follows the exact recursion") {
    OffspringLaw law = OffspringLaw::poisson(0.8);
    OffspringLaw imm = OffspringLaw::poisson(0.7);
    const int ngen = 10, reps = 8000;
    const double m = 0.8, x0 = 2.0;
    double target = std::pow(m, ngen) * x0 + 0.7 * (1 - std::pow(m, ngen)) / (1 - m);
    RngStream rng(23, 0);
    std::vector<double> xs;
    xs.reserve(reps);
    for (int r = 0; r < reps; ++r) {
        BgwiPath p = simulate_bgwi(law, imm, 2, ngen, rng);
        REQUIRE(p.x.size() == static_cast<std::size_t>(ngen) + 1);
        REQUIRE(p.w.size() == p.x.size());
        // rescaled series is x_n / m^n
        CHECK(p.w[ngen] == doctest::Approx(static_cast<double>(p.x[ngen]) / std::pow(m, ngen)));
        xs.push_back(static_cast<double>(p.x[ngen]));
    }
    Summary s = summarize(xs);
    CHECK(std::abs(s.mean - target) < 4 * s.se);
}

TEST_CASE("multitype mean vector follows z0 M^n") {
    // laws[i][j]: offspring of type j per type-i parent
    std::vector<std::vector<OffspringLaw>> laws = {
        {OffspringLaw::poisson(0.5), OffspringLaw::poisson(0.3)},
        {OffspringLaw::poisson(0.4), OffspringLaw::poisson(0.6)},
    };
    Matrix m(2);
    m(0, 0) = 0.5; m(0, 1) = 0.3; m(1, 0) = 0.4; m(1, 1) = 0.6;
    const int ngen = 5, reps = 6000;
    std::vector<double> mean_vec = {5.0, 3.0};  // z0 as a row vector
    for (int g = 0; g < ngen; ++g) mean_vec = vec_mat(mean_vec, m);

    RngStream rng(24, 0);
    std::vector<double> t0, t1;
    for (int r = 0; r < reps; ++r) {
        MultitypePath p = simulate_multitype_bgw(laws, {5, 3}, ngen, rng);
        REQUIRE_FALSE(p.capped);
        t0.push_back(static_cast<double>(p.z.back()[0]));
        t1.push_back(static_cast<double>(p.z.back()[1]));
    }
    Summary s0 = summarize(t0), s1 = summarize(t1);
    CHECK(std::abs(s0.mean - mean_vec[0]) < 4 * s0.se);
    CHECK(std::abs(s1.mean - mean_vec[1]) < 4 * s1.se);
}

// ---- plane trees ----------------------------------------------------------

TEST_CASE("tree bookkeeping is consistent") {
    RngStream rng(31, 0);
    for (int r = 0; r < 50; ++r) {
        PlaneTree t = sample_bgw_tree(OffspringLaw::poisson(0.8), 4000, rng);
        REQUIRE(t.size() >= 1);
        CHECK(t.parent[0] == -1);
        CHECK(t.depth[0] == 0);
        for (std::size_t v = 1; v < t.size(); ++v) {
            int p = t.parent[v];
            REQUIRE(p >= 0);
            CHECK(t.depth[v] == t.depth[static_cast<std::size_t>(p)] + 1);
            bool found = false;
            for (int ch : t.children[static_cast<std::size_t>(p)])
                if (ch == static_cast<int>(v)) found = true;
            CHECK(found);
        }
    }
}

TEST_CASE("size-biased tree carries a spine of the requested length") {
    RngStream rng(32, 0);
    PlaneTree t = sample_size_biased_tree(skewed_law(), 12, 2000000, rng);
    REQUIRE_FALSE(t.truncated);
    REQUIRE(t.spine.size() == 13);  // root plus one node per generation
    CHECK(t.spine[0] == 0);
    for (std::size_t i = 1; i < t.spine.size(); ++i)
        CHECK(t.parent[static_cast<std::size_t>(t.spine[i])] == t.spine[i - 1]);
}

TEST_CASE("conditioned geometric trees are uniform over the Catalan shapes") {
    // 5 plane trees with 4 vertices; both constructions must hit each
    // with probability 1/5
    const int reps = 10000;
    for (int variant = 0; variant < 2; ++variant) {
        RngStream rng(33, static_cast<std::uint64_t>(variant));
        std::map<std::string, double> shape_counts;
        for (int r = 0; r < reps; ++r) {
            PlaneTree t = variant == 0 ? conditioned_tree_rejection(4, rng)
                                       : conditioned_tree_cycle_lemma(4, rng);
            REQUIRE(t.size() == 4);
            shape_counts[tree_brackets(t)] += 1.0;
        }
        REQUIRE(shape_counts.size() == 5);
        std::vector<double> obs, expd;
        for (const auto& [shape, count] : shape_counts) {
            obs.push_back(count);
            expd.push_back(reps / 5.0);
        }
        CHECK(chi2_test(obs, expd, 5.0, 0).p_value > 1e-4);
    }
}

TEST_CASE("contour and height walks have the right shape") {
    // root with children {1, 2}; node 1 has one child
    PlaneTree t;
    t.parent = {-1, 0, 0, 1};
    t.children = {{1, 2}, {3}, {}, {}};
    t.depth = {0, 1, 1, 2};
    ContourHeight ch = contour_and_height(t);
    REQUIRE(ch.contour.size() == 2 * (t.size() - 1) + 1);
    std::vector<int> expect_contour = {0, 1, 2, 1, 0, 1, 0};
    for (std::size_t i = 0; i < expect_contour.size(); ++i)
        CHECK(ch.contour[i] == expect_contour[i]);
    std::vector<int> expect_height = {0, 1, 2, 1};
    REQUIRE(ch.height.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(ch.height[i] == expect_height[i]);

    auto levels = level_counts(t);
    REQUIRE(levels.size() == 3);
    CHECK(levels[0] == 1);
    CHECK(levels[1] == 2);
    CHECK(levels[2] == 1);

    CHECK(tree_brackets(t) == "[2[1[0]][0]]");
    CHECK(tree_newick(t) == "((1.1.1)1.1,1.2)1;");
}

TEST_CASE("large conditioned trees use the cycle lemma and keep the size") {
    RngStream rng(34, 0);
    PlaneTree t = sample_conditioned_geometric_tree(60, rng);
    CHECK(t.size() == 60);
    ContourHeight ch = contour_and_height(t);
    CHECK(ch.contour.size() == 2 * 59 + 1);
    CHECK(ch.contour.front() == 0);
    CHECK(ch.contour.back() == 0);
}

// ---- spectral data ---------------------------------------------------------

TEST_CASE("perron root of a 2x2 mean matrix") {
    Matrix m(2);
    m(0, 0) = 0.5; m(0, 1) = 0.3; m(1, 0) = 0.4; m(1, 1) = 0.6;
    PerronRoot pr = perron_frobenius(m);
    CHECK(pr.rho == doctest::Approx(0.9).epsilon(1e-10));  // eigenvalues 0.9 and 0.2
    CHECK(pr.u[0] + pr.u[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pr.u[0] * pr.v[0] + pr.u[1] * pr.v[1] == doctest::Approx(1.0).epsilon(1e-10));
    auto mu = mat_vec(m, pr.u);
    CHECK(mu[0] == doctest::Approx(0.9 * pr.u[0]).epsilon(1e-9));
    auto vm = vec_mat(pr.v, m);
    CHECK(vm[1] == doctest::Approx(0.9 * pr.v[1]).epsilon(1e-9));
}

TEST_CASE("perron rejects periodic and reducible patterns") {
    Matrix per(2);
    per(0, 1) = 1.0; per(1, 0) = 1.0;
    CHECK_THROWS_AS(perron_frobenius(per), std::domain_error);
    Matrix red(2);
    red(0, 0) = 1.0; red(1, 1) = 1.0;
    CHECK_THROWS_AS(perron_frobenius(red), std::domain_error);
}

// ---- critical limit diagnostics -------------------------------------------

TEST_CASE("critical survival scaling is near 2/sigma^2 at moderate n") {
    // offspring variance 1, so n P(Z_n > 0) approaches 2
    CriticalLimitEstimates est = critical_limit_estimates(critical_law(), 80, 20000, 909, 1);
    REQUIRE_FALSE(est.inconclusive);
    CHECK(est.survivors > 100);
    CHECK(est.n_survival > 1.4);
    CHECK(est.n_survival < 2.6);
    CHECK(est.ks_distance < 0.2);
}
