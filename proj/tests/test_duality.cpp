#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "popdyn/duality.hpp"
#include "popdyn/matrix.hpp"

#include "json.hpp"

#include <cmath>
#include <vector>

using namespace popdyn;

TEST_CASE("generator validation") {
    Matrix q(2);
    q(0, 0) = -1.0; q(0, 1) = 1.0;
    q(1, 0) = 0.5;  q(1, 1) = -0.5;
    CHECK_NOTHROW(validate_generator(q));

    Matrix bad_sum = q;
    bad_sum(0, 0) = -0.5;
    CHECK_THROWS(validate_generator(bad_sum));

    Matrix neg(2);
    neg(0, 0) = 1.0; neg(0, 1) = -1.0;
    neg(1, 0) = 1.0; neg(1, 1) = -1.0;
    CHECK_THROWS(validate_generator(neg));
}

TEST_CASE("two-state transition matrix hits the closed form") {
    Matrix q(2);
    q(0, 0) = -0.7; q(0, 1) = 0.7;
    q(1, 0) = 0.3;  q(1, 1) = -0.3;
    Matrix p = matrix_exp_transition(q, 1.3);
    CHECK(p(0, 0) == doctest::Approx(0.49077225512380879).epsilon(1e-12));
    CHECK(p(0, 1) == doctest::Approx(1.0 - 0.49077225512380879).epsilon(1e-12));
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(p(i, 0) + p(i, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stationary vector solves the balance equations") {
    Matrix q(2);
    q(0, 0) = -0.7; q(0, 1) = 0.7;
    q(1, 0) = 0.3;  q(1, 1) = -0.3;
    auto pi = stationary_of_generator(q);
    REQUIRE(pi.size() == 2);
    CHECK(pi[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(pi[1] == doctest::Approx(0.7).epsilon(1e-12));

    RngStream rng(111, 0);
    Matrix big = random_irreducible_generator(5, rng);
    auto pb = stationary_of_generator(big);
    double total = 0.0;
    auto residual = vec_mat(pb, big);
    for (std::size_t j = 0; j < 5; ++j) {
        CHECK(pb[j] > 0.0);
        total += pb[j];
        CHECK(std::abs(residual[j]) < 1e-10);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random generators have bounded off-diagonals and zero row sums") {
    RngStream rng(112, 0);
    Matrix q = random_irreducible_generator(4, rng, 0.2, 0.9);
    for (std::size_t i = 0; i < 4; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < 4; ++j) {
            row += q(i, j);
            if (i != j) {
                CHECK(q(i, j) >= 0.2);
                CHECK(q(i, j) <= 0.9);
            }
        }
        CHECK(row == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("set-valued dual reproduces every transition probability") {
    RngStream rng(113, 0);
    for (std::size_t K = 2; K <= 6; ++K) {
        Matrix q = random_irreducible_generator(K, rng);
        Matrix h = set_dual_generator(q);
        REQUIRE(h.n == (std::size_t{1} << K));
        // the dual generator is itself conservative
        for (std::size_t a = 0; a < h.n; ++a) {
            double row = 0.0;
            for (std::size_t b = 0; b < h.n; ++b) row += h(a, b);
            CHECK(std::abs(row) < 1e-10);
        }
        for (double t : {0.2, 1.5}) {
            Matrix pq = matrix_exp_transition(q, t);
            Matrix ph = matrix_exp_transition(h, t);
            for (std::size_t j = 0; j < K; ++j) {
                for (std::size_t l = 0; l < K; ++l) {
                    double rhs = 0.0;
                    for (std::size_t a = 0; a < h.n; ++a)
                        if (a & (std::size_t{1} << j)) rhs += ph(std::size_t{1} << l, a);
                    CHECK(std::abs(pq(j, l) - rhs) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("the packaged duality check agrees") {
    RngStream rng(114, 0);
    Matrix q = random_irreducible_generator(3, rng);
    DualityCheck chk = verify_mc_duality(q, 1, 2, 0.9);
    CHECK(chk.diff == doctest::Approx(std::abs(chk.lhs - chk.rhs)));
    CHECK(chk.diff < 1e-12);
}

TEST_CASE("duality report renders parseable json") {
    std::vector<DualityCase> cases = {{"k2-t0.5", 0.25, 0.25, 0.0}};
    auto j = nlohmann::json::parse(duality_report_json(cases));
    REQUIRE(j.contains("cases"));
    CHECK(j["cases"].size() == 1);
    CHECK(j["cases"][0]["case"] == "k2-t0.5");
    CHECK(j["max_diff"] == doctest::Approx(0.0));
}

// ---- block-counting moment dual ----------------------------------------------

TEST_CASE("moment dual closed forms and frozen oracles") {
    // n = 1: the frequency itself is a martingale
    CHECK(wf_moment_dual_exact(0.35, 1.3, 1, 2.0) == doctest::Approx(0.35).epsilon(1e-12));
    // n = 2 closed form
    double p0 = 0.4, g = 1.1, t = 0.9;
    double m2 = p0 - p0 * (1 - p0) * std::exp(-g * t);
    CHECK(wf_moment_dual_exact(p0, g, 2, t) == doctest::Approx(m2).epsilon(1e-12));
    // frozen values from an independent matrix-exponential of the death chain
    CHECK(wf_moment_dual_exact(0.3, 1.0, 3, 0.8)
          == doctest::Approx(0.16227153034123057).epsilon(1e-11));
    CHECK(wf_moment_dual_exact(0.6, 2.0, 5, 0.4)
          == doctest::Approx(0.37829973360593416).epsilon(1e-11));
    // moments relax monotonically from p0^n up toward p0
    double early = wf_moment_dual_exact(0.3, 1.0, 4, 0.2);
    double late = wf_moment_dual_exact(0.3, 1.0, 4, 3.0);
    CHECK(early > 0.3 * 0.3 * 0.3 * 0.3);
    CHECK(early < late);
    CHECK(late < 0.3);
}

TEST_CASE("monte-carlo moments agree with the dual within the error band") {
    const double p0 = 0.4, g = 1.0, t = 1.0, dt = 2e-3;
    McMoment mc = wf_moment_dual_mc(p0, g, 2, t, dt, 15000, 115, 1);
    double exact = wf_moment_dual_exact(p0, g, 2, t);
    REQUIRE(mc.se > 0.0);
    CHECK(std::abs(mc.mean - exact) < 4 * mc.se + 2 * g * dt);
}
