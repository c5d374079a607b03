#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "popdyn/deterministic.hpp"

#include <cmath>
#include <vector>

using namespace popdyn;

// ---- logistic -----------------------------------------------------------------

TEST_CASE("logistic closed form") {
    CHECK(logistic_value(0.8, 50.0, 3.0, 0.0) == doctest::Approx(3.0));
    CHECK(logistic_value(0.8, 50.0, 3.0, 2.5)
          == doctest::Approx(16.024342793443583).epsilon(1e-12));
    // capacity is a fixed point and an attractor
    CHECK(logistic_value(0.8, 50.0, 50.0, 7.0) == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(logistic_value(0.8, 50.0, 3.0, 60.0) == doctest::Approx(50.0).epsilon(1e-6));
}

TEST_CASE("logistic trajectory solves the growth equation") {
    const double a = 0.8, K = 50.0, dt = 0.01;
    OdeTrajectory traj = logistic_solve(a, K, 3.0, 5.0, dt);
    REQUIRE(traj.t.size() == traj.y.size());
    CHECK(traj.y.front()[0] == doctest::Approx(3.0));
    CHECK(traj.t.back() == doctest::Approx(5.0).epsilon(1e-9));
    for (std::size_t k = 1; k + 1 < traj.t.size(); k += 37) {
        double x = traj.y[k][0];
        double slope = (traj.y[k + 1][0] - traj.y[k - 1][0]) / (traj.t[k + 1] - traj.t[k - 1]);
        CHECK(slope == doctest::Approx(a * x * (1.0 - x / K)).epsilon(1e-3));
    }
    // values agree with the closed form on the grid
    for (std::size_t k = 0; k < traj.t.size(); k += 53)
        CHECK(traj.y[k][0] == doctest::Approx(logistic_value(a, K, 3.0, traj.t[k])).epsilon(1e-10));
}

// ---- lotka-volterra -------------------------------------------------------------

TEST_CASE("symmetric weak competition settles on the interior point") {
    LotkaVolterraResult r =
        lotka_volterra_integrate(1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 0.1, 0.9, 60.0, 1e-2);
    REQUIRE(r.coexistence);
    REQUIRE(r.interior_fixed_point.size() == 2);
    CHECK(r.interior_fixed_point[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(r.interior_fixed_point[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(r.traj.y.back()[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(r.traj.y.back()[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("strong asymmetric competition excludes the weaker species") {
    LotkaVolterraResult r =
        lotka_volterra_integrate(1.0, 1.0, 1.0, 1.0, 2.0, 0.5, 0.6, 0.4, 200.0, 1e-2);
    REQUIRE_FALSE(r.coexistence);
    CHECK(r.interior_fixed_point.empty());
    CHECK(r.traj.y.back()[0] < 1e-4);
    CHECK(r.traj.y.back()[1] == doctest::Approx(1.0).epsilon(1e-4));
}

// ---- sir ---------------------------------------------------------------------------

TEST_CASE("sir conserves mass and obeys the final-size relation") {
    const double beta = 0.4, gamma = 0.2, s0 = 0.99, i0 = 0.01;
    SirResult r = sir_integrate(beta, gamma, s0, i0, 0.0, 400.0, 0.01);
    CHECK(r.r0 == doctest::Approx(beta * s0 / gamma).epsilon(1e-12));
    for (std::size_t k = 0; k < r.traj.t.size(); k += 97) {
        const auto& y = r.traj.y[k];
        CHECK(y[0] + y[1] + y[2] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(y[0] >= 0.0);
        CHECK(y[1] >= -1e-12);
    }
    double s_inf = r.traj.y.back()[0];
    CHECK(r.traj.y.back()[1] < 1e-6);  // epidemic has burned out
    // ln(s_inf/s0) = -(beta/gamma)(1 - s_inf)
    CHECK(std::log(s_inf / s0) == doctest::Approx(-(beta / gamma) * (1.0 - s_inf)).epsilon(1e-3));
}

// ---- replicator ----------------------------------------------------------------------

TEST_CASE("haploid fitness embeds without changing the selection field") {
    std::vector<double> v = {0.9, 0.3, 0.5};
    FitnessSpec f = FitnessSpec::haploid(v);
    std::vector<double> p = {0.2, 0.5, 0.3};
    double vbar = 0.2 * 0.9 + 0.5 * 0.3 + 0.3 * 0.5;
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(f.marginal(p, i) - f.mean(p) == doctest::Approx(v[i] - vbar).epsilon(1e-12));
}

TEST_CASE("diploid mean and variance are the quadratic forms") {
    Matrix v(2);
    v(0, 0) = 1.0; v(0, 1) = 0.2; v(1, 0) = 0.2; v(1, 1) = 0.6;
    FitnessSpec f = FitnessSpec::diploid(v);
    std::vector<double> p = {0.3, 0.7};
    double m0 = 0.3 * 1.0 + 0.7 * 0.2;   // (Vp)_1
    double m1 = 0.3 * 0.2 + 0.7 * 0.6;   // (Vp)_2
    double vbar = 0.3 * m0 + 0.7 * m1;
    CHECK(f.marginal(p, 0) == doctest::Approx(m0).epsilon(1e-12));
    CHECK(f.mean(p) == doctest::Approx(vbar).epsilon(1e-12));
    double var = 0.3 * (m0 - vbar) * (m0 - vbar) + 0.7 * (m1 - vbar) * (m1 - vbar);
    CHECK(f.variance(p) == doctest::Approx(var).epsilon(1e-12));
}

TEST_CASE("mutation kernel validation") {
    MutationKernel ok;
    ok.q = Matrix(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != j) ok.q(i, j) = 0.5;
    CHECK_NOTHROW(ok.validate());

    MutationKernel diag = ok;
    diag.q(1, 1) = 0.1;
    CHECK_THROWS(diag.validate());

    MutationKernel unnorm = ok;
    unnorm.q(0, 1) = 0.9;
    CHECK_THROWS(unnorm.validate());
}

TEST_CASE("selection-only flow climbs mean fitness at twice the variance") {
    Matrix v(2);
    v(0, 0) = 1.0; v(0, 1) = 0.2; v(1, 0) = 0.2; v(1, 1) = 0.6;
    FitnessSpec f = FitnessSpec::diploid(v);
    MutationKernel none;
    none.q = Matrix(2);
    none.q(0, 1) = 1.0;
    none.q(1, 0) = 1.0;  // kernel is inert at m = 0 but must still validate
    ReplicatorResult r = replicator_integrate(f, none, 0.0, {0.3, 0.7}, 2.0, 1e-3);
    const auto& vbar = r.traj.series.at("mean_fitness");
    const auto& var = r.traj.series.at("fitness_variance");
    REQUIRE(vbar.size() == r.traj.t.size());
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < vbar.size(); ++k) {
        CHECK(vbar[k + 1] >= vbar[k] - 1e-12);  // gradient flow never descends
        double h = r.traj.t[k + 1] - r.traj.t[k];
        double slope = (vbar[k + 1] - vbar[k]) / h;
        double target = var[k] + var[k + 1];  // trapezoid of 2 Var
        if (target > 1e-8)
            worst = std::max(worst, std::abs(slope - target) / target);
    }
    CHECK(worst < 1e-3);
    // from p0 = 0.3, below the unstable 1/3 threshold, allele 2 fixes
    CHECK(r.traj.y.back()[0] < 1e-4);
    CHECK(r.traj.series.at("mean_fitness").back() == doctest::Approx(0.6).epsilon(1e-3));
}

TEST_CASE("strong mutation pins the flow near the uniform point") {
    Matrix v(2);
    v(0, 0) = 1.0; v(0, 1) = 0.2; v(1, 0) = 0.2; v(1, 1) = 0.6;
    FitnessSpec f = FitnessSpec::diploid(v);
    MutationKernel uni;
    uni.q = Matrix(2);
    uni.q(0, 1) = 1.0;
    uni.q(1, 0) = 1.0;
    ReplicatorResult r = replicator_integrate(f, uni, 50.0, {0.05, 0.95}, 3.0, 1e-3, 100);
    double sum = 0.0;
    for (double x : r.traj.y.back()) {
        CHECK(x > 0.0);
        sum += x;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(r.traj.y.back()[0] - 0.5) < 0.05);
}

TEST_CASE("shahshahani gradient and simplex validation") {
    Matrix v(2);
    v(0, 0) = 1.0; v(0, 1) = 0.2; v(1, 0) = 0.2; v(1, 1) = 0.6;
    FitnessSpec f = FitnessSpec::diploid(v);
    std::vector<double> p = {0.3, 0.7};
    auto grad = shahshahani_gradient(f, p);
    REQUIRE(grad.size() == 2);
    CHECK(grad[0] == doctest::Approx(0.3 * (f.marginal(p, 0) - f.mean(p))).epsilon(1e-12));
    CHECK(grad[1] == doctest::Approx(0.7 * (f.marginal(p, 1) - f.mean(p))).epsilon(1e-12));
    CHECK(grad[0] + grad[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK_THROWS_AS(shahshahani_gradient(f, {1.0, 0.0}), std::domain_error);

    CHECK_NOTHROW(validate_simplex({0.4, 0.6}));
    CHECK_THROWS(validate_simplex({0.4, 0.7}));
    CHECK_THROWS(validate_simplex({-0.1, 1.1}));
}
