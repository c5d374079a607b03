#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "popdyn/epidemics.hpp"

#include <cmath>

using namespace popdyn;

TEST_CASE("reed-frost conserves the population and depletes susceptibles") {
    RngStream rng(121, 0);
    for (int r = 0; r < 200; ++r) {
        ReedFrostPath p = reed_frost_simulate(500, 1.4, 3, rng);
        REQUIRE_FALSE(p.s.empty());
        REQUIRE(p.s.size() == p.i.size());
        REQUIRE(p.s.size() == p.r.size());
        CHECK(p.s[0] == 497);
        CHECK(p.i[0] == 3);
        CHECK(p.r[0] == 0);
        for (std::size_t g = 0; g < p.s.size(); ++g) {
            CHECK(p.s[g] + p.i[g] + p.r[g] == 500);
            if (g > 0) {
                CHECK(p.s[g] <= p.s[g - 1]);
                // everyone infected last generation has recovered
                CHECK(p.r[g] == p.r[g - 1] + p.i[g - 1]);
            }
        }
        CHECK(p.i.back() == 0);  // chain ends when no infecteds remain
        CHECK(p.final_size() == p.r.back());
    }
}

TEST_CASE("zero transmission infects nobody new") {
    RngStream rng(122, 0);
    ReedFrostPath p = reed_frost_simulate(300, 0.0, 5, rng);
    CHECK(p.final_size() == 5);
    CHECK(p.s.back() == 295);
}

TEST_CASE("overwhelming transmission reaches almost everyone") {
    RngStream rng(123, 0);
    for (int r = 0; r < 20; ++r) {
        ReedFrostPath p = reed_frost_simulate(400, 25.0, 1, rng);
        CHECK(p.final_size() > 380);
    }
}

TEST_CASE("threshold scan separates sub- and supercritical rates") {
    std::vector<double> lambdas = {0.5, 2.0};
    auto rows = reed_frost_threshold_scan(2000, lambdas, 1, 2000, 124, 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].lambda == doctest::Approx(0.5));
    CHECK(rows[1].lambda == doctest::Approx(2.0));
    CHECK(rows[0].p_large < 0.02);
    CHECK(rows[1].p_large > 0.5);
    CHECK(rows[1].mean_final_size > rows[0].mean_final_size);
    // binomial-style standard error for the supercritical point
    double p = rows[1].p_large;
    CHECK(rows[1].se == doctest::Approx(std::sqrt(p * (1 - p) / 2000.0)).epsilon(0.2));
}
