#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "popdyn/genealogy.hpp"
#include "popdyn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

using namespace popdyn;

namespace {
// every partition of the blocks in `path` must cover {0..n-1} exactly once
void check_partitions_valid(const CoalescentPath& path) {
    for (const auto& part : path.partitions) {
        std::vector<int> seen;
        for (const auto& blk : part.blocks)
            seen.insert(seen.end(), blk.begin(), blk.end());
        std::sort(seen.begin(), seen.end());
        REQUIRE(seen.size() == path.n);
        for (std::size_t i = 0; i < seen.size(); ++i)
            REQUIRE(seen[i] == static_cast<int>(i));
    }
}
}

// ---- partitions -------------------------------------------------------------

TEST_CASE("partition bookkeeping") {
    Partition p = Partition::singletons(4);
    CHECK(p.size() == 4);
    auto a = p.multiplicities(4);
    REQUIRE(a.size() == 4);
    CHECK(a[0] == 4);
    CHECK(a[1] + a[2] + a[3] == 0);

    Partition q;
    q.blocks = {{5, 3, 4}, {1}, {2, 0}};
    q.canonicalize();
    CHECK(q.blocks[0] == std::vector<int>{0, 2});
    CHECK(q.blocks[1] == std::vector<int>{1});
    CHECK(q.blocks[2] == std::vector<int>{3, 4, 5});
    auto m = q.multiplicities(6);
    CHECK(m[0] == 1);
    CHECK(m[1] == 1);
    CHECK(m[2] == 1);
    CHECK(m[3] + m[4] + m[5] == 0);
}

// ---- kingman ----------------------------------------------------------------

TEST_CASE("kingman paths merge pairwise down to one block") {
    RngStream rng(71, 0);
    for (int r = 0; r < 40; ++r) {
        CoalescentPath path = kingman_sample(10, 1.0, rng);
        REQUIRE(path.times.size() == 9);
        REQUIRE(path.partitions.size() == 9);
        check_partitions_valid(path);
        for (std::size_t e = 0; e < path.times.size(); ++e) {
            CHECK(path.partitions[e].size() == 9 - e);
            if (e > 0) CHECK(path.times[e] > path.times[e - 1]);
        }
        CHECK(path.mrca_time() == doctest::Approx(path.times.back()));
    }
}

TEST_CASE("kingman mrca time has mean 2(1 - 1/n)/gamma") {
    RngStream rng(72, 0);
    const int reps = 30000;
    std::vector<double> mrca;
    mrca.reserve(reps);
    for (int r = 0; r < reps; ++r) mrca.push_back(kingman_sample(5, 2.0, rng).mrca_time());
    Summary s = summarize(mrca);
    CHECK(std::abs(s.mean - 0.8) < 4 * s.se);
}

// ---- lambda coalescents -------------------------------------------------------

TEST_CASE("point mass at zero reduces to kingman rates") {
    LambdaMeasure del = LambdaMeasure::delta_zero(1.7);
    del.validate();
    CHECK(del.total_mass() == doctest::Approx(1.7));
    CHECK(del.merger_rate(6, 2) == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(del.merger_rate(6, 3) == doctest::Approx(0.0));
    CHECK(del.total_rate(6) == doctest::Approx(15.0 * 1.7).epsilon(1e-12));
}

TEST_CASE("uniform measure rates are exact beta integrals") {
    // lambda_{b,k} = B(k-1, b-k+1); for b = 5: 1/4, 1/12, 1/12, 1/4
    LambdaMeasure uni = LambdaMeasure::uniform(1.0);
    uni.validate();
    CHECK(uni.merger_rate(5, 2) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(uni.merger_rate(5, 3) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(uni.merger_rate(5, 4) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(uni.merger_rate(5, 5) == doctest::Approx(0.25).epsilon(1e-12));
    // sum_k C(5,k) lambda_{5,k} = 10/4 + 10/12 + 5/12 + 1/4 = 4
    CHECK(uni.total_rate(5) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("lambda measure validation rejects malformed inputs") {
    LambdaMeasure bad;
    bad.breaks = {0.5, 1.0};  // grid must start at 0
    bad.height = {1.0};
    CHECK_THROWS(bad.validate());
    LambdaMeasure neg;
    neg.breaks = {0.0, 1.0};
    neg.height = {-1.0};
    CHECK_THROWS(neg.validate());
}

TEST_CASE("delta-at-zero coalescent reproduces the kingman mrca mean") {
    RngStream rng(73, 0);
    const int reps = 20000;
    std::vector<double> mrca;
    for (int r = 0; r < reps; ++r)
        mrca.push_back(lambda_coalescent_sample(6, LambdaMeasure::delta_zero(1.0), rng).mrca_time());
    Summary s = summarize(mrca);
    CHECK(std::abs(s.mean - 2.0 * (1.0 - 1.0 / 6.0)) < 4 * s.se);
}

TEST_CASE("uniform-measure coalescent produces genuine multiple mergers") {
    RngStream rng(74, 0);
    int multi = 0;
    for (int r = 0; r < 400; ++r) {
        CoalescentPath path = lambda_coalescent_sample(8, LambdaMeasure::uniform(1.0), rng);
        check_partitions_valid(path);
        std::size_t blocks = 8;
        for (std::size_t e = 0; e < path.times.size(); ++e) {
            REQUIRE(path.partitions[e].size() < blocks);
            if (blocks - path.partitions[e].size() >= 2) ++multi;
            blocks = path.partitions[e].size();
            if (e > 0) CHECK(path.times[e] > path.times[e - 1]);
        }
        CHECK(blocks == 1);
    }
    CHECK(multi > 0);
}

TEST_CASE("event csv and newick serializations are well-formed") {
    RngStream rng(75, 0);
    CoalescentPath path = kingman_sample(6, 1.0, rng);
    std::string csv = coalescent_event_csv(path);
    CHECK(csv.rfind("time,blocks_after,new_block\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);  // header plus 5 events

    std::string nwk = coalescent_newick(path);
    CHECK(nwk.back() == ';');
    CHECK(std::count(nwk.begin(), nwk.end(), ',') == 5);  // 6 tips
    CHECK(std::count(nwk.begin(), nwk.end(), '(')
          == std::count(nwk.begin(), nwk.end(), ')'));
    for (int tip = 1; tip <= 6; ++tip)
        CHECK(nwk.find(std::to_string(tip) + ":") != std::string::npos);
}

// ---- ewens sampling ------------------------------------------------------------

TEST_CASE("ewens probabilities match frozen values and sum to one") {
    CHECK(ewens_probability({2, 1, 0, 0}, 1.5) == doctest::Approx(12.0 / 35.0).epsilon(1e-12));
    CHECK(ewens_probability({0, 1, 1, 0, 0}, 0.7)
          == doctest::Approx(0.17539441819792251).epsilon(1e-12));

    // enumerate the 11 partitions of 6 by nonincreasing parts and total the law
    std::vector<int> a(6, 0);
    double total = 0.0;
    std::function<void(int, int)> rec = [&](int remaining, int max_part) {
        if (remaining == 0) {
            total += ewens_probability(a, 1.3);
            return;
        }
        for (int part = std::min(remaining, max_part); part >= 1; --part) {
            ++a[part - 1];
            rec(remaining - part, part);
            --a[part - 1];
        }
    };
    rec(6, 6);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("urn samples have the ewens block-count mean and monotypic rate") {
    const double theta = 0.7;
    const std::size_t n = 6;
    double mean_blocks = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean_blocks += theta / (theta + static_cast<double>(i));

    RngStream rng(76, 0);
    const int reps = 30000;
    std::vector<double> blocks;
    int monotypic = 0;
    for (int r = 0; r < reps; ++r) {
        Partition p = ewens_sample(n, theta, rng);
        std::vector<int> seen;
        for (const auto& blk : p.blocks) seen.insert(seen.end(), blk.begin(), blk.end());
        std::sort(seen.begin(), seen.end());
        REQUIRE(seen.size() == n);
        blocks.push_back(static_cast<double>(p.size()));
        if (p.size() == 1) ++monotypic;
    }
    Summary s = summarize(blocks);
    CHECK(std::abs(s.mean - mean_blocks) < 4 * s.se);

    double h = homozygosity(n, theta);
    double freq = static_cast<double>(monotypic) / reps;
    CHECK(std::abs(freq - h) < 4 * std::sqrt(h * (1 - h) / reps));
}

TEST_CASE("homozygosity closed form") {
    CHECK(homozygosity(5, 2.0) == doctest::Approx(1.0 / 15.0).epsilon(1e-13));
    CHECK(homozygosity(2, 0.7) == doctest::Approx(1.0 / 1.7).epsilon(1e-13));
    CHECK(homozygosity(3, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK_THROWS_AS(homozygosity(1, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(homozygosity(2, -0.1), std::domain_error);
}

// ---- mass partitions -------------------------------------------------------------

TEST_CASE("gem sticks are size-biased with the right first moments") {
    const double theta = 1.5;
    RngStream rng(77, 0);
    const int reps = 20000;
    std::vector<double> first, sumsq;
    for (int r = 0; r < reps; ++r) {
        AtomVector v = gem_sample(theta, 1e-10, rng);
        REQUIRE_FALSE(v.xi.empty());
        double tot = v.remainder, ss = 0.0;
        for (double x : v.xi) {
            REQUIRE(x > 0.0);
            tot += x;
            ss += x * x;
        }
        CHECK(tot == doctest::Approx(1.0).epsilon(1e-9));
        first.push_back(v.xi[0]);
        sumsq.push_back(ss);
    }
    Summary sf = summarize(first), ss = summarize(sumsq);
    CHECK(std::abs(sf.mean - 1.0 / (1.0 + theta)) < 4 * sf.se);  // Beta(1, theta) stick
    CHECK(std::abs(ss.mean - homozygosity(2, theta)) < 4 * ss.se);
}

TEST_CASE("ranked atoms from the subordinator match the diversity moments") {
    const double theta = 1.5;
    RngStream rng(78, 0);
    const int reps = 20000;
    std::vector<double> sumsq, sumcube;
    for (int r = 0; r < reps; ++r) {
        AtomVector v = pd_sample_via_gamma(theta, 1e-8, rng);
        REQUIRE_FALSE(v.xi.empty());
        double tot = 0.0, ss = 0.0, sc = 0.0;
        for (std::size_t i = 0; i < v.xi.size(); ++i) {
            if (i) REQUIRE(v.xi[i] <= v.xi[i - 1]);  // ranked
            tot += v.xi[i];
            ss += v.xi[i] * v.xi[i];
            sc += v.xi[i] * v.xi[i] * v.xi[i];
        }
        CHECK(tot == doctest::Approx(1.0).epsilon(1e-9));
        sumsq.push_back(ss);
        sumcube.push_back(sc);
    }
    Summary s2 = summarize(sumsq), s3 = summarize(sumcube);
    CHECK(std::abs(s2.mean - homozygosity(2, theta)) < 4 * s2.se);
    CHECK(std::abs(s3.mean - homozygosity(3, theta)) < 4 * s3.se);
}

// ---- particle systems --------------------------------------------------------------

TEST_CASE("moran and lookdown conserve particles and the type-frequency mean") {
    // 7 of 15 particles start as type 1.  Lookdown levels are not symmetric
    // (low levels persist), so the assignment of types to slots has to be
    // re-randomized every replicate; otherwise it would bias the mean toward
    // whatever type happens to sit at level 1.
    std::vector<int> base(15, 0);
    for (int i = 0; i < 7; ++i) base[static_cast<std::size_t>(i)] = 1;

    const double t = 2.0, gamma = 1.0;
    const int reps = 4000;
    Matrix no_mutation;
    std::vector<double> fm, fl;
    for (int r = 0; r < reps; ++r) {
        RngStream rs(82, static_cast<std::uint64_t>(r));
        std::vector<int> init = base;
        for (std::size_t i = init.size(); i > 1; --i)
            std::swap(init[i - 1], init[rs.uniform_below(i)]);
        RngStream ra(79, static_cast<std::uint64_t>(r));
        RngStream rb(80, static_cast<std::uint64_t>(r));
        ParticlePath pa = moran_simulate(init, 2, gamma, no_mutation, t, ra);
        ParticlePath pb = lookdown_simulate(init, 2, gamma, no_mutation, t, rb);
        REQUIRE(pa.final_types.size() == 15);
        REQUIRE(pb.final_types.size() == 15);
        for (const auto& counts : pa.counts)
            REQUIRE(counts[0] + counts[1] == 15);
        int ca = 0, cb = 0;
        for (int v : pa.final_types) ca += v;
        for (int v : pb.final_types) cb += v;
        fm.push_back(ca / 15.0);
        fl.push_back(cb / 15.0);
    }
    Summary sm = summarize(fm), sl = summarize(fl);
    const double p0 = 7.0 / 15.0;
    CHECK(std::abs(sm.mean - p0) < 4 * sm.se);
    CHECK(std::abs(sl.mean - p0) < 4 * sl.se);
    CHECK(z_score(sm.mean, sm.se, sl.mean, sl.se) < 4.0);
}

TEST_CASE("mutation moves particle types between resampling events") {
    Matrix mut(2);
    mut(0, 1) = 2.0;  // type 0 flips to 1 at rate 2
    std::vector<int> init(10, 0);
    RngStream rng(81, 0);
    ParticlePath p = moran_simulate(init, 2, 0.0, mut, 3.0, rng);
    // resampling is off, so only mutation acts; most particles should flip
    int ones = 0;
    for (int v : p.final_types) ones += v;
    CHECK(ones > 5);
}
