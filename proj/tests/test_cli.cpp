#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "popdyn/config.hpp"
#include "popdyn/scenario.hpp"
#include "popdyn/report.hpp"

#include "json.hpp"

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

using namespace popdyn;

// ---- config parsing ------------------------------------------------------------

TEST_CASE("text configs parse nested blocks, comments, and lists") {
    ConfigNode cfg = ConfigNode::parse_text(
        "model = kingman   # trailing comment\n"
        "params {\n"
        "  n = 10\n"
        "  gamma = 1.5\n"
        "  pmf = 0.5, 0, 0.5\n"
        "  verbose = true\n"
        "}\n");
    CHECK(cfg.get_string("model") == "kingman");
    REQUIRE(cfg.has_child("params"));
    const ConfigNode& p = cfg.child("params");
    CHECK(p.get_int("n") == 10);
    CHECK(p.get_double("gamma") == doctest::Approx(1.5));
    CHECK(p.get_bool("verbose", false));
    auto pmf = p.get_double_list("pmf");
    REQUIRE(pmf.size() == 3);
    CHECK(pmf[0] == doctest::Approx(0.5));
    CHECK(pmf[1] == doctest::Approx(0.0));
    CHECK(pmf[2] == doctest::Approx(0.5));
}

TEST_CASE("serialization round-trips to an equal tree") {
    ConfigNode cfg = ConfigNode::parse_text(
        "zeta = last\n"
        "alpha = 1\n"
        "block {\n"
        "  inner = text value\n"
        "}\n");
    ConfigNode again = ConfigNode::parse_text(cfg.serialize());
    CHECK(again == cfg);
}

TEST_CASE("json configs map onto the same tree") {
    ConfigNode cfg = ConfigNode::parse_text(
        R"({"model": "extinction", "pmf": [0.25, 0.25, 0.5], "depth": {"k": 3}})");
    CHECK(cfg.get_string("model") == "extinction");
    CHECK(cfg.child("depth").get_int("k") == 3);
    auto pmf = cfg.get_double_list("pmf");
    REQUIRE(pmf.size() == 3);
    CHECK(pmf[2] == doctest::Approx(0.5));
}

TEST_CASE("getters convert with errors and fallbacks") {
    ConfigNode cfg = ConfigNode::parse_text("a = not-a-number\nb = 7\n");
    CHECK_THROWS(cfg.get_double("a"));
    CHECK_THROWS(cfg.get_double("missing"));
    CHECK(cfg.get_double("missing", 2.5) == doctest::Approx(2.5));
    CHECK(cfg.get_uint("b") == 7);
    CHECK_THROWS(cfg.get_double_list("a"));
}

TEST_CASE("unconsumed keys are reported by dotted path") {
    ConfigNode cfg = ConfigNode::parse_text(
        "model = bgw\n"
        "block {\n"
        "  used = 1\n"
        "  stray = 2\n"
        "}\n");
    cfg.get_string("model");
    cfg.child("block").get_int("used");
    auto leftover = cfg.unconsumed();
    REQUIRE(leftover.size() == 1);
    CHECK(leftover[0] == "block.stray");
    try {
        cfg.check_consumed();
        FAIL("expected a throw");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("block.stray") != std::string::npos);
    }
    cfg.child("block").get_int("stray");
    CHECK_NOTHROW(cfg.check_consumed());
}

// ---- scenario dispatch ------------------------------------------------------------

namespace {
ScenarioRequest make_request(const std::string& text) {
    ScenarioRequest req;
    req.config = ConfigNode::parse_text(text);
    return req;
}
}

TEST_CASE("analyze models compute exact rows") {
    ScenarioRequest req = make_request("model = extinction\npmf = 0.25, 0.25, 0.5\n");
    RunReport rep = run_scenario("analyze", req);
    CHECK(rep.model == "extinction");
    CHECK(rep.all_pass());
    bool found = false;
    for (const auto& row : rep.stats)
        if (row.name == "q") {
            found = true;
            CHECK(row.estimate == doctest::Approx(0.5).epsilon(1e-10));
        }
    CHECK(found);
}

TEST_CASE("unknown models and mismatched commands are rejected") {
    ScenarioRequest bad = make_request("model = not-a-model\n");
    CHECK_THROWS_WITH_AS(run_scenario("analyze", bad),
                         doctest::Contains("unknown model"), std::runtime_error);

    ScenarioRequest wrong = make_request("model = kingman\nreps = 10\n");
    CHECK_THROWS_WITH_AS(run_scenario("analyze", wrong),
                         doctest::Contains("runs under"), std::runtime_error);
}

TEST_CASE("unknown config keys fail the run") {
    ScenarioRequest req = make_request(
        "model = kingman\nreps = 50\nn = 6\ntypo_key = 3\n");
    CHECK_THROWS_WITH_AS(run_scenario("simulate", req),
                         doctest::Contains("typo_key"), std::runtime_error);
}

TEST_CASE("config seed and reps apply unless a flag overrides them") {
    ScenarioRequest req = make_request("model = kingman\nseed = 33\nreps = 40\nn = 5\n");
    RunReport rep = run_scenario("simulate", req);
    CHECK(rep.seed == 33);
    CHECK(rep.reps == 40);

    ScenarioRequest over = make_request("model = kingman\nseed = 33\nreps = 40\nn = 5\n");
    over.seed = 99;
    over.seed_override = true;
    RunReport rep2 = run_scenario("simulate", over);
    CHECK(rep2.seed == 99);
    CHECK(rep2.reps == 40);
}

TEST_CASE("zero replicates runs the config checks and nothing else") {
    ScenarioRequest req = make_request("model = bgw\npmf = 0.25, 0.25, 0.5\nreps = 0\n");
    RunReport rep = run_scenario("simulate", req);
    CHECK(rep.stats.empty());
    CHECK(rep.data_files.empty());
    CHECK(rep.all_pass());
}

TEST_CASE("results are byte-identical across worker counts and differ across seeds") {
    auto run_with = [](std::uint64_t seed, int threads) {
        ScenarioRequest req;
        req.config = ConfigNode::parse_text("model = kingman\nn = 8\n");
        req.seed = seed;
        req.reps = 2000;
        req.threads = threads;
        return run_scenario("simulate", req);
    };
    RunReport a = run_with(7, 1);
    RunReport b = run_with(7, 4);
    CHECK(a.results_hash() == b.results_hash());
    CHECK(a.results_json() == b.results_json());
    RunReport c = run_with(8, 1);
    CHECK(a.results_hash() != c.results_hash());
}

TEST_CASE("out_dir receives data files referenced by the report") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "popdyn_cli_test_out";
    fs::remove_all(dir);

    ScenarioRequest req = make_request("model = kingman\nn = 6\nreps = 100\n");
    req.out_dir = dir.string();
    RunReport rep = run_scenario("simulate", req);
    REQUIRE_FALSE(rep.data_files.empty());
    for (const auto& f : rep.data_files) CHECK(fs::exists(f));
    fs::remove_all(dir);
}

// ---- report rendering ------------------------------------------------------------

TEST_CASE("report json parses and the table mentions the failing row") {
    RunReport rep;
    rep.command = "simulate";
    rep.model = "demo";
    rep.seed = 5;
    rep.reps = 10;
    rep.stats.push_back(StatRow::plain("theta", 1.25));
    rep.stats.push_back(StatRow::checked("off_target", 2.0, 1.0, "abs", 1.0, 0.5));
    CHECK_FALSE(rep.all_pass());

    auto j = nlohmann::json::parse(rep.results_json());
    CHECK(j["model"] == "demo");
    auto full = nlohmann::json::parse(rep.full_json());
    CHECK(full.contains("meta"));

    std::string table = rep.text_table();
    CHECK(table.find("off_target") != std::string::npos);
    CHECK(table.find("FAIL") != std::string::npos);

    // the hash covers results only, never timing metadata
    RunReport copy = rep;
    copy.wall_seconds = 123.0;
    copy.version = "other";
    CHECK(copy.results_hash() == rep.results_hash());
}

TEST_CASE("model registry lists both command kinds with unique names") {
    auto models = list_models();
    REQUIRE_FALSE(models.empty());
    bool saw_sim = false, saw_ana = false;
    std::vector<std::string> names;
    for (const auto& m : models) {
        if (m.command == "simulate") saw_sim = true;
        if (m.command == "analyze") saw_ana = true;
        names.push_back(m.name);
    }
    CHECK(saw_sim);
    CHECK(saw_ana);
    std::sort(names.begin(), names.end());
    CHECK(std::adjacent_find(names.begin(), names.end()) == names.end());
}
