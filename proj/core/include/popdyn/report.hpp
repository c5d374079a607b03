#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace popdyn {

// One line of a run report. `metric` names the comparison ("z", "ks", "abs",
// "rel", "chi2_p"); every oracle comparison carries its tolerance so the
// report is self-describing.
struct StatRow {
    std::string name;
    double estimate = 0.0;
    bool has_se = false;
    double se = 0.0;
    bool has_oracle = false;
    double oracle = 0.0;
    std::string metric;
    double distance = 0.0;
    double tolerance = 0.0;
    bool pass = true;

    static StatRow plain(const std::string& name, double estimate);
    static StatRow with_se(const std::string& name, double estimate, double se);
    // pass iff distance <= tolerance
    static StatRow checked(const std::string& name, double estimate, double oracle,
                           const std::string& metric, double distance, double tolerance);
};

// Everything inside `results` is a pure function of (config, seed, reps), so
// repeated runs (any worker count) must produce byte-identical results text;
// wall time and versions live in `meta` and stay out of the hash.
struct RunReport {
    std::string command;   // simulate / analyze / validate
    std::string model;
    std::uint64_t seed = 0;
    std::uint64_t reps = 0;
    std::string config_echo;
    std::vector<StatRow> stats;
    std::vector<std::string> data_files;  // paths written next to the report

    double wall_seconds = 0.0;
    std::string version;
    int threads_used = 0;

    bool all_pass() const;
    std::string results_json() const;
    std::string full_json() const;
    std::uint64_t results_hash() const;
    // fixed-width text table for terminal output
    std::string text_table() const;
};

} // namespace popdyn
