#pragma once
#include "popdyn/config.hpp"
#include "popdyn/report.hpp"
#include <string>
#include <vector>

namespace popdyn {

// Everything a model handler needs besides its own parameters. seed/reps/
// threads are the effective values after command-line overrides; out_dir ""
// suppresses data files.
struct ScenarioRequest {
    ConfigNode config;
    std::string out_dir;
    std::string format = "csv";  // data file format: csv or json
    std::uint64_t seed = 1;
    std::uint64_t reps = 0;
    int threads = 0;  // <= 0 picks the default worker count
    // set when the value came from a command-line flag, which then wins over
    // a seed/reps/threads key in the config file
    bool seed_override = false;
    bool reps_override = false;
    bool threads_override = false;
};

struct ModelInfo {
    std::string name;
    std::string command;  // "simulate" or "analyze"
    std::string summary;
};
std::vector<ModelInfo> list_models();

// Dispatches config["model"] through the registry, echoes the config, and
// rejects unknown keys. `command` must match the model's kind (a simulate
// model cannot run under analyze and vice versa).
RunReport run_scenario(const std::string& command, ScenarioRequest& req);

} // namespace popdyn
