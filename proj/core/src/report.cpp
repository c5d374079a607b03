#include "popdyn/report.hpp"
#include "popdyn/rng.hpp"
#include <cstdio>

#include "json.hpp"

namespace popdyn {

StatRow StatRow::plain(const std::string& name, double estimate) {
    StatRow row;
    row.name = name;
    row.estimate = estimate;
    return row;
}

StatRow StatRow::with_se(const std::string& name, double estimate, double se) {
    StatRow row = plain(name, estimate);
    row.has_se = true;
    row.se = se;
    return row;
}

StatRow StatRow::checked(const std::string& name, double estimate, double oracle,
                         const std::string& metric, double distance, double tolerance) {
    StatRow row = plain(name, estimate);
    row.has_oracle = true;
    row.oracle = oracle;
    row.metric = metric;
    row.distance = distance;
    row.tolerance = tolerance;
    row.pass = distance <= tolerance;
    return row;
}

bool RunReport::all_pass() const {
    for (const auto& row : stats)
        if (!row.pass) return false;
    return true;
}

namespace {
nlohmann::json row_json(const StatRow& row) {
    nlohmann::json j;
    j["name"] = row.name;
    j["estimate"] = row.estimate;
    if (row.has_se) j["se"] = row.se;
    if (row.has_oracle) {
        j["oracle"] = row.oracle;
        j["metric"] = row.metric;
        j["distance"] = row.distance;
        j["tolerance"] = row.tolerance;
    }
    j["pass"] = row.pass;
    return j;
}
} // namespace

std::string RunReport::results_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["model"] = model;
    j["seed"] = seed;
    j["reps"] = reps;
    j["config"] = config_echo;
    j["stats"] = nlohmann::json::array();
    for (const auto& row : stats) j["stats"].push_back(row_json(row));
    j["data_files"] = data_files;
    j["all_pass"] = all_pass();
    return j.dump(2);
}

std::string RunReport::full_json() const {
    nlohmann::json j;
    j["results"] = nlohmann::json::parse(results_json());
    j["meta"] = {{"wall_seconds", wall_seconds},
                 {"version", version},
                 {"threads_used", threads_used},
                 {"results_hash", results_hash()}};
    return j.dump(2);
}

std::uint64_t RunReport::results_hash() const {
    return hash_tag(results_json().c_str());
}

std::string RunReport::text_table() const {
    std::string out;
    char buf[256];
    for (const auto& row : stats) {
        std::string line = row.name + ": ";
        std::snprintf(buf, sizeof buf, "%.10g", row.estimate);
        line += buf;
        if (row.has_se) {
            std::snprintf(buf, sizeof buf, " +- %.3g", row.se);
            line += buf;
        }
        if (row.has_oracle) {
            std::snprintf(buf, sizeof buf, " | oracle %.10g | %s %.3g <= %.3g | %s",
                          row.oracle, row.metric.c_str(), row.distance, row.tolerance,
                          row.pass ? "pass" : "FAIL");
            line += buf;
        }
        out += line + "\n";
    }
    return out;
}

} // namespace popdyn
