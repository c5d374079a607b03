#pragma once
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace popdyn {

// Nested key-value configuration tree. The native text format is line-based:
//
//   model = kingman
//   params {
//     n = 10          # comments run to end of line
//     gamma = 1.0
//     pmf = 0.5, 0, 0.5
//   }
//
// Files whose first non-space character is '{' are parsed as JSON instead and
// converted to the same tree. Leaf values are kept as raw text; typed getters
// convert on access and record which keys were touched so a scenario can
// reject unknown keys afterwards.
class ConfigNode {
public:
    static ConfigNode parse_text(const std::string& text);
    static ConfigNode parse_file(const std::string& path);

    // canonical text form (sorted keys); re-parsing it yields an equal tree
    std::string serialize(int indent = 0) const;

    bool has(const std::string& key) const;
    bool has_child(const std::string& key) const;
    const ConfigNode& child(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;

    void set(const std::string& key, const std::string& value);
    ConfigNode& ensure_child(const std::string& key);

    // dotted paths of keys never read through a getter; empty means the whole
    // tree was consumed
    std::vector<std::string> unconsumed() const;
    // throws listing the leftover keys (the unknown-key rejection contract)
    void check_consumed() const;

    bool operator==(const ConfigNode& other) const;

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, ConfigNode> children_;
    mutable std::set<std::string> touched_;

    const std::string& raw(const std::string& key) const;
    void collect_unconsumed(const std::string& prefix, std::vector<std::string>& out) const;
};

} // namespace popdyn
