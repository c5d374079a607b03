#include "popdyn/config.hpp"
#include "popdyn/io.hpp"
#include <cctype>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace popdyn {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

void validate_key(const std::string& key) {
    if (key.empty()) throw std::runtime_error("config: empty key");
    for (char c : key)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
            throw std::runtime_error("config: bad character in key '" + key + "'");
}

void json_to_node(const nlohmann::json& j, ConfigNode& node) {
    if (!j.is_object()) throw std::runtime_error("config: JSON root and blocks must be objects");
    for (auto it = j.begin(); it != j.end(); ++it) {
        validate_key(it.key());
        const nlohmann::json& v = it.value();
        if (v.is_object()) {
            json_to_node(v, node.ensure_child(it.key()));
        } else if (v.is_array()) {
            std::string list;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!v[i].is_number())
                    throw std::runtime_error("config: JSON arrays must be numeric");
                if (i) list += ", ";
                list += v[i].dump();
            }
            node.set(it.key(), list);
        } else if (v.is_string()) {
            node.set(it.key(), v.get<std::string>());
        } else if (v.is_boolean()) {
            node.set(it.key(), v.get<bool>() ? "true" : "false");
        } else if (v.is_number()) {
            node.set(it.key(), v.dump());
        } else {
            throw std::runtime_error("config: unsupported JSON value for key '" + it.key() + "'");
        }
    }
}

} // namespace

ConfigNode ConfigNode::parse_text(const std::string& text) {
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        ConfigNode root;
        json_to_node(nlohmann::json::parse(text), root);
        return root;
    }
    ConfigNode root;
    std::vector<ConfigNode*> stack{&root};
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        auto fail = [&](const std::string& why) {
            throw std::runtime_error("config line " + std::to_string(lineno) + ": " + why);
        };
        if (body == "}") {
            if (stack.size() == 1) fail("unmatched '}'");
            stack.pop_back();
            continue;
        }
        if (body.back() == '{') {
            std::string key = trim(body.substr(0, body.size() - 1));
            validate_key(key);
            ConfigNode& child = stack.back()->ensure_child(key);
            stack.push_back(&child);
            continue;
        }
        auto eq = body.find('=');
        if (eq == std::string::npos) fail("expected 'key = value', 'key {', or '}'");
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        validate_key(key);
        if (value.empty()) fail("empty value for key '" + key + "'");
        if (stack.back()->values_.count(key) || stack.back()->children_.count(key))
            fail("duplicate key '" + key + "'");
        stack.back()->set(key, value);
    }
    if (stack.size() != 1) throw std::runtime_error("config: unclosed block");
    return root;
}

ConfigNode ConfigNode::parse_file(const std::string& path) {
    return parse_text(read_text_file(path));
}

std::string ConfigNode::serialize(int indent) const {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    std::string out;
    for (const auto& [k, v] : values_) out += pad + k + " = " + v + "\n";
    for (const auto& [k, c] : children_) {
        out += pad + k + " {\n";
        out += c.serialize(indent + 1);
        out += pad + "}\n";
    }
    return out;
}

bool ConfigNode::has(const std::string& key) const { return values_.count(key) != 0; }
bool ConfigNode::has_child(const std::string& key) const { return children_.count(key) != 0; }

const ConfigNode& ConfigNode::child(const std::string& key) const {
    auto it = children_.find(key);
    if (it == children_.end()) throw std::runtime_error("config: missing block '" + key + "'");
    touched_.insert(key);
    return it->second;
}

const std::string& ConfigNode::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("config: missing key '" + key + "'");
    touched_.insert(key);
    return it->second;
}

std::string ConfigNode::get_string(const std::string& key) const { return raw(key); }

std::string ConfigNode::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? raw(key) : fallback;
}

double ConfigNode::get_double(const std::string& key) const {
    const std::string& text = raw(key);
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
        throw std::runtime_error("config: key '" + key + "' is not a number: " + text);
    return v;
}

double ConfigNode::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::int64_t ConfigNode::get_int(const std::string& key) const {
    double v = get_double(key);
    auto i = static_cast<std::int64_t>(v);
    if (static_cast<double>(i) != v)
        throw std::runtime_error("config: key '" + key + "' is not an integer");
    return i;
}

std::int64_t ConfigNode::get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t ConfigNode::get_uint(const std::string& key) const {
    std::int64_t v = get_int(key);
    if (v < 0) throw std::runtime_error("config: key '" + key + "' must be >= 0");
    return static_cast<std::uint64_t>(v);
}

std::uint64_t ConfigNode::get_uint(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_uint(key) : fallback;
}

bool ConfigNode::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& text = raw(key);
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw std::runtime_error("config: key '" + key + "' is not a bool: " + text);
}

std::vector<double> ConfigNode::get_double_list(const std::string& key) const {
    const std::string& text = raw(key);
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string item = trim(comma == std::string::npos ? text.substr(pos)
                                                           : text.substr(pos, comma - pos));
        if (item.empty())
            throw std::runtime_error("config: empty element in list '" + key + "'");
        char* end = nullptr;
        out.push_back(std::strtod(item.c_str(), &end));
        if (end == item.c_str() || *end != '\0')
            throw std::runtime_error("config: non-numeric element in list '" + key + "'");
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

void ConfigNode::set(const std::string& key, const std::string& value) {
    validate_key(key);
    values_[key] = value;
}

ConfigNode& ConfigNode::ensure_child(const std::string& key) {
    validate_key(key);
    return children_[key];
}

void ConfigNode::collect_unconsumed(const std::string& prefix,
                                    std::vector<std::string>& out) const {
    for (const auto& [k, v] : values_)
        if (!touched_.count(k)) out.push_back(prefix + k);
    for (const auto& [k, c] : children_) {
        if (!touched_.count(k))
            out.push_back(prefix + k);
        else
            c.collect_unconsumed(prefix + k + ".", out);
    }
}

std::vector<std::string> ConfigNode::unconsumed() const {
    std::vector<std::string> out;
    collect_unconsumed("", out);
    return out;
}

void ConfigNode::check_consumed() const {
    std::vector<std::string> leftovers = unconsumed();
    if (leftovers.empty()) return;
    std::string msg = "config: unknown key(s):";
    for (const auto& k : leftovers) msg += " " + k;
    throw std::runtime_error(msg);
}

bool ConfigNode::operator==(const ConfigNode& other) const {
    return values_ == other.values_ && children_ == other.children_;
}

} // namespace popdyn
