#include "phi4ion/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "phi4ion/errors.hpp"

namespace phi4ion::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size() || value.empty())
        throw ConfigError("config: key '" + key + "' is not a number: '" + value + "'");
    return v;
}

}  // namespace

RunConfig::RunConfig(std::string command, std::vector<std::pair<std::string, std::string>> entries)
    : command_(std::move(command)), entries_(std::move(entries)) {}

RunConfig RunConfig::parse(const std::string& text, const std::string& command) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    bool found = false;
    std::vector<std::pair<std::string, std::string>> entries;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (section == command) {
                if (found) throw ConfigError("config: duplicate section [" + command + "]");
                found = true;
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected 'key = value' at line " + std::to_string(lineno));
        if (section.empty())
            throw ConfigError("config: key outside any [section] at line " + std::to_string(lineno));
        if (section != command) continue;  // other sections are ignored, not validated
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        for (const auto& [k, v] : entries)
            if (k == key) throw ConfigError("config: duplicate key '" + key + "'");
        entries.emplace_back(key, value);
    }
    if (!found) throw ConfigError("config: missing section [" + command + "]");
    return RunConfig(command, std::move(entries));
}

void RunConfig::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_)
        if (k == key) {
            v = value;
            return;
        }
    entries_.emplace_back(key, value);
}

bool RunConfig::has(const std::string& key) const {
    consumed_.insert(key);
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const auto& e) { return e.first == key; });
}

std::string RunConfig::lookup(const std::string& key, bool required, const std::string& fallback) {
    consumed_.insert(key);
    for (const auto& [k, v] : entries_)
        if (k == key) return v;
    if (required) throw ConfigError("config: missing required key '" + key + "'");
    return fallback;
}

std::string RunConfig::get_string(const std::string& key) { return lookup(key, true, {}); }
std::string RunConfig::get_string(const std::string& key, const std::string& fallback) {
    return lookup(key, false, fallback);
}
double RunConfig::get_double(const std::string& key) { return parse_double(key, lookup(key, true, {})); }
double RunConfig::get_double(const std::string& key, double fallback) {
    const std::string v = lookup(key, false, {});
    return v.empty() ? fallback : parse_double(key, v);
}
int RunConfig::get_int(const std::string& key) {
    const double v = get_double(key);
    const int iv = static_cast<int>(v);
    if (static_cast<double>(iv) != v) throw ConfigError("config: key '" + key + "' must be an integer");
    return iv;
}
int RunConfig::get_int(const std::string& key, int fallback) {
    return has(key) ? get_int(key) : fallback;
}
bool RunConfig::get_bool(const std::string& key, bool fallback) {
    const std::string v = lookup(key, false, fallback ? "true" : "false");
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: key '" + key + "' must be a boolean");
}

std::vector<double> RunConfig::get_double_list(const std::string& key) {
    const std::string raw = lookup(key, true, {});
    std::vector<double> out;
    std::istringstream in(raw);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("config: key '" + key + "' has no values");
    return out;
}
std::vector<double> RunConfig::get_double_list(const std::string& key,
                                               std::vector<double> fallback) {
    return has(key) ? get_double_list(key) : fallback;
}
std::vector<int> RunConfig::get_int_list(const std::string& key, std::vector<int> fallback) {
    if (!has(key)) return fallback;
    std::vector<int> out;
    for (double v : get_double_list(key)) {
        const int iv = static_cast<int>(v);
        if (static_cast<double>(iv) != v)
            throw ConfigError("config: key '" + key + "' must list integers");
        out.push_back(iv);
    }
    return out;
}
std::vector<std::string> RunConfig::get_string_list(const std::string& key,
                                                    std::vector<std::string> fallback) {
    if (!has(key)) return fallback;
    const std::string raw = lookup(key, true, {});
    std::vector<std::string> out;
    std::istringstream in(raw);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void RunConfig::reject_unknown_keys() const {
    for (const auto& [k, v] : entries_)
        if (!consumed_.count(k))
            throw ConfigError("config: unknown key '" + k + "' in section [" + command_ + "]");
}

std::string RunConfig::canonical_text() const {
    std::ostringstream out;
    out << "[" << command_ << "]\n";
    for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
    return out.str();
}

}  // namespace phi4ion::io
