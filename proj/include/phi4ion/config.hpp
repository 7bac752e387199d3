#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace phi4ion::io {

/// Flat key-value run configuration under one [command] section. Keys carry
/// unit suffixes (_hz, _lattice, _m, ...). Parsing is strict: every key must
/// belong to the command's schema.
class RunConfig {
  public:
    RunConfig(std::string command, std::vector<std::pair<std::string, std::string>> entries);

    /// Parses config text; requires exactly one section matching `command`.
    static RunConfig parse(const std::string& text, const std::string& command);

    const std::string& command() const { return command_; }

    /// Applies a key=value override (from --set).
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key);
    std::string get_string(const std::string& key, const std::string& fallback);
    double get_double(const std::string& key);
    double get_double(const std::string& key, double fallback);
    int get_int(const std::string& key);
    int get_int(const std::string& key, int fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::vector<double> get_double_list(const std::string& key);
    std::vector<double> get_double_list(const std::string& key, std::vector<double> fallback);
    std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback);
    std::vector<std::string> get_string_list(const std::string& key,
                                             std::vector<std::string> fallback);

    /// Throws ConfigError naming any key never requested by the command.
    void reject_unknown_keys() const;

    /// Canonical text "[command]\nkey = value\n..." of the effective config.
    std::string canonical_text() const;

  private:
    std::string lookup(const std::string& key, bool required, const std::string& fallback);

    std::string command_;
    std::vector<std::pair<std::string, std::string>> entries_;  // ordered
    mutable std::set<std::string> consumed_;
};

}  // namespace phi4ion::io
