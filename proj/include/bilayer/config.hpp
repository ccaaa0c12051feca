#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace bilayer {

struct ConfigEntry {
    std::string key;
    std::vector<std::string> values;  // arrays give several values
    int line = 0;                     // 0 for JSON input
};

/// Flat JSON object, or `key = value` / `key: value` lines with `#` comments.
/// Duplicate keys and nested objects are rejected with UsageError.
std::vector<ConfigEntry> parse_config(std::istream& is);
std::vector<ConfigEntry> read_config_file(const std::string& path);

/// Throws UsageError naming every key that is not in `allowed`.
void reject_unknown_keys(const std::vector<ConfigEntry>& entries, const std::set<std::string>& allowed);

}  // namespace bilayer
