#include "bilayer/config.hpp"

#include <fstream>
#include <iterator>
#include <json.hpp>
#include <sstream>

#include "bilayer/blocks.hpp"
#include "bilayer/profile.hpp"

namespace bilayer {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

std::string scalar_text(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_double(v.get<double>());
    throw UsageError("config key '" + key + "' must be a scalar or an array of scalars");
}

std::vector<ConfigEntry> parse_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw UsageError("JSON config must be an object");
    std::vector<ConfigEntry> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        ConfigEntry e;
        e.key = it.key();
        if (it->is_array())
            for (const auto& v : *it) e.values.push_back(scalar_text(v, e.key));
        else
            e.values.push_back(scalar_text(*it, e.key));
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<ConfigEntry> parse_key_value(const std::string& text) {
    std::vector<ConfigEntry> out;
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        const auto sep = s.find_first_of("=:");
        if (sep == std::string::npos)
            throw UsageError("config line " + std::to_string(line) + ": expected 'key = value'");
        ConfigEntry e;
        e.key = trim(s.substr(0, sep));
        e.line = line;
        if (e.key.empty()) throw UsageError("config line " + std::to_string(line) + ": empty key");
        e.values.push_back(unquote(trim(s.substr(sep + 1))));
        for (const auto& prev : out)
            if (prev.key == e.key) throw UsageError("config line " + std::to_string(line) + ": duplicate key '" + e.key + "'");
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

std::vector<ConfigEntry> parse_config(std::istream& is) {
    const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    const std::string t = trim(text);
    if (!t.empty() && t.front() == '{') return parse_json(t);
    return parse_key_value(text);
}

std::vector<ConfigEntry> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open config file " + path);
    return parse_config(f);
}

void reject_unknown_keys(const std::vector<ConfigEntry>& entries, const std::set<std::string>& allowed) {
    std::string bad;
    for (const auto& e : entries)
        if (!allowed.count(e.key)) bad += (bad.empty() ? "" : ", ") + e.key;
    if (!bad.empty()) throw UsageError("unknown config keys: " + bad);
}

}  // namespace bilayer
