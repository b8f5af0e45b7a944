#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdsw {

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

} // namespace detail

/// Minimal TOML-style configuration: [section] headers, key = value lines,
/// '#' comments, scalar values (string, number, bool) and flat arrays.
class ConfigFile {
public:
    ConfigFile() = default;

    static ConfigFile parse(std::istream& in) {
        ConfigFile cfg;
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            // strip comments outside quotes
            bool in_quote = false;
            char quote = 0;
            for (std::size_t i = 0; i < line.size(); ++i) {
                char c = line[i];
                if (in_quote) {
                    if (c == quote) in_quote = false;
                } else if (c == '"' || c == '\'') {
                    in_quote = true;
                    quote = c;
                } else if (c == '#') {
                    line.resize(i);
                    break;
                }
            }
            line = detail::trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw std::runtime_error("config line " + std::to_string(lineno) +
                                             ": malformed section header");
                section = detail::trim(line.substr(1, line.size() - 2));
                continue;
            }
            std::size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": expected key = value");
            std::string key = detail::trim(line.substr(0, eq));
            std::string value = detail::trim(line.substr(eq + 1));
            if (key.empty() || value.empty())
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": empty key or value");
            cfg.values_[section + "." + key] = value;
        }
        return cfg;
    }

    static ConfigFile parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file " + path);
        return parse(in);
    }

    bool has(const std::string& section, const std::string& key) const {
        return values_.count(section + "." + key) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        auto it = values_.find(section + "." + key);
        return it == values_.end() ? fallback : detail::unquote(it->second);
    }

    double get_double(const std::string& section, const std::string& key,
                      double fallback) const {
        auto it = values_.find(section + "." + key);
        if (it == values_.end()) return fallback;
        try {
            return std::stod(it->second);
        } catch (const std::exception&) {
            throw std::runtime_error("config key " + section + "." + key +
                                     ": not a number: " + it->second);
        }
    }

    long long get_int(const std::string& section, const std::string& key,
                      long long fallback) const {
        auto it = values_.find(section + "." + key);
        if (it == values_.end()) return fallback;
        try {
            return std::stoll(it->second);
        } catch (const std::exception&) {
            throw std::runtime_error("config key " + section + "." + key +
                                     ": not an integer: " + it->second);
        }
    }

    bool get_bool(const std::string& section, const std::string& key,
                  bool fallback) const {
        auto it = values_.find(section + "." + key);
        if (it == values_.end()) return fallback;
        std::string v = detail::unquote(it->second);
        if (v == "true" || v == "on" || v == "1") return true;
        if (v == "false" || v == "off" || v == "0") return false;
        throw std::runtime_error("config key " + section + "." + key +
                                 ": not a boolean: " + v);
    }

    std::vector<std::string> get_string_array(const std::string& section,
                                              const std::string& key,
                                              std::vector<std::string> fallback) const {
        auto it = values_.find(section + "." + key);
        if (it == values_.end()) return fallback;
        std::string v = detail::trim(it->second);
        if (v.size() < 2 || v.front() != '[' || v.back() != ']')
            return {detail::unquote(v)}; // single scalar counts as a 1-array
        v = v.substr(1, v.size() - 2);
        std::vector<std::string> out;
        std::string item;
        std::istringstream ss(v);
        while (std::getline(ss, item, ',')) {
            item = detail::trim(item);
            if (!item.empty()) out.push_back(detail::unquote(item));
        }
        return out;
    }

private:
    std::map<std::string, std::string> values_;
};

} // namespace gdsw
