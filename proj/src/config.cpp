#include "twrn/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twrn {

namespace {

std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Config Config::parse_string(std::string_view text) {
    Config cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": empty key");
        if (!cfg.values_.emplace(key, value).second)
            throw std::invalid_argument("config: duplicate key '" + key + "'");
    }
    return cfg;
}

Config Config::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

bool Config::has(const std::string& key) const {
    touched_.insert(key);
    return values_.count(key) != 0;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
    touched_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    touched_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    char* end = nullptr;
    double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0')
        throw std::invalid_argument("config: key '" + key + "' is not a number: " +
                                    it->second);
    return v;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
    touched_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    char* end = nullptr;
    long long v = std::strtoll(it->second.c_str(), &end, 10);
    if (end == it->second.c_str() || *end != '\0')
        throw std::invalid_argument("config: key '" + key + "' is not an integer: " +
                                    it->second);
    return v;
}

std::vector<std::string> Config::get_string_list(const std::string& key) const {
    touched_.insert(key);
    auto it = values_.find(key);
    std::vector<std::string> out;
    if (it == values_.end()) return out;
    std::istringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string t = trim(item);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

std::vector<double> Config::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& s : get_string_list(key)) {
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0')
            throw std::invalid_argument("config: key '" + key +
                                        "' has a non-numeric entry: " + s);
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> Config::untouched_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (!touched_.count(k)) out.push_back(k);
    return out;
}

}  // namespace twrn
