#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace twrn {

// Flat "key = value" configuration text; '#' starts a comment, blank lines
// are skipped.  Lookups remember which keys were touched so callers can
// reject unknown ones.
class Config {
public:
    static Config parse_file(const std::filesystem::path& path);
    static Config parse_string(std::string_view text);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<std::string> get_string_list(const std::string& key) const;

    // keys present in the file but never requested
    std::vector<std::string> untouched_keys() const;

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> touched_;
};

}  // namespace twrn
