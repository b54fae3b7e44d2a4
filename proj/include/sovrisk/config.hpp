#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sovrisk {

// INI-style configuration: [section] headers, key = value lines, # or ;
// comments. Section and key lookups throw DataError with the missing name.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text,
                               const std::string& origin = "<string>");

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;
    std::vector<std::string> sections() const;

    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    int get_int_or(const std::string& section, const std::string& key,
                   int fallback) const;
    bool get_bool_or(const std::string& section, const std::string& key,
                     bool fallback) const;
    // comma-separated list, trimmed, empty entries dropped
    std::vector<std::string> get_list(const std::string& section,
                                      const std::string& key) const;

    void set(const std::string& section, const std::string& key,
             const std::string& value);

private:
    std::map<std::string, std::map<std::string, std::string>> data_;
};

} // namespace sovrisk
