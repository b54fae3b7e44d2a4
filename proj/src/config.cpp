#include "sovrisk/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sovrisk/error.hpp"

namespace sovrisk {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw DataError(origin + ":" + std::to_string(lineno) +
                                ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw DataError(origin + ":" + std::to_string(lineno) +
                                ": empty section name");
            cfg.data_[section]; // register even if empty
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw DataError(origin + ":" + std::to_string(lineno) +
                            ": expected key = value");
        if (section.empty())
            throw DataError(origin + ":" + std::to_string(lineno) +
                            ": key outside any [section]");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw DataError(origin + ":" + std::to_string(lineno) + ": empty key");
        cfg.data_[section][key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

bool Config::has_section(const std::string& section) const {
    return data_.count(section) > 0;
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto it = data_.find(section);
    return it != data_.end() && it->second.count(key) > 0;
}

std::vector<std::string> Config::sections() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : data_) out.push_back(name);
    return out;
}

std::string Config::get(const std::string& section, const std::string& key) const {
    auto it = data_.find(section);
    if (it == data_.end()) throw DataError("config: missing section [" + section + "]");
    auto kit = it->second.find(key);
    if (kit == it->second.end())
        throw DataError("config: missing key '" + key + "' in [" + section + "]");
    return kit->second;
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    std::string v = get(section, key);
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw DataError("config: key '" + key + "' in [" + section +
                        "] is not a number: '" + v + "'");
    return d;
}

double Config::get_double_or(const std::string& section, const std::string& key,
                             double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int Config::get_int_or(const std::string& section, const std::string& key,
                       int fallback) const {
    if (!has(section, key)) return fallback;
    double d = get_double(section, key);
    int i = static_cast<int>(d);
    if (static_cast<double>(i) != d)
        throw DataError("config: key '" + key + "' in [" + section +
                        "] is not an integer");
    return i;
}

bool Config::get_bool_or(const std::string& section, const std::string& key,
                         bool fallback) const {
    if (!has(section, key)) return fallback;
    std::string v = get(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw DataError("config: key '" + key + "' in [" + section +
                    "] is not a boolean: '" + v + "'");
}

std::vector<std::string> Config::get_list(const std::string& section,
                                          const std::string& key) const {
    std::vector<std::string> out;
    if (!has(section, key)) return out;
    std::string v = get(section, key);
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
    data_[section][key] = value;
}

} // namespace sovrisk
