#include "maxplus/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace maxplus {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_string(ss.str());
}

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section = "global";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        cfg.kv_[section][key] = value;
    }
    return cfg;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    kv_[section][key] = value;
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto s = kv_.find(section);
    return s != kv_.end() && s->second.count(key) > 0;
}

double Config::get_double(const std::string& section, const std::string& key, double def) const {
    if (!has(section, key)) {
        seen_[section][key] = fmt_double(def);
        return def;
    }
    const std::string& v = kv_.at(section).at(key);
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing garbage");
        seen_[section][key] = v;
        return x;
    } catch (const std::exception&) {
        add_error(section + "." + key, "not a number: '" + v + "'");
        return def;
    }
}

int Config::get_int(const std::string& section, const std::string& key, int def) const {
    if (!has(section, key)) {
        seen_[section][key] = std::to_string(def);
        return def;
    }
    const std::string& v = kv_.at(section).at(key);
    try {
        size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing garbage");
        seen_[section][key] = v;
        return x;
    } catch (const std::exception&) {
        add_error(section + "." + key, "not an integer: '" + v + "'");
        return def;
    }
}

bool Config::get_bool(const std::string& section, const std::string& key, bool def) const {
    if (!has(section, key)) {
        seen_[section][key] = def ? "true" : "false";
        return def;
    }
    const std::string& v = kv_.at(section).at(key);
    seen_[section][key] = v;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    add_error(section + "." + key, "not a boolean: '" + v + "'");
    return def;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& def) const {
    if (!has(section, key)) {
        seen_[section][key] = def;
        return def;
    }
    seen_[section][key] = kv_.at(section).at(key);
    return kv_.at(section).at(key);
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key,
                                     const std::vector<double>& def) const {
    if (!has(section, key)) {
        std::string joined;
        for (size_t i = 0; i < def.size(); ++i) joined += (i ? "," : "") + fmt_double(def[i]);
        seen_[section][key] = joined;
        return def;
    }
    const std::string& v = kv_.at(section).at(key);
    std::vector<double> out;
    std::istringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            add_error(section + "." + key, "bad list entry: '" + tok + "'");
            return def;
        }
    }
    seen_[section][key] = v;
    return out;
}

void Config::add_error(const std::string& field, const std::string& message) const {
    errors_.push_back(field + ": " + message);
}

std::map<std::string, std::map<std::string, std::string>> Config::materialized() const {
    auto out = seen_;
    for (const auto& [sec, kvs] : kv_)
        for (const auto& [k, v] : kvs) out[sec][k] = v;
    return out;
}

}  // namespace maxplus
