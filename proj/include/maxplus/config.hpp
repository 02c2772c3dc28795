// Flat sectioned key/value configuration: "[section]" headers, "key = value"
// lines, '#' comments. All lookups go through typed getters with defaults;
// every key ever read is recorded so the run manifest can echo the fully
// materialized configuration.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace maxplus {

class Config {
  public:
    Config() = default;
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    void set(const std::string& section, const std::string& key, const std::string& value);
    bool has(const std::string& section, const std::string& key) const;

    double get_double(const std::string& section, const std::string& key, double def) const;
    int get_int(const std::string& section, const std::string& key, int def) const;
    bool get_bool(const std::string& section, const std::string& key, bool def) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& def) const;
    std::vector<double> get_list(const std::string& section, const std::string& key,
                                 const std::vector<double>& def) const;

    // Error accumulation for validation; nonempty => the config is rejected.
    void add_error(const std::string& field, const std::string& message) const;
    const std::vector<std::string>& errors() const { return errors_; }

    // section -> key -> value, with every default materialized by the getters.
    std::map<std::string, std::map<std::string, std::string>> materialized() const;

  private:
    std::map<std::string, std::map<std::string, std::string>> kv_;
    mutable std::map<std::string, std::map<std::string, std::string>> seen_;
    mutable std::vector<std::string> errors_;
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace maxplus
