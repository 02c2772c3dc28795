// Run artifacts: CSV tables (17 significant digits), native SVG polyline
// charts, and the run manifest that echoes the materialized configuration and
// references every emitted file.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "maxplus/config.hpp"

namespace maxplus {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    void write(const std::string& path) const;
};

struct SvgSeries {
    std::string label;
    std::vector<double> x, y;
};

void write_svg_chart(const std::string& path, const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, const std::vector<SvgSeries>& series,
                     bool log_x = false);

class Manifest {
  public:
    Manifest(std::string subcommand, uint64_t seed, int threads);
    void add_artifact(const std::string& name);
    void add_note(const std::string& key, const std::string& value);
    void set_config(const Config& cfg);
    void write(const std::string& path, double elapsed_s) const;
    const std::vector<std::string>& artifacts() const { return artifacts_; }

  private:
    std::string subcommand_;
    uint64_t seed_;
    int threads_;
    std::vector<std::string> artifacts_;
    std::vector<std::pair<std::string, std::string>> notes_;
    std::map<std::string, std::map<std::string, std::string>> config_echo_;
};

}  // namespace maxplus
