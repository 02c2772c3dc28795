#include "maxplus/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace maxplus {

void CsvTable::write(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    for (size_t i = 0; i < header.size(); ++i)
        std::fprintf(f, "%s%s", i ? "," : "", header[i].c_str());
    std::fprintf(f, "\n");
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i)
            std::fprintf(f, "%s%.17g", i ? "," : "", row[i]);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

void write_svg_chart(const std::string& path, const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, const std::vector<SvgSeries>& series, bool log_x) {
    const int W = 640, H = 420, ml = 64, mr = 24, mt = 40, mb = 48;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            const double xv = log_x ? std::log10(s.x[i]) : s.x[i];
            xmin = std::min(xmin, xv);
            xmax = std::max(xmax, xv);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;
    const double yr = ymax - ymin;
    ymin -= 0.05 * yr;
    ymax += 0.05 * yr;

    auto px = [&](double x) {
        const double v = log_x ? std::log10(x) : x;
        return ml + (v - xmin) / (xmax - xmin) * (W - ml - mr);
    };
    auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::fprintf(f,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                 "viewBox=\"0 0 %d %d\">\n",
                 W, H, W, H);
    std::fprintf(f, "<rect width=\"%d\" height=\"%d\" fill=\"white\"/>\n", W, H);
    std::fprintf(f,
                 "<text x=\"%d\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" "
                 "text-anchor=\"middle\">%s</text>\n",
                 W / 2, title.c_str());
    std::fprintf(f,
                 "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" "
                 "stroke=\"black\"/>\n",
                 ml, mt, W - ml - mr, H - mt - mb);
    // axis labels and a few ticks
    std::fprintf(f,
                 "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\" "
                 "text-anchor=\"middle\">%s</text>\n",
                 W / 2, H - 12, xlabel.c_str());
    std::fprintf(f,
                 "<text x=\"16\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\" "
                 "text-anchor=\"middle\" transform=\"rotate(-90 16 %d)\">%s</text>\n",
                 H / 2, H / 2, ylabel.c_str());
    for (int k = 0; k <= 4; ++k) {
        const double yv = ymin + (ymax - ymin) * k / 4;
        std::fprintf(f,
                     "<text x=\"%d\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"10\" "
                     "text-anchor=\"end\">%.4g</text>\n",
                     ml - 6, py(yv) + 3, yv);
        const double xraw = xmin + (xmax - xmin) * k / 4;
        const double xv = log_x ? std::pow(10.0, xraw) : xraw;
        std::fprintf(f,
                     "<text x=\"%.1f\" y=\"%d\" font-family=\"sans-serif\" font-size=\"10\" "
                     "text-anchor=\"middle\">%.4g</text>\n",
                     ml + (xraw - xmin) / (xmax - xmin) * (W - ml - mr), H - mb + 16, xv);
    }
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        std::fprintf(f, "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\" points=\"",
                     colors[si % 5]);
        for (size_t i = 0; i < s.x.size(); ++i)
            std::fprintf(f, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
        std::fprintf(f, "\"/>\n");
        std::fprintf(f,
                     "<text x=\"%d\" y=\"%zu\" font-family=\"sans-serif\" font-size=\"11\" "
                     "fill=\"%s\">%s</text>\n",
                     W - mr - 150, mt + 16 + 14 * si, colors[si % 5], s.label.c_str());
    }
    std::fprintf(f, "</svg>\n");
    std::fclose(f);
}

Manifest::Manifest(std::string subcommand, uint64_t seed, int threads)
    : subcommand_(std::move(subcommand)), seed_(seed), threads_(threads) {}

void Manifest::add_artifact(const std::string& name) { artifacts_.push_back(name); }

void Manifest::add_note(const std::string& key, const std::string& value) {
    notes_.emplace_back(key, value);
}

void Manifest::set_config(const Config& cfg) { config_echo_ = cfg.materialized(); }

void Manifest::write(const std::string& path, double elapsed_s) const {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::fprintf(f, "# run manifest\n");
    std::fprintf(f, "subcommand = %s\n", subcommand_.c_str());
    std::fprintf(f, "version = maxplus-hjb 0.1.0\n");
#if defined(__GNUC__)
    std::fprintf(f, "compiler = gcc %d.%d\n", __GNUC__, __GNUC_MINOR__);
#else
    std::fprintf(f, "compiler = unknown\n");
#endif
    std::fprintf(f, "seed = %llu\n", static_cast<unsigned long long>(seed_));
    std::fprintf(f, "threads = %d\n", threads_);
    std::fprintf(f, "elapsed_s = %.3f\n", elapsed_s);
    for (const auto& [k, v] : notes_) std::fprintf(f, "%s = %s\n", k.c_str(), v.c_str());
    for (const auto& a : artifacts_) std::fprintf(f, "artifact = %s\n", a.c_str());
    std::fprintf(f, "\n# materialized config\n");
    for (const auto& [sec, kvs] : config_echo_) {
        std::fprintf(f, "[%s]\n", sec.c_str());
        for (const auto& [k, v] : kvs) std::fprintf(f, "%s = %s\n", k.c_str(), v.c_str());
    }
    std::fclose(f);
}

}  // namespace maxplus
