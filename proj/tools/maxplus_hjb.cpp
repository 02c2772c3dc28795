// Command-line front end: subcommand dispatch, config loading, output
// directory and determinism knobs. Exit codes: 0 success, 1 validation,
// 2 solver failure, 3 property failure.
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "maxplus/parallel.hpp"
#include "maxplus/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"max-plus worst-case control toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    uint64_t seed = 0;
    int threads = 0;
    double tol = 0.05;
    app.add_option("--config", config_path, "configuration file (sectioned key = value)");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", seed, "RNG seed")->capture_default_str();
    app.add_option("--threads", threads, "worker threads (0 = auto)");
    app.add_option("--tol", tol, "tolerance for checks")->capture_default_str();

    const char* names[] = {"solve-qvi",    "solve-pde",     "eval-policy",   "maxplus-expect",
                           "risk-limit",   "merton-oracle", "merton-check",  "hinfty-certify",
                           "hinfty-sweep", "property-suite"};
    for (const char* n : names) app.add_subcommand(n)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (threads <= 0) {
        if (const char* env = std::getenv("MAXPLUS_HJB_THREADS"))
            threads = std::atoi(env);
        if (threads <= 0) threads = maxplus::default_threads();
    }

    maxplus::Config cfg;
    if (!config_path.empty()) {
        try {
            cfg = maxplus::Config::parse_file(config_path);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return 1;
        }
    }

    maxplus::RunOptions opts;
    opts.out_dir = out_dir;
    opts.seed = seed;
    opts.threads = threads;
    opts.tol = tol;
    return maxplus::run_subcommand(app.get_subcommands().front()->get_name(), cfg, opts);
}
