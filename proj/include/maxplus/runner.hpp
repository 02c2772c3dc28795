// Experiment runner behind the CLI: one entry point per subcommand plus the
// randomized property suite. Exit codes: 0 success, 1 config validation,
// 2 solver failure, 3 property failure.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maxplus/config.hpp"

namespace maxplus {

struct RunOptions {
    std::string out_dir = "out";
    uint64_t seed = 0;
    int threads = 1;
    double tol = 0.05;
};

int run_subcommand(const std::string& name, const Config& cfg, const RunOptions& opts);

struct PropertyResult {
    std::string name;
    bool pass = true;
    double worst = 0.0;       // worst margin observed (sign convention per property)
    std::string detail;       // failing instance serialization when !pass
};

// Randomized value-level Hamiltonian properties: monotonicity in r, admissible
// set inclusion, K <= H, finite-set envelope gap identities, plus the
// documented strict-gap instance. flip_kh inverts the K <= H assertion (fault
// injection hook for negative controls).
std::vector<PropertyResult> hamiltonian_random_properties(uint64_t seed, int instances,
                                                          bool flip_kh = false);

// Every module invariant on randomized/small instances.
std::vector<PropertyResult> run_all_properties(const Config& cfg, uint64_t seed, int threads);

}  // namespace maxplus
