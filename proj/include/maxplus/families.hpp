// Built-in problem families selectable from configuration: 1D affine drift
// with quadratic clipped cost, the capped-consumption log-wealth benchmark,
// and the stabilized quadratic instance on its augmented state.
#pragma once

#include <optional>

#include "maxplus/config.hpp"
#include "maxplus/grid.hpp"
#include "maxplus/hinfty.hpp"
#include "maxplus/merton.hpp"
#include "maxplus/problem.hpp"

namespace maxplus {

struct FamilyBundle {
    ControlProblem problem;
    Grid grid;
    // populated for family-specific extras
    std::optional<ModifiedMerton> merton;
    std::optional<QuadraticExampleResult> hinfty;
};

// Affine family: f = fa x + fb u + fc, sigma constant, l = min(lx x^2 + lu u^2
// + lc, lcap), U a 1D box.
ControlProblem make_affine_problem(double fa, double fb, double fc, double sigma, double lx,
                                   double lu, double lc, double lcap, double u_min, double u_max,
                                   int u_points, double x_lo, double x_hi);

// The fixed test instance used across the suites: f = u - x, sigma = 0.5,
// l = min(x^2, 4), U = [-1,1] at 21 points, domain [-2,2].
ControlProblem canonical_problem();
Grid canonical_grid(int x_points = 201, int steps = 200);

// Builds problem + grid (+ extras) from a parsed configuration; collects
// field-level errors on the config object.
FamilyBundle build_from_config(const Config& cfg);

}  // namespace maxplus
