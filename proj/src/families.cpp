#include "maxplus/families.hpp"

#include <cmath>

namespace maxplus {

ControlProblem make_affine_problem(double fa, double fb, double fc, double sigma, double lx,
                                   double lu, double lc, double lcap, double u_min, double u_max,
                                   int u_points, double x_lo, double x_hi) {
    ControlProblem p;
    p.state_dim = 1;
    p.dist_dim = 1;
    p.name = "affine";
    p.drift = [fa, fb, fc](const Vec& x, const Vec& u) { return Vec{fa * x[0] + fb * u[0] + fc}; };
    p.sigma = [sigma](const Vec&, const Vec&) {
        Mat m(1, 1);
        m(0, 0) = sigma;
        return m;
    };
    p.running_cost = [lx, lu, lc, lcap](const Vec& x, const Vec& u) {
        return std::min(lx * x[0] * x[0] + lu * u[0] * u[0] + lc, lcap);
    };
    p.controls = ControlSet::box({u_min}, {u_max}, {u_points});
    p.domain = Box{{x_lo}, {x_hi}};
    const double xmax = std::max(std::abs(x_lo), std::abs(x_hi));
    const double umax = std::max(std::abs(u_min), std::abs(u_max));
    p.bound_f = std::abs(fa) * xmax + std::abs(fb) * umax + std::abs(fc);
    p.bound_sigma = std::abs(sigma);
    p.lip_l_x = 2.0 * std::abs(lx) * xmax;
    p.v_max = 4.0;
    p.v_step = 0.5;
    return p;
}

ControlProblem canonical_problem() {
    return make_affine_problem(-1.0, 1.0, 0.0, 0.5, 1.0, 0.0, 0.0, 4.0, -1.0, 1.0, 21, -2.0, 2.0);
}

Grid canonical_grid(int x_points, int steps) {
    Grid g;
    g.axes = {Axis{-2.0, 2.0, x_points}};
    g.t0 = 0.0;
    g.T = 1.0;
    g.steps = steps;
    return g;
}

FamilyBundle build_from_config(const Config& cfg) {
    FamilyBundle out;
    const std::string family = cfg.get_string("problem", "family", "affine");

    if (family == "affine") {
        const double fa = cfg.get_double("problem", "fa", -1.0);
        const double fb = cfg.get_double("problem", "fb", 1.0);
        const double fc = cfg.get_double("problem", "fc", 0.0);
        const double sg = cfg.get_double("problem", "sigma", 0.5);
        const double lx = cfg.get_double("problem", "lx", 1.0);
        const double lu = cfg.get_double("problem", "lu", 0.0);
        const double lc = cfg.get_double("problem", "lc", 0.0);
        const double lcap = cfg.get_double("problem", "lcap", 4.0);
        const double u_min = cfg.get_double("problem", "u_min", -1.0);
        const double u_max = cfg.get_double("problem", "u_max", 1.0);
        const int u_points = cfg.get_int("problem", "u_points", 21);
        const double x_lo = cfg.get_double("grid", "x_min", -2.0);
        const double x_hi = cfg.get_double("grid", "x_max", 2.0);
        if (u_points < 1) cfg.add_error("problem.u_points", "control set would be empty");
        if (u_max < u_min) cfg.add_error("problem.u_max", "control box is empty (u_max < u_min)");
        if (!cfg.errors().empty()) return out;
        out.problem =
            make_affine_problem(fa, fb, fc, sg, lx, lu, lc, lcap, u_min, u_max, u_points, x_lo, x_hi);
        out.grid.axes = {Axis{x_lo, x_hi, cfg.get_int("grid", "x_points", 201)}};
    } else if (family == "merton_modified") {
        MertonParams mp;
        mp.mu = cfg.get_double("problem", "mu", 0.1);
        mp.r = cfg.get_double("problem", "r", 0.05);
        mp.sigma_bar2 = cfg.get_double("problem", "sigma_bar2", 0.04);
        mp.T = cfg.get_double("grid", "T", 1.0);
        ModifiedMertonOptions mo;
        mo.c_min = cfg.get_double("problem", "c_min", 0.05);
        mo.k_points = cfg.get_int("problem", "k_points", 21);
        mo.c_points = cfg.get_int("problem", "c_points", 39);
        mo.ito_drift = cfg.get_bool("problem", "ito_drift", false);
        mo.y_lo = cfg.get_double("grid", "x_min", -2.0);
        mo.y_hi = cfg.get_double("grid", "x_max", 2.0);
        const double C = cfg.get_double("problem", "cap", 1.0);
        try {
            out.merton = modified_merton_problem(mp, C, mo);
        } catch (const std::exception& e) {
            cfg.add_error("problem.cap", e.what());
            return out;
        }
        out.problem = out.merton->problem;
        out.grid.axes = {Axis{mo.y_lo, mo.y_hi, cfg.get_int("grid", "x_points", 201)}};
    } else if (family == "hinfty_quadratic") {
        const double c = cfg.get_double("problem", "c", 1.0);
        const double C1 = cfg.get_double("problem", "C1", 1.0);
        const double C2 = cfg.get_double("problem", "C2", 1.0);
        const double a_norm = cfg.get_double("problem", "a_norm", 0.1);
        const double mu = cfg.get_double("problem", "mu", 0.05);
        out.hinfty = quadratic_example_certificate(c, C1, C2, a_norm, mu);
        out.problem = out.hinfty->augmented;
        out.grid.axes = {Axis{cfg.get_double("grid", "x_min", -2.0),
                              cfg.get_double("grid", "x_max", 2.0),
                              cfg.get_int("grid", "x_points", 61)},
                         Axis{cfg.get_double("grid", "x2_min", 0.0),
                              cfg.get_double("grid", "x2_max", 40.0),
                              cfg.get_int("grid", "x2_points", 41)}};
    } else {
        cfg.add_error("problem.family",
                      "unknown family '" + family +
                          "' (expected affine | merton_modified | hinfty_quadratic)");
        return out;
    }

    out.problem.v_max = cfg.get_double("problem", "v_max", out.problem.v_max);
    out.problem.v_step = cfg.get_double("problem", "v_step", out.problem.v_step);
    out.grid.t0 = cfg.get_double("grid", "t0", 0.0);
    out.grid.T = cfg.get_double("grid", "T", 1.0);
    out.grid.steps = cfg.get_int("grid", "steps", 200);
    const std::string bd = cfg.get_string("grid", "boundary", "clamp");
    if (bd == "clamp")
        out.grid.boundary = BoundaryPolicy::clamp;
    else if (bd == "strict")
        out.grid.boundary = BoundaryPolicy::strict;
    else
        cfg.add_error("grid.boundary", "expected clamp | strict");

    try {
        out.grid.validate();
        out.problem.validate();
    } catch (const std::exception& e) {
        cfg.add_error("grid", e.what());
    }
    return out;
}

}  // namespace maxplus
