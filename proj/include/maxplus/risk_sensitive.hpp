// Risk-sensitive small-noise side: explicit finite-difference solves of the
// log-transformed value V_theta (never materializing the exponential-scale
// Psi_theta in the production path), a direct Psi-space solve used to validate
// the transform, a Monte Carlo evaluator for constant controls, and the
// theta-sweep convergence study against the worst-case value field.
#pragma once

#include <optional>

#include "maxplus/grid.hpp"
#include "maxplus/problem.hpp"

namespace maxplus {

struct RiskSolveOptions {
    // When set, replaces the anchored terminal slice (log(delta)/theta + min_u l)
    // with the given slice placed at t = T.
    std::optional<std::vector<double>> terminal_override;
    int threads = 1;
    double clamp_lo = -700.0;
    double clamp_hi = 50.0;
};

struct RiskSolveResult {
    ValueField field;
    uint64_t clamp_events = 0;
    uint64_t updates = 0;
    bool clamp_warning = false;  // clamped on > 1% of updates
    double clamp_rate() const { return updates ? static_cast<double>(clamp_events) / updates : 0.0; }
};

// Backward explicit solve of
//   V_t + min_u { tr(a D2 V)/(2 theta) + H^u(x, grad V) + exp(theta(l - V))/theta } = 0
// in log space. Unless overridden, the slice at T - delta is initialized to
// log(delta)/theta + min_u l and the slice stored at T holds min_u l (the
// anchored limit value).
RiskSolveResult solve_v_theta(const ControlProblem& p, const Grid& g, double theta,
                              const RiskSolveOptions& opts = {});

// Direct Psi-space solve of
//   Psi_t + min_u { tr(a D2 Psi)/(2 theta) + f.grad Psi + exp(theta l) } = 0
// from the given terminal slice. Used to validate the log transform.
ValueField solve_psi_theta(const ControlProblem& p, const Grid& g, double theta,
                           const std::vector<double>& terminal);

// Stability bound for the combined first/second order explicit step.
double risk_cfl_delta(const ControlProblem& p, const Grid& g, double theta);

struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Monte Carlo estimate of E[ integral_t^T exp(theta l(X(s), u0)) ds ] under
// dX = f dt + theta^{-1/2} sigma dW (Euler-Maruyama, per-sample RNG streams).
McResult psi_theta_constant_control_mc(const ControlProblem& p, const Vec& u0, double theta,
                                       double t0, const Vec& x0, double T, int n_samples,
                                       double dt, uint64_t seed = 0);

struct ThetaSweepReport {
    std::vector<double> thetas;
    std::vector<double> distances;     // sup distance to reference on the inner window
    std::vector<double> clamp_rates;
    std::vector<double> runtimes_s;
    bool nonincreasing_ok = false;     // up to 10% slack
    bool final_ok = false;
    double final_distance = 0.0;
};

// Per-theta solve and sup-distance to the reference on the inner half of the
// domain and the inner time window [t0 + 0.1 dT, T - 0.1 dT].
ThetaSweepReport convergence_study(const ControlProblem& p, const Grid& g,
                                   const std::vector<double>& thetas, const ValueField& reference,
                                   double final_target, double slack = 0.10);

}  // namespace maxplus
