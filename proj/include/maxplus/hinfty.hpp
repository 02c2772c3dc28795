// Infinite-horizon machinery: storage-function certificates
// max{ H^{u(y)}(y, grad W), l(y, u(y)) - W(y) } <= 0, the quadratic-storage
// example with its feasibility search over K, augmented-state embedding of
// integral costs, adversarial simulation of the per-path dissipation
// inequality, and the horizon sweep toward the steady-state value.
#pragma once

#include <functional>
#include <optional>
#include <string>

#include "maxplus/solver.hpp"
#include "maxplus/trajectory.hpp"

namespace maxplus {

struct StorageFunction {
    std::function<double(const Vec&)> value;
    // Analytic gradient when available; otherwise the certificate check falls
    // back to centered differences with the given step.
    std::function<Vec(const Vec&)> gradient;
    double fd_step = 1e-6;
};

struct CertificatePoint {
    Vec y;
    double margin_h = 0.0;     // H^{u(y)}(y, grad W)
    double margin_obs = 0.0;   // l(y, u(y)) - W(y)
    double margin = 0.0;       // max of the two
};

struct Certificate {
    std::vector<CertificatePoint> points;
    double max_margin = kMinusInf;
    bool pass = false;
    double tol = 1e-9;
};

Certificate check_dissipation_certificate(const ControlProblem& p, const StorageFunction& w,
                                          const Policy& pol, const std::vector<Vec>& check_grid,
                                          double tol = 1e-9);

// Augments the state with an accumulator x_{n+1}' = l1(x, u) and replaces the
// running cost by mu (x_{n+1} + G(x)). The disturbance channel of the
// accumulator row is zero; its box domain defaults to [0, 40] (callers with
// longer horizons or larger integrands should widen it).
ControlProblem augmented_embedding(const ControlProblem& p,
                                   const std::function<double(const Vec&, const Vec&)>& l1,
                                   const std::function<double(const Vec&)>& G, double mu);

struct QuadraticExampleResult {
    bool feasible = false;
    double K = 0.0;
    std::string violated;  // the inequality blocking the best K when infeasible
    Certificate certificate;
    ControlProblem augmented;   // 2D instance (x, accumulator)
    StorageFunction storage;    // W_hat(x, x2) = mu x2 + K x^2
    Policy policy;              // u = 0
    double mu = 0.0;
};

// Concrete 1D instance f = -c x, |sigma sigma^T| = a_norm, l1 = C1 x^2,
// G = C2 x^2, policy u = 0; searches K over a log grid for
//   K a_norm < c,  mu < 1,  mu C2 < K,  C1 mu + 2 K^2 a_norm^2 - K c <= 0
// and builds the grid certificate for the augmented instance.
QuadraticExampleResult quadratic_example_certificate(double c, double C1, double C2, double a_norm,
                                                     double mu, int k_grid = 60,
                                                     double k_lo = 1e-3, double k_hi = 1e3);

struct DissipationSimRow {
    Vec x0;
    double payoff = 0.0;   // best adversarial max_s l - energy
    double w0 = 0.0;       // W_hat at the initial augmented state
    double margin = 0.0;   // w0 - payoff
};

struct DissipationSimReport {
    std::vector<DissipationSimRow> rows;
    double min_margin = kPlusInf;
    bool all_ok = true;
    std::vector<DissipationSimRow> counterexamples;
};

// For each initial state, the trajectory optimizer searches for a violating
// disturbance; the per-path inequality requires payoff <= W_hat(x0) + tol.
DissipationSimReport simulate_dissipation(const ControlProblem& p_aug, const StorageFunction& w_hat,
                                          const Policy& pol, const std::vector<Vec>& initial_states,
                                          double T, double tol, const ExpectOptions& opts = {});

struct HorizonSweepReport {
    std::vector<double> horizons;
    std::vector<std::vector<double>> value_at_t0;  // per horizon, over the grid
    std::vector<double> steady_residual_sup;       // on the inner half-domain
    bool nondecreasing_ok = false;
    double min_increase = 0.0;  // most negative pointwise increment
    std::optional<double> w_domination_margin;  // min over grid of W - V, when W given
};

// Solves the finite-horizon problem for each T (shared time step), checks the
// t = 0 slice is pointwise nondecreasing in T, reports the steady-state
// residual min_u max{H^u(x, grad V), l - V} of the last field, and optionally
// checks a certified storage function dominates every swept value.
HorizonSweepReport v_infinity_sweep(const ControlProblem& p, const std::vector<Axis>& axes,
                                    const std::vector<double>& horizons, double delta,
                                    const StorageFunction* w = nullptr, int threads = 1);

}  // namespace maxplus
