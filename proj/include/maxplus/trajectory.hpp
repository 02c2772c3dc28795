// Trajectory machinery: RK4 integration of the disturbed dynamics under a
// control policy, the sup-over-time running cost, the game payoff
// max_s l - energy(v), and a multi-start disturbance optimizer that reports a
// certified lower bound on the max-plus expectation of a policy.
#pragma once

#include <functional>
#include <optional>
#include <string>

#include "maxplus/grid.hpp"
#include "maxplus/problem.hpp"
#include "maxplus/rng.hpp"

namespace maxplus {

struct Policy {
    enum class Kind { markov, open_loop, constant };
    Kind kind = Kind::constant;
    std::function<Vec(double, const Vec&)> eval;
    std::string label;

    static Policy markov(std::function<Vec(double, const Vec&)> fn, std::string label = "markov");
    static Policy open_loop(std::function<Vec(double)> fn, std::string label = "open_loop");
    static Policy constant(Vec u0, std::string label = "constant");
};

struct DisturbancePath {
    std::vector<double> times;  // m+1 interval endpoints
    std::vector<Vec> values;    // m per-interval constants

    int intervals() const { return static_cast<int>(values.size()); }
    // right-continuous lookup; s past the end returns the last value
    const Vec& at(double s) const;
    double energy() const;  // 1/2 integral |v|^2

    static DisturbancePath zero(double t0, double T, int m, int d);
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> controls;
    std::vector<Vec> disturbances;
};

// RK4 on dx/ds = f(x,u) + sigma(x,u) v(s). Throws "blow-up" if the state
// leaves a 2x expansion of the problem domain.
Trajectory integrate(const ControlProblem& p, const Policy& pol, const DisturbancePath& v,
                     double t0, const Vec& x0, double T, double dt);

// max over sample times of l(x(s), u(s)).
double maxplus_cost(const Trajectory& traj, const ControlProblem& p);

// maxplus_cost - disturbance energy.
double game_payoff(const Trajectory& traj, const DisturbancePath& v, const ControlProblem& p);

struct ExpectOptions {
    double dt = 0.01;
    int coarsen = 5;      // disturbance intervals = integrator steps / coarsen
    int restarts = 3;     // random multi-starts on top of the deterministic seeds
    int max_sweeps = 40;
    uint64_t seed = 0;
    const ValueField* seed_field = nullptr;  // enables the closed-system start
    double init_step = 0.5;
    double min_step = 1e-4;
};

struct StartDiagnostic {
    std::string name;
    double initial_payoff = 0.0;
    double refined_payoff = 0.0;
};

struct ExpectResult {
    double value = 0.0;  // best payoff found: a lower bound on the true sup
    DisturbancePath argmax;
    std::vector<StartDiagnostic> starts;
};

ExpectResult maxplus_expectation_policy(const ControlProblem& p, const Policy& pol, double t0,
                                        const Vec& x0, double T, const ExpectOptions& opts = {});

// Integrates the closed system dx/ds = f + sigma sigma^T grad W under the
// policy and returns the trajectory with v(s) = sigma^T grad W(s, x(s)).
std::pair<Trajectory, DisturbancePath> closed_system_worst_case(const ControlProblem& p,
                                                                const Policy& pol,
                                                                const ValueField& w, double t0,
                                                                const Vec& x0, double dt);

struct LowerBoundRow {
    Vec x0;
    double w_value = 0.0;
    double j_value = 0.0;
    double margin = 0.0;  // j - (w - tol), negative = violation
    bool ok = true;
};

struct LowerBoundReport {
    std::vector<LowerBoundRow> rows;
    bool all_ok = true;
    double min_margin = 0.0;
    std::vector<LowerBoundRow> counterexamples;
};

// Checks J(t0,x; policy) >= W(t0,x) - tol at each sample (J from the
// disturbance optimizer, seeded with the closed-system path). When two_sided
// is set it also requires |J - W| <= two_sided_tol.
LowerBoundReport verify_lower_bound(const ControlProblem& p, const Policy& pol,
                                    const ValueField& w, const std::vector<Vec>& samples,
                                    double tol, const ExpectOptions& opts = {},
                                    std::optional<double> two_sided_tol = std::nullopt);

// Markov policy picking argmin_u max{ W_t + H^u(y, grad W), l(y,u) - W } from
// a solved field (forward difference in t, centered in x). The policy holds
// references to the problem and field; both must outlive it.
Policy make_field_argmin_policy(const ControlProblem& p, const ValueField& w);

// Markov policy picking the control farthest from the argmin policy's choice.
// Same lifetime requirements.
Policy make_farthest_policy(const ControlProblem& p, const ValueField& w);

void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace maxplus
