// Closed-form investment/consumption benchmark: finite-risk-aversion value
// and controls, their totally-risk-averse limits, the time-ODE identities the
// limit satisfies, the capped-consumption log-wealth problem whose value is
// affine in the log-wealth state (the solver oracle), and payoff analysis for
// time-function consumption policies.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "maxplus/problem.hpp"

namespace maxplus {

struct MertonParams {
    double r = 0.05;         // riskless rate
    double mu = 0.1;         // risky mean return
    double Sigma2 = 0.04;    // risky variance at finite theta
    double sigma_bar2 = 0.04;  // limit variance scale, theta*Sigma2 -> sigma_bar2
    double T = 1.0;
    double theta = 1.0;

    void validate() const;
};

double merton_nu_theta(const MertonParams& mp);
double merton_h_theta(const MertonParams& mp, double t);

struct MertonFiniteValue {
    double psi = 0.0;
    double v_theta = 0.0;
    double h = 0.0;
    double nu = 0.0;
};
// Requires 0 <= t < T and x > 0.
MertonFiniteValue merton_value_finite(const MertonParams& mp, double t, double x);

// (k*, c*) at time s < T; c* diverges as s -> T-.
std::pair<double, double> merton_optimal_controls_finite(const MertonParams& mp, double s);

double merton_nu(const MertonParams& mp);          // limit rate
double merton_B(const MertonParams& mp, double t);  // log[(1 - e^{-nu(T-t)})/nu], t < T
double merton_Bdot(const MertonParams& mp, double t);
double merton_k_star(const MertonParams& mp);
double merton_c_star(const MertonParams& mp, double s);  // e^{-B(s)}

// -log x + B(t); throws at t == T where B = -inf.
double merton_limit_value(const MertonParams& mp, double t, double x);

struct LimitConsistencyReport {
    std::vector<double> thetas;
    std::vector<double> distances;  // |V_theta - V| at the sample point
    bool decreasing = true;
};
// Distances |(1+theta)/theta log h_theta(t) - B(t)| under a volatility
// schedule with theta*Sigma2(theta) -> sigma_bar2.
LimitConsistencyReport merton_limit_consistency(const MertonParams& mp,
                                                const std::vector<double>& thetas,
                                                const std::function<double(double)>& Sigma2_of,
                                                double t, double x);

// residual1 = -log c*(t) - B(t), residual2 = Bdot + c*(t) - nu.
std::pair<double, double> qvi_identity_check(const MertonParams& mp, double t);

struct ModifiedMertonOptions {
    double c_min = 0.05;
    int k_points = 21;
    int c_points = 39;
    bool ito_drift = false;  // subtract sigma_bar2 k^2 / 2 from the log-state drift
    double y_lo = -2.0, y_hi = 2.0;
    double ode_dt_max = 1e-4;  // cap on the backward ODE step
};

struct ModifiedMerton {
    ControlProblem problem;                      // 1D state y = log wealth
    std::function<double(double)> B_tilde;       // capped time part
    std::function<double(double)> c_star;        // min(C, e^{-B_tilde})
    std::function<double(double, double)> oracle;  // (t, y) -> -y + B_tilde(t)
    double C = 1.0;
    double nu = 0.0;
    double k_star = 0.0;
};

// Requires C > nu (the terminal ODE needs the cap above the equilibrium
// consumption rate).
ModifiedMerton modified_merton_problem(const MertonParams& mp, double C,
                                       const ModifiedMertonOptions& opts = {});

struct PolicyComparisonRow {
    std::string label;
    double j_tilde = 0.0;
    double bound = 0.0;   // B(t) for the lower bound; upper bound for c_delta
    bool ok = true;
};

struct PolicyComparisonReport {
    double B_t = 0.0;
    std::vector<PolicyComparisonRow> rows;
    bool all_ok = true;
};

// J~(t, c) = max_s [ integral_t^s (c - nu) - log c(s) ] with k fixed at k*.
// Each supplied policy must satisfy J~ >= B(t) - tol; entries named "c_delta"
// are additionally checked against B(t) + |1 - nu| delta + tol.
PolicyComparisonReport policy_comparison_analysis(
    const MertonParams& mp,
    const std::vector<std::pair<std::string, std::function<double(double)>>>& consumption_policies,
    double t0, double tol = 1e-4, std::pair<bool, double> cdelta_check = {false, 0.0},
    int quad_points = 20000);

double j_tilde(const MertonParams& mp, const std::function<double(double)>& c, double t0,
               int quad_points = 20000);

}  // namespace maxplus
