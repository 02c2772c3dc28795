#include "maxplus/merton.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace maxplus {

void MertonParams::validate() const {
    if (!(Sigma2 > 0.0) || !(sigma_bar2 > 0.0) || !(T > 0.0) || !(theta > 0.0))
        throw std::invalid_argument("merton params must be positive");
}

double merton_nu_theta(const MertonParams& mp) {
    const double ex = mp.mu - mp.r;
    return ex * ex / (2.0 * mp.Sigma2 * (1.0 + mp.theta)) + mp.r;
}

double merton_h_theta(const MertonParams& mp, double t) {
    const double nu = merton_nu_theta(mp);
    const double a = nu * mp.theta / (1.0 + mp.theta);
    return (1.0 + mp.theta) / (nu * mp.theta) * (-std::expm1(-a * (mp.T - t)));
}

MertonFiniteValue merton_value_finite(const MertonParams& mp, double t, double x) {
    mp.validate();
    if (!(x > 0.0) || t < 0.0 || t >= mp.T)
        throw std::invalid_argument("need x > 0 and 0 <= t < T");
    MertonFiniteValue out;
    out.nu = merton_nu_theta(mp);
    out.h = merton_h_theta(mp, t);
    out.psi = std::pow(out.h, 1.0 + mp.theta) * std::pow(x, -mp.theta);
    out.v_theta = (1.0 + mp.theta) / mp.theta * std::log(out.h) - std::log(x);
    return out;
}

std::pair<double, double> merton_optimal_controls_finite(const MertonParams& mp, double s) {
    mp.validate();
    if (s >= mp.T) throw std::invalid_argument("controls defined for s < T");
    const double k = (mp.mu - mp.r) / (mp.Sigma2 * (1.0 + mp.theta));
    const double c = 1.0 / merton_h_theta(mp, s);
    return {k, c};
}

double merton_nu(const MertonParams& mp) {
    const double ex = mp.mu - mp.r;
    return ex * ex / (2.0 * mp.sigma_bar2) + mp.r;
}

double merton_B(const MertonParams& mp, double t) {
    if (t >= mp.T) throw std::invalid_argument("B(T) = -inf");
    const double nu = merton_nu(mp);
    return std::log(-std::expm1(-nu * (mp.T - t)) / nu);
}

double merton_Bdot(const MertonParams& mp, double t) {
    const double nu = merton_nu(mp);
    const double e = std::exp(-nu * (mp.T - t));
    return -nu * e / (1.0 - e);
}

double merton_k_star(const MertonParams& mp) { return (mp.mu - mp.r) / mp.sigma_bar2; }

double merton_c_star(const MertonParams& mp, double s) { return std::exp(-merton_B(mp, s)); }

double merton_limit_value(const MertonParams& mp, double t, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("need x > 0");
    return -std::log(x) + merton_B(mp, t);
}

LimitConsistencyReport merton_limit_consistency(const MertonParams& mp,
                                                const std::vector<double>& thetas,
                                                const std::function<double(double)>& Sigma2_of,
                                                double t, double x) {
    LimitConsistencyReport rep;
    const double v_lim = merton_limit_value(mp, t, x);
    for (double th : thetas) {
        MertonParams q = mp;
        q.theta = th;
        q.Sigma2 = Sigma2_of(th);
        const double v_th = merton_value_finite(q, t, x).v_theta;
        rep.thetas.push_back(th);
        rep.distances.push_back(std::abs(v_th - v_lim));
    }
    for (size_t i = 1; i < rep.distances.size(); ++i)
        if (!(rep.distances[i] < rep.distances[i - 1])) rep.decreasing = false;
    return rep;
}

std::pair<double, double> qvi_identity_check(const MertonParams& mp, double t) {
    if (t >= mp.T) throw std::invalid_argument("need t < T");
    const double B = merton_B(mp, t);
    const double c = std::exp(-B);
    const double r1 = -std::log(c) - B;
    const double r2 = merton_Bdot(mp, t) + c - merton_nu(mp);
    return {r1, r2};
}

ModifiedMerton modified_merton_problem(const MertonParams& mp, double C,
                                       const ModifiedMertonOptions& opts) {
    mp.validate();
    const double nu = merton_nu(mp);
    if (!(C > nu))
        throw std::invalid_argument("consumption cap must exceed the equilibrium rate nu");

    ModifiedMerton out;
    out.C = C;
    out.nu = nu;
    out.k_star = merton_k_star(mp);

    // Backward integration of dB/dt = nu - min(C, exp(-B)), B(T) = -log C.
    // RK4 with steps small enough for the stiff phase right below T.
    const double dt = std::min(opts.ode_dt_max, 0.05 / (C + 1.0));
    const int steps = static_cast<int>(std::ceil(mp.T / dt));
    auto btable = std::make_shared<std::vector<double>>(steps + 1);
    auto rhs = [nu, C](double b) { return nu - std::min(C, std::exp(-b)); };
    (*btable)[steps] = -std::log(C);
    for (int k = steps; k > 0; --k) {
        const double h = mp.T / steps;
        const double b = (*btable)[k];
        const double k1 = rhs(b);
        const double k2 = rhs(b - 0.5 * h * k1);
        const double k3 = rhs(b - 0.5 * h * k2);
        const double k4 = rhs(b - h * k3);
        (*btable)[k - 1] = b - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const double Ttot = mp.T;
    auto B_tilde = [btable, steps, Ttot](double t) {
        double u = t / Ttot * steps;
        u = std::min(static_cast<double>(steps), std::max(0.0, u));
        int k = static_cast<int>(u);
        if (k > steps - 1) k = steps - 1;
        const double w = u - k;
        return (1.0 - w) * (*btable)[k] + w * (*btable)[k + 1];
    };
    out.B_tilde = B_tilde;
    out.c_star = [B_tilde, C](double t) { return std::min(C, std::exp(-B_tilde(t))); };
    out.oracle = [B_tilde](double t, double y) { return -y + B_tilde(t); };

    // 1D problem in the log-wealth state.
    const double sbar = std::sqrt(mp.sigma_bar2);
    const double r = mp.r, muex = mp.mu - mp.r, sb2 = mp.sigma_bar2;
    const bool ito = opts.ito_drift;
    ControlProblem& p = out.problem;
    p.state_dim = 1;
    p.dist_dim = 1;
    p.name = "merton_modified";
    p.drift = [r, muex, sb2, ito](const Vec& /*y*/, const Vec& u) {
        const double k = u[0], c = u[1];
        double f = r + muex * k - c;
        if (ito) f -= 0.5 * sb2 * k * k;
        return Vec{f};
    };
    p.sigma = [sbar](const Vec& /*y*/, const Vec& u) {
        Mat m(1, 1);
        m(0, 0) = sbar * u[0];
        return m;
    };
    p.running_cost = [](const Vec& y, const Vec& u) { return -y[0] - std::log(u[1]); };
    p.controls = ControlSet::box({0.0, opts.c_min}, {2.0 * out.k_star, C},
                                 {opts.k_points, opts.c_points});
    p.domain = Box{{opts.y_lo}, {opts.y_hi}};
    p.lip_l_x = 1.0;
    p.bound_f = std::abs(r) + muex * 2.0 * out.k_star + C + (ito ? 2.0 * sb2 * out.k_star * out.k_star : 0.0);
    p.bound_sigma = sbar * 2.0 * out.k_star;
    p.v_max = 2.0;   // worst-case sigma^T V_y with V_y ~ -1 is sbar*k <= 0.5
    p.v_step = 0.25;
    return out;
}

double j_tilde(const MertonParams& mp, const std::function<double(double)>& c, double t0,
               int quad_points) {
    const double nu = merton_nu(mp);
    const double dt = (mp.T - t0) / quad_points;
    double integral = 0.0;  // cumulative integral of c - nu, left rectangles
    double best = -std::log(c(t0));
    for (int j = 1; j <= quad_points; ++j) {
        const double s_prev = t0 + (j - 1) * dt;
        const double s = t0 + j * dt;
        integral += (c(s_prev) - nu) * dt;
        if (s < mp.T) best = std::max(best, integral - std::log(c(s)));
    }
    return best;
}

PolicyComparisonReport policy_comparison_analysis(
    const MertonParams& mp,
    const std::vector<std::pair<std::string, std::function<double(double)>>>& consumption_policies,
    double t0, double tol, std::pair<bool, double> cdelta_check, int quad_points) {
    PolicyComparisonReport rep;
    rep.B_t = merton_B(mp, t0);
    const double nu = merton_nu(mp);
    for (const auto& [label, c] : consumption_policies) {
        PolicyComparisonRow row;
        row.label = label;
        row.j_tilde = j_tilde(mp, c, t0, quad_points);
        row.bound = rep.B_t - tol;
        row.ok = row.j_tilde >= row.bound;
        if (cdelta_check.first && label == "c_delta") {
            const double upper = rep.B_t + std::abs(1.0 - nu) * cdelta_check.second + tol;
            row.ok = row.ok && row.j_tilde <= upper;
            row.bound = upper;
        }
        if (!row.ok) rep.all_ok = false;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace maxplus
