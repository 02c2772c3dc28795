#include "maxplus/hinfty.hpp"

#include <cmath>
#include <stdexcept>

namespace maxplus {

Certificate check_dissipation_certificate(const ControlProblem& p, const StorageFunction& w,
                                          const Policy& pol, const std::vector<Vec>& check_grid,
                                          double tol) {
    Certificate cert;
    cert.tol = tol;
    for (const Vec& y : check_grid) {
        const Vec u = pol.eval(0.0, y);
        Vec grad;
        if (w.gradient) {
            grad = w.gradient(y);
        } else {
            grad.resize(y.size());
            for (size_t a = 0; a < y.size(); ++a) {
                Vec yp = y, ym = y;
                yp[a] += w.fd_step;
                ym[a] -= w.fd_step;
                grad[a] = (w.value(yp) - w.value(ym)) / (2.0 * w.fd_step);
            }
        }
        CertificatePoint pt;
        pt.y = y;
        pt.margin_h = hamiltonian_u(p, y, u, grad);
        pt.margin_obs = p.running_cost(y, u) - w.value(y);
        pt.margin = std::max(pt.margin_h, pt.margin_obs);
        cert.max_margin = std::max(cert.max_margin, pt.margin);
        cert.points.push_back(std::move(pt));
    }
    cert.pass = cert.max_margin <= tol;
    return cert;
}

ControlProblem augmented_embedding(const ControlProblem& p,
                                   const std::function<double(const Vec&, const Vec&)>& l1,
                                   const std::function<double(const Vec&)>& G, double mu) {
    ControlProblem q;
    q.state_dim = p.state_dim + 1;
    q.dist_dim = p.dist_dim;
    q.name = p.name + "_augmented";
    const int n = p.state_dim;
    q.drift = [n, l1, f = p.drift](const Vec& xh, const Vec& u) {
        const Vec x(xh.begin(), xh.begin() + n);
        Vec out = f(x, u);
        out.push_back(l1(x, u));
        return out;
    };
    q.sigma = [n, s = p.sigma, d = p.dist_dim](const Vec& xh, const Vec& u) {
        const Vec x(xh.begin(), xh.begin() + n);
        const Mat sm = s(x, u);
        Mat out(n + 1, d);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < d; ++b) out(a, b) = sm(a, b);
        return out;  // accumulator row stays zero
    };
    q.running_cost = [n, G, mu](const Vec& xh, const Vec& u) {
        (void)u;
        const Vec x(xh.begin(), xh.begin() + n);
        return mu * (xh[n] + G(x));
    };
    q.controls = p.controls;
    q.domain = p.domain;
    q.domain.lo.push_back(0.0);
    q.domain.hi.push_back(40.0);
    q.lip_l_x = std::max(p.lip_l_x, mu);
    q.bound_f = p.bound_f;  // callers should extend for large l1 if needed
    q.bound_sigma = p.bound_sigma;
    q.v_max = p.v_max;
    q.v_step = p.v_step;
    return q;
}

QuadraticExampleResult quadratic_example_certificate(double c, double C1, double C2, double a_norm,
                                                     double mu, int k_grid, double k_lo,
                                                     double k_hi) {
    if (!(c > 0.0) || !(a_norm > 0.0)) throw std::invalid_argument("need c > 0 and a_norm > 0");
    QuadraticExampleResult out;
    out.mu = mu;

    // base 1D instance
    ControlProblem base;
    base.state_dim = 1;
    base.dist_dim = 1;
    base.name = "hinfty_quadratic";
    base.drift = [c](const Vec& x, const Vec&) { return Vec{-c * x[0]}; };
    base.sigma = [a_norm](const Vec&, const Vec&) {
        Mat m(1, 1);
        m(0, 0) = std::sqrt(a_norm);
        return m;
    };
    base.running_cost = [](const Vec&, const Vec&) { return 0.0; };  // replaced by embedding
    base.controls = ControlSet({Vec{0.0}});
    base.domain = Box{{-2.0}, {2.0}};
    base.lip_l_x = 1.0;
    base.bound_f = 2.0 * c;
    base.bound_sigma = std::sqrt(a_norm);
    base.v_max = 3.0;
    base.v_step = 0.5;

    auto l1 = [C1](const Vec& x, const Vec&) { return C1 * x[0] * x[0]; };
    auto G = [C2](const Vec& x) { return C2 * x[0] * x[0]; };
    out.augmented = augmented_embedding(base, l1, G, mu);
    out.augmented.lip_l_x = std::max(mu, mu * C2 * 4.0);
    out.augmented.bound_f = 2.0 * c + 4.0 * C1;
    out.policy = Policy::constant(Vec{0.0}, "stabilizing");

    // feasibility search over K (log grid, first hit wins)
    std::string best_violation = "mu < 1";
    bool feasible = false;
    double K = 0.0;
    if (mu < 1.0) {
        for (int i = 0; i < k_grid && !feasible; ++i) {
            const double k = k_lo * std::pow(k_hi / k_lo, k_grid == 1 ? 0.0
                                                                      : static_cast<double>(i) /
                                                                            (k_grid - 1));
            if (!(k * a_norm < c)) {
                best_violation = "K a_norm < c";
                continue;
            }
            if (!(mu * C2 < k)) {
                best_violation = "mu C2 < K";
                continue;
            }
            if (!(C1 * mu + 2.0 * k * k * a_norm * a_norm - k * c <= 0.0)) {
                best_violation = "C1 mu + 2 K^2 a_norm^2 - K c <= 0";
                continue;
            }
            feasible = true;
            K = k;
        }
    }
    out.feasible = feasible;
    out.K = K;
    if (!feasible) {
        out.violated = best_violation;
        return out;
    }

    // storage on the augmented state: the accumulator enters with weight mu so
    // the margin at the accumulator row matches the running cost exactly.
    const double Kv = K;
    out.storage.value = [Kv, mu](const Vec& xh) { return mu * xh[1] + Kv * xh[0] * xh[0]; };
    out.storage.gradient = [Kv, mu](const Vec& xh) { return Vec{2.0 * Kv * xh[0], mu}; };

    std::vector<Vec> grid;
    for (int i = 0; i <= 40; ++i)
        for (int j = 0; j <= 20; ++j)
            grid.push_back(Vec{-2.0 + 4.0 * i / 40.0, 40.0 * j / 20.0});
    out.certificate =
        check_dissipation_certificate(out.augmented, out.storage, out.policy, grid, 1e-9);
    return out;
}

DissipationSimReport simulate_dissipation(const ControlProblem& p_aug, const StorageFunction& w_hat,
                                          const Policy& pol, const std::vector<Vec>& initial_states,
                                          double T, double tol, const ExpectOptions& opts) {
    DissipationSimReport rep;
    for (const Vec& x0 : initial_states) {
        const ExpectResult er = maxplus_expectation_policy(p_aug, pol, 0.0, x0, T, opts);
        DissipationSimRow row;
        row.x0 = x0;
        row.payoff = er.value;
        row.w0 = w_hat.value(x0);
        row.margin = row.w0 + tol - row.payoff;
        rep.min_margin = std::min(rep.min_margin, row.margin);
        if (row.margin < 0.0) {
            rep.all_ok = false;
            rep.counterexamples.push_back(row);
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

HorizonSweepReport v_infinity_sweep(const ControlProblem& p, const std::vector<Axis>& axes,
                                    const std::vector<double>& horizons, double delta,
                                    const StorageFunction* w, int threads) {
    HorizonSweepReport rep;
    rep.horizons = horizons;
    rep.nondecreasing_ok = true;
    rep.min_increase = kPlusInf;
    if (w) rep.w_domination_margin = kPlusInf;

    for (size_t hi = 0; hi < horizons.size(); ++hi) {
        Grid g;
        g.axes = axes;
        g.t0 = 0.0;
        g.T = horizons[hi];
        g.steps = std::max(1, static_cast<int>(std::llround(horizons[hi] / delta)));
        SolveOptions so;
        so.threads = threads;
        const ValueField f = solve_qvi_semilagrangian(p, g, so);
        std::vector<double> v0(f.slice(0).begin(), f.slice(0).end());

        if (!rep.value_at_t0.empty()) {
            const auto& prev = rep.value_at_t0.back();
            for (size_t i = 0; i < v0.size(); ++i) {
                const double inc = v0[i] - prev[i];
                rep.min_increase = std::min(rep.min_increase, inc);
                if (inc < -1e-12) rep.nondecreasing_ok = false;
            }
        }
        if (w) {
            for (size_t i = 0; i < v0.size(); ++i) {
                const double margin = w->value(g.point(i)) - v0[i];
                rep.w_domination_margin = std::min(*rep.w_domination_margin, margin);
            }
        }

        // steady residual of the t = 0 slice on the inner half-domain
        double sup = 0.0;
        for (size_t i = 0; i < f.npts(); ++i) {
            const Vec x = g.point(i);
            bool in = true;
            for (int a = 0; a < g.dim(); ++a) {
                const double len = g.axes[a].hi - g.axes[a].lo;
                if (x[a] < g.axes[a].lo + 0.25 * len - 1e-12 ||
                    x[a] > g.axes[a].hi - 0.25 * len + 1e-12)
                    in = false;
            }
            if (!in) continue;
            // steady form: no time derivative; recompute min_u max{H^u, l - V}
            const Vec grad = f.gradient(0.0, x);
            double best = kPlusInf;
            for (size_t cidx = 0; cidx < p.controls.size(); ++cidx) {
                const Vec& u = p.controls[cidx];
                best = std::min(best, std::max(hamiltonian_u(p, x, u, grad),
                                               p.running_cost(x, u) - v0[i]));
            }
            sup = std::max(sup, std::abs(best));
        }
        rep.steady_residual_sup.push_back(sup);
        rep.value_at_t0.push_back(std::move(v0));
    }
    return rep;
}

}  // namespace maxplus
