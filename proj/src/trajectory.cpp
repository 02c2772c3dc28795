#include "maxplus/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "maxplus/algebra.hpp"

namespace maxplus {

Policy Policy::markov(std::function<Vec(double, const Vec&)> fn, std::string label) {
    Policy p;
    p.kind = Kind::markov;
    p.eval = std::move(fn);
    p.label = std::move(label);
    return p;
}

Policy Policy::open_loop(std::function<Vec(double)> fn, std::string label) {
    Policy p;
    p.kind = Kind::open_loop;
    p.eval = [f = std::move(fn)](double s, const Vec&) { return f(s); };
    p.label = std::move(label);
    return p;
}

Policy Policy::constant(Vec u0, std::string label) {
    Policy p;
    p.kind = Kind::constant;
    p.eval = [u = std::move(u0)](double, const Vec&) { return u; };
    p.label = std::move(label);
    return p;
}

const Vec& DisturbancePath::at(double s) const {
    const auto it = std::upper_bound(times.begin(), times.end(), s);
    int j = static_cast<int>(it - times.begin()) - 1;
    j = std::max(0, std::min(j, intervals() - 1));
    return values[j];
}

double DisturbancePath::energy() const {
    double e = 0.0;
    for (int j = 0; j < intervals(); ++j) e += 0.5 * norm2sq(values[j]) * (times[j + 1] - times[j]);
    return e;
}

DisturbancePath DisturbancePath::zero(double t0, double T, int m, int d) {
    DisturbancePath v;
    v.times.resize(m + 1);
    for (int j = 0; j <= m; ++j) v.times[j] = t0 + (T - t0) * j / m;
    v.values.assign(m, Vec(d, 0.0));
    return v;
}

Trajectory integrate(const ControlProblem& p, const Policy& pol, const DisturbancePath& v,
                     double t0, const Vec& x0, double T, double dt) {
    if (!(dt > 0.0) || !(T > t0)) throw std::invalid_argument("bad integration window");
    const int steps = static_cast<int>(std::llround((T - t0) / dt));
    if (steps < 1 || std::abs(t0 + steps * dt - T) > 1e-9 * std::max(1.0, std::abs(T)))
        throw std::invalid_argument("dt must divide the time window");

    // blow-up guard: 2x expansion of the domain box
    Box guard = p.domain;
    for (int a = 0; a < guard.dim(); ++a) {
        const double c = 0.5 * (guard.lo[a] + guard.hi[a]);
        const double r = guard.hi[a] - c;
        guard.lo[a] = c - 2.0 * r;
        guard.hi[a] = c + 2.0 * r;
    }

    auto rhs = [&](double s, const Vec& x, const Vec& u) {
        const Vec f = p.drift(x, u);
        const Vec sv = matvec(p.sigma(x, u), v.at(s));
        Vec dx(f.size());
        for (size_t a = 0; a < f.size(); ++a) dx[a] = f[a] + sv[a];
        return dx;
    };

    Trajectory tr;
    tr.times.reserve(steps + 1);
    tr.states.reserve(steps + 1);
    tr.controls.reserve(steps + 1);
    tr.disturbances.reserve(steps + 1);

    Vec x = x0;
    for (int k = 0; k <= steps; ++k) {
        const double s = t0 + k * dt;
        const Vec u = pol.eval(s, x);
        tr.times.push_back(s);
        tr.states.push_back(x);
        tr.controls.push_back(u);
        tr.disturbances.push_back(v.at(s));
        if (!guard.contains(x))
            throw std::runtime_error("blow-up: trajectory left 2x domain expansion");
        if (k == steps) break;

        const double sm = s + 0.5 * dt;
        const Vec um = pol.eval(sm, x);  // stage controls re-query the policy
        const Vec k1 = rhs(s, x, u);
        const Vec k2 = rhs(sm, axpy(0.5 * dt, k1, x), um);
        const Vec k3 = rhs(sm, axpy(0.5 * dt, k2, x), um);
        const Vec k4 = rhs(s + dt, axpy(dt, k3, x), pol.eval(s + dt, axpy(dt, k3, x)));
        for (size_t a = 0; a < x.size(); ++a)
            x[a] += dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    }
    return tr;
}

double maxplus_cost(const Trajectory& traj, const ControlProblem& p) {
    if (traj.times.empty()) throw std::invalid_argument("empty trajectory");
    double m = kMinusInf;
    for (size_t k = 0; k < traj.times.size(); ++k)
        m = std::max(m, p.running_cost(traj.states[k], traj.controls[k]));
    return m;
}

double game_payoff(const Trajectory& traj, const DisturbancePath& v, const ControlProblem& p) {
    return maxplus_cost(traj, p) - v.energy();
}

namespace {

double payoff_of(const ControlProblem& p, const Policy& pol, double t0, const Vec& x0, double T,
                 double dt, const DisturbancePath& v) {
    const Trajectory tr = integrate(p, pol, v, t0, x0, T, dt);
    return game_payoff(tr, v, p);
}

// Pattern-search coordinate ascent over the per-interval values.
double refine(const ControlProblem& p, const Policy& pol, double t0, const Vec& x0, double T,
              double dt, DisturbancePath& v, const ExpectOptions& opts) {
    double best = payoff_of(p, pol, t0, x0, T, dt, v);
    double step = opts.init_step;
    const int d = p.dist_dim;
    for (int sweep = 0; sweep < opts.max_sweeps && step >= opts.min_step; ++sweep) {
        bool improved = false;
        for (int j = 0; j < v.intervals(); ++j) {
            for (int a = 0; a < d; ++a) {
                for (double sgn : {1.0, -1.0}) {
                    const double saved = v.values[j][a];
                    v.values[j][a] = saved + sgn * step;
                    const double trial = payoff_of(p, pol, t0, x0, T, dt, v);
                    if (trial > best + 1e-13) {
                        best = trial;
                        improved = true;
                        break;  // keep the move, try the other coordinate
                    }
                    v.values[j][a] = saved;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

}  // namespace

ExpectResult maxplus_expectation_policy(const ControlProblem& p, const Policy& pol, double t0,
                                        const Vec& x0, double T, const ExpectOptions& opts) {
    const int steps = static_cast<int>(std::llround((T - t0) / opts.dt));
    const int m = std::max(1, steps / std::max(1, opts.coarsen));
    const int d = p.dist_dim;

    std::vector<std::pair<std::string, DisturbancePath>> starts;
    starts.emplace_back("zero", DisturbancePath::zero(t0, T, m, d));

    if (opts.seed_field) {
        auto [traj, vhat] = closed_system_worst_case(p, pol, *opts.seed_field, t0, x0, opts.dt);
        // average the closed-system disturbance over each coarse interval
        DisturbancePath v = DisturbancePath::zero(t0, T, m, d);
        std::vector<int> counts(m, 0);
        for (size_t k = 0; k < vhat.values.size(); ++k) {
            const double s = 0.5 * (vhat.times[k] + vhat.times[k + 1]);
            int j = static_cast<int>((s - t0) / (T - t0) * m);
            j = std::max(0, std::min(j, m - 1));
            for (int a = 0; a < d; ++a) v.values[j][a] += vhat.values[k][a];
            counts[j]++;
        }
        for (int j = 0; j < m; ++j)
            if (counts[j] > 0)
                for (int a = 0; a < d; ++a) v.values[j][a] /= counts[j];
        starts.emplace_back("closed_system", std::move(v));
    }

    for (int rsi = 0; rsi < opts.restarts; ++rsi) {
        Rng rng(opts.seed, 1000 + static_cast<uint64_t>(rsi));
        DisturbancePath v = DisturbancePath::zero(t0, T, m, d);
        const double scale = 0.5 + rsi * 0.5;
        for (int j = 0; j < m; ++j)
            for (int a = 0; a < d; ++a) v.values[j][a] = rng.uniform(-scale, scale);
        starts.emplace_back("random" + std::to_string(rsi), std::move(v));
    }

    ExpectResult out;
    out.value = kMinusInf;
    for (auto& [name, v] : starts) {
        StartDiagnostic diag;
        diag.name = name;
        diag.initial_payoff = payoff_of(p, pol, t0, x0, T, opts.dt, v);
        diag.refined_payoff = refine(p, pol, t0, x0, T, opts.dt, v, opts);
        out.starts.push_back(diag);
        if (diag.refined_payoff > out.value) {
            out.value = diag.refined_payoff;
            out.argmax = v;
        }
    }
    return out;
}

std::pair<Trajectory, DisturbancePath> closed_system_worst_case(const ControlProblem& p,
                                                                const Policy& pol,
                                                                const ValueField& w, double t0,
                                                                const Vec& x0, double dt) {
    const double T = w.grid.T;
    const int steps = static_cast<int>(std::llround((T - t0) / dt));
    if (steps < 1) throw std::invalid_argument("empty closed-system window");

    DisturbancePath v;
    v.times.resize(steps + 1);
    for (int k = 0; k <= steps; ++k) v.times[k] = t0 + (T - t0) * k / steps;
    v.values.assign(steps, Vec(p.dist_dim, 0.0));

    Box guard = p.domain;
    for (int a = 0; a < guard.dim(); ++a) {
        const double c = 0.5 * (guard.lo[a] + guard.hi[a]);
        const double r = guard.hi[a] - c;
        guard.lo[a] = c - 2.0 * r;
        guard.hi[a] = c + 2.0 * r;
    }

    Trajectory tr;
    Vec x = x0;
    for (int k = 0; k <= steps; ++k) {
        const double s = v.times[k];
        const Vec u = pol.eval(s, x);
        tr.times.push_back(s);
        tr.states.push_back(x);
        tr.controls.push_back(u);
        const Vec grad = w.gradient(s, x);
        const Vec vh = worst_disturbance(p, x, u, grad);
        tr.disturbances.push_back(vh);
        if (k < steps) v.values[k] = vh;
        if (!guard.contains(x))
            throw std::runtime_error("blow-up: closed system left 2x domain expansion");
        if (k == steps) break;

        // RK4 with the feedback disturbance sigma^T grad W evaluated per stage
        auto rhs = [&](double ss, const Vec& y) {
            const Vec uu = pol.eval(ss, y);
            const Vec g = w.gradient(ss, y);
            const Vec vv = worst_disturbance(p, y, uu, g);
            const Vec f = p.drift(y, uu);
            const Vec sv = matvec(p.sigma(y, uu), vv);
            Vec dx(f.size());
            for (size_t a = 0; a < f.size(); ++a) dx[a] = f[a] + sv[a];
            return dx;
        };
        const double h = v.times[k + 1] - s;
        const Vec k1 = rhs(s, x);
        const Vec k2 = rhs(s + 0.5 * h, axpy(0.5 * h, k1, x));
        const Vec k3 = rhs(s + 0.5 * h, axpy(0.5 * h, k2, x));
        const Vec k4 = rhs(s + h, axpy(h, k3, x));
        for (size_t a = 0; a < x.size(); ++a)
            x[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    }
    return {tr, v};
}

LowerBoundReport verify_lower_bound(const ControlProblem& p, const Policy& pol,
                                    const ValueField& w, const std::vector<Vec>& samples,
                                    double tol, const ExpectOptions& opts,
                                    std::optional<double> two_sided_tol) {
    LowerBoundReport rep;
    rep.min_margin = kPlusInf;
    ExpectOptions eo = opts;
    eo.seed_field = &w;
    for (const Vec& x0 : samples) {
        LowerBoundRow row;
        row.x0 = x0;
        row.w_value = w.value(w.grid.t0, x0);
        row.j_value = maxplus_expectation_policy(p, pol, w.grid.t0, x0, w.grid.T, eo).value;
        row.margin = row.j_value - (row.w_value - tol);
        row.ok = row.margin >= 0.0;
        if (two_sided_tol) row.ok = row.ok && std::abs(row.j_value - row.w_value) <= *two_sided_tol;
        rep.min_margin = std::min(rep.min_margin, row.margin);
        if (!row.ok) {
            rep.all_ok = false;
            rep.counterexamples.push_back(row);
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

namespace {

size_t argmin_control_at(const ControlProblem& p, const ValueField& w, double s, const Vec& y) {
    const Grid& g = w.grid;
    const double delta = g.delta();
    const double s0 = std::min(std::max(s, g.t0), g.T - delta);
    const double wt = (w.value(s0 + delta, y) - w.value(s0, y)) / delta;
    const Vec grad = w.gradient(s0, y);
    const double wval = w.value(s0, y);
    size_t best = 0;
    double bestv = kPlusInf;
    for (size_t c = 0; c < p.controls.size(); ++c) {
        const Vec& u = p.controls[c];
        const double h = hamiltonian_u(p, y, u, grad);
        const double val = std::max(wt + h, p.running_cost(y, u) - wval);
        if (val < bestv) {
            bestv = val;
            best = c;
        }
    }
    return best;
}

}  // namespace

Policy make_field_argmin_policy(const ControlProblem& p, const ValueField& w) {
    return Policy::markov(
        [&p, &w](double s, const Vec& y) { return p.controls[argmin_control_at(p, w, s, y)]; },
        "argmin");
}

Policy make_farthest_policy(const ControlProblem& p, const ValueField& w) {
    return Policy::markov(
        [&p, &w](double s, const Vec& y) {
            const Vec& ustar = p.controls[argmin_control_at(p, w, s, y)];
            size_t far = 0;
            double fard = -1.0;
            for (size_t c = 0; c < p.controls.size(); ++c) {
                Vec diff = p.controls[c];
                for (size_t a = 0; a < diff.size(); ++a) diff[a] -= ustar[a];
                const double dist = norm2(diff);
                if (dist > fard) {
                    fard = dist;
                    far = c;
                }
            }
            return p.controls[far];
        },
        "farthest_from_argmin");
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
    const int m = traj.controls.empty() ? 0 : static_cast<int>(traj.controls.front().size());
    const int d = traj.disturbances.empty() ? 0 : static_cast<int>(traj.disturbances.front().size());
    std::fprintf(f, "s");
    for (int a = 0; a < n; ++a) std::fprintf(f, ",x%d", a);
    for (int a = 0; a < m; ++a) std::fprintf(f, ",u%d", a);
    for (int a = 0; a < d; ++a) std::fprintf(f, ",v%d", a);
    std::fprintf(f, "\n");
    for (size_t k = 0; k < traj.times.size(); ++k) {
        std::fprintf(f, "%.17g", traj.times[k]);
        for (int a = 0; a < n; ++a) std::fprintf(f, ",%.17g", traj.states[k][a]);
        for (int a = 0; a < m; ++a) std::fprintf(f, ",%.17g", traj.controls[k][a]);
        for (int a = 0; a < d; ++a) std::fprintf(f, ",%.17g", traj.disturbances[k][a]);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

}  // namespace maxplus
