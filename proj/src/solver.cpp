#include "maxplus/solver.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "maxplus/parallel.hpp"

namespace maxplus {

namespace {

// Dynamics/cost evaluated once per (control, grid point); the time loops then
// touch flat arrays only.
struct Tables {
    int n = 0, d = 0;
    size_t npts = 0, nu = 0;
    std::vector<double> f;        // [(c*npts+i)*n + a]
    std::vector<double> sig;      // [(c*npts+i)*n*d + a*d + b]
    std::vector<double> l;        // [c*npts + i]
    std::vector<double> sig_fro2; // [c*npts + i]
    std::vector<Vec> points;
    std::vector<double> flat_points;  // [i*n + a]

    Tables(const ControlProblem& p, const Grid& g) {
        n = p.state_dim;
        d = p.dist_dim;
        if (n > 4 || d > 4) throw std::invalid_argument("solver supports state/disturbance dim <= 4");
        if (g.dim() != n) throw std::invalid_argument("grid dimension != state dimension");
        npts = g.num_points();
        nu = p.controls.size();
        f.resize(nu * npts * n);
        sig.resize(nu * npts * n * d);
        l.resize(nu * npts);
        sig_fro2.resize(nu * npts);
        points.resize(npts);
        flat_points.resize(npts * n);
        for (size_t i = 0; i < npts; ++i) {
            points[i] = g.point(i);
            for (int a = 0; a < n; ++a) flat_points[i * n + a] = points[i][a];
        }
        for (size_t c = 0; c < nu; ++c) {
            const Vec& u = p.controls[c];
            for (size_t i = 0; i < npts; ++i) {
                const Vec fv = p.drift(points[i], u);
                const Mat sv = p.sigma(points[i], u);
                const size_t base = c * npts + i;
                for (int a = 0; a < n; ++a) f[base * n + a] = fv[a];
                double fro2 = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < d; ++b) {
                        sig[base * n * d + a * d + b] = sv(a, b);
                        fro2 += sv(a, b) * sv(a, b);
                    }
                sig_fro2[base] = fro2;
                l[base] = p.running_cost(points[i], u);
            }
        }
    }
};

// Per-axis centered differences of a slice (clamped one-sided at edges).
void slice_gradient(const Grid& g, std::span<const double> v, std::vector<double>& grad) {
    const int nd = g.dim();
    const size_t npts = g.num_points();
    grad.assign(npts * nd, 0.0);
    size_t stride = 1;
    for (int a = 0; a < nd; ++a) {
        const int na = g.axes[a].n;
        const double h = g.axes[a].h();
        for (size_t i = 0; i < npts; ++i) {
            const int ia = static_cast<int>((i / stride) % na);
            const size_t up = ia + 1 < na ? i + stride : i;
            const size_t dn = ia > 0 ? i - stride : i;
            const double width = (ia + 1 < na ? h : 0.0) + (ia > 0 ? h : 0.0);
            grad[i * nd + a] = width > 0.0 ? (v[up] - v[dn]) / width : 0.0;
        }
        stride *= static_cast<size_t>(na);
    }
}

struct AxisCache {
    double lo;
    double inv_h;
    int n;
    size_t stride;
};

// clamped multilinear interpolation with compile-time dimension
template <int ND>
inline double interp_fast(const double* slice, const AxisCache* ax, const double* x,
                          bool* clamped) {
    size_t idx = 0;
    double w[ND];
    for (int a = 0; a < ND; ++a) {
        double u = (x[a] - ax[a].lo) * ax[a].inv_h;
        const double umax = static_cast<double>(ax[a].n - 1);
        if (u < 0.0 || u > umax) {
            if (clamped) *clamped = true;
            u = u < 0.0 ? 0.0 : umax;
        }
        int base = static_cast<int>(u);
        if (base > ax[a].n - 2) base = ax[a].n - 2;
        w[a] = u - base;
        idx += ax[a].stride * static_cast<size_t>(base);
    }
    if constexpr (ND == 1) {
        return slice[idx] + w[0] * (slice[idx + 1] - slice[idx]);
    } else {
        const size_t s1 = ax[1].stride;
        const double a0 = slice[idx] + w[0] * (slice[idx + 1] - slice[idx]);
        const double a1 = slice[idx + s1] + w[0] * (slice[idx + 1 + s1] - slice[idx + s1]);
        return a0 + w[1] * (a1 - a0);
    }
}

// sup over disturbance candidates of max(l, V(x + delta(f + sigma v))) -
// delta |v|^2 / 2 with compile-time dimensions; the hot path of every solve.
template <int N, int D>
double sl_sup_fast(std::span<const double> prev, const AxisCache* ax, const Tables& tb,
                   const double* pts, size_t c, size_t i, double delta, const double* grad_i,
                   bool* clamped) {
    const size_t base = c * tb.npts + i;
    const double* f = &tb.f[base * N];
    const double* s = &tb.sig[base * N * D];
    const double lval = tb.l[base];

    double vstar[D > 0 ? D : 1];
    double vnorm2 = 0.0;
    for (int b = 0; b < D; ++b) {
        double acc = 0.0;
        for (int a = 0; a < N; ++a) acc += s[a * D + b] * grad_i[a];
        vstar[b] = acc;
        vnorm2 += acc * acc;
    }
    const double hv = std::max(0.15, 0.25 * std::sqrt(vnorm2));

    double cand[D > 0 ? D : 1];
    double foot[N > 0 ? N : 1];
    double best = kMinusInf;
    const int ncand = 2 + 4 * D;
    for (int q = 0; q < ncand; ++q) {
        double en = 0.0;
        for (int b = 0; b < D; ++b) {
            cand[b] = q == 0 ? 0.0 : vstar[b];
            if (q >= 2 && b == (q - 2) / 4) {
                const int kind = (q - 2) % 4;
                cand[b] += (kind == 0) ? hv : (kind == 1) ? -hv : (kind == 2) ? 2 * hv : -2 * hv;
            }
            en += cand[b] * cand[b];
        }
        for (int a = 0; a < N; ++a) {
            double drift = f[a];
            for (int b = 0; b < D; ++b) drift += s[a * D + b] * cand[b];
            foot[a] = pts[i * N + a] + delta * drift;
        }
        const double cont = interp_fast<N>(prev.data(), ax, foot, clamped);
        const double val = std::max(lval, cont) - 0.5 * delta * en;
        if (val > best) best = val;
    }
    return best;
}

// generic-dimension fallback; also reports the offending (x, u, v) under the
// strict boundary policy.
double sl_inner_sup(const Grid& g, std::span<const double> prev, const Tables& tb, size_t c,
                    size_t i, double delta, const double* grad_i, bool strict,
                    const ControlProblem& p) {
    const int n = tb.n, d = tb.d;
    const size_t base = c * tb.npts + i;
    const double* f = &tb.f[base * n];
    const double* s = &tb.sig[base * n * d];
    const double lval = tb.l[base];

    double vstar[4] = {0, 0, 0, 0};
    for (int b = 0; b < d; ++b) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a) acc += s[a * d + b] * grad_i[a];
        vstar[b] = acc;
    }
    double vnorm = 0.0;
    for (int b = 0; b < d; ++b) vnorm += vstar[b] * vstar[b];
    vnorm = std::sqrt(vnorm);
    const double hv = std::max(0.15, 0.25 * vnorm);

    Vec foot(n);
    double cand[4];
    double best = kMinusInf;
    // candidate 0: v = 0; candidate 1: v*; then +-hv, +-2hv along each axis.
    const int ncand = 2 + 4 * d;
    for (int q = 0; q < ncand; ++q) {
        for (int b = 0; b < d; ++b) cand[b] = q == 0 ? 0.0 : vstar[b];
        if (q >= 2) {
            const int axis = (q - 2) / 4;
            const int kind = (q - 2) % 4;
            const double off = (kind == 0) ? hv : (kind == 1) ? -hv : (kind == 2) ? 2 * hv : -2 * hv;
            cand[axis] += off;
        }
        double en = 0.0;
        for (int b = 0; b < d; ++b) en += cand[b] * cand[b];
        for (int a = 0; a < n; ++a) {
            double drift = f[a];
            for (int b = 0; b < d; ++b) drift += s[a * d + b] * cand[b];
            foot[a] = tb.points[i][a] + delta * drift;
        }
        if (strict && !g.box().contains(foot)) {
            std::ostringstream os;
            os << "foot point escapes domain: x=(";
            for (int a = 0; a < n; ++a) os << (a ? "," : "") << tb.points[i][a];
            os << ") u=(";
            for (size_t k = 0; k < p.controls[c].size(); ++k)
                os << (k ? "," : "") << p.controls[c][k];
            os << ") v=(";
            for (int b = 0; b < d; ++b) os << (b ? "," : "") << cand[b];
            os << ")";
            throw std::runtime_error(os.str());
        }
        const double cont = g.interpolate(prev, foot);
        const double val = std::max(lval, cont) - 0.5 * delta * en;
        if (val > best) best = val;
    }
    return best;
}

template <int N, int D>
void sl_step_fast(const ControlProblem& p, const Grid& g, const Tables& tb,
                  std::span<const double> prev, double delta, int threads,
                  const std::vector<double>& grad, const std::vector<double>& pts,
                  std::vector<double>& out) {
    AxisCache ax[4];
    size_t stride = 1;
    for (int a = 0; a < N; ++a) {
        ax[a] = {g.axes[a].lo, 1.0 / g.axes[a].h(), g.axes[a].n, stride};
        stride *= static_cast<size_t>(g.axes[a].n);
    }
    const bool strict = g.boundary == BoundaryPolicy::strict;
    parallel_for(tb.npts, threads, [&](size_t i) {
        double best = kPlusInf;
        bool clamped = false;
        for (size_t c = 0; c < tb.nu; ++c) {
            const double v = sl_sup_fast<N, D>(prev, ax, tb, pts.data(), c, i, delta,
                                               &grad[i * N], strict ? &clamped : nullptr);
            if (v < best) best = v;
        }
        out[i] = best;
        if (clamped) {
            // rerun through the reporting path to name the offending point
            for (size_t c = 0; c < tb.nu; ++c)
                sl_inner_sup(g, prev, tb, c, i, delta, &grad[i * N], true, p);
        }
    });
}

std::vector<double> sl_step(const ControlProblem& p, const Grid& g, const Tables& tb,
                            std::span<const double> prev, double delta, int threads) {
    const size_t npts = tb.npts;
    std::vector<double> grad;
    slice_gradient(g, prev, grad);
    std::vector<double> out(npts);
    const std::vector<double>& pts = tb.flat_points;

    if (tb.n == 1 && tb.d == 1) {
        sl_step_fast<1, 1>(p, g, tb, prev, delta, threads, grad, pts, out);
        return out;
    }
    if (tb.n == 2 && tb.d == 1) {
        sl_step_fast<2, 1>(p, g, tb, prev, delta, threads, grad, pts, out);
        return out;
    }
    if (tb.n == 2 && tb.d == 2) {
        sl_step_fast<2, 2>(p, g, tb, prev, delta, threads, grad, pts, out);
        return out;
    }
    const bool strict = g.boundary == BoundaryPolicy::strict;
    parallel_for(npts, threads, [&](size_t i) {
        double best = kPlusInf;
        for (size_t c = 0; c < tb.nu; ++c) {
            const double v = sl_inner_sup(g, prev, tb, c, i, delta, &grad[i * tb.n], strict, p);
            if (v < best) best = v;
        }
        out[i] = best;
    });
    return out;
}

std::vector<double> terminal_slice(const ControlProblem& p, const Grid& g, const Tables& tb) {
    std::vector<double> v(tb.npts);
    for (size_t i = 0; i < tb.npts; ++i) {
        double m = tb.l[i];
        for (size_t c = 1; c < tb.nu; ++c) m = std::min(m, tb.l[c * tb.npts + i]);
        v[i] = m;
    }
    (void)p;
    (void)g;
    return v;
}

// One-sided differences per axis; at a clamped edge the outward difference is
// zero, matching stencil clamping.
struct OneSided {
    double minus[4], plus[4];
};

OneSided one_sided(const Grid& g, std::span<const double> v, size_t i) {
    OneSided os{};
    size_t stride = 1;
    for (int a = 0; a < g.dim(); ++a) {
        const int na = g.axes[a].n;
        const double h = g.axes[a].h();
        const int ia = static_cast<int>((i / stride) % na);
        os.minus[a] = ia > 0 ? (v[i] - v[i - stride]) / h : 0.0;
        os.plus[a] = ia + 1 < na ? (v[i + stride] - v[i]) / h : 0.0;
        stride *= static_cast<size_t>(na);
    }
    return os;
}

}  // namespace

void require_cfl(const ControlProblem& p, const Grid& g) {
    const double ratio = g.cfl_ratio(p);
    if (ratio > 1.0 + 1e-9) {
        double inv_h = 0.0;
        for (const auto& ax : g.axes) inv_h += 1.0 / ax.h();
        const double suggested = 0.95 / ((p.bound_f + p.bound_sigma * p.v_max) * inv_h);
        std::ostringstream os;
        os << "CFL violation: ratio " << ratio << " > 1; use delta <= " << suggested << " ("
           << static_cast<int>(std::ceil((g.T - g.t0) / suggested)) << " steps)";
        throw std::runtime_error(os.str());
    }
}

ValueField solve_qvi_semilagrangian(const ControlProblem& p, const Grid& g,
                                    const SolveOptions& opts) {
    p.validate();
    g.validate();
    const Tables tb(p, g);
    ValueField field(g);
    const auto term = opts.terminal_override ? *opts.terminal_override : terminal_slice(p, g, tb);
    if (term.size() != tb.npts) throw std::invalid_argument("terminal override size mismatch");
    std::copy(term.begin(), term.end(), field.slice(g.steps).begin());
    const double delta = g.delta();
    for (int k = g.steps - 1; k >= 0; --k) {
        const auto next = field.slice(k + 1);
        const auto cur = sl_step(p, g, tb, next, delta, opts.threads);
        std::copy(cur.begin(), cur.end(), field.slice(k).begin());
    }
    return field;
}

ValueField solve_pde_fd(const ControlProblem& p, const Grid& g, FdForm form,
                        const SolveOptions& opts) {
    p.validate();
    g.validate();
    require_cfl(p, g);
    const Tables tb(p, g);
    ValueField field(g);
    const auto term = opts.terminal_override ? *opts.terminal_override : terminal_slice(p, g, tb);
    if (term.size() != tb.npts) throw std::invalid_argument("terminal override size mismatch");
    std::copy(term.begin(), term.end(), field.slice(g.steps).begin());

    const double delta = g.delta();
    const int n = tb.n, d = tb.d;
    const double alpha_cap = p.bound_f + p.bound_sigma * p.v_max;

    for (int k = g.steps - 1; k >= 0; --k) {
        const auto prev = field.slice(k + 1);
        auto cur = field.slice(k);
        parallel_for(tb.npts, opts.threads, [&](size_t i) {
            const OneSided osd = one_sided(g, prev, i);
            double pbar[4], gnorm2 = 0.0;
            for (int a = 0; a < n; ++a) {
                pbar[a] = 0.5 * (osd.minus[a] + osd.plus[a]);
                const double pm = std::max(std::abs(osd.minus[a]), std::abs(osd.plus[a]));
                gnorm2 += pm * pm;
            }
            const double gnorm = std::sqrt(gnorm2);

            double best = kPlusInf;        // qvi form accumulator
            double best_h = kPlusInf;      // h form: min over admissible of H-hat
            double min_l = kPlusInf;
            const double r = prev[i];
            for (size_t c = 0; c < tb.nu; ++c) {
                const size_t base = c * tb.npts + i;
                const double* fv = &tb.f[base * n];
                const double* sv = &tb.sig[base * n * d];
                const double lval = tb.l[base];
                min_l = std::min(min_l, lval);

                double fp = 0.0;
                for (int a = 0; a < n; ++a) fp += fv[a] * pbar[a];
                double stp2 = 0.0;
                for (int b = 0; b < d; ++b) {
                    double acc = 0.0;
                    for (int a = 0; a < n; ++a) acc += sv[a * d + b] * pbar[a];
                    stp2 += acc * acc;
                }
                // backward marching flips the usual sign: + alpha/2 (p+ - p-)
                // is the smoothing direction for V^{n-1} = V^n + delta H-hat
                double dissip = 0.0;
                for (int a = 0; a < n; ++a) {
                    const double alpha =
                        std::min(alpha_cap, std::abs(fv[a]) + tb.sig_fro2[base] * gnorm);
                    dissip += 0.5 * alpha * (osd.plus[a] - osd.minus[a]);
                }
                const double hhat = fp + 0.5 * stp2 + dissip;

                if (form == FdForm::qvi) {
                    best = std::min(best, std::max(prev[i] + delta * hhat, lval));
                } else if (lval <= r) {
                    best_h = std::min(best_h, hhat);
                }
            }
            if (form == FdForm::qvi) {
                cur[i] = best;
            } else {
                // empty admissible set: the obstacle branch forces min_u l.
                cur[i] = std::isinf(best_h) ? min_l : prev[i] + delta * best_h;
            }
        });
    }
    return field;
}

std::vector<double> one_step_operator(const ControlProblem& p, const Grid& g,
                                      std::span<const double> phi, double t, double delta) {
    if (delta < 0.0 || t + delta > g.T + 1e-12)
        throw std::invalid_argument("step exceeds horizon");
    if (phi.size() != g.num_points()) throw std::invalid_argument("slice size mismatch");
    if (delta == 0.0) return {phi.begin(), phi.end()};
    const Tables tb(p, g);
    return sl_step(p, g, tb, phi, delta, 1);
}

ValueField residual_qvi(const ControlProblem& p, const ValueField& w) {
    const Grid& g = w.grid;
    if (g.steps < 1) throw std::invalid_argument("need at least 2 time slices");
    const Tables tb(p, g);
    ValueField res(g);
    const double delta = g.delta();
    const int n = tb.n;
    std::vector<double> grad;
    for (int k = 0; k <= g.steps; ++k) {
        const auto cur = w.slice(k);
        slice_gradient(g, cur, grad);
        for (size_t i = 0; i < tb.npts; ++i) {
            double wt;
            if (k == 0)
                wt = (w.at(1, i) - w.at(0, i)) / delta;
            else if (k == g.steps)
                wt = (w.at(k, i) - w.at(k - 1, i)) / delta;
            else
                wt = (w.at(k + 1, i) - w.at(k - 1, i)) / (2.0 * delta);

            double best = kPlusInf;
            for (size_t c = 0; c < tb.nu; ++c) {
                const size_t base = c * tb.npts + i;
                const double* fv = &tb.f[base * n];
                const double* sv = &tb.sig[base * n * tb.d];
                double fp = 0.0;
                for (int a = 0; a < n; ++a) fp += fv[a] * grad[i * n + a];
                double stp2 = 0.0;
                for (int b = 0; b < tb.d; ++b) {
                    double acc = 0.0;
                    for (int a = 0; a < n; ++a) acc += sv[a * tb.d + b] * grad[i * n + a];
                    stp2 += acc * acc;
                }
                const double hu = fp + 0.5 * stp2;
                best = std::min(best, std::max(wt + hu, tb.l[base] - cur[i]));
            }
            res.at(k, i) = best;
        }
    }
    return res;
}

}  // namespace maxplus
