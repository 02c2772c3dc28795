#include "maxplus/risk_sensitive.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "maxplus/parallel.hpp"
#include "maxplus/rng.hpp"
#include "maxplus/solver.hpp"

namespace maxplus {

namespace {

struct RiskTables {
    int n, d;
    size_t npts, nu;
    std::vector<double> f;      // [(c*npts+i)*n + a]
    std::vector<double> sig;    // [(c*npts+i)*n*d + a*d + b]
    std::vector<double> adiag;  // [(c*npts+i)*n + a]  diagonal of sigma sigma^T
    std::vector<double> sig_fro2;
    std::vector<double> l;
    std::vector<Vec> points;

    RiskTables(const ControlProblem& p, const Grid& g) {
        n = p.state_dim;
        d = p.dist_dim;
        if (n > 4 || d > 4) throw std::invalid_argument("risk solver supports dims <= 4");
        if (g.dim() != n) throw std::invalid_argument("grid dimension != state dimension");
        npts = g.num_points();
        nu = p.controls.size();
        f.resize(nu * npts * n);
        sig.resize(nu * npts * n * d);
        adiag.resize(nu * npts * n);
        sig_fro2.resize(nu * npts);
        l.resize(nu * npts);
        points.resize(npts);
        for (size_t i = 0; i < npts; ++i) points[i] = g.point(i);
        for (size_t c = 0; c < nu; ++c) {
            const Vec& u = p.controls[c];
            for (size_t i = 0; i < npts; ++i) {
                const size_t base = c * npts + i;
                const Vec fv = p.drift(points[i], u);
                const Mat sv = p.sigma(points[i], u);
                double fro2 = 0.0;
                for (int a = 0; a < n; ++a) {
                    f[base * n + a] = fv[a];
                    double arow = 0.0;
                    for (int b = 0; b < d; ++b) {
                        const double s = sv(a, b);
                        sig[base * n * d + a * d + b] = s;
                        arow += s * s;
                        fro2 += s * s;
                    }
                    adiag[base * n + a] = arow;  // (sigma sigma^T)_{aa}
                }
                sig_fro2[base] = fro2;
                l[base] = p.running_cost(points[i], u);
            }
        }
    }
};

// Clamped second difference per axis (edge rows reuse the boundary value,
// consistent with stencil clamping).
void second_diffs(const Grid& g, std::span<const double> v, size_t i, double* d2) {
    size_t stride = 1;
    for (int a = 0; a < g.dim(); ++a) {
        const int na = g.axes[a].n;
        const double h2 = g.axes[a].h() * g.axes[a].h();
        const int ia = static_cast<int>((i / stride) % na);
        const double up = ia + 1 < na ? v[i + stride] : v[i];
        const double dn = ia > 0 ? v[i - stride] : v[i];
        d2[a] = (up - 2.0 * v[i] + dn) / h2;
        stride *= static_cast<size_t>(na);
    }
}

void one_sided_diffs(const Grid& g, std::span<const double> v, size_t i, double* pm, double* pp) {
    size_t stride = 1;
    for (int a = 0; a < g.dim(); ++a) {
        const int na = g.axes[a].n;
        const double h = g.axes[a].h();
        const int ia = static_cast<int>((i / stride) % na);
        pm[a] = ia > 0 ? (v[i] - v[i - stride]) / h : 0.0;
        pp[a] = ia + 1 < na ? (v[i + stride] - v[i]) / h : 0.0;
        stride *= static_cast<size_t>(na);
    }
}

double sigma_t_p_sq(const RiskTables& tb, size_t base, const double* pbar) {
    double out = 0.0;
    for (int b = 0; b < tb.d; ++b) {
        double acc = 0.0;
        for (int a = 0; a < tb.n; ++a) acc += tb.sig[base * tb.n * tb.d + a * tb.d + b] * pbar[a];
        out += acc * acc;
    }
    return out;
}

}  // namespace

double risk_cfl_delta(const ControlProblem& p, const Grid& g, double theta) {
    double inv_h = 0.0, inv_h2 = 0.0;
    for (const auto& ax : g.axes) {
        inv_h += 1.0 / ax.h();
        inv_h2 += 1.0 / (ax.h() * ax.h());
    }
    const double first = (p.bound_f + p.bound_sigma * p.v_max) * inv_h;
    const double tr_max = p.bound_sigma * p.bound_sigma * g.dim();
    const double second = tr_max * inv_h2 / theta;
    return 1.0 / (first + second);
}

RiskSolveResult solve_v_theta(const ControlProblem& p, const Grid& g, double theta,
                              const RiskSolveOptions& opts) {
    p.validate();
    g.validate();
    if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
    const double delta = g.delta();
    const double dmax = risk_cfl_delta(p, g, theta);
    if (delta > dmax * (1.0 + 1e-9)) {
        std::ostringstream os;
        os << "CFL violation for theta=" << theta << ": delta " << delta << " > " << dmax
           << "; use at least " << static_cast<int>(std::ceil((g.T - g.t0) / dmax)) << " steps";
        throw std::runtime_error(os.str());
    }

    const RiskTables tb(p, g);
    RiskSolveResult out{ValueField(g), 0, 0, false};
    ValueField& field = out.field;

    std::vector<double> minl(tb.npts, kPlusInf);
    for (size_t c = 0; c < tb.nu; ++c)
        for (size_t i = 0; i < tb.npts; ++i)
            minl[i] = std::min(minl[i], tb.l[c * tb.npts + i]);

    // Terminal handling: the T slice stores the anchored limit min_u l; the
    // march starts from the one-rectangle quadrature value at T - delta.
    int start_k;
    if (opts.terminal_override) {
        if (opts.terminal_override->size() != tb.npts)
            throw std::invalid_argument("terminal override size mismatch");
        std::copy(opts.terminal_override->begin(), opts.terminal_override->end(),
                  field.slice(g.steps).begin());
        start_k = g.steps - 1;
    } else {
        std::copy(minl.begin(), minl.end(), field.slice(g.steps).begin());
        auto anchor = field.slice(g.steps - 1);
        const double log_term = std::log(delta) / theta;
        for (size_t i = 0; i < tb.npts; ++i) anchor[i] = log_term + minl[i];
        start_k = g.steps - 2;
    }

    const int n = tb.n;
    const double alpha_cap = p.bound_f + p.bound_sigma * p.v_max;
    std::atomic<uint64_t> clamps{0};

    for (int k = start_k; k >= 0; --k) {
        const auto prev = field.slice(k + 1);
        auto cur = field.slice(k);
        parallel_for(tb.npts, opts.threads, [&](size_t i) {
            double d2[4], pm[4], pp[4], pbar[4];
            second_diffs(g, prev, i, d2);
            one_sided_diffs(g, prev, i, pm, pp);
            double gnorm2 = 0.0;
            for (int a = 0; a < n; ++a) {
                pbar[a] = 0.5 * (pm[a] + pp[a]);
                const double m = std::max(std::abs(pm[a]), std::abs(pp[a]));
                gnorm2 += m * m;
            }
            const double gnorm = std::sqrt(gnorm2);
            const double vi = prev[i];

            double best = kPlusInf;
            uint64_t local_clamps = 0;
            for (size_t c = 0; c < tb.nu; ++c) {
                const size_t base = c * tb.npts + i;
                double diff2 = 0.0, fp = 0.0, dissip = 0.0;
                for (int a = 0; a < n; ++a) {
                    diff2 += tb.adiag[base * n + a] * d2[a];
                    fp += tb.f[base * n + a] * pbar[a];
                    const double alpha = std::min(
                        alpha_cap, std::abs(tb.f[base * n + a]) + tb.sig_fro2[base] * gnorm);
                    dissip += 0.5 * alpha * (pp[a] - pm[a]);
                }
                // split step: explicit transport/diffusion first (+ dissip
                // smooths under backward marching), then the exact
                // integrating-factor relaxation for the stiff exponential
                // source (d/dt e^{theta V} = e^{theta l} pointwise). Keeping
                // the source out of the explicit increment keeps the update
                // monotone under the transport CFL alone.
                const double hu = fp + 0.5 * sigma_t_p_sq(tb, base, pbar) + dissip;
                const double w = vi + delta * (diff2 / (2.0 * theta) + hu);
                double arg = theta * (tb.l[base] - w);
                if (arg > opts.clamp_hi || arg < opts.clamp_lo) {
                    arg = std::min(opts.clamp_hi, std::max(opts.clamp_lo, arg));
                    local_clamps++;
                }
                best = std::min(best, w + std::log1p(delta * std::exp(arg)) / theta);
            }
            cur[i] = best;
            if (local_clamps) clamps.fetch_add(local_clamps, std::memory_order_relaxed);
        });
        out.updates += tb.npts * tb.nu;
    }
    out.clamp_events = clamps.load();
    out.clamp_warning = out.updates > 0 && out.clamp_events * 100 > out.updates;
    return out;
}

ValueField solve_psi_theta(const ControlProblem& p, const Grid& g, double theta,
                           const std::vector<double>& terminal) {
    p.validate();
    g.validate();
    const RiskTables tb(p, g);
    if (terminal.size() != tb.npts) throw std::invalid_argument("terminal slice size mismatch");
    ValueField field(g);
    std::copy(terminal.begin(), terminal.end(), field.slice(g.steps).begin());
    const double delta = g.delta();
    const int n = tb.n;
    const double alpha_cap = p.bound_f;

    for (int k = g.steps - 1; k >= 0; --k) {
        const auto prev = field.slice(k + 1);
        auto cur = field.slice(k);
        for (size_t i = 0; i < tb.npts; ++i) {
            double d2[4], pm[4], pp[4];
            second_diffs(g, prev, i, d2);
            one_sided_diffs(g, prev, i, pm, pp);
            double best = kPlusInf;
            for (size_t c = 0; c < tb.nu; ++c) {
                const size_t base = c * tb.npts + i;
                double diff2 = 0.0, fp = 0.0, dissip = 0.0;
                for (int a = 0; a < n; ++a) {
                    diff2 += tb.adiag[base * n + a] * d2[a];
                    fp += tb.f[base * n + a] * 0.5 * (pm[a] + pp[a]);
                    const double alpha = std::min(alpha_cap, std::abs(tb.f[base * n + a]));
                    dissip += 0.5 * alpha * (pp[a] - pm[a]);
                }
                best = std::min(best, diff2 / (2.0 * theta) + fp + dissip +
                                          std::exp(theta * tb.l[base]));
            }
            cur[i] = prev[i] + delta * best;
        }
    }
    return field;
}

McResult psi_theta_constant_control_mc(const ControlProblem& p, const Vec& u0, double theta,
                                       double t0, const Vec& x0, double T, int n_samples,
                                       double dt, uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("need samples");
    const int steps = static_cast<int>(std::llround((T - t0) / dt));
    const double noise = 1.0 / std::sqrt(theta);
    const int n = p.state_dim, d = p.dist_dim;

    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        Rng rng(seed, 77000 + static_cast<uint64_t>(s));
        Vec x = x0;
        double integral = 0.0;
        for (int k = 0; k < steps; ++k) {
            integral += std::exp(theta * p.running_cost(x, u0)) * dt;
            const Vec f = p.drift(x, u0);
            const Mat sg = p.sigma(x, u0);
            Vec dw(d);
            for (int b = 0; b < d; ++b) dw[b] = rng.normal() * std::sqrt(dt);
            for (int a = 0; a < n; ++a) {
                double diff = 0.0;
                for (int b = 0; b < d; ++b) diff += sg(a, b) * dw[b];
                x[a] += f[a] * dt + noise * diff;
            }
        }
        sum += integral;
        sumsq += integral * integral;
    }
    McResult out;
    out.estimate = sum / n_samples;
    if (n_samples > 1) {
        const double var = std::max(0.0, (sumsq - sum * sum / n_samples) / (n_samples - 1));
        out.std_error = std::sqrt(var / n_samples);
    }
    return out;
}

ThetaSweepReport convergence_study(const ControlProblem& p, const Grid& g,
                                   const std::vector<double>& thetas, const ValueField& reference,
                                   double final_target, double slack) {
    ThetaSweepReport rep;
    rep.thetas = thetas;
    const int k0 = static_cast<int>(std::ceil(0.1 * g.steps));
    const int k1 = static_cast<int>(std::floor(0.9 * g.steps));
    for (double theta : thetas) {
        const auto start = std::chrono::steady_clock::now();
        Grid gt = g;
        // refine the time step per theta to satisfy the parabolic CFL
        const double dmax = risk_cfl_delta(p, g, theta);
        if (gt.delta() > dmax)
            gt.steps = static_cast<int>(std::ceil((g.T - g.t0) / (0.95 * dmax)));
        const RiskSolveResult rs = solve_v_theta(p, gt, theta);
        // compare on the coarse slice times
        double sup = 0.0;
        for (int k = k0; k <= k1; ++k) {
            const double t = g.time(k);
            for (size_t i = 0; i < reference.npts(); ++i) {
                const Vec x = g.point(i);
                bool in = true;
                for (int a = 0; a < g.dim(); ++a) {
                    const double len = g.axes[a].hi - g.axes[a].lo;
                    if (x[a] < g.axes[a].lo + 0.25 * len - 1e-12 ||
                        x[a] > g.axes[a].hi - 0.25 * len + 1e-12)
                        in = false;
                }
                if (!in) continue;
                sup = std::max(sup, std::abs(rs.field.value(t, x) - reference.at(k, i)));
            }
        }
        const auto end = std::chrono::steady_clock::now();
        rep.distances.push_back(sup);
        rep.clamp_rates.push_back(rs.clamp_rate());
        rep.runtimes_s.push_back(std::chrono::duration<double>(end - start).count());
    }
    rep.nonincreasing_ok = true;
    for (size_t i = 1; i < rep.distances.size(); ++i)
        if (rep.distances[i] > rep.distances[i - 1] * (1.0 + slack)) rep.nonincreasing_ok = false;
    rep.final_distance = rep.distances.empty() ? 0.0 : rep.distances.back();
    rep.final_ok = rep.final_distance <= final_target;
    return rep;
}

}  // namespace maxplus
