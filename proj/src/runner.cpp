#include "maxplus/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <sstream>

#include "maxplus/artifacts.hpp"
#include "maxplus/families.hpp"
#include "maxplus/hinfty.hpp"
#include "maxplus/merton.hpp"
#include "maxplus/path_space.hpp"
#include "maxplus/risk_sensitive.hpp"
#include "maxplus/rng.hpp"
#include "maxplus/solver.hpp"
#include "maxplus/trajectory.hpp"

namespace maxplus {

namespace {

namespace fs = std::filesystem;

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

// ---- randomized tabular instances for value-level Hamiltonian checks ----

struct TabularInstance {
    ControlProblem problem;
    double r = 0.0;
    Vec p;
    std::vector<double> ls;
    std::string describe() const {
        std::ostringstream os;
        os << "r=" << r << " p=" << p[0] << " l={";
        for (size_t i = 0; i < ls.size(); ++i) os << (i ? "," : "") << ls[i];
        os << "}";
        return os.str();
    }
};

TabularInstance random_tabular(Rng& rng) {
    TabularInstance inst;
    const int nu = 1 + rng.uniform_int(8);
    auto fs_ = std::make_shared<std::vector<double>>();
    auto ss_ = std::make_shared<std::vector<double>>();
    auto ls_ = std::make_shared<std::vector<double>>();
    std::vector<Vec> controls;
    for (int i = 0; i < nu; ++i) {
        fs_->push_back(rng.uniform(-2.0, 2.0));
        ss_->push_back(rng.uniform(-2.0, 2.0));
        ls_->push_back(rng.uniform(-1.0, 2.0));
        controls.push_back(Vec{static_cast<double>(i)});
    }
    ControlProblem& p = inst.problem;
    p.state_dim = 1;
    p.dist_dim = 1;
    p.name = "tabular";
    p.drift = [fs_](const Vec&, const Vec& u) { return Vec{(*fs_)[static_cast<size_t>(u[0])]}; };
    p.sigma = [ss_](const Vec&, const Vec& u) {
        Mat m(1, 1);
        m(0, 0) = (*ss_)[static_cast<size_t>(u[0])];
        return m;
    };
    p.running_cost = [ls_](const Vec&, const Vec& u) { return (*ls_)[static_cast<size_t>(u[0])]; };
    p.controls = ControlSet(controls);
    p.domain = Box{{-1.0}, {1.0}};
    inst.r = rng.uniform(-1.5, 2.5);
    inst.p = Vec{rng.uniform(-3.0, 3.0)};
    inst.ls = *ls_;
    return inst;
}

bool le_with_inf(double a, double b, double tol) {
    if (std::isinf(b) && b > 0) return true;               // anything <= +inf
    if (std::isinf(a) && a > 0) return std::isinf(b) && b > 0;
    return a <= b + tol;
}

}  // namespace

std::vector<PropertyResult> hamiltonian_random_properties(uint64_t seed, int instances,
                                                          bool flip_kh) {
    PropertyResult mono{"hamiltonian.monotone_in_r", true, 0.0, ""};
    PropertyResult incl{"hamiltonian.admissible_inclusion", true, 0.0, ""};
    PropertyResult kh{"hamiltonian.K_le_H", true, 0.0, ""};
    PropertyResult gap{"hamiltonian.envelope_gap_identity", true, 0.0, ""};
    PropertyResult upper{"hamiltonian.H_le_H_upper", true, 0.0, ""};

    Rng rng(seed, 42);
    const Vec x{0.0};
    for (int it = 0; it < instances; ++it) {
        TabularInstance inst = random_tabular(rng);
        const ControlProblem& p = inst.problem;
        const double r2 = inst.r + rng.uniform(0.0, 1.0);
        const HamiltonianQuery q1{x, inst.r, inst.p};
        const HamiltonianQuery q2{x, r2, inst.p};

        const auto h1 = hamiltonian_H(p, q1);
        const auto h2 = hamiltonian_H(p, q2);
        const auto hu1 = hamiltonian_H_upper(p, q1);
        KOptions ko;
        ko.v_step = 0.05;
        // shared outer box: the grid ordering statement needs identical grids
        double stp_max = 0.0;
        for (size_t c = 0; c < p.controls.size(); ++c)
            stp_max = std::max(stp_max,
                               std::abs(p.sigma({0.0}, p.controls[c])(0, 0) * inst.p[0]));
        ko.box_radius = 2.0 * stp_max + 1.0;
        const auto k1 = hamiltonian_K(p, q1, ko);
        const auto k2 = hamiltonian_K(p, q2, ko);

        // monotone in r: smaller r has a smaller admissible set, larger min
        if (!le_with_inf(h2.value, h1.value, 1e-12) || !le_with_inf(k2.value, k1.value, 1e-12)) {
            mono.pass = false;
            mono.detail = inst.describe();
        }
        // A(x, r) subset of A(x, r2)
        const auto a1 = admissible_set(p, x, inst.r);
        const auto a2 = admissible_set(p, x, r2);
        for (size_t ci : a1)
            if (std::find(a2.begin(), a2.end(), ci) == a2.end()) {
                incl.pass = false;
                incl.detail = inst.describe();
            }
        // K <= H (exact: grid max under-shoots the true sup; weak duality)
        const bool kh_ok = le_with_inf(k1.value, h1.value, 1e-12);
        if (flip_kh ? kh_ok : !kh_ok) {
            kh.pass = false;
            kh.detail = inst.describe();
        }
        if (!k1.is_infinite() && !h1.is_infinite())
            kh.worst = std::max(kh.worst, k1.value - h1.value);
        // H(x, r+eps, p) == H(x, r, p) for eps below the cost gap
        double gap_sz = kPlusInf;
        for (double lv : inst.ls)
            if (lv > inst.r) gap_sz = std::min(gap_sz, lv - inst.r);
        const double eps = std::isinf(gap_sz) ? 0.5 : 0.5 * gap_sz;
        if (eps > 0.0) {
            const auto h_eps = hamiltonian_H(p, {x, inst.r + eps, inst.p});
            const bool equal = (h_eps.is_infinite() && h1.is_infinite()) ||
                               (!h_eps.is_infinite() && !h1.is_infinite() &&
                                h_eps.value == h1.value);
            if (!equal) {
                gap.pass = false;
                gap.detail = inst.describe();
            }
        }
        // smaller strict set => larger infimum
        if (!le_with_inf(h1.value, hu1.value, 1e-12)) {
            upper.pass = false;
            upper.detail = inst.describe();
        }
    }

    // documented strict-gap instance: two controls f=0, sigma=+1/-1, p=1
    PropertyResult strict{"hamiltonian.strict_gap_instance", true, 0.0, ""};
    {
        ControlProblem p;
        p.state_dim = 1;
        p.dist_dim = 1;
        p.name = "strict_gap";
        p.drift = [](const Vec&, const Vec&) { return Vec{0.0}; };
        p.sigma = [](const Vec&, const Vec& u) {
            Mat m(1, 1);
            m(0, 0) = u[0];
            return m;
        };
        p.running_cost = [](const Vec&, const Vec&) { return 0.0; };
        p.controls = ControlSet({Vec{1.0}, Vec{-1.0}});
        p.domain = Box{{-1.0}, {1.0}};
        KOptions ko;
        ko.box_radius = 2.0;
        ko.v_step = 0.01;
        const HamiltonianQuery q{Vec{0.0}, 1.0, Vec{1.0}};
        const auto h = hamiltonian_H(p, q);
        const auto k = hamiltonian_K(p, q, ko);
        strict.worst = std::abs(k.value);
        if (!(h.value == 0.5) || std::abs(k.value) > 1e-9) {
            strict.pass = false;
            strict.detail = "H=" + std::to_string(h.value) + " K=" + std::to_string(k.value);
        }
    }

    return {mono, incl, kh, gap, upper, strict};
}

// ---------------------------------------------------------------------------
// full property suite
// ---------------------------------------------------------------------------

namespace {

void check(std::vector<PropertyResult>& out, const std::string& name, bool pass, double worst,
           const std::string& detail = "") {
    out.push_back({name, pass, worst, pass ? "" : detail});
}

// dyadic-valued two-block space: all sums exact in binary floating point
DiscretePathSpace dyadic_space(Rng& rng, int m, int gsz) {
    std::vector<double> times(m + 1);
    for (int j = 0; j <= m; ++j) times[j] = 0.125 * j;
    std::vector<Vec> grid{Vec{0.0}};  // the zero value is a space invariant
    for (int i = 1; i < gsz; ++i) grid.push_back(Vec{-1.0 + rng.uniform_int(9) * 0.25});
    return DiscretePathSpace(std::move(times), std::move(grid));
}

double dyadic_value(Rng& rng) { return (rng.uniform_int(129) - 64) / 32.0; }

void maxplus_core_properties(std::vector<PropertyResult>& out, uint64_t seed) {
    Rng rng(seed, 7);
    bool lin_ok = true, mono_ok = true, tower_ok = true, split_ok = true;
    std::string detail;
    for (int it = 0; it < 40; ++it) {
        const int m = 2 + rng.uniform_int(5);       // 2..6
        const int gsz = 2 + rng.uniform_int(4);     // 2..5
        DiscretePathSpace sp = dyadic_space(rng, m, gsz);

        // random dyadic path functionals: Z depends on the whole path,
        // Z1 on the first k steps only
        const int k = 1 + rng.uniform_int(m - 1);
        const double a = dyadic_value(rng);
        auto hash_val = [&](const Path& p, int lo, int hi, uint64_t salt) {
            uint64_t h = salt;
            for (int j = lo; j < hi; ++j)
                h = splitmix64(h ^ static_cast<uint64_t>(std::llround(p[j][0] * 4.0) + 16));
            return (static_cast<double>(h % 129) - 64.0) / 32.0;
        };
        PathFunction z = [&](const Path& p) {
            return MaxPlusScalar(hash_val(p, 0, m, 11));
        };
        PathFunction y = [&](const Path& p) {
            return MaxPlusScalar(hash_val(p, 0, m, 13));
        };

        const double ez = maxplus_expectation(z, sp).value();
        const double ey = maxplus_expectation(y, sp).value();
        const double ezy = maxplus_expectation(
                               [&](const Path& p) { return oplus(z(p), y(p)); }, sp)
                               .value();
        if (ezy != std::max(ez, ey)) lin_ok = false;
        const double eaz = maxplus_expectation(
                               [&](const Path& p) { return otimes(MaxPlusScalar(a), z(p)); }, sp)
                               .value();
        if (eaz != a + ez) lin_ok = false;

        // monotonicity with Y' = Z + dyadic nonneg
        const double bump = rng.uniform_int(8) * 0.25;
        const double ezb = maxplus_expectation(
                               [&](const Path& p) { return MaxPlusScalar(z(p).value() + bump); },
                               sp)
                               .value();
        if (!(ez <= ezb)) mono_ok = false;

        // tower: Z = Z1(v1) (+) Z2(v), exact by enumeration
        PathFunction z1 = [&](const Path& p) { return MaxPlusScalar(hash_val(p, 0, k, 17)); };
        PathFunction zfull = [&](const Path& p) {
            return oplus(z1(p), MaxPlusScalar(hash_val(p, 0, m, 19)));
        };
        const double lhs = maxplus_expectation(zfull, sp).value();
        // rhs: E+[ Z1 (+) E+[Z2 | v1] ] over prefixes
        double rhs = kMinusInf;
        sp.for_each_partial_path(0, k, [&](const Path& prefix) {
            PathFunction z2 = [&](const Path& p) {
                return MaxPlusScalar(hash_val(p, 0, m, 19));
            };
            const double inner = conditional_expectation(z2, prefix, sp).value();
            const double z1v = hash_val(prefix, 0, k, 17);
            const double q1 = sp.density_range(prefix, 0, k);
            rhs = std::max(rhs, std::max(z1v, inner) + q1);
        });
        if (lhs != rhs) {
            tower_ok = false;
            detail = "m=" + std::to_string(m) + " g=" + std::to_string(gsz);
        }

        // density split at every interior point
        sp.for_each_path([&](const Path& p) {
            for (int kk = 1; kk < m; ++kk)
                if (sp.density(p) != sp.density_range(p, 0, kk) + sp.density_range(p, kk, m))
                    split_ok = false;
        });
    }
    check(out, "maxplus.linearity", lin_ok, 0.0, "dyadic instance failed");
    check(out, "maxplus.monotone", mono_ok, 0.0, "");
    check(out, "maxplus.tower_exact", tower_ok, 0.0, detail);
    check(out, "maxplus.density_split_exact", split_ok, 0.0, "");
}

void problem_properties(std::vector<PropertyResult>& out, uint64_t seed) {
    Rng rng(seed, 8);
    const ControlProblem p = canonical_problem();
    bool hu_ok = true, adm_ok = true, term_ok = true;
    double hu_worst = 0.0;
    for (int it = 0; it < 300; ++it) {
        const Vec x{rng.uniform(-2.0, 2.0)};
        const Vec u = p.controls[static_cast<size_t>(rng.uniform_int(
            static_cast<int>(p.controls.size())))];
        const Vec grad{rng.uniform(-4.0, 4.0)};
        const double hu = hamiltonian_u(p, x, u, grad);
        // sup property on a disturbance grid, equality at sigma^T grad
        for (double v = -6.0; v <= 6.0; v += 0.25) {
            const double cand = (p.drift(x, u)[0] + p.sigma(x, u)(0, 0) * v) * grad[0] -
                                0.5 * v * v;
            if (cand > hu + 1e-12) hu_ok = false;
        }
        const Vec vstar = worst_disturbance(p, x, u, grad);
        const double at_star =
            (p.drift(x, u)[0] + p.sigma(x, u)(0, 0) * vstar[0]) * grad[0] - 0.5 * vstar[0] * vstar[0];
        hu_worst = std::max(hu_worst, std::abs(at_star - hu));
        if (std::abs(at_star - hu) > 1e-12) hu_ok = false;

        // Lipschitz admissible-set surrogate
        const Vec y{x[0] + rng.uniform(-0.3, 0.3)};
        const double r = rng.uniform(-0.5, 4.5);
        const auto ay = admissible_set(p, y, r);
        const auto ax = admissible_set(p, x, r + p.lip_l_x * std::abs(x[0] - y[0]) + 1e-12);
        for (size_t c : ay)
            if (std::find(ax.begin(), ax.end(), c) == ax.end()) adm_ok = false;

        // terminal value Lipschitz bound
        const double tv_x = terminal_value(p, x), tv_y = terminal_value(p, y);
        if (std::abs(tv_x - tv_y) > p.lip_l_x * std::abs(x[0] - y[0]) + 1e-12) term_ok = false;
    }
    check(out, "problem.hu_sup_property", hu_ok, hu_worst, "");
    check(out, "problem.admissible_lipschitz", adm_ok, 0.0, "");
    check(out, "problem.terminal_lipschitz", term_ok, 0.0, "");
}

void solver_properties(std::vector<PropertyResult>& out, uint64_t seed, int threads) {
    (void)seed;
    const ControlProblem p = canonical_problem();
    Grid g = canonical_grid(81, 100);
    SolveOptions so;
    so.threads = threads;
    const ValueField sl = solve_qvi_semilagrangian(p, g, so);

    // time monotonicity and floor (exact up to roundoff)
    bool mono_ok = true, floor_ok = true;
    for (int k = 0; k < g.steps; ++k)
        for (size_t i = 0; i < sl.npts(); ++i) {
            if (sl.at(k, i) < sl.at(k + 1, i) - 1e-12) mono_ok = false;
            if (sl.at(k, i) < sl.at(g.steps, i) - 1e-12) floor_ok = false;
        }
    check(out, "solver.time_monotone", mono_ok, 0.0, "");
    check(out, "solver.floor_bound", floor_ok, 0.0, "");

    // ceiling with M from problem bounds
    const double C = std::max(p.bound_f, p.bound_sigma);
    const double M = p.lip_l_x * C + 0.5 * (p.lip_l_x * C) * (p.lip_l_x * C);
    bool ceil_ok = true;
    for (int k = 0; k <= g.steps; ++k)
        for (size_t i = 0; i < sl.npts(); ++i)
            if (sl.at(k, i) > sl.at(g.steps, i) + M * (g.T - g.time(k)) + 1e-9) ceil_ok = false;
    check(out, "solver.ceiling_bound", ceil_ok, M, "");

    // spatial Lipschitz bound, uniform in t
    double lip = 0.0;
    for (int k = 0; k <= g.steps; ++k) lip = std::max(lip, slice_lipschitz(sl, k));
    check(out, "solver.lipschitz_uniform", lip <= 12.0, lip, "slice Lipschitz exceeded 12");

    // ordered terminal data => ordered solutions (discrete comparison)
    {
        std::vector<double> phi1(sl.slice(g.steps).begin(), sl.slice(g.steps).end());
        std::vector<double> phi2 = phi1;
        for (auto& v : phi2) v += 0.5;
        SolveOptions o1 = so, o2 = so;
        o1.terminal_override = phi1;
        o2.terminal_override = phi2;
        const ValueField f1 = solve_qvi_semilagrangian(p, g, o1);
        const ValueField f2 = solve_qvi_semilagrangian(p, g, o2);
        bool ord = true;
        for (size_t i = 0; i < f1.data.size(); ++i)
            if (f2.data[i] < f1.data[i] - 1e-12) ord = false;
        check(out, "solver.comparison_ordered", ord, 0.0, "");
    }

    // FD forms agree with each other and with SL
    Grid gf = g;
    gf.steps = 140;  // satisfies the CFL bound for this instance
    const ValueField fq = solve_pde_fd(p, gf, FdForm::qvi, so);
    const ValueField fh = solve_pde_fd(p, gf, FdForm::h_form, so);
    double d_inner = 0.0;
    for (int k = 0; k <= g.steps; ++k) {
        const double t = g.time(k);
        for (size_t i = 0; i < sl.npts(); ++i) {
            const Vec x = g.point(i);
            if (std::abs(x[0]) > 1.0 + 1e-12) continue;
            d_inner = std::max(d_inner, std::abs(sl.at(k, i) - fq.value(t, x)));
            d_inner = std::max(d_inner, std::abs(fq.value(t, x) - fh.value(t, x)));
        }
    }
    check(out, "solver.cross_scheme_agreement", d_inner <= 0.08, d_inner, "");

    // residual of the SL solution
    const ValueField res = residual_qvi(p, sl);
    double rsup = 0.0;
    for (int k = 1; k < g.steps; ++k)
        for (size_t i = 0; i < sl.npts(); ++i) {
            const Vec x = g.point(i);
            if (std::abs(x[0]) > 1.0 + 1e-12) continue;
            rsup = std::max(rsup, std::abs(res.at(k, i)));
        }
    const double rbound = 5.0 * (g.axes[0].h() + g.delta());
    check(out, "solver.residual_bound", rsup <= rbound, rsup, "");
}

void trajectory_properties(std::vector<PropertyResult>& out, uint64_t seed, int threads) {
    // toy: f = 0, sigma = 1, l = x
    ControlProblem toy;
    toy.state_dim = toy.dist_dim = 1;
    toy.name = "toy";
    toy.drift = [](const Vec&, const Vec&) { return Vec{0.0}; };
    toy.sigma = [](const Vec&, const Vec&) {
        Mat m(1, 1);
        m(0, 0) = 1.0;
        return m;
    };
    toy.running_cost = [](const Vec& x, const Vec&) { return x[0]; };
    toy.controls = ControlSet({Vec{0.0}});
    toy.domain = Box{{-3.0}, {3.0}};
    toy.bound_f = 0.0;
    toy.bound_sigma = 1.0;

    const Policy pol = Policy::constant(Vec{0.0});
    ExpectOptions eo;
    eo.dt = 0.01;
    eo.coarsen = 5;
    eo.restarts = 1;
    eo.seed = seed;
    const ExpectResult er = maxplus_expectation_policy(toy, pol, 0.0, Vec{0.0}, 1.0, eo);
    const DisturbancePath v0 = DisturbancePath::zero(0.0, 1.0, 20, 1);
    const double pay0 = game_payoff(integrate(toy, pol, v0, 0.0, Vec{0.0}, 1.0, 0.01), v0, toy);
    check(out, "trajectory.sup_dominates_feasible", er.value >= pay0 - 1e-12, er.value - pay0, "");

    // seeding never hurts: identical runs plus one extra start
    const ControlProblem p = canonical_problem();
    Grid g = canonical_grid(81, 100);
    SolveOptions so;
    so.threads = threads;
    const ValueField w = solve_qvi_semilagrangian(p, g, so);
    const Policy opt_pol = make_field_argmin_policy(p, w);
    ExpectOptions ea = eo;
    ea.restarts = 0;
    ExpectOptions eb = ea;
    eb.seed_field = &w;
    const double ja = maxplus_expectation_policy(p, opt_pol, 0.0, Vec{0.5}, 1.0, ea).value;
    const double jb = maxplus_expectation_policy(p, opt_pol, 0.0, Vec{0.5}, 1.0, eb).value;
    check(out, "trajectory.seed_never_decreases", jb >= ja - 1e-12, jb - ja, "");

    // monotone-drift state Lipschitz transfer, same disturbance on both
    ControlProblem mono = canonical_problem();
    mono.drift = [](const Vec& x, const Vec&) { return Vec{-x[0]}; };  // drop the control term
    Rng rng(seed, 9);
    bool lip_ok = true;
    double lip_worst = 0.0;
    for (int it = 0; it < 20; ++it) {
        DisturbancePath v = DisturbancePath::zero(0.0, 1.0, 10, 1);
        for (auto& vv : v.values) vv[0] = rng.uniform(-1.0, 1.0);
        const double x0 = rng.uniform(-1.0, 1.0), y0 = rng.uniform(-1.0, 1.0);
        const Policy cpol = Policy::constant(Vec{0.0});
        const double px =
            game_payoff(integrate(mono, cpol, v, 0.0, Vec{x0}, 1.0, 0.01), v, mono);
        const double py =
            game_payoff(integrate(mono, cpol, v, 0.0, Vec{y0}, 1.0, 0.01), v, mono);
        const double bound = mono.lip_l_x * std::abs(x0 - y0) + 1e-9;
        lip_worst = std::max(lip_worst, std::abs(px - py) - bound);
        if (std::abs(px - py) > bound) lip_ok = false;
    }
    check(out, "trajectory.state_lipschitz_transfer", lip_ok, lip_worst, "");

    // dt refinement changes the payoff by O(dt)
    {
        DisturbancePath v = DisturbancePath::zero(0.0, 1.0, 10, 1);
        Rng r2(seed, 10);
        for (auto& vv : v.values) vv[0] = r2.uniform(-1.0, 1.0);
        const Policy cpol = Policy::constant(Vec{0.5});
        const double j1 = game_payoff(integrate(p, cpol, v, 0.0, Vec{0.3}, 1.0, 0.01), v, p);
        const double j2 = game_payoff(integrate(p, cpol, v, 0.0, Vec{0.3}, 1.0, 0.005), v, p);
        check(out, "trajectory.dt_refinement", std::abs(j1 - j2) <= 5.0 * 0.01,
              std::abs(j1 - j2), "");
    }
}

void risk_properties(std::vector<PropertyResult>& out, int threads) {
    const ControlProblem p = canonical_problem();
    Grid g = canonical_grid(81, 100);
    SolveOptions so;
    so.threads = threads;

    // Two-sided envelope around min_u l: the finite-theta field dips below
    // the pointwise floor by a lateral layer of depth O(log theta / theta)
    // wherever the floor has slope, so the defect is checked against a
    // tolerance decreasing in theta and must itself shrink along the sweep.
    const double C = std::max(p.bound_f, p.bound_sigma);
    const double M = p.lip_l_x * C + 0.5 * (p.lip_l_x * C) * (p.lip_l_x * C);
    RiskSolveOptions ro;
    ro.threads = threads;
    bool sand_ok = true;
    double prev_defect = kPlusInf;
    double worst_ratio = 0.0;
    ValueField last_field;
    Grid last_grid;
    for (double theta : {10.0, 20.0, 50.0}) {
        Grid gt = g;
        const double dmax = risk_cfl_delta(p, g, theta);
        gt.steps = static_cast<int>(std::ceil((g.T - g.t0) / (0.95 * dmax)));
        const RiskSolveResult rs = solve_v_theta(p, gt, theta, ro);
        const double t_hi = gt.T - std::exp(-0.5 * 0.1 * theta);
        double defect = 0.0;
        for (int k = 0; k <= gt.steps; ++k) {
            const double t = gt.time(k);
            if (t < 0.1 || t > t_hi) continue;
            for (size_t i = 0; i < rs.field.npts(); ++i) {
                const Vec x = gt.point(i);
                if (std::abs(x[0]) > 1.0 + 1e-12) continue;
                const double minl = terminal_value(p, x);
                const double v = rs.field.at(k, i);
                defect =
                    std::max(defect, std::max(minl - v, v - (minl + M * (gt.T - t))));
            }
        }
        const double tol = 3.0 * std::log1p(theta) / theta;
        worst_ratio = std::max(worst_ratio, defect / tol);
        if (defect > tol || defect > prev_defect * 1.10) sand_ok = false;
        prev_defect = defect;
        last_field = rs.field;
        last_grid = gt;
    }
    check(out, "risk.sandwich_envelope", sand_ok, worst_ratio, "");

    // nonincreasing in t on the inner window (largest theta field)
    bool tmono_ok = true;
    for (int k = 0; k < last_grid.steps; ++k) {
        if (last_grid.time(k + 1) > last_grid.T - 0.1) continue;
        for (size_t i = 0; i < last_field.npts(); ++i)
            if (last_field.at(k, i) < last_field.at(k + 1, i) - 1e-7) tmono_ok = false;
    }
    check(out, "risk.horizon_monotone", tmono_ok, 0.0, "");

    // exact transform equivalence on a decoupled instance
    {
        ControlProblem q;
        q.state_dim = q.dist_dim = 1;
        q.name = "decoupled";
        q.drift = [](const Vec&, const Vec&) { return Vec{0.0}; };
        q.sigma = [](const Vec&, const Vec&) { return Mat(1, 1); };
        q.running_cost = [](const Vec& x, const Vec&) { return x[0] * x[0]; };
        q.controls = ControlSet({Vec{0.0}});
        q.domain = Box{{-1.0}, {1.0}};
        q.bound_f = 0.0;
        q.bound_sigma = 0.0;
        Grid gq;
        gq.axes = {Axis{-1.0, 1.0, 5}};
        gq.t0 = 0.0;
        gq.T = 0.5;
        gq.steps = 5000;
        const double theta = 2.0;
        std::vector<double> termv(5), termp(5);
        for (size_t i = 0; i < 5; ++i) {
            const double l = gq.point(i)[0] * gq.point(i)[0];
            termv[i] = l + 1.0;
            termp[i] = std::exp(theta * (l + 1.0));
        }
        RiskSolveOptions rv;
        rv.terminal_override = termv;
        const ValueField vf = solve_v_theta(q, gq, theta, rv).field;
        const ValueField pf = solve_psi_theta(q, gq, theta, termp);
        double dmaxv = 0.0;
        for (size_t i = 0; i < 5; ++i)
            dmaxv = std::max(dmaxv,
                             std::abs(std::log(pf.at(0, i)) / theta - vf.at(0, i)));
        check(out, "risk.transform_1e-6", dmaxv <= 1e-6, dmaxv, "");
    }
}

void merton_properties(std::vector<PropertyResult>& out, uint64_t seed) {
    MertonParams mp;
    // h_theta(T) = 0 and decreasing to zero near T
    bool h_ok = merton_h_theta(mp, mp.T) == 0.0;
    double prev = merton_h_theta(mp, 0.0);
    for (int i = 1; i <= 10; ++i) {
        const double h = merton_h_theta(mp, mp.T * i / 10.0);
        if (h > prev + 1e-15) h_ok = false;
        prev = h;
    }
    check(out, "merton.h_theta_decreasing_to_zero", h_ok, prev, "");

    // finite controls converge to the limit ones under theta Sigma^2 fixed
    bool conv_ok = true;
    double prev_k = kPlusInf, prev_c = kPlusInf;
    for (double th : {10.0, 100.0, 1000.0}) {
        MertonParams q = mp;
        q.theta = th;
        q.Sigma2 = mp.sigma_bar2 / th;
        const auto [k, c] = merton_optimal_controls_finite(q, 0.5);
        const double dk = std::abs(k - merton_k_star(mp));
        const double dc = std::abs(c - merton_c_star(mp, 0.5));
        if (dk > prev_k + 1e-15 || dc > prev_c + 1e-15) conv_ok = false;
        prev_k = dk;
        prev_c = dc;
    }
    check(out, "merton.controls_converge", conv_ok, std::max(prev_k, prev_c), "");

    // identities on random parameter draws with mu > r > 0
    Rng rng(seed, 11);
    double w1 = 0.0, w2 = 0.0;
    for (int it = 0; it < 100; ++it) {
        MertonParams q;
        q.r = rng.uniform(0.005, 0.09);
        q.mu = q.r + rng.uniform(0.005, 0.15);
        q.sigma_bar2 = rng.uniform(0.01, 0.25);
        q.T = rng.uniform(0.5, 3.0);
        const double t = rng.uniform(0.0, 0.95) * q.T;
        const auto [r1, r2] = qvi_identity_check(q, t);
        w1 = std::max(w1, std::abs(r1));
        w2 = std::max(w2, std::abs(r2));
    }
    check(out, "merton.qvi_identity_1", w1 <= 1e-12, w1, "");
    check(out, "merton.qvi_identity_2", w2 <= 1e-10, w2, "");

    // capped time part: floor, monotone, ceiling
    const ModifiedMerton mm = modified_merton_problem(mp, 1.0);
    bool b_ok = true;
    const double nu = mm.nu;
    double prev_b = kPlusInf;
    for (int i = 0; i <= 100; ++i) {
        const double t = mp.T * i / 100.0;
        const double b = mm.B_tilde(t);
        if (b < -std::log(mm.C) - 1e-9) b_ok = false;                       // floor
        if (b > prev_b + 1e-9) b_ok = false;                                // nonincreasing
        if (b > -std::log(mm.C) + (mm.C - nu) * (mp.T - t) + 1e-9) b_ok = false;  // ceiling
        prev_b = b;
    }
    check(out, "merton.capped_time_part_bounds", b_ok, prev_b, "");
}

void hinfty_properties(std::vector<PropertyResult>& out, uint64_t seed, int threads) {
    const QuadraticExampleResult ex = quadratic_example_certificate(1.0, 1.0, 1.0, 0.1, 0.05);
    check(out, "hinfty.example_feasible", ex.feasible && ex.certificate.pass,
          ex.certificate.max_margin, ex.violated);

    const QuadraticExampleResult bad = quadratic_example_certificate(1.0, 1.0, 1.0, 0.1, 1.5);
    check(out, "hinfty.mu_ge_1_infeasible", !bad.feasible, 0.0, "expected infeasible");

    if (!ex.feasible) return;

    // certificate implies per-path dissipation for adversarial searches
    ExpectOptions eo;
    eo.dt = 0.02;
    eo.coarsen = 10;
    eo.restarts = 1;
    eo.max_sweeps = 15;
    eo.seed = seed;
    std::vector<Vec> inits;
    Rng rng(seed, 12);
    for (int i = 0; i < 5; ++i) inits.push_back(Vec{rng.uniform(-1.5, 1.5), 0.0});
    const DissipationSimReport rep =
        simulate_dissipation(ex.augmented, ex.storage, ex.policy, inits, 5.0, 1e-8, eo);
    check(out, "hinfty.dissipation_sim", rep.all_ok, rep.min_margin, "adversary found violation");

    // an uncertified storage (K below mu C2) is falsified by the optimizer
    StorageFunction weak;
    const double Kw = 0.5 * ex.mu;  // below mu C2 = 0.05
    weak.value = [Kw, mu = ex.mu](const Vec& xh) { return mu * xh[1] + Kw * xh[0] * xh[0]; };
    const DissipationSimReport repw = simulate_dissipation(
        ex.augmented, weak, ex.policy, {Vec{1.0, 0.0}}, 5.0, 1e-8, eo);
    check(out, "hinfty.falsification", !repw.all_ok, repw.min_margin,
          "expected a violating path");

    // small horizon sweep: monotone in T and dominated by the storage
    std::vector<Axis> axes = {Axis{-2.0, 2.0, 41}, Axis{0.0, 40.0, 21}};
    const HorizonSweepReport hs =
        v_infinity_sweep(ex.augmented, axes, {0.5, 1.0, 2.0}, 0.02, &ex.storage, threads);
    check(out, "hinfty.horizon_nondecreasing", hs.nondecreasing_ok, hs.min_increase, "");
    check(out, "hinfty.storage_dominates", *hs.w_domination_margin >= -1e-3,
          *hs.w_domination_margin, "");
}

}  // namespace

std::vector<PropertyResult> run_all_properties(const Config& cfg, uint64_t seed, int threads) {
    std::vector<PropertyResult> out;
    const int instances = cfg.get_int("property", "instances", 10000);
    const bool flip = cfg.get_string("property", "inject_fault", "none") == "flip_kh";
    maxplus_core_properties(out, seed);
    problem_properties(out, seed);
    auto ham = hamiltonian_random_properties(seed, instances, flip);
    out.insert(out.end(), ham.begin(), ham.end());
    solver_properties(out, seed, threads);
    trajectory_properties(out, seed, threads);
    risk_properties(out, threads);
    merton_properties(out, seed);
    hinfty_properties(out, seed, threads);
    return out;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

namespace {

int cmd_solve(const Config& cfg, const RunOptions& opts, bool fd) {
    FamilyBundle fb = build_from_config(cfg);
    if (!cfg.errors().empty()) return 1;
    Manifest man(fd ? "solve-pde" : "solve-qvi", opts.seed, opts.threads);
    man.set_config(cfg);
    const auto start = std::chrono::steady_clock::now();

    SolveOptions so;
    so.threads = opts.threads;
    ValueField field;
    if (fd) {
        const std::string form = cfg.get_string("solver", "form", "qvi");
        field = solve_pde_fd(fb.problem, fb.grid, form == "h" ? FdForm::h_form : FdForm::qvi, so);
    } else {
        field = solve_qvi_semilagrangian(fb.problem, fb.grid, so);
    }
    const std::string csv = join(opts.out_dir, "field.csv");
    field.write_csv(csv);
    man.add_artifact("field.csv");
    if (cfg.get_bool("output", "write_binary", false)) {
        field.write_binary(join(opts.out_dir, "field.bin"));
        man.add_artifact("field.bin");
    }
    double vmin = kPlusInf, vmax = kMinusInf;
    for (double v : field.data) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    std::printf("solved %s: %zu points x %d steps, V in [%.6g, %.6g]\n", fb.problem.name.c_str(),
                field.npts(), field.grid.steps, vmin, vmax);
    man.add_note("v_min", std::to_string(vmin));
    man.add_note("v_max", std::to_string(vmax));
    const auto end = std::chrono::steady_clock::now();
    man.write(join(opts.out_dir, "manifest.txt"), std::chrono::duration<double>(end - start).count());
    return 0;
}

int cmd_eval_policy(const Config& cfg, const RunOptions& opts) {
    FamilyBundle fb = build_from_config(cfg);
    if (!cfg.errors().empty()) return 1;
    Manifest man("eval-policy", opts.seed, opts.threads);
    man.set_config(cfg);
    const auto start = std::chrono::steady_clock::now();

    SolveOptions so;
    so.threads = opts.threads;
    const ValueField w = solve_qvi_semilagrangian(fb.problem, fb.grid, so);

    const std::string kind = cfg.get_string("policy", "kind", "argmin");
    Policy pol;
    if (kind == "argmin") {
        pol = make_field_argmin_policy(fb.problem, w);
    } else if (kind == "farthest") {
        pol = make_farthest_policy(fb.problem, w);
    } else if (kind == "constant") {
        const auto u = cfg.get_list("policy", "u", {0.0});
        pol = Policy::constant(u, "constant");
    } else {
        cfg.add_error("policy.kind", "expected argmin | farthest | constant");
        return 1;
    }

    const auto xs = cfg.get_list("policy", "samples", {-0.9, -0.5, 0.0, 0.5, 0.9});
    std::vector<Vec> samples;
    for (double x : xs) samples.push_back(Vec{x});
    ExpectOptions eo;
    eo.dt = cfg.get_double("expect", "dt", 0.01);
    eo.coarsen = cfg.get_int("expect", "coarsen", 5);
    eo.restarts = cfg.get_int("expect", "restarts", 3);
    eo.seed = opts.seed;
    const bool two_sided = kind == "argmin";
    const LowerBoundReport rep = verify_lower_bound(
        fb.problem, pol, w, samples, opts.tol, eo,
        two_sided ? std::optional<double>(opts.tol) : std::nullopt);

    CsvTable tab;
    tab.header = {"x0", "W", "J", "margin", "ok"};
    for (const auto& r : rep.rows)
        tab.rows.push_back({r.x0[0], r.w_value, r.j_value, r.margin, r.ok ? 1.0 : 0.0});
    tab.write(join(opts.out_dir, "policy_report.csv"));
    man.add_artifact("policy_report.csv");
    std::printf("eval-policy %s: %zu samples, min margin %.3g, %s\n", kind.c_str(),
                rep.rows.size(), rep.min_margin, rep.all_ok ? "all ok" : "violations recorded");
    const auto end = std::chrono::steady_clock::now();
    man.write(join(opts.out_dir, "manifest.txt"), std::chrono::duration<double>(end - start).count());
    return 0;
}

int cmd_expect(const Config& cfg, const RunOptions& opts) {
    FamilyBundle fb = build_from_config(cfg);
    if (!cfg.errors().empty()) return 1;
    Manifest man("maxplus-expect", opts.seed, opts.threads);
    man.set_config(cfg);
    const auto start = std::chrono::steady_clock::now();

    const auto u = cfg.get_list("expect", "u", {0.0});
    const Policy pol = Policy::constant(u, "constant");
    const double x0 = cfg.get_double("expect", "x0", 0.0);
    ExpectOptions eo;
    eo.dt = cfg.get_double("expect", "dt", 0.01);
    eo.coarsen = cfg.get_int("expect", "coarsen", 5);
    eo.restarts = cfg.get_int("expect", "restarts", 3);
    eo.seed = opts.seed;
    Vec x0v(fb.problem.state_dim, 0.0);
    x0v[0] = x0;
    const ExpectResult er =
        maxplus_expectation_policy(fb.problem, pol, fb.grid.t0, x0v, fb.grid.T, eo);

    CsvTable diag;
    diag.header = {"start", "initial", "refined"};
    for (size_t i = 0; i < er.starts.size(); ++i)
        diag.rows.push_back({static_cast<double>(i), er.starts[i].initial_payoff,
                             er.starts[i].refined_payoff});
    diag.write(join(opts.out_dir, "expect_starts.csv"));
    man.add_artifact("expect_starts.csv");

    CsvTable path;
    path.header = {"t", "v"};
    for (int j = 0; j < er.argmax.intervals(); ++j)
        path.rows.push_back({er.argmax.times[j], er.argmax.values[j][0]});
    path.write(join(opts.out_dir, "expect_argmax.csv"));
    man.add_artifact("expect_argmax.csv");

    std::printf("maxplus-expect: lower bound %.9g (best of %zu starts)\n", er.value,
                er.starts.size());
    man.add_note("value_lower_bound", std::to_string(er.value));
    const auto end = std::chrono::steady_clock::now();
    man.write(join(opts.out_dir, "manifest.txt"), std::chrono::duration<double>(end - start).count());
    return 0;
}

int cmd_risk_limit(const Config& cfg, const RunOptions& opts) {
    FamilyBundle fb = build_from_config(cfg);
    if (!cfg.errors().empty()) return 1;
    Manifest man("risk-limit", opts.seed, opts.threads);
    man.set_config(cfg);
    const auto start = std::chrono::steady_clock::now();

    SolveOptions so;
    so.threads = opts.threads;
    const ValueField ref = solve_qvi_semilagrangian(fb.problem, fb.grid, so);
    const auto thetas = cfg.get_list("sweep", "thetas", {2, 5, 10, 20, 50});
    const double target = cfg.get_double("sweep", "target", 0.15);
    const ThetaSweepReport rep = convergence_study(fb.problem, fb.grid, thetas, ref, target);

    CsvTable tab;
    tab.header = {"theta", "sup_distance", "clamp_rate", "runtime_s"};
    SvgSeries series;
    series.label = "sup distance";
    for (size_t i = 0; i < rep.thetas.size(); ++i) {
        tab.rows.push_back(
            {rep.thetas[i], rep.distances[i], rep.clamp_rates[i], rep.runtimes_s[i]});
        series.x.push_back(rep.thetas[i]);
        series.y.push_back(rep.distances[i]);
    }
    tab.write(join(opts.out_dir, "risk_limit.csv"));
    man.add_artifact("risk_limit.csv");
    write_svg_chart(join(opts.out_dir, "risk_limit.svg"), "distance to the worst-case value",
                    "theta", "sup distance", {series}, true);
    man.add_artifact("risk_limit.svg");

    std::printf("risk-limit: final distance %.4g (target %.4g), nonincreasing=%s\n",
                rep.final_distance, target, rep.nonincreasing_ok ? "yes" : "no");
    const auto end = std::chrono::steady_clock::now();
    man.write(join(opts.out_dir, "manifest.txt"), std::chrono::duration<double>(end - start).count());
    return rep.final_ok && rep.nonincreasing_ok ? 0 : 3;
}

int cmd_merton_oracle(const Config& cfg, const RunOptions& opts) {
    Manifest man("merton-oracle", opts.seed, opts.threads);
    man.set_config(cfg);
    const auto start = std::chrono::steady_clock::now();
    MertonParams mp;
    mp.mu = cfg.get_double("merton", "mu", 0.1);
    mp.r = cfg.get_double("merton", "r", 0.05);
    mp.sigma_bar2 = cfg.get_double("merton", "sigma_bar2", 0.04);
    mp.Sigma2 = cfg.get_double("merton", "Sigma2", 0.04);
    mp.theta = cfg.get_double("merton", "theta", 1.0);
    mp.T = cfg.get_double("merton", "T", 1.0);
    const double C = cfg.get_double("merton", "cap", 1.0);
    const int npts = cfg.get_int("merton", "curve_points", 200);
    const ModifiedMerton mm = modified_merton_problem(mp, C);

    CsvTable tab;
    tab.header = {"t", "B", "c_star", "B_tilde", "c_tilde_star"};
    for (int i = 0; i < npts; ++i) {
        const double t = mp.T * i / npts;
        tab.rows.push_back(
            {t, merton_B(mp, t), merton_c_star(mp, t), mm.B_tilde(t), mm.c_star(t)});
    }
    tab.write(join(opts.out_dir, "merton_curves.csv"));
    man.add_artifact("merton_curves.csv");
    const auto [r1, r2] = qvi_identity_check(mp, 0.5 * mp.T);
    std::printf("merton-oracle: identity residuals %.3g / %.3g at t = T/2\n", r1, r2);
    const auto end = std::chrono::steady_clock::now();
    man.write(join(opts.out_dir, "manifest.txt"), std::chrono::duration<double>(end - start).count());
    return 0;
}

int cmd_merton_check(const Config& cfg, const RunOptions& opts) {
    Config c2 = cfg;
    c2.set("problem", "family", "merton_modified");
    FamilyBundle fb = build_from_config(c2);
    if (!c2.errors().empty()) {
        for (const auto& e : c2.errors()) std::fprintf(stderr, "config: %s\n", e.c_str());
        return 1;
    }
    Manifest man("merton-check", opts.seed, opts.threads);
    man.set_config(c2);
    const auto start = std::chrono::steady_clock::now();

    SolveOptions so;
    so.threads = opts.threads;
    const ValueField f = solve_qvi_semilagrangian(fb.problem, fb.grid, so);
    double sup = 0.0;
    CsvTable tab;
    tab.header = {"t", "sup_error_inner"};
    for (int k = 0; k <= fb.grid.steps; ++k) {
        double se = 0.0;
        for (size_t i = 0; i < f.npts(); ++i) {
            const Vec y = fb.grid.point(i);
            if (std::abs(y[0]) > 1.0 + 1e-12) continue;
            se = std::max(se, std::abs(f.at(k, i) - fb.merton->oracle(fb.grid.time(k), y[0])));
        }
        tab.rows.push_back({fb.grid.time(k), se});
        sup = std::max(sup, se);
    }
    tab.write(join(opts.out_dir, "merton_check.csv"));
    man.add_artifact("merton_check.csv");
    std::printf("merton-check: sup error vs closed-form time part = %.6g (tol %.3g)\n", sup,
                opts.tol);
    man.add_note("sup_error", std::to_string(sup));
    const auto end = std::chrono::steady_clock::now();
    man.write(join(opts.out_dir, "manifest.txt"), std::chrono::duration<double>(end - start).count());
    return sup <= opts.tol ? 0 : 3;
}

int cmd_hinfty_certify(const Config& cfg, const RunOptions& opts) {
    Manifest man("hinfty-certify", opts.seed, opts.threads);
    man.set_config(cfg);
    const auto start = std::chrono::steady_clock::now();
    const double c = cfg.get_double("hinfty", "c", 1.0);
    const double C1 = cfg.get_double("hinfty", "C1", 1.0);
    const double C2 = cfg.get_double("hinfty", "C2", 1.0);
    const double a_norm = cfg.get_double("hinfty", "a_norm", 0.1);
    const double mu = cfg.get_double("hinfty", "mu", 0.05);
    const QuadraticExampleResult ex = quadratic_example_certificate(c, C1, C2, a_norm, mu);

    std::FILE* rf = std::fopen(join(opts.out_dir, "certificate.txt").c_str(), "w");
    std::fprintf(rf, "feasible = %s\n", ex.feasible ? "yes" : "no");
    if (ex.feasible) {
        std::fprintf(rf, "K = %.17g\n", ex.K);
        std::fprintf(rf, "max_margin = %.17g\n", ex.certificate.max_margin);
        std::fprintf(rf, "pass = %s\n", ex.certificate.pass ? "yes" : "no");
    } else {
        std::fprintf(rf, "violated = %s\n", ex.violated.c_str());
    }
    std::fclose(rf);
    man.add_artifact("certificate.txt");

    if (ex.feasible) {
        CsvTable tab;
        tab.header = {"x", "x2", "margin_h", "margin_obs", "margin"};
        for (const auto& pt : ex.certificate.points)
            tab.rows.push_back({pt.y[0], pt.y[1], pt.margin_h, pt.margin_obs, pt.margin});
        tab.write(join(opts.out_dir, "margins.csv"));
        man.add_artifact("margins.csv");
        std::printf("hinfty-certify: K = %.4g, max margin %.3g, %s\n", ex.K,
                    ex.certificate.max_margin, ex.certificate.pass ? "pass" : "FAIL");
    } else {
        std::printf("hinfty-certify: infeasible (%s)\n", ex.violated.c_str());
    }
    const auto end = std::chrono::steady_clock::now();
    man.write(join(opts.out_dir, "manifest.txt"), std::chrono::duration<double>(end - start).count());
    return 0;
}

int cmd_hinfty_sweep(const Config& cfg, const RunOptions& opts) {
    Manifest man("hinfty-sweep", opts.seed, opts.threads);
    man.set_config(cfg);
    const auto start = std::chrono::steady_clock::now();
    const double c = cfg.get_double("hinfty", "c", 1.0);
    const double C1 = cfg.get_double("hinfty", "C1", 1.0);
    const double C2 = cfg.get_double("hinfty", "C2", 1.0);
    const double a_norm = cfg.get_double("hinfty", "a_norm", 0.1);
    const double mu = cfg.get_double("hinfty", "mu", 0.05);
    const QuadraticExampleResult ex = quadratic_example_certificate(c, C1, C2, a_norm, mu);
    if (!ex.feasible) {
        std::printf("hinfty-sweep: certificate infeasible, sweep on the raw instance\n");
    }
    const auto horizons = cfg.get_list("sweep", "horizons", {0.5, 1, 2, 4, 8});
    const double delta = cfg.get_double("sweep", "delta", 0.02);
    std::vector<Axis> axes = {Axis{cfg.get_double("grid", "x_min", -2.0),
                                   cfg.get_double("grid", "x_max", 2.0),
                                   cfg.get_int("grid", "x_points", 61)},
                              Axis{0.0, cfg.get_double("grid", "x2_max", 40.0),
                                   cfg.get_int("grid", "x2_points", 41)}};
    const HorizonSweepReport rep = v_infinity_sweep(
        ex.augmented, axes, horizons, delta, ex.feasible ? &ex.storage : nullptr, opts.threads);

    CsvTable tab;
    tab.header = {"T", "steady_residual_sup"};
    SvgSeries s1;
    s1.label = "steady residual";
    for (size_t i = 0; i < horizons.size(); ++i) {
        tab.rows.push_back({horizons[i], rep.steady_residual_sup[i]});
        s1.x.push_back(horizons[i]);
        s1.y.push_back(rep.steady_residual_sup[i]);
    }
    tab.write(join(opts.out_dir, "hinfty_sweep.csv"));
    man.add_artifact("hinfty_sweep.csv");
    write_svg_chart(join(opts.out_dir, "hinfty_sweep.svg"), "steady-state residual vs horizon",
                    "T", "residual", {s1});
    man.add_artifact("hinfty_sweep.svg");
    std::string dom_note;
    if (rep.w_domination_margin)
        dom_note = " storage margin=" + std::to_string(*rep.w_domination_margin);
    std::printf("hinfty-sweep: nondecreasing=%s min_increase=%.3g%s\n",
                rep.nondecreasing_ok ? "yes" : "no", rep.min_increase, dom_note.c_str());
    const auto end = std::chrono::steady_clock::now();
    man.write(join(opts.out_dir, "manifest.txt"), std::chrono::duration<double>(end - start).count());
    return rep.nondecreasing_ok ? 0 : 3;
}

int cmd_property_suite(const Config& cfg, const RunOptions& opts) {
    Manifest man("property-suite", opts.seed, opts.threads);
    man.set_config(cfg);
    const auto start = std::chrono::steady_clock::now();
    const auto results = run_all_properties(cfg, opts.seed, opts.threads);

    CsvTable tab;
    tab.header = {"index", "pass", "worst"};
    std::FILE* rf = std::fopen(join(opts.out_dir, "properties.txt").c_str(), "w");
    bool all_ok = true;
    for (size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        tab.rows.push_back({static_cast<double>(i), r.pass ? 1.0 : 0.0, r.worst});
        std::fprintf(rf, "%s = %s (worst %.6g)%s%s\n", r.name.c_str(), r.pass ? "pass" : "FAIL",
                     r.worst, r.detail.empty() ? "" : " ", r.detail.c_str());
        if (!r.pass) {
            all_ok = false;
            std::printf("property FAIL: %s %s\n", r.name.c_str(), r.detail.c_str());
            // serialized failing instance for replay
            std::FILE* inst = std::fopen(join(opts.out_dir, "failing_instance.txt").c_str(), "a");
            std::fprintf(inst, "%s: %s (seed %llu)\n", r.name.c_str(), r.detail.c_str(),
                         static_cast<unsigned long long>(opts.seed));
            std::fclose(inst);
            man.add_artifact("failing_instance.txt");
        }
    }
    std::fclose(rf);
    tab.write(join(opts.out_dir, "properties.csv"));
    man.add_artifact("properties.csv");
    man.add_artifact("properties.txt");
    std::printf("property-suite: %zu properties, %s\n", results.size(),
                all_ok ? "all pass" : "FAILURES");
    const auto end = std::chrono::steady_clock::now();
    man.write(join(opts.out_dir, "manifest.txt"), std::chrono::duration<double>(end - start).count());
    return all_ok ? 0 : 3;
}

}  // namespace

int run_subcommand(const std::string& name, const Config& cfg, const RunOptions& opts) {
    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) {
        std::fprintf(stderr, "cannot create output directory %s\n", opts.out_dir.c_str());
        return 1;
    }
    try {
        int code = 0;
        if (name == "solve-qvi")
            code = cmd_solve(cfg, opts, false);
        else if (name == "solve-pde")
            code = cmd_solve(cfg, opts, true);
        else if (name == "eval-policy")
            code = cmd_eval_policy(cfg, opts);
        else if (name == "maxplus-expect")
            code = cmd_expect(cfg, opts);
        else if (name == "risk-limit")
            code = cmd_risk_limit(cfg, opts);
        else if (name == "merton-oracle")
            code = cmd_merton_oracle(cfg, opts);
        else if (name == "merton-check")
            code = cmd_merton_check(cfg, opts);
        else if (name == "hinfty-certify")
            code = cmd_hinfty_certify(cfg, opts);
        else if (name == "hinfty-sweep")
            code = cmd_hinfty_sweep(cfg, opts);
        else if (name == "property-suite")
            code = cmd_property_suite(cfg, opts);
        else {
            std::fprintf(stderr, "unknown subcommand: %s\n", name.c_str());
            return 1;
        }
        if (!cfg.errors().empty()) {
            for (const auto& e : cfg.errors()) std::fprintf(stderr, "config: %s\n", e.c_str());
            return 1;
        }
        return code;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 2;
    }
}

}  // namespace maxplus
