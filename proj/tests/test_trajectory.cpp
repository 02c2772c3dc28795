#include <doctest.h>

#include <cmath>
#include <fstream>

#include "maxplus/families.hpp"
#include "maxplus/solver.hpp"
#include "maxplus/trajectory.hpp"

using namespace maxplus;

namespace {

ControlProblem toy_problem() {  // f = 0, sigma = 1, l = x
    ControlProblem p;
    p.state_dim = p.dist_dim = 1;
    p.name = "toy";
    p.drift = [](const Vec&, const Vec&) { return Vec{0.0}; };
    p.sigma = [](const Vec&, const Vec&) {
        Mat m(1, 1);
        m(0, 0) = 1.0;
        return m;
    };
    p.running_cost = [](const Vec& x, const Vec&) { return x[0]; };
    p.controls = ControlSet({Vec{0.0}});
    p.domain = Box{{-3.0}, {3.0}};
    p.bound_f = 0.0;
    p.bound_sigma = 1.0;
    p.lip_l_x = 1.0;
    return p;
}

}  // namespace

TEST_CASE("integration basics") {
    const Policy pol = Policy::constant(Vec{0.0});

    SUBCASE("frozen dynamics stay put") {
        ControlProblem p = toy_problem();
        p.sigma = [](const Vec&, const Vec&) { return Mat(1, 1); };
        const auto v = DisturbancePath::zero(0.0, 1.0, 4, 1);
        const auto tr = integrate(p, pol, v, 0.0, {0.7}, 1.0, 0.05);
        for (const auto& x : tr.states) CHECK(x[0] == 0.7);
    }
    SUBCASE("unit disturbance integrates exactly") {
        ControlProblem p = toy_problem();
        DisturbancePath v = DisturbancePath::zero(0.0, 1.0, 4, 1);
        for (auto& vv : v.values) vv[0] = 1.0;
        const auto tr = integrate(p, pol, v, 0.0, {0.0}, 1.0, 0.01);
        CHECK(tr.states.back()[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("linear decay matches the exponential") {
        ControlProblem p = toy_problem();
        p.drift = [](const Vec& x, const Vec&) { return Vec{-x[0]}; };
        p.sigma = [](const Vec&, const Vec&) { return Mat(1, 1); };
        const auto v = DisturbancePath::zero(0.0, 1.0, 4, 1);
        const auto tr = integrate(p, pol, v, 0.0, {1.0}, 1.0, 1e-3);
        CHECK(std::abs(tr.states.back()[0] - std::exp(-1.0)) <= 1e-8);
        write_trajectory_csv(tr, "/tmp/mpx_traj_test.csv");
        std::ifstream f("/tmp/mpx_traj_test.csv");
        std::string header;
        std::getline(f, header);
        CHECK(header == "s,x0,u0,v0");
    }
    SUBCASE("blow-up guard trips on mis-scaled problems") {
        ControlProblem p = toy_problem();
        p.drift = [](const Vec& x, const Vec&) { return Vec{10.0 * x[0]}; };
        const auto v = DisturbancePath::zero(0.0, 1.0, 4, 1);
        CHECK_THROWS_WITH_AS(integrate(p, pol, v, 0.0, {1.0}, 1.0, 0.01),
                             doctest::Contains("blow-up"), std::runtime_error);
    }
}

TEST_CASE("sup-over-time cost and payoff") {
    const ControlProblem p = toy_problem();
    const Policy pol = Policy::constant(Vec{0.0});
    DisturbancePath v = DisturbancePath::zero(0.0, 1.0, 4, 1);
    for (auto& vv : v.values) vv[0] = 1.0;
    const auto tr = integrate(p, pol, v, 0.0, {0.0}, 1.0, 0.01);

    SUBCASE("constant cost") {
        ControlProblem pc = p;
        pc.running_cost = [](const Vec&, const Vec&) { return 3.0; };
        CHECK(maxplus_cost(tr, pc) == 3.0);
    }
    SUBCASE("monotone state: cost attained at the final time") {
        CHECK(maxplus_cost(tr, p) == tr.states.back()[0]);
        CHECK(maxplus_cost(tr, p) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("payoff subtracts the disturbance energy") {
        CHECK(v.energy() == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(game_payoff(tr, v, p) == doctest::Approx(0.5).epsilon(1e-11));
        const auto v0 = DisturbancePath::zero(0.0, 1.0, 4, 1);
        const auto tr0 = integrate(p, pol, v0, 0.0, {0.0}, 1.0, 0.01);
        CHECK(game_payoff(tr0, v0, p) == maxplus_cost(tr0, p));
        ControlProblem pz = p;
        pz.running_cost = [](const Vec&, const Vec&) { return 0.0; };
        CHECK(game_payoff(tr, v, pz) == -v.energy());
    }
}

TEST_CASE("disturbance optimizer on the toy problem") {
    const ControlProblem p = toy_problem();
    const Policy pol = Policy::constant(Vec{0.0});
    ExpectOptions eo;
    eo.dt = 0.005;
    eo.coarsen = 5;
    eo.restarts = 2;
    eo.seed = 11;
    const ExpectResult er = maxplus_expectation_policy(p, pol, 0.0, {0.0}, 1.0, eo);
    // continuum optimum v = 1: payoff 1 - 1/2
    CHECK(std::abs(er.value - 0.5) <= 1e-3);
    CHECK(er.starts.size() >= 3);
    // the sup dominates the zero-disturbance payoff
    const auto v0 = DisturbancePath::zero(0.0, 1.0, 40, 1);
    const double pay0 = game_payoff(integrate(p, pol, v0, 0.0, {0.0}, 1.0, 0.005), v0, p);
    CHECK(er.value >= pay0);
}

TEST_CASE("no disturbance channel: optimizer returns the deterministic payoff") {
    ControlProblem p = toy_problem();
    p.sigma = [](const Vec&, const Vec&) { return Mat(1, 1); };
    p.running_cost = [](const Vec& x, const Vec&) { return x[0] * x[0]; };
    const Policy pol = Policy::constant(Vec{0.0});
    ExpectOptions eo;
    eo.dt = 0.01;
    eo.restarts = 1;
    const ExpectResult er = maxplus_expectation_policy(p, pol, 0.0, {0.8}, 1.0, eo);
    // x frozen at 0.8, any disturbance only costs energy
    CHECK(er.value == doctest::Approx(0.64).epsilon(1e-12));
}

TEST_CASE("closed-system worst case") {
    const ControlProblem p = canonical_problem();
    Grid g = canonical_grid(81, 80);

    SUBCASE("zero field gradient gives zero disturbance") {
        ValueField w(g);  // identically zero
        const auto [tr, v] = closed_system_worst_case(p, Policy::constant(Vec{0.0}), w, 0.0,
                                                      {0.5}, 0.0125);
        for (const auto& vv : v.values) CHECK(vv[0] == 0.0);
    }
    SUBCASE("linear field: disturbance = sigma, drift shifted") {
        ValueField w(g);
        for (int k = 0; k <= g.steps; ++k)
            for (size_t i = 0; i < w.npts(); ++i) w.at(k, i) = g.point(i)[0];
        const auto [tr, v] = closed_system_worst_case(p, Policy::constant(Vec{0.0}), w, 0.0,
                                                      {0.0}, 0.0125);
        // grad W = 1, sigma = 0.5 so v = 0.5 along the whole path
        for (const auto& vv : v.values) CHECK(vv[0] == doctest::Approx(0.5).epsilon(1e-9));
    }
}

TEST_CASE("lower-bound verification against the solved field") {
    const ControlProblem p = canonical_problem();
    // sample states sit on grid nodes: the floor-riding values are exact there
    Grid g = canonical_grid(201, 200);
    const ValueField w = solve_qvi_semilagrangian(p, g);
    ExpectOptions eo;
    eo.dt = 0.01;
    eo.coarsen = 5;
    eo.restarts = 2;
    eo.seed = 3;

    SUBCASE("argmin policy matches the field value") {
        const Policy pol = make_field_argmin_policy(p, w);
        const LowerBoundReport rep =
            verify_lower_bound(p, pol, w, {Vec{-0.5}, Vec{0.0}, Vec{0.5}}, 0.05, eo, 0.05);
        INFO("min margin ", rep.min_margin);
        CHECK(rep.all_ok);
    }
    SUBCASE("bad policies still observe the lower bound") {
        for (const Policy& pol :
             {Policy::constant(Vec{1.0}), Policy::constant(Vec{-1.0}), make_farthest_policy(p, w)}) {
            const LowerBoundReport rep =
                verify_lower_bound(p, pol, w, {Vec{-0.5}, Vec{0.5}}, 1e-6, eo);
            INFO(pol.label, " min margin ", rep.min_margin);
            CHECK(rep.all_ok);
        }
    }
}

TEST_CASE("constant-cost problem: every policy value equals the cost") {
    ControlProblem p = canonical_problem();
    p.running_cost = [](const Vec&, const Vec&) { return 2.0; };
    p.lip_l_x = 0.0;
    Grid g = canonical_grid(41, 40);
    const ValueField w = solve_qvi_semilagrangian(p, g);
    ExpectOptions eo;
    eo.dt = 0.01;
    eo.restarts = 1;
    const ExpectResult er =
        maxplus_expectation_policy(p, Policy::constant(Vec{0.0}), 0.0, {0.0}, 1.0, eo);
    CHECK(er.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(w.value(0.0, {0.0}) == 2.0);
}
