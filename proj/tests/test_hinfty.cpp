#include <doctest.h>

#include <cmath>

#include "maxplus/hinfty.hpp"

using namespace maxplus;

TEST_CASE("certificate checker on hand instances") {
    SUBCASE("stable flow with negative cost passes trivially") {
        ControlProblem p;
        p.state_dim = p.dist_dim = 1;
        p.drift = [](const Vec& x, const Vec&) { return Vec{-x[0]}; };
        p.sigma = [](const Vec&, const Vec&) { return Mat(1, 1); };
        p.running_cost = [](const Vec&, const Vec&) { return -1.0; };
        p.controls = ControlSet({Vec{0.0}});
        p.domain = Box{{-2.0}, {2.0}};
        StorageFunction w;
        w.value = [](const Vec&) { return 0.0; };
        w.gradient = [](const Vec&) { return Vec{0.0}; };
        std::vector<Vec> grid;
        for (int i = -5; i <= 5; ++i) grid.push_back(Vec{0.4 * i});
        const Certificate cert =
            check_dissipation_certificate(p, w, Policy::constant(Vec{0.0}), grid);
        CHECK(cert.pass);
        // flat storage: the dynamics branch is 0, the cost branch -1
        CHECK(cert.max_margin == 0.0);
        for (const auto& pt : cert.points) CHECK(pt.margin_obs == -1.0);
    }
    SUBCASE("too-aggressive quadratic storage fails at large states") {
        // K a >= c makes the quadratic term beat the stable drift
        const double c = 1.0, a = 0.5, K = 3.0;
        ControlProblem p;
        p.state_dim = p.dist_dim = 1;
        p.drift = [c](const Vec& x, const Vec&) { return Vec{-c * x[0]}; };
        p.sigma = [a](const Vec&, const Vec&) {
            Mat m(1, 1);
            m(0, 0) = std::sqrt(a);
            return m;
        };
        p.running_cost = [](const Vec&, const Vec&) { return 0.0; };
        p.controls = ControlSet({Vec{0.0}});
        p.domain = Box{{-4.0}, {4.0}};
        StorageFunction w;
        w.value = [K](const Vec& x) { return K * x[0] * x[0]; };
        w.gradient = [K](const Vec& x) { return Vec{2.0 * K * x[0]}; };
        const Certificate cert = check_dissipation_certificate(
            p, w, Policy::constant(Vec{0.0}), {Vec{0.0}, Vec{3.0}});
        CHECK(!cert.pass);
        CHECK(cert.points[1].margin_h > 0.0);  // 2K(Ka - c) x^2 > 0
        // finite-difference gradient path agrees with the analytic one
        StorageFunction wfd = w;
        wfd.gradient = nullptr;
        const Certificate cfd = check_dissipation_certificate(
            p, wfd, Policy::constant(Vec{0.0}), {Vec{3.0}});
        CHECK(cfd.points[0].margin_h ==
              doctest::Approx(cert.points[1].margin_h).epsilon(1e-6));
    }
}

TEST_CASE("augmented embedding") {
    ControlProblem base;
    base.state_dim = base.dist_dim = 1;
    base.drift = [](const Vec& x, const Vec&) { return Vec{-x[0]}; };
    base.sigma = [](const Vec&, const Vec&) {
        Mat m(1, 1);
        m(0, 0) = 0.3;
        return m;
    };
    base.running_cost = [](const Vec&, const Vec&) { return 0.0; };
    base.controls = ControlSet({Vec{0.0}});
    base.domain = Box{{-2.0}, {2.0}};

    SUBCASE("zero integrand and terminal weight give zero cost") {
        const ControlProblem aug = augmented_embedding(
            base, [](const Vec&, const Vec&) { return 0.0; }, [](const Vec&) { return 0.0; },
            1.0);
        const auto v = DisturbancePath::zero(0.0, 1.0, 4, 1);
        const auto tr = integrate(aug, Policy::constant(Vec{0.0}), v, 0.0, {1.0, 0.0}, 1.0, 0.01);
        CHECK(maxplus_cost(tr, aug) == 0.0);
    }
    SUBCASE("accumulator integrates the running integrand") {
        const ControlProblem aug = augmented_embedding(
            base, [](const Vec& x, const Vec&) { return x[0] * x[0]; },
            [](const Vec&) { return 0.0; }, 1.0);
        const auto v = DisturbancePath::zero(0.0, 1.0, 4, 1);
        const auto tr = integrate(aug, Policy::constant(Vec{0.0}), v, 0.0, {1.0, 0.0}, 1.0, 1e-3);
        // integral of e^{-2s} over [0,1]
        const double expected = 0.5 * (1.0 - std::exp(-2.0));
        CHECK(tr.states.back()[1] == doctest::Approx(expected).epsilon(1e-8));
        CHECK(maxplus_cost(tr, aug) == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("quadratic example feasibility search") {
    SUBCASE("reference parameters certify") {
        const auto ex = quadratic_example_certificate(1.0, 1.0, 1.0, 0.1, 0.05);
        REQUIRE(ex.feasible);
        // hand-checkable: K = 0.1 satisfies all four inequalities, the grid
        // search lands nearby
        CHECK(ex.K < 10.0 * 0.1);
        CHECK(0.05 < ex.K);
        CHECK(1.0 * 0.05 + 2.0 * ex.K * ex.K * 0.01 - ex.K <= 0.0);
        CHECK(ex.certificate.pass);
        CHECK(ex.certificate.max_margin <= 1e-9);
    }
    SUBCASE("mu >= 1 is rejected outright") {
        const auto ex = quadratic_example_certificate(1.0, 1.0, 1.0, 0.1, 1.0);
        CHECK(!ex.feasible);
        CHECK(ex.violated == "mu < 1");
    }
    SUBCASE("no integrand and tiny weight certify with any small K") {
        const auto ex = quadratic_example_certificate(1.0, 0.0, 1.0, 0.1, 1e-4);
        CHECK(ex.feasible);
        CHECK(ex.certificate.pass);
    }
}

TEST_CASE("adversarial dissipation simulations") {
    const auto ex = quadratic_example_certificate(1.0, 1.0, 1.0, 0.1, 0.05);
    REQUIRE(ex.feasible);
    ExpectOptions eo;
    eo.dt = 0.01;
    eo.coarsen = 10;
    eo.restarts = 1;
    eo.max_sweeps = 12;
    eo.seed = 21;

    SUBCASE("certified storage survives the adversary") {
        const auto rep = simulate_dissipation(ex.augmented, ex.storage, ex.policy,
                                              {Vec{0.0, 0.0}, Vec{1.0, 0.0}, Vec{-1.5, 0.0}},
                                              5.0, 1e-8, eo);
        INFO("min margin ", rep.min_margin);
        CHECK(rep.all_ok);
    }
    SUBCASE("zero disturbance on the certified instance stays below storage") {
        const auto v = DisturbancePath::zero(0.0, 5.0, 10, 1);
        const auto tr = integrate(ex.augmented, ex.policy, v, 0.0, {1.0, 0.0}, 5.0, 0.01);
        for (size_t k = 0; k < tr.states.size(); ++k)
            CHECK(ex.augmented.running_cost(tr.states[k], {0.0}) <=
                  ex.storage.value(tr.states[k]) + 1e-12);
    }
    SUBCASE("an understated storage level is falsified") {
        StorageFunction weak;
        weak.value = [mu = ex.mu](const Vec& xh) {
            return mu * xh[1] + 0.5 * mu * xh[0] * xh[0];  // below the cost weight mu C2
        };
        const auto rep =
            simulate_dissipation(ex.augmented, weak, ex.policy, {Vec{1.0, 0.0}}, 5.0, 1e-8, eo);
        CHECK(!rep.all_ok);
    }
}

TEST_CASE("horizon sweep") {
    SUBCASE("constant cost: flat in the horizon with zero residual") {
        ControlProblem p;
        p.state_dim = p.dist_dim = 1;
        p.drift = [](const Vec& x, const Vec&) { return Vec{-x[0]}; };
        p.sigma = [](const Vec&, const Vec&) {
            Mat m(1, 1);
            m(0, 0) = 0.3;
            return m;
        };
        p.running_cost = [](const Vec&, const Vec&) { return 2.0; };
        p.controls = ControlSet({Vec{0.0}});
        p.domain = Box{{-2.0}, {2.0}};
        p.bound_f = 2.0;
        p.bound_sigma = 0.3;
        const auto rep = v_infinity_sweep(p, {Axis{-2.0, 2.0, 21}}, {0.5, 1.0, 2.0}, 0.05);
        CHECK(rep.nondecreasing_ok);
        for (const auto& slice : rep.value_at_t0)
            for (double v : slice) CHECK(v == 2.0);
        for (double r : rep.steady_residual_sup) CHECK(r == 0.0);
    }
    SUBCASE("certified instance: monotone, dominated, residual settling") {
        const auto ex = quadratic_example_certificate(1.0, 1.0, 1.0, 0.1, 0.05);
        REQUIRE(ex.feasible);
        const auto rep =
            v_infinity_sweep(ex.augmented, {Axis{-2.0, 2.0, 31}, Axis{0.0, 40.0, 11}},
                             {0.5, 1.0, 2.0, 4.0}, 0.025, &ex.storage);
        CHECK(rep.nondecreasing_ok);
        CHECK(rep.min_increase >= -1e-12);
        REQUIRE(rep.w_domination_margin);
        CHECK(*rep.w_domination_margin >= -1e-3);
        CHECK(rep.steady_residual_sup.back() <= rep.steady_residual_sup.front() * 1.1 + 1e-10);
    }
}
