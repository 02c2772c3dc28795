#include <doctest.h>

#include <cmath>

#include "maxplus/families.hpp"
#include "maxplus/solver.hpp"

using namespace maxplus;

namespace {

ControlProblem constant_cost_problem(double c) {
    ControlProblem p = canonical_problem();
    p.running_cost = [c](const Vec&, const Vec&) { return c; };
    p.lip_l_x = 0.0;
    return p;
}

}  // namespace

TEST_CASE("constant running cost is a fixed point of both schemes") {
    const ControlProblem p = constant_cost_problem(1.25);
    Grid g = canonical_grid(41, 30);
    const ValueField sl = solve_qvi_semilagrangian(p, g);
    for (double v : sl.data) CHECK(v == 1.25);
    Grid gf = g;
    gf.steps = 60;  // CFL for the 41-point grid
    const ValueField fd = solve_pde_fd(p, gf, FdForm::qvi);
    for (double v : fd.data) CHECK(v == doctest::Approx(1.25).epsilon(1e-14));
    const ValueField fh = solve_pde_fd(p, gf, FdForm::h_form);
    for (double v : fh.data) CHECK(v == doctest::Approx(1.25).epsilon(1e-14));
}

TEST_CASE("singleton control set reduces to the single-control inequality") {
    ControlProblem p = canonical_problem();
    p.controls = ControlSet({Vec{0.5}});
    Grid g = canonical_grid(81, 60);
    const ValueField f = solve_qvi_semilagrangian(p, g);
    // the scheme with a single control is the same update without the min;
    // spot-check the update identity at one interior step
    const auto phi = f.slice(30);
    const auto stepped = one_step_operator(p, g, f.slice(31), g.time(30), g.delta());
    for (size_t i = 0; i < f.npts(); ++i) CHECK(phi[i] == stepped[i]);
}

TEST_CASE("CFL guard names a usable step") {
    const ControlProblem p = canonical_problem();
    Grid g = canonical_grid(201, 10);  // way too few steps for FD
    CHECK_THROWS_WITH_AS(solve_pde_fd(p, g, FdForm::qvi), doctest::Contains("CFL"),
                         std::runtime_error);
    CHECK_NOTHROW(solve_qvi_semilagrangian(p, canonical_grid(81, 10)));  // SL has no CFL
}

TEST_CASE("strict boundary policy reports the escaping point") {
    const ControlProblem p = canonical_problem();
    Grid g = canonical_grid(41, 20);
    g.boundary = BoundaryPolicy::strict;
    CHECK_THROWS_WITH_AS(solve_qvi_semilagrangian(p, g), doctest::Contains("foot point"),
                         std::runtime_error);
}

TEST_CASE("one-step operator") {
    const ControlProblem p = canonical_problem();
    Grid g = canonical_grid(4001, 10);
    const size_t npts = g.num_points();

    SUBCASE("zero step is the identity") {
        std::vector<double> phi(npts);
        for (size_t i = 0; i < npts; ++i) phi[i] = std::sin(g.point(i)[0]);
        const auto out = one_step_operator(p, g, phi, 0.0, 0.0);
        CHECK(out == phi);
    }

    SUBCASE("difference quotient approaches the filtered Hamiltonian") {
        // phi large enough that every control is strictly admissible at x0
        std::vector<double> phi(npts);
        for (size_t i = 0; i < npts; ++i) phi[i] = 2.0 + 0.2 * std::sin(g.point(i)[0]);
        const double x0 = 0.3;
        const std::vector<int> ij{static_cast<int>(std::lround((x0 + 2.0) / g.axes[0].h()))};
        const size_t idx = g.index(ij);
        const double xq = g.point(idx)[0];
        const double grad = 0.2 * std::cos(xq);
        double target = kPlusInf;
        for (size_t c = 0; c < p.controls.size(); ++c)
            target = std::min(target, hamiltonian_u(p, {xq}, p.controls[c], {grad}));

        double prev_err = kPlusInf;
        for (double delta : {1e-2, 3e-3, 1e-3, 3e-4, 1e-4}) {
            const auto out = one_step_operator(p, g, phi, 0.0, delta);
            const double quotient = (out[idx] - phi[idx]) / delta;
            const double err = std::abs(quotient - target);
            CHECK(err <= 1.0 * std::sqrt(delta) + 0.01);
            if (delta <= 1e-3) CHECK(err <= prev_err + 0.01);
            prev_err = err;
        }
    }

    SUBCASE("value below every cost blows up like the obstacle") {
        std::vector<double> phi(npts, -3.0);  // below min l - rho with rho ~ 3
        const double rho = 3.0;
        for (double delta : {1e-2, 1e-3}) {
            const auto out = one_step_operator(p, g, phi, 0.0, delta);
            const size_t mid = npts / 2;
            CHECK((out[mid] - phi[mid]) / delta >= rho / (2.0 * delta));
        }
    }
}

TEST_CASE("residual diagnostics") {
    const ControlProblem p = canonical_problem();

    SUBCASE("constant field with matching constant cost has zero residual") {
        const ControlProblem pc = constant_cost_problem(0.75);
        Grid g = canonical_grid(41, 20);
        ValueField w(g);
        for (auto& v : w.data) v = 0.75;
        const ValueField res = residual_qvi(pc, w);
        for (double r : res.data) CHECK(r == 0.0);
    }

    SUBCASE("terminal data extended constant in time has nonpositive residual") {
        Grid g = canonical_grid(81, 20);
        ValueField w(g);
        for (int k = 0; k <= g.steps; ++k)
            for (size_t i = 0; i < w.npts(); ++i) w.at(k, i) = terminal_value(p, g.point(i));
        const ValueField res = residual_qvi(p, w);
        for (double r : res.data) CHECK(r <= 1e-12);
    }

    SUBCASE("solved field has small interior residual") {
        Grid g = canonical_grid(201, 200);
        const ValueField w = solve_qvi_semilagrangian(p, g);
        const ValueField res = residual_qvi(p, w);
        double sup = 0.0;
        for (int k = 1; k < g.steps; ++k)
            for (size_t i = 0; i < w.npts(); ++i)
                if (std::abs(g.point(i)[0]) <= 1.0 + 1e-12)
                    sup = std::max(sup, std::abs(res.at(k, i)));
        CHECK(sup <= 5.0 * (g.axes[0].h() + g.delta()));
    }
}

TEST_CASE("field serialization round trip") {
    const ControlProblem p = canonical_problem();
    Grid g = canonical_grid(21, 5);
    const ValueField f = solve_qvi_semilagrangian(p, g);
    f.write_binary("/tmp/mpx_field_test.bin");
    const ValueField f2 = ValueField::read_binary("/tmp/mpx_field_test.bin");
    CHECK(f2.data == f.data);
    CHECK(f2.grid.axes[0].n == 21);
    f.write_csv("/tmp/mpx_field_test.csv");  // smoke: parse elsewhere
}

TEST_CASE("interpolation clamps under the default policy") {
    Grid g = canonical_grid(5, 1);
    std::vector<double> slice{0.0, 1.0, 2.0, 3.0, 4.0};
    CHECK(g.interpolate(slice, {-5.0}) == 0.0);
    CHECK(g.interpolate(slice, {5.0}) == 4.0);
    CHECK(g.interpolate(slice, {0.5}) == doctest::Approx(2.5));
    g.boundary = BoundaryPolicy::strict;
    CHECK_THROWS(g.interpolate(slice, {-5.0}));
}
