#include <doctest.h>

#include "maxplus/hamiltonian.hpp"
#include "maxplus/runner.hpp"

using namespace maxplus;

namespace {

// two-control instance with per-control constants
ControlProblem two_controls(double f1, double s1, double l1, double f2, double s2, double l2) {
    ControlProblem p;
    p.state_dim = p.dist_dim = 1;
    p.drift = [f1, f2](const Vec&, const Vec& u) { return Vec{u[0] == 0.0 ? f1 : f2}; };
    p.sigma = [s1, s2](const Vec&, const Vec& u) {
        Mat m(1, 1);
        m(0, 0) = u[0] == 0.0 ? s1 : s2;
        return m;
    };
    p.running_cost = [l1, l2](const Vec&, const Vec& u) { return u[0] == 0.0 ? l1 : l2; };
    p.controls = ControlSet({Vec{0.0}, Vec{1.0}});
    p.domain = Box{{-1.0}, {1.0}};
    return p;
}

}  // namespace

TEST_CASE("value-filtered Hamiltonian") {
    auto p = two_controls(0.0, 1.0, 0.0, 1.0, 0.0, 1.0);
    SUBCASE("empty admissible set is the infinite sentinel") {
        const auto h = hamiltonian_H(p, {{0.0}, -1.0, {1.0}});
        CHECK(h.is_infinite());
        CHECK(!h.attaining_control);
    }
    SUBCASE("singleton set reduces to H^u") {
        const auto h = hamiltonian_H(p, {{0.0}, 0.5, {1.0}});  // only l=0 admissible
        CHECK(h.value == 0.5);
        CHECK(*h.attaining_control == 0);
    }
    SUBCASE("reported minimizer attains the value") {
        const auto h = hamiltonian_H(p, {{0.0}, 2.0, {1.0}});
        REQUIRE(h.attaining_control);
        const Vec& u = p.controls[*h.attaining_control];
        CHECK(hamiltonian_u(p, {0.0}, u, {1.0}) == h.value);
    }
}

TEST_CASE("strict-set upper envelope") {
    SUBCASE("all costs exactly at the threshold: strict set empty, loose set not") {
        auto p = two_controls(0.0, 1.0, 1.0, 0.5, 0.0, 1.0);
        const HamiltonianQuery q{{0.0}, 1.0, {1.0}};
        CHECK(hamiltonian_H_upper(p, q).is_infinite());
        CHECK(!hamiltonian_H(p, q).is_infinite());
    }
    SUBCASE("strictly admissible everywhere: envelopes agree") {
        auto p = two_controls(0.0, 1.0, 0.0, 0.5, 0.0, 0.1);
        const HamiltonianQuery q{{0.0}, 1.0, {1.0}};
        CHECK(hamiltonian_H_upper(p, q).value == hamiltonian_H(p, q).value);
    }
    SUBCASE("l = u^2 over {0,1}, r = 1: only u = 0 is strict") {
        // H^0 = 2, H^1 = 5 via drift choices
        auto p = two_controls(2.0, 0.0, 0.0, 5.0, 0.0, 1.0);
        const HamiltonianQuery q{{0.0}, 1.0, {1.0}};
        CHECK(hamiltonian_H_upper(p, q).value == 2.0);
        CHECK(hamiltonian_H(p, q).value == 2.0);
    }
}

TEST_CASE("max-min Hamiltonian") {
    SUBCASE("single admissible control: equals H up to the v-grid slack") {
        auto p = two_controls(0.7, 1.3, 0.0, 0.0, 0.0, 99.0);
        const HamiltonianQuery q{{0.0}, 0.5, {0.8}};
        KOptions ko;
        ko.v_step = 0.05;
        const auto k = hamiltonian_K(p, q, ko);
        const auto h = hamiltonian_H(p, q);
        CHECK(k.value <= h.value + 1e-12);
        CHECK(h.value - k.value <= 0.5 * ko.v_step * ko.v_step);
    }
    SUBCASE("documented order-of-players gap: K = 0 < H = 1/2") {
        ControlProblem p;
        p.state_dim = p.dist_dim = 1;
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
        const HamiltonianQuery q{{0.0}, 1.0, {1.0}};
        CHECK(hamiltonian_H(p, q).value == 0.5);
        CHECK(std::abs(hamiltonian_K(p, q, ko).value) <= 1e-9);
    }
    SUBCASE("empty admissible set") {
        auto p = two_controls(0.0, 1.0, 3.0, 0.0, 0.0, 3.0);
        CHECK(hamiltonian_K(p, {{0.0}, 0.0, {1.0}}).is_infinite());
    }
}

TEST_CASE("randomized property battery") {
    const auto results = hamiltonian_random_properties(/*seed=*/5, /*instances=*/2000);
    for (const auto& r : results) {
        INFO(r.name << " " << r.detail);
        CHECK(r.pass);
    }
}

TEST_CASE("fault injection flips the K <= H property") {
    const auto results = hamiltonian_random_properties(5, 200, /*flip_kh=*/true);
    bool kh_failed = false;
    for (const auto& r : results)
        if (r.name == "hamiltonian.K_le_H" && !r.pass) kh_failed = true;
    CHECK(kh_failed);
}
