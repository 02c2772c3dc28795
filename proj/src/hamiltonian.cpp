#include "maxplus/hamiltonian.hpp"

namespace maxplus {

namespace {

HamiltonianValue min_over(const ControlProblem& p, const HamiltonianQuery& q,
                          const std::vector<size_t>& set) {
    if (set.empty()) return HamiltonianValue::infinite();
    HamiltonianValue out;
    out.value = kPlusInf;
    for (size_t i : set) {
        const double h = hamiltonian_u(p, q.x, p.controls[i], q.p);
        if (!out.attaining_control || h < out.value) {
            out.value = h;
            out.attaining_control = i;
        }
    }
    return out;
}

}  // namespace

HamiltonianValue hamiltonian_H(const ControlProblem& p, const HamiltonianQuery& q) {
    return min_over(p, q, admissible_set(p, q.x, q.r, /*strict=*/false));
}

HamiltonianValue hamiltonian_H_upper(const ControlProblem& p, const HamiltonianQuery& q) {
    return min_over(p, q, admissible_set(p, q.x, q.r, /*strict=*/true));
}

HamiltonianValue hamiltonian_K(const ControlProblem& p, const HamiltonianQuery& q,
                               const KOptions& opts) {
    const auto set = admissible_set(p, q.x, q.r, /*strict=*/false);
    if (set.empty()) return HamiltonianValue::infinite();

    // Precompute f.p and sigma^T p per admissible control.
    std::vector<double> fp(set.size());
    std::vector<Vec> stp(set.size());
    double stp_max = 0.0;
    for (size_t k = 0; k < set.size(); ++k) {
        const Vec& u = p.controls[set[k]];
        fp[k] = dot(p.drift(q.x, u), q.p);
        stp[k] = tmatvec(p.sigma(q.x, u), q.p);
        stp_max = std::max(stp_max, norm2(stp[k]));
    }

    // Each inner piece is concave quadratic in v peaking at sigma^T p, so the
    // max-min lies inside this box.
    const double radius = opts.box_radius ? *opts.box_radius : 2.0 * stp_max + 1.0;
    const int d = p.dist_dim;
    const int per_axis = static_cast<int>(std::floor(2.0 * radius / opts.v_step + 1e-9)) + 1;

    HamiltonianValue out;
    out.value = kMinusInf;
    std::vector<int> idx(d, 0);
    Vec v(d);
    while (true) {
        for (int a = 0; a < d; ++a) v[a] = -radius + idx[a] * opts.v_step;
        const double en = 0.5 * norm2sq(v);
        double inner = kPlusInf;
        size_t inner_arg = set[0];
        for (size_t k = 0; k < set.size(); ++k) {
            const double val = fp[k] + dot(stp[k], v) - en;
            if (val < inner) {
                inner = val;
                inner_arg = set[k];
            }
        }
        if (inner > out.value) {
            out.value = inner;
            out.attaining_control = inner_arg;
        }
        int a = 0;
        while (a < d && ++idx[a] == per_axis) idx[a++] = 0;
        if (a == d) break;
    }
    return out;
}

}  // namespace maxplus
