// Value-level Hamiltonians over the admissible set A(x,r) = {u : l(x,u) <= r}:
//   H(x,r,p)  = min_{u in A(x,r)} H^u(x,p)          (+inf when A empty)
//   H+(x,r,p) = inf_{u : l(x,u) < r} H^u(x,p)       (strict-set envelope)
//   K(x,r,p)  = max_v min_{u in A(x,r)} (f+sigma v).p - |v|^2/2, v on a grid
// Infinite values are a sentinel; callers must branch on them, never compute
// through them.
#pragma once

#include <cmath>
#include <optional>

#include "maxplus/algebra.hpp"
#include "maxplus/problem.hpp"

namespace maxplus {

struct HamiltonianQuery {
    Vec x;
    double r;
    Vec p;
};

struct HamiltonianValue {
    double value = kPlusInf;
    std::optional<size_t> attaining_control;  // index into the control set

    bool is_infinite() const { return std::isinf(value) && value > 0.0; }
    static HamiltonianValue infinite() { return HamiltonianValue{}; }
};

HamiltonianValue hamiltonian_H(const ControlProblem& p, const HamiltonianQuery& q);

// Upper envelope in r, realized exactly for finite control sets by the strict
// admissible set.
HamiltonianValue hamiltonian_H_upper(const ControlProblem& p, const HamiltonianQuery& q);

struct KOptions {
    // Outer-max box radius per axis; defaults to 2 max_u |sigma^T p| + 1.
    std::optional<double> box_radius;
    double v_step = 0.05;
};

HamiltonianValue hamiltonian_K(const ControlProblem& p, const HamiltonianQuery& q,
                               const KOptions& opts = {});

}  // namespace maxplus
