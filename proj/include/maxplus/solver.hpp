// Backward-in-time solvers for the dynamic-programming problem
//   min_u max{ V_t + H^u(x, grad V), l(x,u) - V } = 0,  V(T,.) = min_u l,
// by (a) a semi-Lagrangian discretization of the one-step dynamic programming
// relation and (b) an explicit monotone finite-difference scheme with local
// Lax-Friedrichs dissipation, in either the projected (qvi) form or the
// value-filtered Hamiltonian (h) form.
#pragma once

#include <optional>

#include "maxplus/grid.hpp"
#include "maxplus/hamiltonian.hpp"

namespace maxplus {

struct SolveOptions {
    std::optional<std::vector<double>> terminal_override;
    int threads = 1;
};

ValueField solve_qvi_semilagrangian(const ControlProblem& p, const Grid& g,
                                    const SolveOptions& opts = {});

enum class FdForm { qvi, h_form };

ValueField solve_pde_fd(const ControlProblem& p, const Grid& g, FdForm form,
                        const SolveOptions& opts = {});

// One semi-Lagrangian step F_{t,t+delta} applied to a spatial slice.
// delta == 0 returns the slice unchanged.
std::vector<double> one_step_operator(const ControlProblem& p, const Grid& g,
                                      std::span<const double> phi, double t, double delta);

// Pointwise residual min_u max{ dW/dt + H^u(x, grad W), l(x,u) - W } with
// centered differences (one-sided at the time and space edges).
ValueField residual_qvi(const ControlProblem& p, const ValueField& w);

// Throws with a suggested time step when the FD stability ratio exceeds 1.
void require_cfl(const ControlProblem& p, const Grid& g);

}  // namespace maxplus
