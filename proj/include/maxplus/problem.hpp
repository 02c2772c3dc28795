// Control problem model: dynamics dx/ds = f(x,u) + sigma(x,u) v, running cost
// l(x,u), compact control set materialized to a finite list, and the
// per-control Hamiltonian H^u(x,p) = f.p + 1/2 (sigma sigma^T p).p.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "maxplus/smallmat.hpp"

namespace maxplus {

struct Box {
    Vec lo, hi;
    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Vec& x, double slack = 0.0) const {
        for (int i = 0; i < dim(); ++i)
            if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
        return true;
    }
    Vec clamp(Vec x) const {
        for (int i = 0; i < dim(); ++i) x[i] = std::min(hi[i], std::max(lo[i], x[i]));
        return x;
    }
    double extent(int i) const { return hi[i] - lo[i]; }
};

class ControlSet {
  public:
    ControlSet() = default;
    explicit ControlSet(std::vector<Vec> points) : points_(std::move(points)) {}

    // Box [lo,hi]^m discretized with `per_axis` points per axis (deterministic
    // iteration order, axis 0 fastest).
    static ControlSet box(const Vec& lo, const Vec& hi, const std::vector<int>& per_axis);

    size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const Vec& operator[](size_t i) const { return points_[i]; }
    const std::vector<Vec>& points() const { return points_; }

  private:
    std::vector<Vec> points_;
};

struct ControlProblem {
    int state_dim = 1;
    int dist_dim = 1;
    std::function<Vec(const Vec&, const Vec&)> drift;          // f(x,u)
    std::function<Mat(const Vec&, const Vec&)> sigma;          // n x d
    std::function<double(const Vec&, const Vec&)> running_cost;  // l(x,u)
    ControlSet controls;
    Box domain;

    // bounds used by CFL checks and disturbance-box heuristics
    double lip_l_x = 1.0;
    double bound_f = 1.0;
    double bound_sigma = 1.0;
    double v_max = 4.0;
    double v_step = 0.5;
    std::string name;

    void validate() const;  // throws std::invalid_argument on structural errors
};

Mat diffusion_matrix(const ControlProblem& p, const Vec& x, const Vec& u);

// H^u(x,p): closed-form sup over v of (f + sigma v).p - 1/2 |v|^2.
double hamiltonian_u(const ControlProblem& p, const Vec& x, const Vec& u, const Vec& grad);

// sigma(x,u)^T grad, the attaining disturbance for H^u.
Vec worst_disturbance(const ControlProblem& p, const Vec& x, const Vec& u, const Vec& grad);

// min over materialized controls of l(x,u); ties keep the first in order.
double terminal_value(const ControlProblem& p, const Vec& x);
size_t terminal_argmin(const ControlProblem& p, const Vec& x);

// Indices of controls with l(x,u) <= r (or < r when strict). May be empty.
std::vector<size_t> admissible_set(const ControlProblem& p, const Vec& x, double r,
                                   bool strict = false);

}  // namespace maxplus
