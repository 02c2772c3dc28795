// Finite sample space of piecewise-constant disturbance paths with the
// quadratic-energy max-plus density Q(v) = -1/2 sum_j |v_j|^2 (s_{j+1}-s_j).
// Expectations and probabilities are exact maxima over the enumerated paths.
#pragma once

#include <functional>
#include <vector>

#include "maxplus/algebra.hpp"
#include "maxplus/smallmat.hpp"

namespace maxplus {

// A path assigns one grid value to each partition step; callers receive it as
// the materialized list of step values.
using Path = std::vector<Vec>;

class DiscretePathSpace {
  public:
    // times: s_0 < s_1 < ... < s_m, values: the per-step value set (shared by
    // all steps), each of dimension d.
    DiscretePathSpace(std::vector<double> times, std::vector<Vec> values);

    // Uniform box grid {-v_max, -v_max+dv, ..., v_max}^d on m equal steps.
    static DiscretePathSpace uniform_box(double t0, double T, int m, int d, double v_max,
                                         double dv);

    int steps() const { return static_cast<int>(times_.size()) - 1; }
    int dim() const { return dim_; }
    size_t grid_size() const { return values_.size(); }
    size_t num_paths() const;
    const std::vector<double>& times() const { return times_; }
    const std::vector<Vec>& grid() const { return values_; }

    double step_length(int j) const { return times_[j + 1] - times_[j]; }

    // -1/2 sum over steps in [j0, j1) of |v_j|^2 dt_j, accumulated in step order.
    double density_range(const Path& path, int j0, int j1) const;
    double density(const Path& path) const { return density_range(path, 0, steps()); }

    // Visit every path once (odometer order); the buffer passed to the
    // callback is reused between calls.
    void for_each_path(const std::function<void(const Path&)>& fn) const;
    // Paths over the step range [j0, j1) only.
    void for_each_partial_path(int j0, int j1, const std::function<void(const Path&)>& fn) const;

  private:
    std::vector<double> times_;
    std::vector<Vec> values_;
    int dim_;
};

using PathFunction = std::function<MaxPlusScalar(const Path&)>;
using PathPredicate = std::function<bool(const Path&)>;

// E+[Z] = max over paths of Z(v) + Q(v). Throws on an empty sample space.
MaxPlusScalar maxplus_expectation(const PathFunction& z, const DiscretePathSpace& space);

// P+(A) = sup of Q over A; -inf on an empty event.
MaxPlusScalar maxplus_probability(const PathPredicate& a, const DiscretePathSpace& space);

// E+[Z | v1] for a prefix of k steps: sup over suffixes of Z(v1.v2) + Q2(v2).
// k must name an interior partition point (0 < k < m).
MaxPlusScalar conditional_expectation(const PathFunction& z, const Path& prefix,
                                      const DiscretePathSpace& space);

}  // namespace maxplus
