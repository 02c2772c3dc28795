// Uniform tensor grid over a box, backward time marching metadata, and the
// time-indexed value fields produced by the solvers.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "maxplus/problem.hpp"

namespace maxplus {

enum class BoundaryPolicy { clamp, strict };

struct Axis {
    double lo = 0.0, hi = 1.0;
    int n = 3;
    double h() const { return (hi - lo) / (n - 1); }
    double coord(int i) const { return lo + i * h(); }
};

struct Grid {
    std::vector<Axis> axes;
    double t0 = 0.0, T = 1.0;
    int steps = 1;
    BoundaryPolicy boundary = BoundaryPolicy::clamp;

    int dim() const { return static_cast<int>(axes.size()); }
    double delta() const { return (T - t0) / steps; }
    double time(int k) const { return t0 + k * delta(); }
    size_t num_points() const;
    size_t index(const std::vector<int>& ij) const;  // axis 0 fastest
    Vec point(size_t idx) const;
    Box box() const;
    double min_h() const;

    // delta * (max|f| + max|sigma| v_max) * sum_i 1/h_i; FD schemes need <= 1.
    double cfl_ratio(const ControlProblem& p) const;

    // Structural checks (>= 3 points per axis, positive spacing/steps).
    void validate() const;

    // Multilinear interpolation of one spatial slice. Clamps out-of-box
    // queries under the clamp policy; throws under strict.
    double interpolate(std::span<const double> slice, const Vec& x) const;
};

struct ValueField {
    Grid grid;
    // (steps+1) time slices, slice k at time grid.time(k); slice storage is
    // contiguous, point index fastest.
    std::vector<double> data;

    ValueField() = default;
    explicit ValueField(const Grid& g)
        : grid(g), data(static_cast<size_t>(g.steps + 1) * g.num_points(), 0.0) {}

    size_t npts() const { return grid.num_points(); }
    std::span<double> slice(int k) { return {data.data() + static_cast<size_t>(k) * npts(), npts()}; }
    std::span<const double> slice(int k) const {
        return {data.data() + static_cast<size_t>(k) * npts(), npts()};
    }
    double at(int k, size_t idx) const { return data[static_cast<size_t>(k) * npts() + idx]; }
    double& at(int k, size_t idx) { return data[static_cast<size_t>(k) * npts() + idx]; }

    // Space-time evaluation: linear in t between slices, multilinear in x.
    double value(double t, const Vec& x) const;
    // Centered-difference spatial gradient of the (time-interpolated) field.
    Vec gradient(double t, const Vec& x) const;

    void write_csv(const std::string& path) const;
    void write_binary(const std::string& path) const;
    static ValueField read_binary(const std::string& path);
};

// Largest |W(t,x+h)-W(t,x)|/h over grid neighbors in one slice.
double slice_lipschitz(const ValueField& f, int k);

// Sup of |a-b| over the inner fraction of the box (inner=0.5 keeps the middle
// half per axis), over slices [k0, k1].
double sup_distance_inner(const ValueField& a, const ValueField& b, double inner, int k0, int k1);

}  // namespace maxplus
