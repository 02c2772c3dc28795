#include "maxplus/path_space.hpp"

#include <cmath>
#include <stdexcept>

namespace maxplus {

DiscretePathSpace::DiscretePathSpace(std::vector<double> times, std::vector<Vec> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() < 2) throw std::invalid_argument("path space needs at least one step");
    for (size_t i = 0; i + 1 < times_.size(); ++i)
        if (!(times_[i] < times_[i + 1]))
            throw std::invalid_argument("partition times must be strictly increasing");
    if (values_.empty()) throw std::invalid_argument("empty disturbance grid");
    dim_ = static_cast<int>(values_.front().size());
    bool has_zero = false;
    for (const auto& v : values_) {
        if (static_cast<int>(v.size()) != dim_)
            throw std::invalid_argument("inconsistent disturbance dimensions");
        if (norm2sq(v) == 0.0) has_zero = true;
    }
    // Q(0) = 0 is a space invariant; the zero path must be representable.
    if (!has_zero) throw std::invalid_argument("disturbance grid must contain the zero value");
}

DiscretePathSpace DiscretePathSpace::uniform_box(double t0, double T, int m, int d, double v_max,
                                                 double dv) {
    if (!(T > t0) || m < 1 || d < 1 || !(v_max >= 0.0) || !(dv > 0.0))
        throw std::invalid_argument("bad path space parameters");
    std::vector<double> times(m + 1);
    for (int j = 0; j <= m; ++j) times[j] = t0 + (T - t0) * j / m;

    const int per_axis = static_cast<int>(std::floor(2.0 * v_max / dv + 1e-9)) + 1;
    std::vector<double> axis(per_axis);
    for (int i = 0; i < per_axis; ++i) axis[i] = -v_max + i * dv;

    std::vector<Vec> values;
    std::vector<size_t> idx(d, 0);
    while (true) {
        Vec v(d);
        for (int k = 0; k < d; ++k) v[k] = axis[idx[k]];
        values.push_back(std::move(v));
        int k = 0;
        while (k < d && ++idx[k] == axis.size()) idx[k++] = 0;
        if (k == d) break;
    }
    return DiscretePathSpace(std::move(times), std::move(values));
}

size_t DiscretePathSpace::num_paths() const {
    size_t n = 1;
    for (int j = 0; j < steps(); ++j) n *= values_.size();
    return n;
}

double DiscretePathSpace::density_range(const Path& path, int j0, int j1) const {
    double q = 0.0;
    for (int j = j0; j < j1; ++j) q -= 0.5 * norm2sq(path[j]) * step_length(j);
    return q;
}

void DiscretePathSpace::for_each_path(const std::function<void(const Path&)>& fn) const {
    for_each_partial_path(0, steps(), fn);
}

void DiscretePathSpace::for_each_partial_path(int j0, int j1,
                                              const std::function<void(const Path&)>& fn) const {
    const int m = j1 - j0;
    if (m <= 0) {
        fn(Path{});
        return;
    }
    const size_t g = values_.size();
    std::vector<size_t> idx(m, 0);
    Path buf(m);
    while (true) {
        for (int j = 0; j < m; ++j) buf[j] = values_[idx[j]];
        fn(buf);
        int j = 0;
        while (j < m && ++idx[j] == g) idx[j++] = 0;
        if (j == m) break;
    }
}

MaxPlusScalar maxplus_expectation(const PathFunction& z, const DiscretePathSpace& space) {
    if (space.grid_size() == 0 || space.steps() < 1)
        throw std::invalid_argument("empty sample space");
    MaxPlusScalar best = MaxPlusScalar::zero();
    space.for_each_path([&](const Path& p) {
        best = oplus(best, otimes(z(p), MaxPlusScalar(space.density(p))));
    });
    return best;
}

MaxPlusScalar maxplus_probability(const PathPredicate& a, const DiscretePathSpace& space) {
    MaxPlusScalar best = MaxPlusScalar::zero();
    space.for_each_path([&](const Path& p) {
        if (a(p)) best = oplus(best, MaxPlusScalar(space.density(p)));
    });
    return best;
}

MaxPlusScalar conditional_expectation(const PathFunction& z, const Path& prefix,
                                      const DiscretePathSpace& space) {
    const int k = static_cast<int>(prefix.size());
    const int m = space.steps();
    if (k <= 0 || k >= m)
        throw std::invalid_argument("prefix must end at an interior partition point");
    MaxPlusScalar best = MaxPlusScalar::zero();
    Path full(m);
    for (int j = 0; j < k; ++j) full[j] = prefix[j];
    space.for_each_partial_path(k, m, [&](const Path& suffix) {
        for (int j = k; j < m; ++j) full[j] = suffix[j - k];
        const double q2 = space.density_range(full, k, m);
        best = oplus(best, otimes(z(full), MaxPlusScalar(q2)));
    });
    return best;
}

}  // namespace maxplus
