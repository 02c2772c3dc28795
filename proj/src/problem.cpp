#include "maxplus/problem.hpp"

#include <stdexcept>

namespace maxplus {

ControlSet ControlSet::box(const Vec& lo, const Vec& hi, const std::vector<int>& per_axis) {
    const int m = static_cast<int>(lo.size());
    if (hi.size() != lo.size() || per_axis.size() != lo.size())
        throw std::invalid_argument("control box: inconsistent dimensions");
    for (int k = 0; k < m; ++k) {
        if (per_axis[k] < 1) throw std::invalid_argument("control box: need >= 1 point per axis");
        if (hi[k] < lo[k]) throw std::invalid_argument("control box: hi < lo");
    }
    std::vector<Vec> pts;
    std::vector<int> idx(m, 0);
    while (true) {
        Vec u(m);
        for (int k = 0; k < m; ++k)
            u[k] = per_axis[k] == 1 ? lo[k] : lo[k] + (hi[k] - lo[k]) * idx[k] / (per_axis[k] - 1);
        pts.push_back(std::move(u));
        int k = 0;
        while (k < m && ++idx[k] == per_axis[k]) idx[k++] = 0;
        if (k == m) break;
    }
    return ControlSet(std::move(pts));
}

void ControlProblem::validate() const {
    if (state_dim < 1 || dist_dim < 1) throw std::invalid_argument("bad dimensions");
    if (controls.empty()) throw std::invalid_argument("control set is empty");
    if (!drift || !sigma || !running_cost) throw std::invalid_argument("missing dynamics/cost");
    if (domain.dim() != state_dim) throw std::invalid_argument("domain dimension mismatch");
}

Mat diffusion_matrix(const ControlProblem& p, const Vec& x, const Vec& u) {
    return aat(p.sigma(x, u));
}

double hamiltonian_u(const ControlProblem& p, const Vec& x, const Vec& u, const Vec& grad) {
    const Vec f = p.drift(x, u);
    const Vec stp = tmatvec(p.sigma(x, u), grad);  // sigma^T p
    return dot(f, grad) + 0.5 * norm2sq(stp);
}

Vec worst_disturbance(const ControlProblem& p, const Vec& x, const Vec& u, const Vec& grad) {
    return tmatvec(p.sigma(x, u), grad);
}

double terminal_value(const ControlProblem& p, const Vec& x) {
    return p.running_cost(x, p.controls[terminal_argmin(p, x)]);
}

size_t terminal_argmin(const ControlProblem& p, const Vec& x) {
    size_t best = 0;
    double bestl = p.running_cost(x, p.controls[0]);
    for (size_t i = 1; i < p.controls.size(); ++i) {
        const double li = p.running_cost(x, p.controls[i]);
        if (li < bestl) {
            bestl = li;
            best = i;
        }
    }
    return best;
}

std::vector<size_t> admissible_set(const ControlProblem& p, const Vec& x, double r, bool strict) {
    std::vector<size_t> out;
    for (size_t i = 0; i < p.controls.size(); ++i) {
        const double li = p.running_cost(x, p.controls[i]);
        if (strict ? (li < r) : (li <= r)) out.push_back(i);
    }
    return out;
}

}  // namespace maxplus
