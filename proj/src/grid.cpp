#include "maxplus/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace maxplus {

size_t Grid::num_points() const {
    size_t n = 1;
    for (const auto& ax : axes) n *= static_cast<size_t>(ax.n);
    return n;
}

size_t Grid::index(const std::vector<int>& ij) const {
    size_t idx = 0, stride = 1;
    for (int a = 0; a < dim(); ++a) {
        idx += stride * static_cast<size_t>(ij[a]);
        stride *= static_cast<size_t>(axes[a].n);
    }
    return idx;
}

Vec Grid::point(size_t idx) const {
    Vec x(dim());
    for (int a = 0; a < dim(); ++a) {
        const int n = axes[a].n;
        x[a] = axes[a].coord(static_cast<int>(idx % n));
        idx /= n;
    }
    return x;
}

Box Grid::box() const {
    Box b;
    for (const auto& ax : axes) {
        b.lo.push_back(ax.lo);
        b.hi.push_back(ax.hi);
    }
    return b;
}

double Grid::min_h() const {
    double h = axes[0].h();
    for (const auto& ax : axes) h = std::min(h, ax.h());
    return h;
}

double Grid::cfl_ratio(const ControlProblem& p) const {
    double inv_h = 0.0;
    for (const auto& ax : axes) inv_h += 1.0 / ax.h();
    return delta() * (p.bound_f + p.bound_sigma * p.v_max) * inv_h;
}

void Grid::validate() const {
    if (axes.empty()) throw std::invalid_argument("grid: no axes");
    for (const auto& ax : axes) {
        if (ax.n < 3) throw std::invalid_argument("grid: need at least 3 points per axis");
        if (!(ax.hi > ax.lo)) throw std::invalid_argument("grid: hi <= lo");
    }
    if (steps < 1) throw std::invalid_argument("grid: need at least 1 time step");
    if (!(T > t0)) throw std::invalid_argument("grid: T <= t0");
}

double Grid::interpolate(std::span<const double> slice, const Vec& x) const {
    const int nd = dim();
    int base[4];
    double w[4];
    for (int a = 0; a < nd; ++a) {
        const Axis& ax = axes[a];
        double u = (x[a] - ax.lo) / ax.h();
        if (u < 0.0 || u > ax.n - 1) {
            if (boundary == BoundaryPolicy::strict)
                throw std::runtime_error("point outside domain under strict boundary policy");
            u = std::min(static_cast<double>(ax.n - 1), std::max(0.0, u));
        }
        int i = static_cast<int>(u);
        if (i > ax.n - 2) i = ax.n - 2;
        base[a] = i;
        w[a] = u - i;
    }
    double out = 0.0;
    const int corners = 1 << nd;
    for (int c = 0; c < corners; ++c) {
        double weight = 1.0;
        size_t idx = 0, stride = 1;
        for (int a = 0; a < nd; ++a) {
            const int off = (c >> a) & 1;
            weight *= off ? w[a] : 1.0 - w[a];
            idx += stride * static_cast<size_t>(base[a] + off);
            stride *= static_cast<size_t>(axes[a].n);
        }
        out += weight * slice[idx];
    }
    return out;
}

double ValueField::value(double t, const Vec& x) const {
    const double dt = grid.delta();
    double u = (t - grid.t0) / dt;
    u = std::min(static_cast<double>(grid.steps), std::max(0.0, u));
    int k = static_cast<int>(u);
    if (k > grid.steps - 1) k = grid.steps - 1;
    const double w = u - k;
    const double v0 = grid.interpolate(slice(k), x);
    if (w == 0.0) return v0;
    const double v1 = grid.interpolate(slice(k + 1), x);
    return (1.0 - w) * v0 + w * v1;
}

Vec ValueField::gradient(double t, const Vec& x) const {
    Vec g(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) {
        const double h = grid.axes[a].h();
        Vec xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        // value() clamps at the box edge, which degrades to a one-sided
        // difference there.
        g[a] = (value(t, xp) - value(t, xm)) /
               (std::min(grid.axes[a].hi, xp[a]) - std::max(grid.axes[a].lo, xm[a]));
    }
    return g;
}

void ValueField::write_csv(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::fprintf(f, "t");
    for (int a = 0; a < grid.dim(); ++a) std::fprintf(f, ",x%d", a);
    std::fprintf(f, ",V\n");
    for (int k = 0; k <= grid.steps; ++k) {
        const double t = grid.time(k);
        for (size_t i = 0; i < npts(); ++i) {
            const Vec x = grid.point(i);
            std::fprintf(f, "%.17g", t);
            for (int a = 0; a < grid.dim(); ++a) std::fprintf(f, ",%.17g", x[a]);
            std::fprintf(f, ",%.17g\n", at(k, i));
        }
    }
    std::fclose(f);
}

void ValueField::write_binary(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    const uint32_t magic = 0x4d505846;  // "MPXF"
    const uint32_t nd = static_cast<uint32_t>(grid.dim());
    f.write(reinterpret_cast<const char*>(&magic), 4);
    f.write(reinterpret_cast<const char*>(&nd), 4);
    for (const auto& ax : grid.axes) {
        f.write(reinterpret_cast<const char*>(&ax.lo), 8);
        f.write(reinterpret_cast<const char*>(&ax.hi), 8);
        const uint32_t n = static_cast<uint32_t>(ax.n);
        f.write(reinterpret_cast<const char*>(&n), 4);
    }
    f.write(reinterpret_cast<const char*>(&grid.t0), 8);
    f.write(reinterpret_cast<const char*>(&grid.T), 8);
    const uint32_t st = static_cast<uint32_t>(grid.steps);
    f.write(reinterpret_cast<const char*>(&st), 4);
    f.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
}

ValueField ValueField::read_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    uint32_t magic = 0, nd = 0;
    f.read(reinterpret_cast<char*>(&magic), 4);
    f.read(reinterpret_cast<char*>(&nd), 4);
    if (magic != 0x4d505846 || nd == 0 || nd > 8) throw std::runtime_error("bad field file");
    Grid g;
    g.axes.resize(nd);
    for (auto& ax : g.axes) {
        uint32_t n = 0;
        f.read(reinterpret_cast<char*>(&ax.lo), 8);
        f.read(reinterpret_cast<char*>(&ax.hi), 8);
        f.read(reinterpret_cast<char*>(&n), 4);
        ax.n = static_cast<int>(n);
    }
    uint32_t st = 0;
    f.read(reinterpret_cast<char*>(&g.t0), 8);
    f.read(reinterpret_cast<char*>(&g.T), 8);
    f.read(reinterpret_cast<char*>(&st), 4);
    g.steps = static_cast<int>(st);
    ValueField out(g);
    f.read(reinterpret_cast<char*>(out.data.data()),
           static_cast<std::streamsize>(out.data.size() * sizeof(double)));
    if (!f) throw std::runtime_error("truncated field file");
    return out;
}

double slice_lipschitz(const ValueField& f, int k) {
    const Grid& g = f.grid;
    double lip = 0.0;
    for (size_t i = 0; i < f.npts(); ++i) {
        size_t rest = i, stride = 1;
        for (int a = 0; a < g.dim(); ++a) {
            const int n = g.axes[a].n;
            const int ia = static_cast<int>(rest % n);
            if (ia + 1 < n)
                lip = std::max(lip,
                               std::abs(f.at(k, i + stride) - f.at(k, i)) / g.axes[a].h());
            rest /= n;
            stride *= static_cast<size_t>(n);
        }
    }
    return lip;
}

double sup_distance_inner(const ValueField& a, const ValueField& b, double inner, int k0, int k1) {
    const Grid& g = a.grid;
    if (b.npts() != a.npts() || b.grid.steps != g.steps)
        throw std::invalid_argument("fields on different grids");
    double sup = 0.0;
    const double margin = 0.5 * (1.0 - inner);
    for (int k = k0; k <= k1; ++k) {
        for (size_t i = 0; i < a.npts(); ++i) {
            const Vec x = g.point(i);
            bool in = true;
            for (int ax = 0; ax < g.dim(); ++ax) {
                const double len = g.axes[ax].hi - g.axes[ax].lo;
                const double lo = g.axes[ax].lo + margin * len;
                const double hi = g.axes[ax].hi - margin * len;
                if (x[ax] < lo - 1e-12 || x[ax] > hi + 1e-12) in = false;
            }
            if (in) sup = std::max(sup, std::abs(a.at(k, i) - b.at(k, i)));
        }
    }
    return sup;
}

}  // namespace maxplus
