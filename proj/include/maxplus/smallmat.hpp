// Small dense vectors/matrices for low-dimensional state spaces (n, d <= 2 in
// practice, but nothing here assumes that).
#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace maxplus {

using Vec = std::vector<double>;

struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;  // row-major

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

inline double dot(const Vec& x, const Vec& y) {
    assert(x.size() == y.size());
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2sq(const Vec& x) { return dot(x, x); }
inline double norm2(const Vec& x) { return std::sqrt(norm2sq(x)); }

inline double norm_inf(const Vec& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

// y = M x
inline Vec matvec(const Mat& m, const Vec& x) {
    assert(static_cast<int>(x.size()) == m.cols);
    Vec y(m.rows, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

// y = M^T x
inline Vec tmatvec(const Mat& m, const Vec& x) {
    assert(static_cast<int>(x.size()) == m.rows);
    Vec y(m.cols, 0.0);
    for (int j = 0; j < m.cols; ++j) {
        double s = 0.0;
        for (int i = 0; i < m.rows; ++i) s += m(i, j) * x[i];
        y[j] = s;
    }
    return y;
}

// M M^T
inline Mat aat(const Mat& m) {
    Mat r(m.rows, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.rows; ++j) {
            double s = 0.0;
            for (int k = 0; k < m.cols; ++k) s += m(i, k) * m(j, k);
            r(i, j) = s;
        }
    return r;
}

inline double frobenius_norm(const Mat& m) {
    double s = 0.0;
    for (double v : m.a) s += v * v;
    return std::sqrt(s);
}

inline Vec axpy(double a, const Vec& x, const Vec& y) {  // a*x + y
    assert(x.size() == y.size());
    Vec r(x.size());
    for (size_t i = 0; i < x.size(); ++i) r[i] = a * x[i] + y[i];
    return r;
}

}  // namespace maxplus
