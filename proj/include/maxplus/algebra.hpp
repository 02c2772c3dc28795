// Max-plus scalar algebra on R u {-inf}: a (+) b = max(a,b), a (x) b = a + b.
// The additive identity ("zero") is -inf; all operations branch on it
// explicitly so no NaN can leak out of -inf + inf style arithmetic.
#pragma once

#include <cmath>
#include <limits>

namespace maxplus {

struct MaxPlusScalar {
    double v;

    constexpr MaxPlusScalar() : v(-std::numeric_limits<double>::infinity()) {}
    constexpr explicit MaxPlusScalar(double x) : v(x) {}

    static constexpr MaxPlusScalar zero() { return MaxPlusScalar(); }  // -inf
    static constexpr MaxPlusScalar one() { return MaxPlusScalar(0.0); }

    bool is_zero() const { return std::isinf(v) && v < 0.0; }
    double value() const { return v; }

    friend bool operator==(const MaxPlusScalar& a, const MaxPlusScalar& b) {
        return (a.is_zero() && b.is_zero()) || a.v == b.v;
    }
    friend bool operator<=(const MaxPlusScalar& a, const MaxPlusScalar& b) {
        if (a.is_zero()) return true;
        if (b.is_zero()) return false;
        return a.v <= b.v;
    }
};

inline MaxPlusScalar oplus(MaxPlusScalar a, MaxPlusScalar b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    return MaxPlusScalar(a.v > b.v ? a.v : b.v);
}

inline MaxPlusScalar otimes(MaxPlusScalar a, MaxPlusScalar b) {
    if (a.is_zero() || b.is_zero()) return MaxPlusScalar::zero();
    return MaxPlusScalar(a.v + b.v);
}

inline constexpr double kMinusInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPlusInf = std::numeric_limits<double>::infinity();

}  // namespace maxplus
