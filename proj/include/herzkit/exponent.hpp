#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "herzkit/common.hpp"

namespace herzkit {

// Extended Lebesgue exponent on (0, +inf]. Infinity is the IEEE infinity, so
// n / p with p = inf is exactly 0 and no "large float" stand-in is needed.
// The classical range is [1, inf]; values in (0, 1) are admitted because the
// discrete Hardy bound and the interpolation-type inequalities use exponents
// below one (quasi-norm regime).
class Exponent {
public:
    Exponent() : v_(1.0) {}
    explicit Exponent(double v) : v_(v) {
        if (!(v > 0.0)) throw invalid_input("exponent must be positive (got " + std::to_string(v) + ")");
    }

    static Exponent infinity() {
        Exponent e;
        e.v_ = std::numeric_limits<double>::infinity();
        return e;
    }

    bool is_inf() const { return std::isinf(v_); }
    double value() const { return v_; }

    // 1/p; exactly 0 for p = inf.
    double reciprocal() const { return is_inf() ? 0.0 : 1.0 / v_; }

    // Hoelder conjugate: 1/p + 1/p' = 1. Defined for p >= 1 only.
    Exponent conjugate() const {
        if (v_ < 1.0) throw invalid_input("conjugate requires exponent >= 1");
        if (is_inf()) return Exponent(1.0);
        if (v_ == 1.0) return infinity();
        return Exponent(v_ / (v_ - 1.0));
    }

    friend bool operator==(const Exponent& a, const Exponent& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Exponent& a, const Exponent& b) { return a.v_ != b.v_; }
    friend bool operator<(const Exponent& a, const Exponent& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Exponent& a, const Exponent& b) { return a.v_ <= b.v_; }

private:
    double v_;
};

inline Exponent exponent_from(double v) {
    return std::isinf(v) ? Exponent::infinity() : Exponent(v);
}

}  // namespace herzkit
