#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace herzkit {

using Point = std::vector<double>;

// Error taxonomy. Everything user-facing derives from herzkit::error so the
// CLI can map failures onto documented exit codes.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad arguments, violated preconditions, dimension mismatches.
struct invalid_input : error {
    using error::error;
};

// Config / JSON payload problems; message names the offending field.
struct schema_error : error {
    using error::error;
};

// A required field is absent from a parameter bundle or payload.
struct missing_field : schema_error {
    explicit missing_field(const std::string& symbol)
        : schema_error("missing field: " + symbol), symbol(symbol) {}
    std::string symbol;
};

// Requested operation is not defined for this input variant.
struct unsupported : error {
    using error::error;
};

// Quadrature could not reach the requested tolerance or the integral does
// not exist (non-integrable singularity, divergent tail).
struct quadrature_error : error {
    using error::error;
};

inline constexpr double kEqualityTol = 1e-12;

inline bool nearly_equal(double a, double b, double tol = kEqualityTol) {
    return std::fabs(a - b) <= tol;
}

// 2^x without going through pow.
inline double exp2d(double x) { return std::exp2(x); }

// Exact powers of two for integer exponents.
inline double pow2i(int k) { return std::ldexp(1.0, k); }

// Kahan compensated accumulator; norms sum annulus terms in ascending k with
// this so parallel mass evaluation stays bit-reproducible after the ordered
// reduction.
class KahanSum {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double sq_norm(const Point& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

inline double euclid_norm(const Point& x) { return std::sqrt(sq_norm(x)); }

inline double dist(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace herzkit
