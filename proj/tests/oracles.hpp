// Test-only oracles. Every routine here reaches its value by a route that
// is independent of the library's quadrature engine: closed-form
// antiderivatives, double-exponential quadrature in log coordinates,
// whole-space gaussian integrals, plain Riemann sweeps.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

inline double sphere_area(int n) {
    switch (n) {
        case 1: return 2.0;
        case 2: return 2.0 * kPi;
        case 3: return 4.0 * kPi;
        case 4: return 2.0 * kPi * kPi;
        default: return 2.0 * std::exp(0.5 * n * std::log(kPi) - std::lgamma(0.5 * n));
    }
}

// Double-exponential (tanh-sinh) rule on (a, b); robust to integrable
// endpoint singularities. Single fixed fine level, deterministic.
inline double tanh_sinh(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double h = 1.0 / 64.0;
    const int kmax = static_cast<int>(6.0 / h);
    double sum = 0.0;
    for (int k = -kmax; k <= kmax; ++k) {
        const double t = h * k;
        const double sh = 0.5 * kPi * std::sinh(t);
        const double u = std::tanh(sh);
        const double w = 0.5 * kPi * std::cosh(t) / std::pow(std::cosh(sh), 2);
        const double x = mid + half * u;
        if (x <= a || x >= b) continue;
        const double v = f(x);
        if (std::isfinite(v)) sum += w * v;
    }
    return sum * half * h;
}

// integral over [lo, hi] of r^{g-1} |log r|^{beta} dr (the radial reduction
// of power-log masses), via closed form when beta = 0 and tanh-sinh in log
// coordinates otherwise.
inline double power_log_radial_integral(double g, double beta, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    if (beta == 0.0) {
        if (std::fabs(g) < 1e-13) return std::log(hi / lo);
        return (std::pow(hi, g) - std::pow(lo, g)) / g;
    }
    auto in_u = [&](double ua, double ub) {  // integral of e^{g u} |u|^beta
        if (ub <= ua) return 0.0;
        return tanh_sinh([&](double u) { return std::exp(g * u) * std::pow(std::fabs(u), beta); },
                         ua, ub);
    };
    const double ua = std::log(lo), ub = std::log(hi);
    if (ua < 0.0 && ub > 0.0) return in_u(ua, 0.0) + in_u(0.0, ub);
    return in_u(ua, ub);
}

// ||f chi_k||_p for f = A |x|^a (|log|x||)^b on (r_lo, r_hi), hard edges.
inline double rpl_annulus_mass(double A, double a, double b, double r_lo, double r_hi, int n,
                               double p, int k) {
    const double lo = std::max(r_lo, std::ldexp(1.0, k - 1));
    const double hi = std::min(r_hi, std::ldexp(1.0, k));
    if (!(hi > lo)) return 0.0;
    const double integral = power_log_radial_integral(a * p + n, b * p, lo, hi);
    return std::pow(std::pow(std::fabs(A), p) * sphere_area(n) * integral, 1.0 / p);
}

// Herz norm of the profile above: the support must be bounded away from the
// origin so that finitely many annuli carry mass.
inline double rpl_herz_norm(double A, double a, double b, double r_lo, double r_hi, int n,
                            double alpha, double p, double q) {
    if (!(r_lo > 0.0)) throw std::invalid_argument("oracle needs r_lo > 0");
    const int k_lo = static_cast<int>(std::floor(std::log2(r_lo))) + 1;
    const int k_hi = static_cast<int>(std::ceil(std::log2(r_hi))) + 1;
    const bool q_inf = std::isinf(q);
    double acc = 0.0;
    for (int k = k_lo - 1; k <= k_hi; ++k) {
        const double mass = rpl_annulus_mass(A, a, b, r_lo, r_hi, n, p, k);
        const double t = std::exp2(alpha * k) * mass;
        if (q_inf)
            acc = std::max(acc, t);
        else
            acc += std::pow(t, q);
    }
    return q_inf ? acc : std::pow(acc, 1.0 / q);
}

// whole-space L^p norm of A exp(-|x-c|^2 / (2 s^2))
inline double gaussian_lp_norm(double A, double s, int n, double p) {
    // integral of exp(-p |x|^2 / (2 s^2)) = (2 pi s^2 / p)^{n/2}
    return std::fabs(A) * std::pow(2.0 * kPi * s * s / p, 0.5 * n / p);
}

// L^2 norm of the gradient of the gaussian above
inline double gaussian_grad_l2_norm(double A, double s, int n) {
    // |grad f|^2 = A^2 (r/s^2)^2 exp(-r^2/s^2); integral over R^n:
    // A^2 / s^4 * omega_{n-1} * int r^{n+1} e^{-r^2/s^2} dr
    const double integral = 0.5 * std::pow(s, n + 2) * std::tgamma(0.5 * (n + 2));
    return std::fabs(A) / (s * s) * std::sqrt(sphere_area(n) * integral);
}

// L^p norm of |grad gaussian| (radial profile A r/s^2 e^{-r^2/(2s^2)})
inline double gaussian_grad_lp_norm(double A, double s, int n, double p) {
    // int_0^inf r^{p+n-1} e^{-p r^2/(2 s^2)} dr = 0.5 (2s^2/p)^{(p+n)/2} Gamma((p+n)/2)
    const double integral =
        0.5 * std::pow(2.0 * s * s / p, 0.5 * (p + n)) * std::tgamma(0.5 * (p + n));
    return (std::fabs(A) / (s * s)) * std::pow(sphere_area(n) * integral, 1.0 / p);
}

// central second-order finite difference gradient
template <typename F>
std::vector<double> fd_gradient(F&& f, const std::vector<double>& x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

// direct double-sum Hardy transform: delta_k = sum_j a^{j-k} eps_j
inline std::vector<double> hardy_direct(const std::vector<double>& eps, double a) {
    std::vector<double> delta(eps.size(), 0.0);
    for (std::size_t k = 0; k < eps.size(); ++k)
        for (std::size_t j = k; j < eps.size(); ++j)
            delta[k] += std::pow(a, static_cast<double>(j - k)) * eps[j];
    return delta;
}

// reference convolution value at one point: plain midpoint tensor sweep of
// J_eps(x - y) f(y) over the eps-ball around x (independent of the polar
// integrator inside the library)
template <typename F, typename Kernel>
double reference_convolution(F&& f, Kernel&& kernel_profile, double eps,
                             const std::vector<double>& x, int cells_per_axis) {
    const int n = static_cast<int>(x.size());
    const double h = 2.0 * eps / cells_per_axis;
    long long total = 1;
    for (int i = 0; i < n; ++i) total *= cells_per_axis;
    double acc = 0.0;
    std::vector<double> y(x.size());
    for (long long flat = 0; flat < total; ++flat) {
        long long rem = flat;
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const int idx = static_cast<int>(rem % cells_per_axis);
            rem /= cells_per_axis;
            y[i] = x[i] - eps + (idx + 0.5) * h;
            r2 += (y[i] - x[i]) * (y[i] - x[i]);
        }
        const double rho = std::sqrt(r2) / eps;
        if (rho >= 1.0) continue;
        acc += kernel_profile(rho) * f(y);
    }
    return acc * std::pow(h, n) * std::pow(eps, -n);
}

// dense sweep over axis-aligned cubes around x, Riemann averages; an
// independent (slow) stand-in for the cube-family maximal function
template <typename F>
double maximal_sweep(F&& f, const std::vector<double>& x, double max_side, int side_steps,
                     int avg_steps) {
    const int n = static_cast<int>(x.size());
    double best = 0.0;
    std::vector<double> y(x.size());
    for (int s = 1; s <= side_steps; ++s) {
        const double side = max_side * s / side_steps;
        // several anchor positions of x inside the cube per axis
        for (int anchor = 0; anchor <= 4; ++anchor) {
            const double off = side * anchor / 4.0;
            long long total = 1;
            for (int i = 0; i < n; ++i) total *= avg_steps;
            double acc = 0.0;
            for (long long flat = 0; flat < total; ++flat) {
                long long rem = flat;
                for (int i = 0; i < n; ++i) {
                    const int idx = static_cast<int>(rem % avg_steps);
                    rem /= avg_steps;
                    const double corner = x[i] - off;
                    y[i] = corner + (idx + 0.5) * side / avg_steps;
                }
                acc += std::fabs(f(y));
            }
            best = std::max(best, acc / static_cast<double>(total));
        }
    }
    return best;
}

}  // namespace oracle
