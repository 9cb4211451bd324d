#include "herzkit/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace herzkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Gauss-Legendre nodes by Newton iteration on the Legendre recurrence.
std::pair<std::vector<double>, std::vector<double>> compute_gauss(int n) {
    std::vector<double> x(n), w(n);
    const int m = (n + 1) / 2;
    for (int i = 1; i <= m; ++i) {
        double z = std::cos(kPi * (i - 0.25) / (n + 0.5));
        double z1 = 0.0, pp = 0.0;
        do {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            z1 = z;
            z = z1 - p1 / pp;
        } while (std::fabs(z - z1) > 1e-15);
        x[i - 1] = -z;
        x[n - i] = z;
        w[i - 1] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - i] = w[i - 1];
    }
    return {x, w};
}

// Per-thread rule cache: lock-free in the hot quadrature loops, and the
// Newton solve is deterministic so every thread lands on identical tables.
const std::pair<std::vector<double>, std::vector<double>>& gauss_rule(int n) {
    thread_local std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss(n)).first;
    return it->second;
}

double gl_panel(const std::function<double(double)>& g, double a, double b, int n) {
    const auto& [x, w] = gauss_rule(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += w[i] * g(mid + half * x[i]);
    return s * half;
}

// Bisection refinement with a global panel budget; non-finite panel values
// stop the refinement locally instead of chasing an unreachable tolerance.
struct AdaptiveRun {
    const std::function<double(double)>& g;
    int max_depth;
    long long budget = 200000;
    double err = 0.0;

    double run(double a, double b, double whole, double tol, int depth) {
        const double mid = 0.5 * (a + b);
        const double left = gl_panel(g, a, mid, 15);
        const double right = gl_panel(g, mid, b, 15);
        budget -= 2;
        const double sum = left + right;
        if (!std::isfinite(sum)) {
            err += std::fabs(whole);
            return std::isfinite(whole) ? whole : sum;
        }
        const double diff = sum - whole;
        if (std::fabs(diff) <= tol || depth >= max_depth || budget <= 0) {
            err += std::fabs(diff);
            return sum + diff / 4095.0;  // GL15 pair is ~order 30; mild extrapolation
        }
        return run(a, mid, left, tol * 0.5, depth + 1) + run(mid, b, right, tol * 0.5, depth + 1);
    }
};

}  // namespace

const std::vector<double>& gauss_nodes(int n) { return gauss_rule(n).first; }
const std::vector<double>& gauss_weights(int n) { return gauss_rule(n).second; }

double adaptive_integrate(const std::function<double(double)>& g, double a, double b,
                          double abs_tol, int max_depth, double* err_acc) {
    if (!(b > a)) return 0.0;
    const double whole = gl_panel(g, a, b, 15);
    if (!std::isfinite(whole)) {
        if (err_acc) *err_acc += std::fabs(b - a);
        return whole;
    }
    AdaptiveRun run{g, max_depth};
    const double v = run.run(a, b, whole, abs_tol, 0);
    if (err_acc) *err_acc += run.err;
    return v;
}

double sphere_area(int n) {
    if (n < 1) throw invalid_input("dimension must be >= 1");
    return 2.0 * std::exp(0.5 * n * std::log(kPi) - std::lgamma(0.5 * n));
}

double ball_volume(int n) { return sphere_area(n) / n; }

ScalarField field_of(const FunctionSpec& f) {
    ScalarField out;
    out.dim = f.dim;
    out.eval = [f](const Point& x) { return evaluate(f, x); };
    if (is_radial(f)) out.radial = [f](double r) { return radial_value(f, r); };
    out.support = support_annuli(f);
    out.breakpoints = radial_breakpoints(f);
    auto [lo, hi] = support_bbox(f);
    out.bbox_lo = std::move(lo);
    out.bbox_hi = std::move(hi);
    out.has_bbox = true;
    return out;
}

ScalarField gradient_magnitude_field(const FunctionSpec& f) {
    ScalarField out;
    out.dim = f.dim;
    out.eval = [f](const Point& x) { return euclid_norm(gradient(f, x)); };
    if (is_radial(f))
        out.radial = [f](double r) { return std::fabs(radial_derivative(f, r)); };
    out.support = support_annuli(f);
    if (out.support.decay == DecayHint::power) out.support.power_a -= 1.0;
    out.breakpoints = radial_breakpoints(f);
    auto [lo, hi] = support_bbox(f);
    out.bbox_lo = std::move(lo);
    out.bbox_hi = std::move(hi);
    out.has_bbox = true;
    return out;
}

ScalarField derivative_field(const FunctionSpec& f, std::vector<int> beta) {
    int order = 0;
    for (int b : beta) order += b;
    if (order == 0) return field_of(f);
    ScalarField out;
    out.dim = f.dim;
    out.eval = [f, beta](const Point& x) { return derivative(f, beta, x); };
    out.support = support_annuli(f);
    if (out.support.decay == DecayHint::power) out.support.power_a -= order;
    out.breakpoints = radial_breakpoints(f);
    auto [lo, hi] = support_bbox(f);
    out.bbox_lo = std::move(lo);
    out.bbox_hi = std::move(hi);
    out.has_bbox = true;
    return out;
}

ScalarField power_weighted(const ScalarField& base, double alpha) {
    ScalarField out = base;
    auto inner = base.eval;
    out.eval = [inner, alpha](const Point& x) {
        const double r = euclid_norm(x);
        return r == 0.0 ? 0.0 : inner(x) * std::pow(r, alpha);
    };
    if (base.radial) {
        auto inner_r = base.radial;
        out.radial = [inner_r, alpha](double r) {
            return r == 0.0 ? 0.0 : inner_r(r) * std::pow(r, alpha);
        };
    }
    if (out.support.decay == DecayHint::power)
        out.support.power_a += alpha;
    else if (alpha != 0.0 && !out.support.k_min) {
        out.support.decay = DecayHint::power;
        out.support.power_a = alpha;
    }
    return out;
}

namespace {

// ---------- radial reduction ----------

std::vector<double> panel_points(const ScalarField& f, double a, double b) {
    std::vector<double> pts{a, b};
    for (double p : f.breakpoints)
        if (p > a && p < b) pts.push_back(p);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// Fixed-layout fallback: each breakpoint panel chopped into equal pieces.
double fixed_panel_integral(const std::function<double(double)>& g,
                            const std::vector<double>& pts, int pieces, double* err_acc) {
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double h = (pts[i + 1] - pts[i]) / pieces;
        for (int j = 0; j < pieces; ++j) {
            const double a = pts[i] + j * h, b = a + h;
            const double fine = gl_panel(g, a, b, 15);
            err += std::fabs(fine - gl_panel(g, a, b, 7));
            total += fine;
        }
    }
    if (err_acc) *err_acc += err;
    return total;
}

// Scaled integral: result.integral is the integral of |F/scale|^p r^{n-1},
// so the p-th root times scale recovers the mass without the intermediate
// overflowing for profiles with huge dynamic range (|x|^{-n} at deep k).
struct ScaledIntegral {
    double integral = 0.0;
    double scale = 1.0;
    double err = 0.0;
};

ScaledIntegral radial_power_integral(const ScalarField& f, double a, double b, double p, int n,
                                     const QuadratureOptions& opts) {
    const auto pts = panel_points(f, a, b);
    ScaledIntegral out;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double probe = std::fabs(f.radial(std::sqrt(pts[i] * pts[i + 1])));
        out.scale = std::max(out.scale, probe);
    }
    const double s = out.scale;
    auto g = [&](double r) {
        const double v = std::fabs(f.radial(r)) / s;
        return v == 0.0 ? 0.0 : std::pow(v, p) * std::pow(r, n - 1);
    };
    if (opts.radial_fixed_panels > 0) {
        out.integral = fixed_panel_integral(g, pts, opts.radial_fixed_panels, &out.err);
        return out;
    }
    double rough = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) rough += gl_panel(g, pts[i], pts[i + 1], 15);
    if (rough == 0.0) return out;
    const double tol = std::fabs(rough) * opts.rel_tol / static_cast<double>(pts.size());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        out.integral +=
            adaptive_integrate(g, pts[i], pts[i + 1], tol, opts.max_subdivisions, &out.err);
    return out;
}

double radial_sup(const ScalarField& f, double a, double b, const QuadratureOptions& opts,
                  double* err_est) {
    const auto pts = panel_points(f, a, b);
    double best = 0.0;
    int per_panel = 17;
    double prev = -1.0;
    for (int round = 0; round < 9; ++round) {
        best = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const double lo = pts[i], hi = pts[i + 1];
            for (int j = 0; j < per_panel; ++j) {
                const double r = lo + (hi - lo) * j / (per_panel - 1);
                best = std::max(best, std::fabs(f.radial(r)));
            }
        }
        if (prev >= 0.0 && std::fabs(best - prev) <= opts.rel_tol * std::max(best, 1e-300)) break;
        prev = best;
        per_panel = per_panel * 2 - 1;
    }
    if (err_est) *err_est = std::fabs(best - prev);
    return best;
}

// ---------- spherical product grid (n <= 3, radial domain) ----------

// integral of |F(r w) / scale|^p over the unit sphere directions, fixed
// resolution; the scale keeps the powers inside the double range.
double angular_integral(const ScalarField& f, double r, double p, int n_phi, Point& buf,
                        double inv_scale = 1.0) {
    const int n = f.dim;
    if (n == 1) {
        buf[0] = r;
        double s = std::pow(std::fabs(f.eval(buf)) * inv_scale, p);
        buf[0] = -r;
        s += std::pow(std::fabs(f.eval(buf)) * inv_scale, p);
        return s;
    }
    if (n == 2) {
        double s = 0.0;
        for (int j = 0; j < n_phi; ++j) {
            const double th = 2.0 * kPi * j / n_phi;
            buf[0] = r * std::cos(th);
            buf[1] = r * std::sin(th);
            s += std::pow(std::fabs(f.eval(buf)) * inv_scale, p);
        }
        return s * 2.0 * kPi / n_phi;
    }
    // n == 3: Gauss in the polar cosine, trapezoid in the azimuth.
    const int n_mu = std::max(8, n_phi / 2);
    const auto& mx = gauss_nodes(n_mu);
    const auto& mw = gauss_weights(n_mu);
    double s = 0.0;
    for (int i = 0; i < n_mu; ++i) {
        const double mu = mx[i];
        const double rho = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        double ring = 0.0;
        for (int j = 0; j < n_phi; ++j) {
            const double th = 2.0 * kPi * j / n_phi;
            buf[0] = r * rho * std::cos(th);
            buf[1] = r * rho * std::sin(th);
            buf[2] = r * mu;
            ring += std::pow(std::fabs(f.eval(buf)) * inv_scale, p);
        }
        s += mw[i] * ring * 2.0 * kPi / n_phi;
    }
    return s;
}

int pick_angular_resolution(const ScalarField& f, double a, double b, double p,
                            const QuadratureOptions& opts, Point& buf) {
    const double probes[2] = {std::sqrt(a * b), 0.5 * (a + b)};
    int n_phi = 16;
    while (n_phi < opts.angular_cap) {
        bool stable = true;
        for (double r : probes) {
            const double c = angular_integral(f, r, p, n_phi, buf);
            const double fine = angular_integral(f, r, p, 2 * n_phi, buf);
            if (std::fabs(fine - c) > 0.1 * opts.grid_rel_tol * std::max(std::fabs(fine), 1e-300)) {
                stable = false;
                break;
            }
        }
        if (stable) break;
        n_phi *= 2;
    }
    return n_phi;
}

ScaledIntegral spherical_power_integral(const ScalarField& f, double a, double b, double p,
                                        const QuadratureOptions& opts) {
    Point buf(static_cast<std::size_t>(f.dim), 0.0);
    const int n_phi = f.dim == 1 ? 2 : pick_angular_resolution(f, a, b, p, opts, buf);
    const auto pts = panel_points(f, a, b);
    ScaledIntegral out;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double r = std::sqrt(pts[i] * pts[i + 1]);
        buf.assign(buf.size(), 0.0);
        buf[0] = r;
        out.scale = std::max(out.scale, std::fabs(f.eval(buf)));
    }
    const double inv_s = 1.0 / out.scale;
    auto g = [&](double r) {
        return angular_integral(f, r, p, n_phi, buf, inv_s) * std::pow(r, f.dim - 1);
    };
    if (opts.radial_fixed_panels > 0) {
        out.integral = fixed_panel_integral(g, pts, opts.radial_fixed_panels, &out.err);
        return out;
    }
    double rough = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) rough += gl_panel(g, pts[i], pts[i + 1], 15);
    if (rough == 0.0) return out;
    const double tol = std::fabs(rough) * opts.grid_rel_tol / static_cast<double>(pts.size());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        out.integral +=
            adaptive_integrate(g, pts[i], pts[i + 1], tol, opts.max_subdivisions, &out.err);
    return out;
}

double spherical_sup(const ScalarField& f, double a, double b, const QuadratureOptions& opts,
                     double* err_est) {
    Point buf(static_cast<std::size_t>(f.dim), 0.0);
    const auto pts = panel_points(f, a, b);
    double best = 0.0, prev = -1.0;
    int nr = 17, n_phi = 16;
    for (int round = 0; round < 6; ++round) {
        best = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            for (int j = 0; j < nr; ++j) {
                const double r = pts[i] + (pts[i + 1] - pts[i]) * j / (nr - 1);
                if (f.dim == 1) {
                    buf[0] = r;
                    best = std::max(best, std::fabs(f.eval(buf)));
                    buf[0] = -r;
                    best = std::max(best, std::fabs(f.eval(buf)));
                    continue;
                }
                for (int t = 0; t < n_phi; ++t) {
                    const double th = 2.0 * kPi * t / n_phi;
                    if (f.dim == 2) {
                        buf[0] = r * std::cos(th);
                        buf[1] = r * std::sin(th);
                        best = std::max(best, std::fabs(f.eval(buf)));
                    } else {
                        const int n_mu = n_phi / 2;
                        for (int u = 0; u < n_mu; ++u) {
                            const double mu = -1.0 + 2.0 * (u + 0.5) / n_mu;
                            const double rho = std::sqrt(std::max(0.0, 1.0 - mu * mu));
                            buf[0] = r * rho * std::cos(th);
                            buf[1] = r * rho * std::sin(th);
                            buf[2] = r * mu;
                            best = std::max(best, std::fabs(f.eval(buf)));
                        }
                    }
                }
            }
        }
        if (prev >= 0.0 && std::fabs(best - prev) <= opts.grid_rel_tol * std::max(best, 1e-300))
            break;
        prev = best;
        nr = nr * 2 - 1;
        n_phi *= 2;
    }
    if (err_est) *err_est = prev < 0.0 ? 0.0 : std::fabs(best - prev);
    return best;
}

// ---------- cartesian cells (non-radial domains) ----------

enum class BoxClass { inside, outside, straddle };

std::pair<double, double> box_radius_range(const Point& lo, const Point& hi, const Point* center) {
    double near2 = 0.0, far2 = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        const double c = center ? (*center)[i] : 0.0;
        const double a = lo[i] - c, b = hi[i] - c;
        const double fa = std::max(std::fabs(a), std::fabs(b));
        far2 += fa * fa;
        if (a > 0.0)
            near2 += a * a;
        else if (b < 0.0)
            near2 += b * b;
    }
    return {std::sqrt(near2), std::sqrt(far2)};
}

BoxClass classify_interval(double lo, double hi, double a, double b) {
    if (hi <= a || lo >= b) return BoxClass::outside;
    if (lo >= a && hi <= b) return BoxClass::inside;
    return BoxClass::straddle;
}

BoxClass combine(BoxClass x, BoxClass y) {
    if (x == BoxClass::outside || y == BoxClass::outside) return BoxClass::outside;
    if (x == BoxClass::straddle || y == BoxClass::straddle) return BoxClass::straddle;
    return BoxClass::inside;
}

BoxClass classify_box(const Point& lo, const Point& hi, double r_in, double r_out,
                      const DomainSpec& omega) {
    auto [rn, rf] = box_radius_range(lo, hi, nullptr);
    BoxClass cls = classify_interval(rn, rf, r_in, r_out);
    if (cls == BoxClass::outside) return cls;
    if (omega.is_full_space()) return cls;
    if (auto* b = std::get_if<Ball>(&omega.shape)) {
        auto [bn, bf] = box_radius_range(lo, hi, &b->center);
        return combine(cls, classify_interval(bn, bf, 0.0, b->radius));
    }
    if (auto* ar = std::get_if<AnnulusRange>(&omega.shape)) {
        auto [an, af] = box_radius_range(lo, hi, nullptr);
        return combine(cls, classify_interval(an, af, pow2i(ar->k_min - 1), pow2i(ar->k_max)));
    }
    const auto& c = std::get<Cube>(omega.shape);
    BoxClass dc = BoxClass::inside;
    for (std::size_t i = 0; i < lo.size(); ++i)
        dc = combine(dc, classify_interval(lo[i], hi[i], c.corner[i], c.corner[i] + c.side));
    return combine(cls, dc);
}

double tensor_gl(const ScalarField& f, double p, const Point& lo, const Point& hi, int order,
                 Point& buf) {
    const auto& x = gauss_nodes(order);
    const auto& w = gauss_weights(order);
    const int n = f.dim;
    double total = 0.0;
    int idx[3] = {0, 0, 0};
    const int count = [&] {
        int c = 1;
        for (int i = 0; i < n; ++i) c *= order;
        return c;
    }();
    for (int flat = 0; flat < count; ++flat) {
        int rem = flat;
        double wt = 1.0;
        for (int i = 0; i < n; ++i) {
            idx[i] = rem % order;
            rem /= order;
            const double mid = 0.5 * (lo[i] + hi[i]);
            const double half = 0.5 * (hi[i] - lo[i]);
            buf[i] = mid + half * x[idx[i]];
            wt *= w[idx[i]] * half;
        }
        total += wt * std::pow(std::fabs(f.eval(buf)), p);
    }
    return total;
}

struct CellIntegrator {
    const ScalarField& f;
    double p;
    double r_in, r_out;
    const DomainSpec& omega;
    double cell_tol = 0.0;
    int max_depth = 24;
    double err = 0.0;
    Point buf;
    long long budget = 400000;  // leaf cap; boundary bands stay tractable

    double integrate(Point lo, Point hi, int depth) {
        const BoxClass cls = classify_box(lo, hi, r_in, r_out, omega);
        if (cls == BoxClass::outside) return 0.0;
        --budget;
        double vol = 1.0;
        int longest = 0;
        for (std::size_t i = 0; i < lo.size(); ++i) {
            vol *= hi[i] - lo[i];
            if (hi[i] - lo[i] > hi[longest] - lo[longest]) longest = static_cast<int>(i);
        }
        if (cls == BoxClass::straddle) {
            if (depth >= max_depth || budget <= 0) {
                Point c(lo.size());
                for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
                const double r = euclid_norm(c);
                const bool in = r >= r_in && r < r_out && omega.contains(c);
                const double v = in ? std::pow(std::fabs(f.eval(c)), p) * vol : 0.0;
                err += std::fabs(v) + vol * 1e-30;
                return v;
            }
            Point hi1 = hi, lo2 = lo;
            const double mid = 0.5 * (lo[longest] + hi[longest]);
            hi1[longest] = mid;
            lo2[longest] = mid;
            return integrate(lo, hi1, depth + 1) + integrate(lo2, hi, depth + 1);
        }
        // fully inside: two-level Gauss check
        const double coarse = tensor_gl(f, p, lo, hi, 2, buf);
        const double fine = tensor_gl(f, p, lo, hi, 4, buf);
        if (std::fabs(fine - coarse) <= std::max(cell_tol * vol, 1e-300) || depth >= max_depth ||
            budget <= 0) {
            err += std::fabs(fine - coarse);
            return fine;
        }
        Point hi1 = hi, lo2 = lo;
        const double mid = 0.5 * (lo[longest] + hi[longest]);
        hi1[longest] = mid;
        lo2[longest] = mid;
        return integrate(lo, hi1, depth + 1) + integrate(lo2, hi, depth + 1);
    }
};

double cartesian_power_integral(const ScalarField& f, double r_in, double r_out, double p,
                                const DomainSpec& omega, const QuadratureOptions& opts,
                                double* err_acc) {
    if (f.dim > 3) throw unsupported("grid integration supports dimensions 1..3 only");
    Point lo(static_cast<std::size_t>(f.dim), -r_out), hi(static_cast<std::size_t>(f.dim), r_out);
    if (f.has_bbox) {
        for (int i = 0; i < f.dim; ++i) {
            lo[i] = std::max(lo[i], f.bbox_lo[i]);
            hi[i] = std::min(hi[i], f.bbox_hi[i]);
        }
    }
    for (int i = 0; i < f.dim; ++i)
        if (!(hi[i] > lo[i])) return 0.0;

    // straddling boxes refine until the boundary band is below the relative
    // tolerance; one axis splits per level, so scale by the dimension
    const int straddle_depth = std::min(
        40, f.dim * (2 + static_cast<int>(std::ceil(std::log2(1.0 / opts.grid_rel_tol)))));
    // first pass for the scale, second pass with the real cell tolerance
    CellIntegrator ci{f, p, r_in, r_out, omega, 1e300, std::min(12, straddle_depth), 0.0,
                      Point(static_cast<std::size_t>(f.dim), 0.0)};
    const double rough = ci.integrate(lo, hi, 0);
    double vol = 1.0;
    for (int i = 0; i < f.dim; ++i) vol *= hi[i] - lo[i];
    CellIntegrator fine{f, p, r_in, r_out, omega,
                        std::fabs(rough) * opts.grid_rel_tol / std::max(vol, 1e-300),
                        straddle_depth, 0.0, Point(static_cast<std::size_t>(f.dim), 0.0)};
    const double total = fine.integrate(lo, hi, 0);
    if (err_acc) *err_acc += fine.err;
    return total;
}

double cartesian_sup(const ScalarField& f, double r_in, double r_out, const DomainSpec& omega,
                     const QuadratureOptions& opts) {
    if (f.dim > 3) throw unsupported("grid integration supports dimensions 1..3 only");
    Point lo(static_cast<std::size_t>(f.dim), -r_out), hi(static_cast<std::size_t>(f.dim), r_out);
    if (f.has_bbox) {
        for (int i = 0; i < f.dim; ++i) {
            lo[i] = std::max(lo[i], f.bbox_lo[i]);
            hi[i] = std::min(hi[i], f.bbox_hi[i]);
        }
    }
    double best = 0.0, prev = -1.0;
    int nn = 17;
    Point x(static_cast<std::size_t>(f.dim), 0.0);
    for (int round = 0; round < 6; ++round) {
        best = 0.0;
        int count = 1;
        for (int i = 0; i < f.dim; ++i) count *= nn;
        for (int flat = 0; flat < count; ++flat) {
            int rem = flat;
            for (int i = 0; i < f.dim; ++i) {
                const int j = rem % nn;
                rem /= nn;
                x[i] = lo[i] + (hi[i] - lo[i]) * j / (nn - 1);
            }
            const double r = euclid_norm(x);
            if (r < r_in || r >= r_out || !omega.contains(x)) continue;
            best = std::max(best, std::fabs(f.eval(x)));
        }
        if (prev >= 0.0 && std::fabs(best - prev) <= opts.grid_rel_tol * std::max(best, 1e-300))
            break;
        prev = best;
        nn = nn * 2 - 1;
    }
    return best;
}

// ---------- closed-form / high-precision route for power-log profiles ----------

// integral of e^{g u} |u|^beta du over [ua, ub] (u = log r substitution).
double exp_abspow_integral(double g, double beta, double ua, double ub) {
    if (ua > ub) std::swap(ua, ub);
    if (ua < 0.0 && ub > 0.0)
        return exp_abspow_integral(g, beta, ua, 0.0) + exp_abspow_integral(g, beta, 0.0, ub);
    // one-signed interval now; reflect negatives
    if (ub <= 0.0) return exp_abspow_integral(-g, beta, -ub, -ua);
    if (beta <= -1.0 && ua == 0.0)
        throw quadrature_error("non-integrable log singularity at |x| = 1");
    auto integrand = [&](double u) { return std::exp(g * u) * std::pow(u, beta); };
    double total = 0.0;
    if (ua == 0.0 && beta < 0.0) {
        // weakly singular head: expand e^{gu} in a Taylor series and
        // integrate u^{beta+j} termwise over [0, d]
        const double d = std::min(ub, std::min(0.5, 0.5 / std::max(1.0, std::fabs(g))));
        double head = 0.0;
        double gj = 1.0;  // g^j / j!
        for (int j = 0; j < 40; ++j) {
            const double add = gj * std::pow(d, beta + j + 1) / (beta + j + 1);
            head += add;
            gj *= g / (j + 1);
            if (std::fabs(add) < 1e-18 * std::fabs(head) && j > 3) break;
        }
        total += head;
        ua = d;
    }
    if (ub > ua)
        total += adaptive_integrate(integrand, ua, ub, 1e-15 * std::max(1.0, std::fabs(total)), 48);
    return total;
}

double oracle_power_log_mass(const RadialPowerLog& f, int n, double a, double b, Exponent p,
                             double* err_est) {
    if (f.edge_frac != 0.0)
        throw unsupported("oracle route requires hard support edges");
    a = std::max(a, f.r_lo);
    b = std::min(b, f.r_hi);
    if (!(b > a)) return 0.0;
    const double A = std::fabs(f.amplitude);
    if (p.is_inf()) {
        // sup of A r^a |log r|^b over [a, b]: endpoints plus interior critical radius
        auto val = [&](double r) {
            double v = A * std::pow(r, f.a);
            if (f.b != 0.0) {
                const double L = std::fabs(std::log(r));
                if (L == 0.0) return f.b > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
                v *= std::pow(L, f.b);
            }
            return v;
        };
        double best = std::max(val(a), val(b));
        if (f.b != 0.0 && f.a != 0.0) {
            const double lr = -f.b / f.a;  // where a|log r| + b sgn(log r) = 0
            for (double cand : {std::exp(lr), std::exp(-lr)})
                if (cand > a && cand < b) best = std::max(best, val(cand));
        }
        if (f.b < 0.0 && a < 1.0 && b > 1.0) best = std::numeric_limits<double>::infinity();
        if (err_est) *err_est = 0.0;
        return best;
    }
    const double pv = p.value();
    const double gamma = f.a * pv + n;  // r-exponent + 1 in the radial integral
    double integral = 0.0;
    if (f.b == 0.0) {
        integral = std::fabs(gamma) < 1e-13 ? std::log(b / a)
                                            : (std::pow(b, gamma) - std::pow(a, gamma)) / gamma;
    } else {
        integral = exp_abspow_integral(gamma, f.b * pv, std::log(a), std::log(b));
    }
    const double mass_p = std::pow(A, pv) * sphere_area(n) * integral;
    if (err_est) *err_est = 1e-14 * mass_p;
    return std::pow(mass_p, 1.0 / pv);
}

const RadialPowerLog* as_power_log(const FunctionSpec& f) {
    return std::get_if<RadialPowerLog>(&f.node);
}

}  // namespace

AnnulusMass shell_lp_norm(const ScalarField& field, double r_lo, double r_hi, Exponent p,
                          const DomainSpec& omega, const QuadratureOptions& opts) {
    AnnulusMass out;
    out.k = 0;
    double a = r_lo, b = r_hi;
    if (omega.is_radial()) {
        auto [da, db] = omega.radial_interval();
        a = std::max(a, da);
        b = std::min(b, db);
        if (!(b > a)) return out;
        if (p.is_inf()) {
            double err = 0.0;
            out.value = field.is_radial() ? radial_sup(field, a, b, opts, &err)
                                          : spherical_sup(field, a, b, opts, &err);
            out.err_est = err;
            return out;
        }
        ScaledIntegral si;
        double sphere_factor = 1.0;
        if (field.is_radial()) {
            si = radial_power_integral(field, a, b, p.value(), field.dim, opts);
            sphere_factor = sphere_area(field.dim);
        } else {
            si = spherical_power_integral(field, a, b, p.value(), opts);
        }
        const double mass_p = sphere_factor * si.integral;
        out.value = mass_p <= 0.0 ? 0.0 : si.scale * std::pow(mass_p, p.reciprocal());
        out.err_est = mass_p <= 0.0
                          ? 0.0
                          : out.value * (si.err / std::max(si.integral, 1e-300)) * p.reciprocal();
        return out;
    }
    // non-radial domain: cartesian cells
    if (p.is_inf()) {
        out.value = cartesian_sup(field, a, b, omega, opts);
        out.err_est = out.value * opts.grid_rel_tol;
        return out;
    }
    double err = 0.0;
    const double mass_p = cartesian_power_integral(field, a, b, p.value(), omega, opts, &err);
    out.value = mass_p <= 0.0 ? 0.0 : std::pow(mass_p, p.reciprocal());
    out.err_est =
        mass_p <= 0.0 ? 0.0 : out.value * err / std::max(mass_p, 1e-300) * p.reciprocal();
    return out;
}

AnnulusMass annulus_lp_norm(const ScalarField& field, int k, Exponent p, const DomainSpec& omega,
                            const QuadratureOptions& opts) {
    AnnulusMass m = shell_lp_norm(field, pow2i(k - 1), pow2i(k), p, omega, opts);
    m.k = k;
    return m;
}

AnnulusMass annulus_lp_norm(const FunctionSpec& f, int k, Exponent p, const DomainSpec& omega,
                            const QuadratureOptions& opts) {
    if (opts.mode == QuadraturePath::oracle_exact) {
        const RadialPowerLog* rpl = as_power_log(f);
        if (!rpl) throw unsupported("oracle route applies to radial power-log profiles only");
        if (!omega.is_radial())
            throw unsupported("oracle route requires a radial domain");
        auto [da, db] = omega.radial_interval();
        AnnulusMass out;
        out.k = k;
        double err = 0.0;
        out.value = oracle_power_log_mass(*rpl, f.dim, std::max(pow2i(k - 1), da),
                                          std::min(pow2i(k), db), p, &err);
        out.err_est = err;
        return out;
    }
    // analytic non-integrability screen for log-power profiles around |x| = 1
    if (const RadialPowerLog* rpl = as_power_log(f)) {
        if (rpl->b < 0.0 && !p.is_inf() && rpl->b * p.value() <= -1.0) {
            const double lo = std::max(rpl->r_lo, pow2i(k - 1));
            const double hi = std::min(rpl->r_hi, pow2i(k));
            if (lo < 1.0 && hi > 1.0)
                throw quadrature_error("non-integrable log singularity at |x| = 1");
            if ((lo == 1.0 || hi == 1.0) && lo < hi)
                throw quadrature_error("non-integrable log singularity at |x| = 1");
        }
    }
    ScalarField field = field_of(f);
    if (opts.mode == QuadraturePath::radial_1d && !field.is_radial())
        throw unsupported("radial reduction requested for a non-radial function");
    return annulus_lp_norm(field, k, p, omega, opts);
}

}  // namespace herzkit
