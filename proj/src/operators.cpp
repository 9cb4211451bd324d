#include "herzkit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "herzkit/parallel.hpp"

namespace herzkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

double raw_bump(double rho) {  // exp(1 - 1/(1-rho^2)) on [0,1)
    const double u = rho * rho;
    if (u >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u));
}

// integral of the raw bump over R^n, cached per dimension
double bump_mass(int n) {
    static std::map<int, double> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) {
        auto g = [n](double r) { return raw_bump(r) * std::pow(r, n - 1); };
        const double radial = adaptive_integrate(g, 0.0, 1.0, 1e-15, 48);
        it = cache.emplace(n, sphere_area(n) * radial).first;
    }
    return it->second;
}

// crude whole-interval probe used only to scale absolute tolerances
inline double gl_panel_probe(const std::function<double(double)>& g) {
    const auto& x = gauss_nodes(15);
    const auto& w = gauss_weights(15);
    double s = 0.0;
    for (int i = 0; i < 15; ++i) s += w[i] * g(0.5 + 0.5 * x[i]);
    return 0.5 * s;
}

// spherical integral of g over directions, trapezoid/product rule
template <typename G>
double sphere_rule(int n, int n_phi, G&& g, Point& buf, const Point& center, double t) {
    if (n == 1) {
        buf[0] = center[0] + t;
        double s = g(buf);
        buf[0] = center[0] - t;
        s += g(buf);
        return s;
    }
    if (n == 2) {
        double s = 0.0;
        for (int j = 0; j < n_phi; ++j) {
            const double th = 2.0 * kPi * j / n_phi;
            buf[0] = center[0] + t * std::cos(th);
            buf[1] = center[1] + t * std::sin(th);
            s += g(buf);
        }
        return s * 2.0 * kPi / n_phi;
    }
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
            buf[0] = center[0] + t * rho * std::cos(th);
            buf[1] = center[1] + t * rho * std::sin(th);
            buf[2] = center[2] + t * mu;
            ring += g(buf);
        }
        s += mw[i] * ring * 2.0 * kPi / n_phi;
    }
    return s;
}

}  // namespace

MollifierKernel::MollifierKernel(int dim, double epsilon) : dim_(dim), eps_(epsilon) {
    if (dim < 1) throw invalid_input("dimension must be >= 1");
    if (!(epsilon > 0.0)) throw invalid_input("mollifier width must be positive");
    norm_ = 1.0 / bump_mass(dim);
}

double MollifierKernel::profile(double rho) const { return norm_ * raw_bump(rho); }

double MollifierKernel::value_at_radius(double rho) const {
    return std::pow(eps_, -dim_) * profile(rho / eps_);
}

double mollify(const FunctionSpec& f, double eps, const Point& x, const QuadratureOptions& opts) {
    if (!(eps > 0.0)) throw invalid_input("mollifier width must be positive");
    if (f.dim > 3) throw unsupported("mollification supports dimensions 1..3 only");
    if (static_cast<int>(x.size()) != f.dim) throw invalid_input("point dimension mismatch");
    const MollifierKernel kernel(f.dim, eps);
    // (J_eps * f)(x) = integral over the unit ball of J(z) f(x - eps z) dz;
    // the sphere rule covers +z and -z directions alike, so the sign of the
    // shift does not matter
    Point buf(x.size(), 0.0);
    auto fg = [&](const Point& y) { return evaluate(f, y); };
    const int n_phi = f.dim == 1 ? 1 : 32;
    auto g = [&](double rho) {
        const double sphere = sphere_rule(f.dim, n_phi, fg, buf, x, eps * rho);
        return kernel.profile(rho) * std::pow(rho, f.dim - 1) * sphere;
    };
    // tight absolute tolerance: mollification errors are differenced against
    // f downstream, so the quadrature noise must sit far below eps^2 f''
    const double rough = std::fabs(gl_panel_probe(g));
    const double tol = std::max(rough * 1e-12, 1e-16);
    return adaptive_integrate(g, 0.0, 1.0, tol, opts.max_subdivisions);
}

NormResult mollify_error_norm(const FunctionSpec& f, double eps, const HerzParams& hp,
                              const DomainSpec& omega, const TruncationPolicy& trunc,
                              const QuadratureOptions& opts) {
    if (f.dim != hp.n) throw invalid_input("function dimension mismatch");
    const double spacing = eps / 4.0;
    if (is_radial(f) && omega.is_radial()) {
        auto [blo, bhi] = support_bbox(f);
        double r_max = 0.0;
        for (std::size_t i = 0; i < bhi.size(); ++i)
            r_max = std::max(r_max, std::max(std::fabs(blo[i]), std::fabs(bhi[i])));
        r_max += eps;
        auto [dlo, dhi] = omega.radial_interval();
        r_max = std::min(r_max, dhi);
        const std::size_t count = static_cast<std::size_t>(std::ceil(r_max / spacing)) + 1;
        if (count > (1u << 22))
            throw quadrature_error("grid-resolution insufficient: eps below the spacing floor");
        std::vector<double> table(count, 0.0);
        parallel_for(count, [&](std::size_t i) {
            const double r = static_cast<double>(i) * spacing;
            if (r < dlo || r >= dhi) return;
            Point x(static_cast<std::size_t>(f.dim), 0.0);
            x[0] = r;
            table[i] = mollify(f, eps, x, opts) - radial_value(f, r);
        });
        // aggregate annulus masses of the piecewise-linear table
        const int k_hi = static_cast<int>(std::ceil(std::log2(r_max))) + 1;
        const int k_lo = std::max(trunc.k_lo, k_hi - 64);
        std::vector<std::pair<int, double>> terms;
        KahanSum sum;
        double sup_term = 0.0;
        auto interp = [&](double r) {
            const double t = r / spacing;
            const std::size_t i = std::min(count - 2, static_cast<std::size_t>(t));
            const double fr = t - static_cast<double>(i);
            return table[i] * (1.0 - fr) + table[i + 1] * fr;
        };
        for (int k = k_lo; k <= k_hi; ++k) {
            const double a = std::max(pow2i(k - 1), dlo);
            const double b = std::min({pow2i(k), r_max, dhi});
            double mass;
            if (hp.p.is_inf()) {
                double best = 0.0;
                if (b > a) {
                    const std::size_t i0 = static_cast<std::size_t>(a / spacing);
                    const std::size_t i1 =
                        std::min(count - 1, static_cast<std::size_t>(b / spacing) + 1);
                    for (std::size_t i = i0; i <= i1; ++i) best = std::max(best, std::fabs(table[i]));
                }
                mass = best;
            } else {
                double acc = 0.0;
                if (b > a) {
                    const double pv = hp.p.value();
                    auto cell = [&](double ca, double cb) {
                        const auto& gx = gauss_nodes(4);
                        const auto& gw = gauss_weights(4);
                        double s = 0.0;
                        for (int g = 0; g < 4; ++g) {
                            const double r = 0.5 * (ca + cb) + 0.5 * (cb - ca) * gx[g];
                            s += gw[g] * std::pow(std::fabs(interp(r)), pv) *
                                 std::pow(r, f.dim - 1);
                        }
                        return s * 0.5 * (cb - ca);
                    };
                    std::size_t i0 = static_cast<std::size_t>(a / spacing);
                    for (std::size_t i = i0; static_cast<double>(i) * spacing < b && i + 1 < count;
                         ++i) {
                        const double ca = std::max(a, static_cast<double>(i) * spacing);
                        const double cb = std::min(b, static_cast<double>(i + 1) * spacing);
                        if (cb > ca) acc += cell(ca, cb);
                    }
                    acc *= sphere_area(f.dim);
                }
                mass = acc <= 0.0 ? 0.0 : std::pow(acc, hp.p.reciprocal());
            }
            const double w = exp2d(hp.alpha * k) * mass;
            terms.emplace_back(k, w);
            if (hp.q.is_inf())
                sup_term = std::max(sup_term, w);
            else if (w > 0.0)
                sum.add(std::pow(w, hp.q.value()));
        }
        NormResult out;
        out.terms = std::move(terms);
        out.k_range_used = {k_lo, k_hi};
        out.value = hp.q.is_inf()
                        ? sup_term
                        : (sum.value() <= 0.0 ? 0.0 : std::pow(sum.value(), 1.0 / hp.q.value()));
        out.converged = true;
        return out;
    }
    if (f.dim > 3) throw unsupported("mollification supports dimensions 1..3 only");
    // cartesian sample grid over the eps-fattened support box
    auto [lo, hi] = support_bbox(f);
    SampledGrid g;
    g.dim = f.dim;
    g.spacing = spacing;
    g.interp = SampledGrid::Interp::multilinear;
    g.bbox_lo = lo;
    std::size_t total = 1;
    for (int i = 0; i < f.dim; ++i) {
        g.bbox_lo[i] -= eps;
        const double extent = hi[i] - lo[i] + 2.0 * eps;
        const int cnt = static_cast<int>(std::ceil(extent / spacing)) + 1;
        if (cnt > 1400)
            throw quadrature_error("grid-resolution insufficient: eps below the spacing floor");
        g.counts.push_back(cnt);
        total *= static_cast<std::size_t>(cnt);
    }
    g.values.assign(total, 0.0);
    parallel_for(total, [&](std::size_t flat) {
        Point x(static_cast<std::size_t>(f.dim), 0.0);
        std::size_t rem = flat;
        for (int i = f.dim - 1; i >= 0; --i) {
            const std::size_t c = static_cast<std::size_t>(g.counts[i]);
            x[i] = g.bbox_lo[i] + static_cast<double>(rem % c) * spacing;
            rem /= c;
        }
        g.values[flat] = mollify(f, eps, x, opts) - evaluate(f, x);
    });
    ScalarField diff;
    diff.dim = f.dim;
    diff.eval = [g](const Point& x) { return grid_value(g, x); };
    diff.support = support_annuli(f);
    if (diff.support.k_max) diff.support.k_max = *diff.support.k_max + 1;
    if (diff.support.k_min) diff.support.k_min = *diff.support.k_min - 1;
    diff.bbox_lo = g.bbox_lo;
    diff.bbox_hi = g.bbox_hi();
    diff.has_bbox = true;
    QuadratureOptions o = opts;
    o.grid_rel_tol = std::max(opts.grid_rel_tol, 1e-5);
    return herz_norm_field(diff, hp, omega, trunc, o);
}

// ---------------- maximal function ----------------

namespace {

struct CubeFamily {
    int j_min, j_max;
};

CubeFamily cube_levels(const FunctionSpec& f, const Point& x, const MaximalOptions& mo) {
    auto [lo, hi] = support_bbox(f);
    double diam = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        diam = std::max(diam, hi[i] - lo[i]);
        const double c = std::clamp(x[i], lo[i], hi[i]);
        d2 += (x[i] - c) * (x[i] - c);
    }
    const double dist = std::sqrt(d2);
    const int j_max =
        static_cast<int>(std::ceil(std::log2(std::max(diam + dist, 1e-12)))) + mo.j_above;
    const int j_min = static_cast<int>(std::floor(std::log2(std::max(diam, 1e-12)))) - mo.j_below;
    return {j_min, j_max};
}

// average over the cube [corner, corner + side]^n of |f|^t (or of f itself
// when signed averages are requested)
double cube_average(const FunctionSpec& f, double t, const Point& corner, double side, int order,
                    bool absolute = true) {
    const auto& gx = gauss_nodes(order);
    const auto& gw = gauss_weights(order);
    const int n = f.dim;
    int count = 1;
    for (int i = 0; i < n; ++i) count *= order;
    Point y(static_cast<std::size_t>(n), 0.0);
    double acc = 0.0;
    for (int flat = 0; flat < count; ++flat) {
        int rem = flat;
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            const int j = rem % order;
            rem /= order;
            y[i] = corner[i] + side * 0.5 * (1.0 + gx[j]);
            w *= gw[j] * 0.5;
        }
        const double raw = evaluate(f, y);
        const double v = absolute ? std::fabs(raw) : raw;
        acc += w * (t == 1.0 ? v : std::pow(v, t));
    }
    return acc;  // weights already normalized to the unit cube
}

double maximal_core(const FunctionSpec& f, double t, const Point& x, const MaximalOptions& mo) {
    if (static_cast<int>(x.size()) != f.dim) throw invalid_input("point dimension mismatch");
    const CubeFamily fam = cube_levels(f, x, mo);
    const int n = f.dim;
    int shifts = 1;
    for (int i = 0; i < n; ++i) shifts *= 3;
    double best = 0.0;
    Point corner(static_cast<std::size_t>(n), 0.0);
    for (int j = fam.j_min; j <= fam.j_max; ++j) {
        const double side = pow2i(j);
        // centered cube
        for (int i = 0; i < n; ++i) corner[i] = x[i] - 0.5 * side;
        best = std::max(best, cube_average(f, t, corner, side, mo.avg_order));
        // shifted dyadic meshes: offsets {0, 1/3, 2/3} * side per axis
        for (int s = 0; s < shifts; ++s) {
            int rem = s;
            for (int i = 0; i < n; ++i) {
                const double off = (rem % 3) * side / 3.0;
                rem /= 3;
                corner[i] = std::floor((x[i] - off) / side) * side + off;
            }
            best = std::max(best, cube_average(f, t, corner, side, mo.avg_order));
        }
    }
    return best;
}

}  // namespace

double maximal_family_constant(int n) {
    // any cube containing x sits inside a family cube of at most 6x the side
    return std::pow(6.0, n);
}

double maximal(const FunctionSpec& f, const Point& x, const MaximalOptions& mo,
               const QuadratureOptions&) {
    return maximal_core(f, 1.0, x, mo);
}

double frac_maximal(const FunctionSpec& f, double t, const Point& x, const MaximalOptions& mo,
                    const QuadratureOptions&) {
    if (!(t > 0.0)) throw invalid_input("fractional maximal order must be positive");
    return std::pow(maximal_core(f, t, x, mo), 1.0 / t);
}

ScalarField maximal_field(const FunctionSpec& f, const MaximalOptions& mo) {
    ScalarField out;
    out.dim = f.dim;
    out.eval = [f, mo](const Point& x) { return maximal_core(f, 1.0, x, mo); };
    out.support.decay = DecayHint::power;  // ~ |x|^{-n} mass tail
    out.support.power_a = 0.0;
    return out;
}

// ---------------- Riesz potential ----------------

namespace {

// spherical integral of f over the sphere of radius t around x
double sphere_integral_of(const FunctionSpec& f, const Point& x, double t, int n_phi, Point& buf) {
    auto fg = [&](const Point& y) { return evaluate(f, y); };
    return sphere_rule(f.dim, n_phi, fg, buf, x, t);
}

}  // namespace

double riesz(const FunctionSpec& f, double lambda, const Point& x, const RieszOptions& ro,
             const QuadratureOptions& opts) {
    const int n = f.dim;
    if (!(lambda > 0.0) || !(lambda < n)) throw invalid_input("riesz order must lie in (0, n)");
    if (n > 3) throw unsupported("riesz quadrature supports dimensions 1..3 only");
    if (static_cast<int>(x.size()) != n) throw invalid_input("point dimension mismatch");
    const SupportInfo supp = support_annuli(f);
    if (!supp.k_max && supp.decay != DecayHint::gaussian)
        throw quadrature_error("divergent tail: unbounded support without gaussian decay");

    // distance range from x to the support box: spheres outside [t_lo, t_hi]
    // carry no mass, so the polar integral runs over that band only
    auto [lo, hi] = support_bbox(f);
    double near2 = 0.0, far2 = 0.0, out2 = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        const double a = lo[i] - x[i], b = hi[i] - x[i];
        far2 += std::max(a * a, b * b);
        if (a > 0.0)
            near2 += a * a;
        else if (b < 0.0)
            near2 += b * b;
        out2 += std::max(lo[i] * lo[i], hi[i] * hi[i]);
    }
    const double t_lo = std::sqrt(near2);
    const double t_hi = std::sqrt(far2) + 1e-12;
    if (!(t_hi > t_lo)) return 0.0;

    const double r0_pre = euclid_norm(x);
    const double s_max = std::sqrt(out2);
    if (r0_pre >= 2.0 * s_max) {
        // far field: spheres around x see the support under a vanishing
        // angle; integrate around the origin instead, where the kernel is
        // smooth because |x - y| >= r0 - s_max > 0
        Point srcbuf(static_cast<std::size_t>(n), 0.0);
        auto kernel_on_sphere = [&](double s) {
            auto fy = [&](const Point& y) {
                return evaluate(f, y) * std::pow(dist(x, y), lambda - n);
            };
            return sphere_rule(n, ro.angular, fy, srcbuf, Point(n, 0.0), s) *
                   std::pow(s, n - 1);
        };
        std::vector<double> pts = radial_breakpoints(f);
        pts.push_back(0.0);
        pts.push_back(s_max);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        double rough = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            rough += kernel_on_sphere(0.5 * (pts[i] + pts[i + 1])) * (pts[i + 1] - pts[i]);
        const double tol = std::max(std::fabs(rough), 1e-30) *
                           std::max(ro.rel_tol, 1e-13) /
                           static_cast<double>(pts.size());
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            if (pts[i + 1] > pts[i] && pts[i + 1] > 0.0 && pts[i] < s_max)
                total += adaptive_integrate(kernel_on_sphere, std::max(0.0, pts[i]),
                                            std::min(s_max, pts[i + 1]), tol,
                                            opts.max_subdivisions);
        return total;
    }

    // spheres around x see the support under an angle ~ box_radius / dist;
    // the trapezoid nodes must resolve it even in the near-far crossover
    double ctr2 = 0.0, rad2 = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        const double c = 0.5 * (lo[i] + hi[i]);
        ctr2 += (c - x[i]) * (c - x[i]);
        rad2 += 0.25 * (hi[i] - lo[i]) * (hi[i] - lo[i]);
    }
    const double box_dist = std::sqrt(ctr2), box_rad = std::sqrt(rad2);
    int n_phi = ro.angular;
    if (box_dist > box_rad)
        n_phi = std::min(256, std::max(n_phi, static_cast<int>(std::ceil(
                                                  16.0 * box_dist / box_rad))));

    Point buf(static_cast<std::size_t>(n), 0.0);
    auto g = [&](double t) {
        return std::pow(t, lambda - 1.0) * sphere_integral_of(f, x, t, n_phi, buf);
    };
    // panel splits where the t-sphere is tangent to radial support features
    std::vector<double> pts{t_lo, t_hi};
    const double r0 = euclid_norm(x);
    for (double b : radial_breakpoints(f)) {
        for (double cand : {std::fabs(r0 - b), r0 + b})
            if (cand > t_lo && cand < t_hi) pts.push_back(cand);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double rough = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double mid = 0.5 * (pts[i] + pts[i + 1]);
        rough += g(mid) * (pts[i + 1] - pts[i]);
    }
    const double tol =
        std::max(std::fabs(rough), 1e-30) * std::max(ro.rel_tol, 1e-13) /
        static_cast<double>(pts.size());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += adaptive_integrate(g, pts[i], pts[i + 1], tol, opts.max_subdivisions);
    return total;
}

ScalarField riesz_field(const FunctionSpec& f, double lambda, const RieszOptions& ro) {
    ScalarField out;
    out.dim = f.dim;
    out.eval = [f, lambda, ro](const Point& x) { return riesz(f, lambda, x, ro); };
    if (is_radial(f)) {
        // the potential of radial data is radial: the polar integrator only
        // sees |x|, so the 1-D reduction is exact
        const int dim = f.dim;
        out.radial = [f, lambda, ro, dim](double r) {
            Point x(static_cast<std::size_t>(dim), 0.0);
            x[0] = r;
            return riesz(f, lambda, x, ro);
        };
    }
    out.support.decay = DecayHint::power;
    out.support.power_a = 0.0;
    return out;
}

// ---------------- dyadic averaging projection ----------------

SampledGrid dyadic_project(const FunctionSpec& f, int j, const Cube& region,
                           const QuadratureOptions& opts) {
    const int n = f.dim;
    if (n > 3) throw unsupported("dyadic projection supports dimensions 1..3 only");
    if (static_cast<int>(region.corner.size()) != n)
        throw invalid_input("region dimension mismatch");
    const double h = pow2i(-j);
    const double cells_d = region.side / h;
    const double cells_r = std::round(cells_d);
    if (std::fabs(cells_d - cells_r) > 1e-9 || cells_r < 1.0)
        throw invalid_input("region is not aligned with the dyadic mesh at level j");
    for (double c : region.corner) {
        const double q = c / h;
        if (std::fabs(q - std::round(q)) > 1e-9)
            throw invalid_input("region is not aligned with the dyadic mesh at level j");
    }
    const int cells = static_cast<int>(cells_r);
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(cells);
    if (total > (1u << 24)) throw invalid_input("projection mesh too large");

    SampledGrid out;
    out.dim = n;
    out.bbox_lo = region.corner;
    out.spacing = h;
    out.counts.assign(static_cast<std::size_t>(n), cells);
    out.interp = SampledGrid::Interp::piecewise_constant;
    out.values.assign(total, 0.0);

    // projecting an aligned piecewise-constant grid at the same level is a
    // plain copy; this keeps the projection exactly idempotent
    if (const auto* gin = std::get_if<SampledGrid>(&f.node)) {
        if (gin->interp == SampledGrid::Interp::piecewise_constant &&
            std::fabs(gin->spacing - h) < 1e-15 * h) {
            bool aligned = true;
            for (int i = 0; i < n; ++i) {
                const double q = (region.corner[i] - gin->bbox_lo[i]) / h;
                if (std::fabs(q - std::round(q)) > 1e-9) aligned = false;
            }
            if (aligned) {
                parallel_for(total, [&](std::size_t flat) {
                    std::size_t rem = flat;
                    Point center(static_cast<std::size_t>(n), 0.0);
                    for (int i = n - 1; i >= 0; --i) {
                        const std::size_t c = static_cast<std::size_t>(cells);
                        center[i] =
                            region.corner[i] + (static_cast<double>(rem % c) + 0.5) * h;
                        rem /= c;
                    }
                    out.values[flat] = grid_value(*gin, center);
                });
                return out;
            }
        }
    }

    const int order = std::max(2, std::min(8, opts.max_subdivisions));
    parallel_for(total, [&](std::size_t flat) {
        std::size_t rem = flat;
        Point corner(static_cast<std::size_t>(n), 0.0);
        for (int i = n - 1; i >= 0; --i) {
            const std::size_t c = static_cast<std::size_t>(cells);
            corner[i] = region.corner[i] + static_cast<double>(rem % c) * h;
            rem /= c;
        }
        out.values[flat] = cube_average(f, 1.0, corner, h, order, /*absolute=*/false);
    });
    return out;
}

}  // namespace herzkit
