#include "herzkit/funclib.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace herzkit {

namespace {

// C^2 ramp: 0 for t <= 0, 1 for t >= 1, 6t^5 - 15t^4 + 10t^3 between.
double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double smoothstep_deriv(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 30.0 * t * t * (t - 1.0) * (t - 1.0);
}

struct Ramp {
    double lo_a = 0.0, lo_b = 0.0;  // up-ramp interval
    double hi_a = 0.0, hi_b = 0.0;  // down-ramp interval
    bool active = false;

    double value(double r) const {
        if (!active) return 1.0;
        double v = 1.0;
        if (r < lo_b) v *= smoothstep((r - lo_a) / (lo_b - lo_a));
        if (r > hi_a) v *= smoothstep((hi_b - r) / (hi_b - hi_a));
        return v;
    }
    double deriv(double r) const {
        if (!active) return 0.0;
        const double up = r < lo_b ? smoothstep((r - lo_a) / (lo_b - lo_a)) : 1.0;
        const double dn = r > hi_a ? smoothstep((hi_b - r) / (hi_b - hi_a)) : 1.0;
        double d = 0.0;
        if (r < lo_b) d += smoothstep_deriv((r - lo_a) / (lo_b - lo_a)) / (lo_b - lo_a) * dn;
        if (r > hi_a) d -= smoothstep_deriv((hi_b - r) / (hi_b - hi_a)) / (hi_b - hi_a) * up;
        return d;
    }
};

Ramp ramp_of(const RadialPowerLog& f) {
    Ramp r;
    if (f.edge_frac > 0.0) {
        const double w = f.edge_frac * (f.r_hi - f.r_lo);
        r.lo_a = f.r_lo;
        r.lo_b = f.r_lo + w;
        r.hi_a = f.r_hi - w;
        r.hi_b = f.r_hi;
        r.active = true;
    }
    return r;
}

// amplitude * r^a * |log r|^b without the ramp.
double power_log_core(const RadialPowerLog& f, double r) {
    double v = f.amplitude * std::pow(r, f.a);
    if (f.b != 0.0) {
        const double L = std::fabs(std::log(r));
        if (L == 0.0) return 0.0;  // value 0 at r = 1 by convention (also for b < 0)
        v *= std::pow(L, f.b);
    }
    return v;
}

double power_log_core_deriv(const RadialPowerLog& f, double r) {
    if (f.b == 0.0) return f.amplitude * f.a * std::pow(r, f.a - 1.0);
    const double lg = std::log(r);
    const double L = std::fabs(lg);
    if (L == 0.0) throw invalid_input("gradient undefined at |x| = 1 for log-power profiles");
    const double sgn = lg > 0.0 ? 1.0 : -1.0;
    return f.amplitude * std::pow(r, f.a - 1.0) * std::pow(L, f.b - 1.0) * (f.a * L + f.b * sgn);
}

double power_log_value(const RadialPowerLog& f, double r) {
    if (!(r > f.r_lo && r < f.r_hi)) return 0.0;
    return power_log_core(f, r) * ramp_of(f).value(r);
}

double power_log_deriv(const RadialPowerLog& f, double r) {
    if (r == f.r_lo || r == f.r_hi) {
        if (f.edge_frac == 0.0)
            throw invalid_input("gradient undefined at the support boundary");
        return 0.0;
    }
    if (!(r > f.r_lo && r < f.r_hi)) return 0.0;
    const Ramp rp = ramp_of(f);
    return power_log_core_deriv(f, r) * rp.value(r) + power_log_core(f, r) * rp.deriv(r);
}

double bump_profile(const SmoothBump& f, double rho) {
    const double u = rho * rho / (f.radius * f.radius);
    if (u >= 1.0) return 0.0;
    return f.amplitude * std::exp(1.0 - 1.0 / (1.0 - u));
}

double bump_profile_deriv(const SmoothBump& f, double rho) {
    const double u = rho * rho / (f.radius * f.radius);
    if (u >= 1.0) return 0.0;
    const double g = 1.0 - u;
    return -bump_profile(f, rho) * (2.0 * rho / (f.radius * f.radius)) / (g * g);
}

double gauss_profile(const GaussianSpec& f, double rho) {
    return f.amplitude * std::exp(-rho * rho / (2.0 * f.scale * f.scale));
}

void check_dim(const FunctionSpec& f, const Point& x) {
    if (static_cast<int>(x.size()) != f.dim)
        throw invalid_input("point dimension does not match function dimension");
}

std::optional<int> k_min_from_radius(double r_lo) {
    if (!(r_lo > 0.0)) return std::nullopt;
    int e = 0;
    std::frexp(r_lo, &e);
    return e;  // smallest k with 2^k > r_lo (support is open at r_lo)
}

std::optional<int> k_max_from_radius(double r_hi) {
    if (std::isinf(r_hi)) return std::nullopt;
    int e = 0;
    const double frac = std::frexp(r_hi, &e);
    return frac == 0.5 ? e - 1 : e;  // largest k with 2^{k-1} < r_hi
}

std::pair<double, double> radial_extent(const Point& center, double radius) {
    const double c = euclid_norm(center);
    return {std::max(0.0, c - radius), c + radius};
}

constexpr double kGaussianCutSigmas = 8.0;  // tail exp(-32) ~ 1.3e-14

}  // namespace

Point SampledGrid::bbox_hi() const {
    Point hi(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        const double extent = interp == Interp::multilinear ? (counts[i] - 1) * spacing
                                                            : counts[i] * spacing;
        hi[i] = bbox_lo[i] + extent;
    }
    return hi;
}

FunctionSpec FunctionSpec::radial_power_log(int dim, RadialPowerLog r) {
    if (dim < 1) throw invalid_input("dimension must be >= 1");
    if (!(r.r_hi > r.r_lo) || r.r_lo < 0.0)
        throw invalid_input("power-log support requires 0 <= r_lo < r_hi");
    if (r.edge_frac < 0.0 || r.edge_frac >= 0.5)
        throw invalid_input("edge_frac must lie in [0, 1/2)");
    return FunctionSpec{dim, r};
}

FunctionSpec FunctionSpec::bump(Point center, double radius, double amplitude) {
    if (!(radius > 0.0)) throw invalid_input("bump radius must be positive");
    const int dim = static_cast<int>(center.size());
    return FunctionSpec{dim, SmoothBump{std::move(center), radius, amplitude}};
}

FunctionSpec FunctionSpec::gaussian(Point center, double scale, double amplitude) {
    if (!(scale > 0.0)) throw invalid_input("gaussian scale must be positive");
    const int dim = static_cast<int>(center.size());
    return FunctionSpec{dim, GaussianSpec{std::move(center), scale, amplitude}};
}

FunctionSpec FunctionSpec::plateau(int dim, double r_lo, double r_hi, double amplitude) {
    return radial_power_log(dim, RadialPowerLog{0.0, 0.0, r_lo, r_hi, amplitude, 0.0});
}

FunctionSpec FunctionSpec::sum(std::vector<FunctionSpec> members) {
    if (members.empty()) throw invalid_input("finite sum needs at least one member");
    const int dim = members.front().dim;
    for (const auto& m : members)
        if (m.dim != dim) throw invalid_input("finite sum members must share one dimension");
    return FunctionSpec{dim, FiniteSum{std::move(members)}};
}

FunctionSpec FunctionSpec::grid(SampledGrid g) {
    if (g.dim < 1 || g.dim > 3) throw invalid_input("sampled grids support dimensions 1..3");
    if (!(g.spacing > 0.0)) throw invalid_input("grid spacing must be positive");
    if (static_cast<int>(g.counts.size()) != g.dim || g.values.size() != g.expected_size())
        throw invalid_input("grid value array does not match the per-axis sample counts");
    return FunctionSpec{g.dim, std::move(g)};
}

double grid_value(const SampledGrid& g, const Point& x) {
    const int n = g.dim;
    if (g.interp == SampledGrid::Interp::piecewise_constant) {
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i) {
            const double t = (x[i] - g.bbox_lo[i]) / g.spacing;
            if (t < 0.0 || t >= g.counts[i]) return 0.0;
            idx = idx * g.counts[i] + static_cast<std::size_t>(t);
        }
        return g.values[idx];
    }
    // Multilinear interpolation; zero outside the sampled box.
    int base[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        const double t = (x[i] - g.bbox_lo[i]) / g.spacing;
        if (t < 0.0 || t > g.counts[i] - 1) return 0.0;
        int b = static_cast<int>(t);
        if (b >= g.counts[i] - 1) b = g.counts[i] - 2;
        if (g.counts[i] == 1) {
            base[i] = 0;
            frac[i] = 0.0;
        } else {
            base[i] = b;
            frac[i] = t - b;
        }
    }
    double acc = 0.0;
    const int corners = 1 << n;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i) {
            const int off = (c >> i) & 1;
            w *= off ? frac[i] : 1.0 - frac[i];
            int node = base[i] + off;
            if (node > g.counts[i] - 1) node = g.counts[i] - 1;
            idx = idx * g.counts[i] + static_cast<std::size_t>(node);
        }
        acc += w * g.values[idx];
    }
    return acc;
}

double evaluate(const FunctionSpec& f, const Point& x) {
    check_dim(f, x);
    return std::visit(
        [&](const auto& node) -> double {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, RadialPowerLog>) {
                return power_log_value(node, euclid_norm(x));
            } else if constexpr (std::is_same_v<T, SmoothBump>) {
                return bump_profile(node, dist(x, node.center));
            } else if constexpr (std::is_same_v<T, GaussianSpec>) {
                return gauss_profile(node, dist(x, node.center));
            } else if constexpr (std::is_same_v<T, SampledGrid>) {
                return grid_value(node, x);
            } else if constexpr (std::is_same_v<T, FiniteSum>) {
                double s = 0.0;
                for (const auto& m : node.members) s += evaluate(m, x);
                return s;
            } else {
                Point y(x.size());
                const double c = pow2i(node.m);
                for (std::size_t i = 0; i < x.size(); ++i) y[i] = c * x[i];
                return evaluate(*node.base, y);
            }
        },
        f.node);
}

bool gradient_available(const FunctionSpec& f) {
    return std::visit(
        [&](const auto& node) -> bool {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, FiniteSum>) {
                return std::all_of(node.members.begin(), node.members.end(),
                                   [](const FunctionSpec& m) { return gradient_available(m); });
            } else if constexpr (std::is_same_v<T, DyadicDilate>) {
                return gradient_available(*node.base);
            } else {
                return true;
            }
        },
        f.node);
}

Point gradient(const FunctionSpec& f, const Point& x) {
    check_dim(f, x);
    return std::visit(
        [&](const auto& node) -> Point {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, RadialPowerLog>) {
                const double r = euclid_norm(x);
                if (r == 0.0) {
                    if (node.r_lo > 0.0) return Point(x.size(), 0.0);
                    throw invalid_input("gradient undefined at the origin");
                }
                const double d = power_log_deriv(node, r);
                Point g(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) g[i] = d * x[i] / r;
                return g;
            } else if constexpr (std::is_same_v<T, SmoothBump>) {
                const double u = [&] {
                    double s = 0.0;
                    for (std::size_t i = 0; i < x.size(); ++i) {
                        const double d = x[i] - node.center[i];
                        s += d * d;
                    }
                    return s / (node.radius * node.radius);
                }();
                Point g(x.size(), 0.0);
                if (u >= 1.0) return g;
                const double val = node.amplitude * std::exp(1.0 - 1.0 / (1.0 - u));
                const double fac = -val * 2.0 / (node.radius * node.radius * (1.0 - u) * (1.0 - u));
                for (std::size_t i = 0; i < x.size(); ++i) g[i] = fac * (x[i] - node.center[i]);
                return g;
            } else if constexpr (std::is_same_v<T, GaussianSpec>) {
                const double val = gauss_profile(node, dist(x, node.center));
                Point g(x.size());
                const double fac = -val / (node.scale * node.scale);
                for (std::size_t i = 0; i < x.size(); ++i) g[i] = fac * (x[i] - node.center[i]);
                return g;
            } else if constexpr (std::is_same_v<T, SampledGrid>) {
                Point g(x.size());
                const double h = node.spacing;
                for (std::size_t i = 0; i < x.size(); ++i) {
                    Point xp = x, xm = x;
                    xp[i] += h;
                    xm[i] -= h;
                    g[i] = (grid_value(node, xp) - grid_value(node, xm)) / (2.0 * h);
                }
                return g;
            } else if constexpr (std::is_same_v<T, FiniteSum>) {
                Point g(x.size(), 0.0);
                for (const auto& m : node.members) {
                    Point gm = gradient(m, x);
                    for (std::size_t i = 0; i < g.size(); ++i) g[i] += gm[i];
                }
                return g;
            } else {
                Point y(x.size());
                const double c = pow2i(node.m);
                for (std::size_t i = 0; i < x.size(); ++i) y[i] = c * x[i];
                Point g = gradient(*node.base, y);
                for (double& v : g) v *= c;
                return g;
            }
        },
        f.node);
}

bool derivative_available(const FunctionSpec& f, int order) {
    if (order <= 0) return true;
    return std::visit(
        [&](const auto& node) -> bool {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, GaussianSpec>) {
                return order <= 2;
            } else if constexpr (std::is_same_v<T, FiniteSum>) {
                return std::all_of(node.members.begin(), node.members.end(),
                                   [order](const FunctionSpec& m) {
                                       return derivative_available(m, order);
                                   });
            } else if constexpr (std::is_same_v<T, DyadicDilate>) {
                return derivative_available(*node.base, order);
            } else {
                return order <= 1;
            }
        },
        f.node);
}

double derivative(const FunctionSpec& f, const std::vector<int>& beta, const Point& x) {
    check_dim(f, x);
    if (static_cast<int>(beta.size()) != f.dim)
        throw invalid_input("multi-index dimension mismatch");
    int order = 0;
    for (int b : beta) {
        if (b < 0) throw invalid_input("multi-index entries must be >= 0");
        order += b;
    }
    if (order == 0) return evaluate(f, x);
    if (order == 1) {
        const Point g = gradient(f, x);
        for (std::size_t i = 0; i < beta.size(); ++i)
            if (beta[i] == 1) return g[i];
    }
    return std::visit(
        [&](const auto& node) -> double {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, GaussianSpec>) {
                if (order != 2)
                    throw unsupported("derivative order above 2 not registered for gaussians");
                int i = -1, j = -1;
                for (std::size_t k = 0; k < beta.size(); ++k) {
                    if (beta[k] == 2) i = j = static_cast<int>(k);
                    if (beta[k] == 1) (i < 0 ? i : j) = static_cast<int>(k);
                }
                const double s2 = node.scale * node.scale;
                const double val = gauss_profile(node, dist(x, node.center));
                const double di = x[i] - node.center[i];
                const double dj = x[j] - node.center[j];
                return val * (di * dj / (s2 * s2) - (i == j ? 1.0 / s2 : 0.0));
            } else if constexpr (std::is_same_v<T, FiniteSum>) {
                double s = 0.0;
                for (const auto& m : node.members) s += derivative(m, beta, x);
                return s;
            } else if constexpr (std::is_same_v<T, DyadicDilate>) {
                Point y(x.size());
                const double c = pow2i(node.m);
                for (std::size_t i = 0; i < x.size(); ++i) y[i] = c * x[i];
                return std::pow(c, order) * derivative(*node.base, beta, y);
            } else {
                std::string idx;
                for (int b : beta) idx += std::to_string(b);
                throw unsupported("derivative D^(" + idx + ") not registered for this variant");
            }
        },
        f.node);
}

FunctionSpec dilate_dyadic(const FunctionSpec& f, int m) {
    if (m == 0) return f;
    return std::visit(
        [&](const auto& node) -> FunctionSpec {
            using T = std::decay_t<decltype(node)>;
            const double c = pow2i(-m);  // support radii shrink by 2^{-m}
            if constexpr (std::is_same_v<T, RadialPowerLog>) {
                if (node.b == 0.0) {
                    RadialPowerLog out = node;
                    out.r_lo = node.r_lo * c;
                    out.r_hi = node.r_hi * c;
                    out.amplitude = node.amplitude * exp2d(static_cast<double>(m) * node.a);
                    return FunctionSpec{f.dim, out};
                }
                auto base = std::make_shared<FunctionSpec>(f);
                return FunctionSpec{f.dim, DyadicDilate{std::move(base), m}};
            } else if constexpr (std::is_same_v<T, SmoothBump>) {
                SmoothBump out = node;
                for (double& v : out.center) v *= c;
                out.radius *= c;
                return FunctionSpec{f.dim, out};
            } else if constexpr (std::is_same_v<T, GaussianSpec>) {
                GaussianSpec out = node;
                for (double& v : out.center) v *= c;
                out.scale *= c;
                return FunctionSpec{f.dim, out};
            } else if constexpr (std::is_same_v<T, SampledGrid>) {
                throw unsupported("dyadic dilation is not defined for sampled grids");
            } else if constexpr (std::is_same_v<T, FiniteSum>) {
                std::vector<FunctionSpec> members;
                members.reserve(node.members.size());
                for (const auto& mem : node.members) members.push_back(dilate_dyadic(mem, m));
                return FunctionSpec{f.dim, FiniteSum{std::move(members)}};
            } else {
                const int total = node.m + m;
                if (total == 0) return *node.base;
                return FunctionSpec{f.dim, DyadicDilate{node.base, total}};
            }
        },
        f.node);
}

FunctionSpec scale(const FunctionSpec& f, double c) {
    return std::visit(
        [&](const auto& node) -> FunctionSpec {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, RadialPowerLog>) {
                RadialPowerLog out = node;
                out.amplitude *= c;
                return FunctionSpec{f.dim, out};
            } else if constexpr (std::is_same_v<T, SmoothBump>) {
                SmoothBump out = node;
                out.amplitude *= c;
                return FunctionSpec{f.dim, out};
            } else if constexpr (std::is_same_v<T, GaussianSpec>) {
                GaussianSpec out = node;
                out.amplitude *= c;
                return FunctionSpec{f.dim, out};
            } else if constexpr (std::is_same_v<T, SampledGrid>) {
                SampledGrid out = node;
                for (double& v : out.values) v *= c;
                return FunctionSpec{f.dim, std::move(out)};
            } else if constexpr (std::is_same_v<T, FiniteSum>) {
                std::vector<FunctionSpec> members;
                members.reserve(node.members.size());
                for (const auto& mem : node.members) members.push_back(scale(mem, c));
                return FunctionSpec{f.dim, FiniteSum{std::move(members)}};
            } else {
                auto base = std::make_shared<FunctionSpec>(scale(*node.base, c));
                return FunctionSpec{f.dim, DyadicDilate{std::move(base), node.m}};
            }
        },
        f.node);
}

SupportInfo support_annuli(const FunctionSpec& f) {
    return std::visit(
        [&](const auto& node) -> SupportInfo {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, RadialPowerLog>) {
                SupportInfo s;
                s.k_min = k_min_from_radius(node.r_lo);
                s.k_max = k_max_from_radius(node.r_hi);
                s.decay = DecayHint::power;
                s.power_a = node.a;
                return s;
            } else if constexpr (std::is_same_v<T, SmoothBump>) {
                auto [lo, hi] = radial_extent(node.center, node.radius);
                SupportInfo s;
                s.k_min = k_min_from_radius(lo);
                s.k_max = k_max_from_radius(hi);
                s.decay = DecayHint::compact;
                return s;
            } else if constexpr (std::is_same_v<T, GaussianSpec>) {
                SupportInfo s;
                s.decay = DecayHint::gaussian;
                return s;
            } else if constexpr (std::is_same_v<T, SampledGrid>) {
                const Point hi = node.bbox_hi();
                double lo_r2 = 0.0, hi_r2 = 0.0;
                for (int i = 0; i < node.dim; ++i) {
                    const double a = node.bbox_lo[i], b = hi[i];
                    const double far = std::max(std::fabs(a), std::fabs(b));
                    hi_r2 += far * far;
                    if (a > 0.0)
                        lo_r2 += a * a;
                    else if (b < 0.0)
                        lo_r2 += b * b;
                }
                SupportInfo s;
                s.k_min = k_min_from_radius(std::sqrt(lo_r2));
                s.k_max = k_max_from_radius(std::sqrt(hi_r2));
                s.decay = DecayHint::compact;
                return s;
            } else if constexpr (std::is_same_v<T, FiniteSum>) {
                SupportInfo s = support_annuli(node.members.front());
                for (std::size_t i = 1; i < node.members.size(); ++i) {
                    const SupportInfo t = support_annuli(node.members[i]);
                    if (!t.k_min || (s.k_min && *t.k_min < *s.k_min)) s.k_min = t.k_min;
                    if (!t.k_max || (s.k_max && *t.k_max > *s.k_max)) s.k_max = t.k_max;
                    if (t.decay == DecayHint::gaussian && s.decay == DecayHint::compact)
                        s.decay = DecayHint::gaussian;
                    if (t.decay == DecayHint::power &&
                        (s.decay != DecayHint::power || t.power_a < s.power_a)) {
                        s.decay = DecayHint::power;
                        s.power_a = t.power_a;
                    }
                }
                return s;
            } else {
                SupportInfo s = support_annuli(*node.base);
                if (s.k_min) s.k_min = *s.k_min - node.m;
                if (s.k_max) s.k_max = *s.k_max - node.m;
                return s;
            }
        },
        f.node);
}

bool is_radial(const FunctionSpec& f) {
    return std::visit(
        [&](const auto& node) -> bool {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, RadialPowerLog>) {
                return true;
            } else if constexpr (std::is_same_v<T, SmoothBump> ||
                                 std::is_same_v<T, GaussianSpec>) {
                return std::all_of(node.center.begin(), node.center.end(),
                                   [](double v) { return v == 0.0; });
            } else if constexpr (std::is_same_v<T, SampledGrid>) {
                return false;
            } else if constexpr (std::is_same_v<T, FiniteSum>) {
                return std::all_of(node.members.begin(), node.members.end(),
                                   [](const FunctionSpec& m) { return is_radial(m); });
            } else {
                return is_radial(*node.base);
            }
        },
        f.node);
}

double radial_value(const FunctionSpec& f, double r) {
    return std::visit(
        [&](const auto& node) -> double {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, RadialPowerLog>) {
                return power_log_value(node, r);
            } else if constexpr (std::is_same_v<T, SmoothBump>) {
                return bump_profile(node, r);
            } else if constexpr (std::is_same_v<T, GaussianSpec>) {
                return gauss_profile(node, r);
            } else if constexpr (std::is_same_v<T, FiniteSum>) {
                double s = 0.0;
                for (const auto& m : node.members) s += radial_value(m, r);
                return s;
            } else if constexpr (std::is_same_v<T, DyadicDilate>) {
                return radial_value(*node.base, pow2i(node.m) * r);
            } else {
                throw unsupported("function is not radial");
            }
        },
        f.node);
}

double radial_derivative(const FunctionSpec& f, double r) {
    return std::visit(
        [&](const auto& node) -> double {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, RadialPowerLog>) {
                return power_log_deriv(node, r);
            } else if constexpr (std::is_same_v<T, SmoothBump>) {
                return bump_profile_deriv(node, r);
            } else if constexpr (std::is_same_v<T, GaussianSpec>) {
                return -gauss_profile(node, r) * r / (node.scale * node.scale);
            } else if constexpr (std::is_same_v<T, FiniteSum>) {
                double s = 0.0;
                for (const auto& m : node.members) s += radial_derivative(m, r);
                return s;
            } else if constexpr (std::is_same_v<T, DyadicDilate>) {
                const double c = pow2i(node.m);
                return c * radial_derivative(*node.base, c * r);
            } else {
                throw unsupported("function is not radial");
            }
        },
        f.node);
}

std::vector<double> radial_breakpoints(const FunctionSpec& f) {
    std::vector<double> pts;
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, RadialPowerLog>) {
                const Ramp rp = ramp_of(node);
                pts = {node.r_lo, node.r_hi};
                if (rp.active) {
                    pts.push_back(rp.lo_b);
                    pts.push_back(rp.hi_a);
                }
                if (node.b != 0.0 && node.r_lo < 1.0 && node.r_hi > 1.0) pts.push_back(1.0);
            } else if constexpr (std::is_same_v<T, SmoothBump>) {
                auto [lo, hi] = radial_extent(node.center, node.radius);
                pts = {lo, hi};
            } else if constexpr (std::is_same_v<T, GaussianSpec>) {
                // smooth everywhere
            } else if constexpr (std::is_same_v<T, SampledGrid>) {
                // handled by the grid integrator
            } else if constexpr (std::is_same_v<T, FiniteSum>) {
                for (const auto& m : node.members) {
                    auto sub = radial_breakpoints(m);
                    pts.insert(pts.end(), sub.begin(), sub.end());
                }
            } else {
                pts = radial_breakpoints(*node.base);
                for (double& v : pts) v *= pow2i(-node.m);
            }
        },
        f.node);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

std::pair<Point, Point> support_bbox(const FunctionSpec& f) {
    const std::size_t n = static_cast<std::size_t>(f.dim);
    return std::visit(
        [&](const auto& node) -> std::pair<Point, Point> {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, RadialPowerLog>) {
                return {Point(n, -node.r_hi), Point(n, node.r_hi)};
            } else if constexpr (std::is_same_v<T, SmoothBump>) {
                Point lo = node.center, hi = node.center;
                for (std::size_t i = 0; i < n; ++i) {
                    lo[i] -= node.radius;
                    hi[i] += node.radius;
                }
                return {lo, hi};
            } else if constexpr (std::is_same_v<T, GaussianSpec>) {
                Point lo = node.center, hi = node.center;
                const double cut = kGaussianCutSigmas * node.scale;
                for (std::size_t i = 0; i < n; ++i) {
                    lo[i] -= cut;
                    hi[i] += cut;
                }
                return {lo, hi};
            } else if constexpr (std::is_same_v<T, SampledGrid>) {
                return {node.bbox_lo, node.bbox_hi()};
            } else if constexpr (std::is_same_v<T, FiniteSum>) {
                auto [lo, hi] = support_bbox(node.members.front());
                for (std::size_t i = 1; i < node.members.size(); ++i) {
                    auto [l2, h2] = support_bbox(node.members[i]);
                    for (std::size_t d = 0; d < n; ++d) {
                        lo[d] = std::min(lo[d], l2[d]);
                        hi[d] = std::max(hi[d], h2[d]);
                    }
                }
                return {lo, hi};
            } else {
                auto [lo, hi] = support_bbox(*node.base);
                const double c = pow2i(-node.m);
                for (std::size_t d = 0; d < n; ++d) {
                    lo[d] *= c;
                    hi[d] *= c;
                }
                return {lo, hi};
            }
        },
        f.node);
}

}  // namespace herzkit
