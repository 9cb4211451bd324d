#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "herzkit/common.hpp"
#include "herzkit/domain.hpp"

namespace herzkit {

struct FunctionSpec;

// f(x) = amplitude * |x|^a * (|log|x||)^b on r_lo < |x| < r_hi, zero
// elsewhere. edge_frac > 0 replaces the hard support cutoffs by C^2 ramps
// over a fraction of the support width, which keeps the a.e. gradient
// meaningful for the gradient norms. With b < 0 the value at |x| = 1 is 0
// by convention (a measure-zero set, so no norm is affected).
struct RadialPowerLog {
    double a = 0.0;
    double b = 0.0;
    double r_lo = 0.0;
    double r_hi = 1.0;
    double amplitude = 1.0;
    double edge_frac = 0.0;  // in [0, 1/2)
};

// C-infinity profile amplitude * exp(1 - 1/(1 - |x-c|^2/R^2)) inside the
// ball of radius R around c, identically zero outside (with all derivatives).
struct SmoothBump {
    Point center;
    double radius = 1.0;
    double amplitude = 1.0;
};

struct GaussianSpec {
    Point center;
    double scale = 1.0;  // f = A exp(-|x-c|^2 / (2 scale^2))
    double amplitude = 1.0;
};

// Dense samples on a uniform axis-aligned grid, n <= 3. Node-centered grids
// evaluate by multilinear interpolation; cell-centered grids are piecewise
// constant (the carrier used by the dyadic averaging projection).
struct SampledGrid {
    enum class Interp { multilinear, piecewise_constant };

    int dim = 1;
    Point bbox_lo;
    double spacing = 1.0;
    std::vector<int> counts;  // nodes (multilinear) or cells (piecewise) per axis
    std::vector<double> values;  // row-major, last axis fastest
    Interp interp = Interp::multilinear;

    std::size_t expected_size() const {
        std::size_t s = 1;
        for (int c : counts) s *= static_cast<std::size_t>(c);
        return s;
    }
    Point bbox_hi() const;
};

struct FiniteSum {
    std::vector<FunctionSpec> members;
};

// x -> base(2^m x) for variants that do not fold into their own family
// under dyadic dilation (power-log profiles with a log factor).
struct DyadicDilate {
    std::shared_ptr<const FunctionSpec> base;
    int m = 0;
};

struct FunctionSpec {
    int dim = 1;
    std::variant<RadialPowerLog, SmoothBump, GaussianSpec, SampledGrid, FiniteSum, DyadicDilate>
        node;

    static FunctionSpec radial_power_log(int dim, RadialPowerLog r);
    static FunctionSpec bump(Point center, double radius, double amplitude = 1.0);
    static FunctionSpec gaussian(Point center, double scale, double amplitude = 1.0);
    // Indicator-style plateau: amplitude on r_lo < |x| < r_hi, zero elsewhere.
    static FunctionSpec plateau(int dim, double r_lo, double r_hi, double amplitude = 1.0);
    static FunctionSpec sum(std::vector<FunctionSpec> members);
    static FunctionSpec grid(SampledGrid g);
};

// Decay class of the annulus masses outside the known index window.
enum class DecayHint { compact, gaussian, power };

struct SupportInfo {
    std::optional<int> k_min;  // absent = extends to -inf (touches the origin)
    std::optional<int> k_max;  // absent = unbounded support
    DecayHint decay = DecayHint::compact;
    double power_a = 0.0;  // exponent for DecayHint::power
};

double evaluate(const FunctionSpec& f, const Point& x);

// Analytic gradient for closed-form variants; second-order central
// differences on the interpolant for sampled grids. Throws invalid_input at
// points where the gradient is undefined (hard support edges, the origin of
// a power profile).
Point gradient(const FunctionSpec& f, const Point& x);

bool gradient_available(const FunctionSpec& f);

// Partial derivative D^beta f for |beta| <= 1 on all differentiable
// variants and |beta| <= 2 on Gaussians. Throws unsupported (naming the
// multi-index) otherwise.
double derivative(const FunctionSpec& f, const std::vector<int>& beta, const Point& x);
bool derivative_available(const FunctionSpec& f, int order);

// Spec of x -> f(2^m x). Folds in-family where exact (power profiles with
// b = 0, bumps, Gaussians); otherwise wraps. Sampled grids are rejected.
FunctionSpec dilate_dyadic(const FunctionSpec& f, int m);

// Scales the function values by c.
FunctionSpec scale(const FunctionSpec& f, double c);

SupportInfo support_annuli(const FunctionSpec& f);

// True when f is radially symmetric about the origin.
bool is_radial(const FunctionSpec& f);

// Value of a radial f at radius r (>= 0). Only valid when is_radial(f).
double radial_value(const FunctionSpec& f, double r);

// d/dr of the radial profile; |grad f|(x) = |profile'(|x|)|.
double radial_derivative(const FunctionSpec& f, double r);

// Radii where the radial profile or its derivative changes branch
// (support edges, ramp knots, log kink at r = 1); quadrature panels split
// here.
std::vector<double> radial_breakpoints(const FunctionSpec& f);

// Tight bounding box of the support (for compact/gaussian-decay specs the
// gaussian box is cut where the tail drops below ~1e-14 of the amplitude).
std::pair<Point, Point> support_bbox(const FunctionSpec& f);

double grid_value(const SampledGrid& g, const Point& x);

}  // namespace herzkit
