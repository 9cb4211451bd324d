#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "herzkit/common.hpp"
#include "herzkit/domain.hpp"
#include "herzkit/exponent.hpp"
#include "herzkit/funclib.hpp"

namespace herzkit {

enum class QuadraturePath {
    auto_select,  // radial reduction when function and domain allow, grid otherwise
    radial_1d,
    tensor_grid,
    oracle_exact,  // closed-form / high-precision route for power-log profiles
};

struct QuadratureOptions {
    double rel_tol = 1e-10;       // radial path default; grid paths use grid_rel_tol
    double grid_rel_tol = 1e-4;
    int max_subdivisions = 60;    // adaptive bisection depth cap per panel
    int angular_cap = 256;        // angular nodes cap for the product grid
    // > 0 replaces the adaptive radial refinement by this many equal
    // Gauss panels per shell. Operator outputs (maximal function, Riesz
    // potential) are only piecewise smooth and make bisection thrash; the
    // fixed layout also scales exactly under dyadic dilation.
    int radial_fixed_panels = 0;
    QuadraturePath mode = QuadraturePath::auto_select;

    static QuadratureOptions defaults() { return {}; }
    // Looser settings for the experiment engine (many norms per run).
    static QuadratureOptions fast() {
        QuadratureOptions o;
        o.rel_tol = 1e-8;
        o.grid_rel_tol = 1e-5;
        o.angular_cap = 128;
        return o;
    }
};

// ||f chi_k chi_Omega||_p for one dyadic shell.
struct AnnulusMass {
    int k = 0;
    double value = 0.0;
    double err_est = 0.0;
};

// Surface measure of the unit sphere: 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

// Volume of the unit ball: sphere_area(n) / n.
double ball_volume(int n);

// Internal evaluator: a scalar function of known dimension with enough
// support metadata to drive the integrators. Operator outputs and
// derivative fields flow through this without materializing a FunctionSpec.
struct ScalarField {
    int dim = 1;
    std::function<double(const Point&)> eval;
    std::function<double(double)> radial;  // set iff radially symmetric
    SupportInfo support;
    std::vector<double> breakpoints;  // radial panel splits
    Point bbox_lo, bbox_hi;           // support bounding box
    bool has_bbox = false;

    bool is_radial() const { return static_cast<bool>(radial); }
};

ScalarField field_of(const FunctionSpec& f);
ScalarField gradient_magnitude_field(const FunctionSpec& f);
ScalarField derivative_field(const FunctionSpec& f, std::vector<int> beta);

// |x|^alpha * field.
ScalarField power_weighted(const ScalarField& base, double alpha);

AnnulusMass annulus_lp_norm(const FunctionSpec& f, int k, Exponent p, const DomainSpec& omega,
                            const QuadratureOptions& opts);
AnnulusMass annulus_lp_norm(const ScalarField& field, int k, Exponent p, const DomainSpec& omega,
                            const QuadratureOptions& opts);

// (integral of |field|^p over {r_lo <= |x| < r_hi} ∩ omega)^{1/p}; the
// annulus masses are the r_lo = 2^{k-1}, r_hi = 2^k case. p = inf gives the
// sup over the shell.
AnnulusMass shell_lp_norm(const ScalarField& field, double r_lo, double r_hi, Exponent p,
                          const DomainSpec& omega, const QuadratureOptions& opts);

// Adaptive Gauss-Legendre on [a, b]; abs_tol is the absolute error target.
// Accumulates an error estimate into *err_acc when given.
double adaptive_integrate(const std::function<double(double)>& g, double a, double b,
                          double abs_tol, int max_depth, double* err_acc = nullptr);

// Nodes/weights of the N-point Gauss-Legendre rule on [-1, 1].
const std::vector<double>& gauss_nodes(int n);
const std::vector<double>& gauss_weights(int n);

}  // namespace herzkit
