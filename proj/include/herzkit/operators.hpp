#pragma once

#include "herzkit/domain.hpp"
#include "herzkit/funclib.hpp"
#include "herzkit/norms.hpp"
#include "herzkit/quadrature.hpp"

namespace herzkit {

// Smooth nonnegative kernel supported in the closed ball of radius epsilon
// with unit integral: J_eps(x) = eps^{-n} J(x/eps), J the normalized bump.
class MollifierKernel {
public:
    MollifierKernel(int dim, double epsilon);

    int dim() const { return dim_; }
    double epsilon() const { return eps_; }

    // J_eps at a point z (|z| <= eps support).
    double value_at_radius(double rho) const;

    // Reference profile J at radius rho in [0, 1], unit integral over R^n.
    double profile(double rho) const;

private:
    int dim_;
    double eps_;
    double norm_;  // 1 / integral of the raw bump profile
};

// (J_eps * f)(x); f is extended by zero outside its support, n <= 3.
double mollify(const FunctionSpec& f, double eps, const Point& x,
               const QuadratureOptions& opts = {});

// Herz norm of J_eps * f - f sampled at resolution eps/4 (radial table for
// radial data, cartesian grid otherwise).
NormResult mollify_error_norm(const FunctionSpec& f, double eps, const HerzParams& hp,
                              const DomainSpec& omega, const TruncationPolicy& trunc = {},
                              const QuadratureOptions& opts = {});

// Cube family for the maximal operator: centered cubes plus the shifted
// dyadic meshes (3 offsets per axis), side lengths 2^j for j in a window
// tied to the support of f. The family max underestimates the true
// supremum by at most the factor maximal_family_constant(n).
struct MaximalOptions {
    int j_below = 6;     // extra dyadic levels below the support scale
    int j_above = 1;     // extra levels above
    int avg_order = 8;   // Gauss points per axis for each cube average
};

double maximal(const FunctionSpec& f, const Point& x, const MaximalOptions& mo = {},
               const QuadratureOptions& opts = {});

// (M(|f|^t))^{1/t}
double frac_maximal(const FunctionSpec& f, double t, const Point& x,
                    const MaximalOptions& mo = {}, const QuadratureOptions& opts = {});

// Two-sided comparison constant: family max <= M f <= C(n) * family max.
double maximal_family_constant(int n);

// Evaluator of x -> maximal(f, x) for norm experiments.
ScalarField maximal_field(const FunctionSpec& f, const MaximalOptions& mo = {});

// Riesz potential (I_lambda f)(x) = integral of f(y) |x-y|^{lambda-n} dy,
// integrated in polar coordinates around x: the weakly singular kernel
// becomes the integrable 1-D factor t^{lambda-1} against spherical means
// of f, so no singular cell ever forms.
struct RieszOptions {
    int angular = 64;      // nodes for the spherical means (doubled in 3-D polar)
    double rel_tol = 1e-6;  // pointwise tolerance of the polar integral
};

double riesz(const FunctionSpec& f, double lambda, const Point& x, const RieszOptions& ro = {},
             const QuadratureOptions& opts = {});

ScalarField riesz_field(const FunctionSpec& f, double lambda, const RieszOptions& ro = {});

// Piecewise-constant projection onto the dyadic mesh of step 2^{-j} inside
// an aligned cube region; each cell carries the average of f over it.
SampledGrid dyadic_project(const FunctionSpec& f, int j, const Cube& region,
                           const QuadratureOptions& opts = {});

}  // namespace herzkit
