#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "herzkit/domain.hpp"
#include "herzkit/funclib.hpp"
#include "herzkit/params.hpp"
#include "herzkit/quadrature.hpp"

namespace herzkit {

// Controls the truncation of the two-sided sum over annulus indices. The sum
// window grows in blocks of eight terms per side until a block contributes
// less than tail_tol times the running norm, the policy window is exhausted,
// or hard_cap annuli have been spent on that side.
struct TruncationPolicy {
    int k_lo = -64;
    int k_hi = 64;
    double tail_tol = 1e-12;
    int hard_cap = 256;

    static TruncationPolicy defaults() { return {}; }
};

enum class NormStatus { converged, truncated, diverging_low, diverging_high };

struct NormResult {
    double value = 0.0;
    std::vector<std::pair<int, double>> terms;  // (k, 2^{k alpha} ||f chi_k||_p), ascending k
    std::pair<int, int> k_range_used{0, 0};
    double err_est = 0.0;
    bool converged = true;
    NormStatus status = NormStatus::converged;
};

NormResult herz_norm(const FunctionSpec& f, const HerzParams& hp, const DomainSpec& omega,
                     const TruncationPolicy& trunc = {}, const QuadratureOptions& opts = {});

// Same aggregation on an arbitrary evaluator (operator outputs and other
// internal fields).
NormResult herz_norm_field(const ScalarField& field, const HerzParams& hp,
                           const DomainSpec& omega, const TruncationPolicy& trunc = {},
                           const QuadratureOptions& opts = {});

// (integral over omega of |f|^p |x|^{alpha p})^{1/p}; p finite.
double weighted_lp_norm(const FunctionSpec& f, double alpha, Exponent p, const DomainSpec& omega,
                        const QuadratureOptions& opts = {});
double weighted_lp_norm_field(const ScalarField& field, double alpha, Exponent p,
                              const DomainSpec& omega, const QuadratureOptions& opts = {});

// Per annulus an l^p sum over all multi-indices |beta| <= m of the D^beta f
// masses, then the usual weighted l^q aggregation over k.
NormResult herz_sobolev_norm(const FunctionSpec& f, const SobolevParams& sp,
                             const DomainSpec& omega, const TruncationPolicy& trunc = {},
                             const QuadratureOptions& opts = {});

// Restriction of the inner sum to |beta| = order (the scale-homogeneous part).
NormResult herz_sobolev_seminorm(const FunctionSpec& f, const SobolevParams& sp,
                                 const DomainSpec& omega, const TruncationPolicy& trunc = {},
                                 const QuadratureOptions& opts = {});

// Weighted l^r aggregation of the |grad f| annulus masses.
NormResult gradient_herz_norm(const FunctionSpec& f, double alpha2, Exponent p, Exponent r,
                              const DomainSpec& omega = DomainSpec::full_space(),
                              const TruncationPolicy& trunc = {},
                              const QuadratureOptions& opts = {});

// delta_k = sum_{j>=k} a^{j-k} eps_j by backward recursion; the input is a
// finite array, tail treated as zero.
std::vector<double> hardy_transform(const std::vector<double>& eps, double a);

struct HardyCheck {
    double lhs = 0.0;
    double rhs_bound = 0.0;
    bool ok = false;
};

// l^q norm of the transform against c(a, q) times the l^q norm of the input,
// with c = (1-a)^{-1} for q >= 1 and c = (1-a^q)^{-1/q} for 0 < q < 1.
HardyCheck hardy_bound_check(const std::vector<double>& eps, double a, Exponent q);

// All multi-indices beta in dimension n with |beta| == order.
std::vector<std::vector<int>> multi_indices(int n, int order);

}  // namespace herzkit
