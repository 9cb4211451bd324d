#pragma once

#include <optional>
#include <string>
#include <vector>

#include "herzkit/norms.hpp"
#include "herzkit/operators.hpp"
#include "herzkit/params.hpp"

namespace herzkit {

struct EmbeddingExperiment {
    TheoremId thm = TheoremId::Embeddings1;
    ParamBundle params;
    std::vector<FunctionSpec> family;
    std::vector<int> dilation_levels{0};
    DomainSpec domain = DomainSpec::full_space();
    bool override_hypotheses = false;  // boundary exploration; watermarked in the report
    double invariance_tol = 1e-4;
};

struct RatioRow {
    int func_index = 0;
    int m = 0;  // dilation level
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;  // lhs / rhs, full source norm
    double rhs_scaling = 0.0;
    double ratio_scaling = 0.0;  // against the scale-homogeneous part of the source
    bool evaluated = false;
    std::string error;  // set when this member/level failed; the run continues
};

struct EmbeddingReport {
    TheoremId thm = TheoremId::Embeddings1;
    HypothesisReport hypothesis;
    bool hypothesis_override = false;
    std::vector<RatioRow> per_function;
    double empirical_constant = 0.0;  // max full ratio over evaluated rows
    double scaling_constant = 0.0;    // max scaling ratio
    double scaling_exponent_lhs = 0.0;
    double scaling_exponent_rhs = 0.0;
    bool scaling_balanced = false;
    bool scaling_invariant = false;  // measured only when balanced
    double max_ratio_drift = 0.0;    // max relative drift of the scaling ratio across m
    double invariance_tol = 1e-4;
    int n_evaluated = 0;
    int n_errors = 0;
    bool pass = false;
};

// Target-space norm (lhs) and source-space norm (rhs) of one function for
// the chosen statement; the interpolation-type statements return the
// theta-weighted product on the rhs.
std::pair<double, double> lhs_rhs(TheoremId thm, const ParamBundle& params,
                                  const FunctionSpec& f, const DomainSpec& domain,
                                  const TruncationPolicy& trunc = {},
                                  const QuadratureOptions& opts = {});

// Dilation exponents of the two sides; under f -> f(2^m x) each side scales
// as 2^{-m e}. For the inhomogeneous Sobolev-type sources the exponent of
// the top-order seminorm is reported (the part the balance relations tie to
// the target). For statements with no dilation bookkeeping (local
// integrability) nothing is returned.
std::optional<std::pair<double, double>> scaling_exponents(TheoremId thm,
                                                           const ParamBundle& params);

EmbeddingReport run_embedding(const EmbeddingExperiment& exp, const TruncationPolicy& trunc = {},
                              const QuadratureOptions& opts = {});

// ---- boundary counterexamples of the local-integrability lemma ----

struct Case1Row {
    double eps = 0.0;
    double l1_truncated = 0.0;    // L^1 mass over eps < |x| < r; grows like log(r/eps)
    double herz_truncated = 0.0;  // Herz norm of the truncated profile; Cauchy in eps
};

struct Case1Table {
    std::vector<Case1Row> rows;
    double sphere = 0.0;  // surface measure of the unit sphere
};

// f = |x|^{-n} restricted to eps < |x| < r, in the regime alpha > n - n/p.
Case1Table counterexample_case1(double r, const HerzParams& hp,
                                const std::vector<double>& eps_list,
                                const QuadratureOptions& opts = {});

struct Case2Row {
    int j = 0;  // annulus index -j
    double herz_term_q = 0.0;  // (2^{k alpha} mass_k)^q, behaves like j^{-q}
    double herz_partial = 0.0;
    double l1_term = 0.0;  // behaves like 1/j
    double l1_partial = 0.0;
};

struct Case2Table {
    std::vector<Case2Row> rows;
    double tail_bound = 0.0;    // integral-test bound on the Herz tail past K
    double envelope_lo = 0.0;   // bounds of herz_term_q * j^q over the table
    double envelope_hi = 0.0;
};

// f = |x|^{-n} (|log|x||)^{-1} on 0 < |x| < 1/2 at the edge alpha = n - n/p,
// q > 1: Herz partial sums converge, L^1 partial sums diverge.
Case2Table counterexample_case2(const HerzParams& hp, int K,
                                const QuadratureOptions& opts = {});

// ---- reporting ----

struct ConstantSummary {
    struct Row {
        std::string theorem;
        int func_index = -1;  // -1: aggregate over the family
        std::string label;
        double constant = 0.0;
    };
    std::vector<Row> rows;
};

ConstantSummary estimate_constant(const std::vector<EmbeddingReport>& reports);

// Default experiment family: three gaussians, three bumps (one off-center),
// two power profiles with smoothed edges.
std::vector<FunctionSpec> default_family(int n);

// A parameter slice satisfying every hypothesis of the statement.
ParamBundle default_params(TheoremId thm);

std::string variant_label(const FunctionSpec& f);

}  // namespace herzkit
