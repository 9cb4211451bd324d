#include "herzkit/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "herzkit/parallel.hpp"

namespace herzkit {

namespace {

constexpr int kBlock = 8;  // annuli added per extension step

struct Term {
    int k;
    double weighted;  // 2^{k alpha} * mass
    double err;
};

// One annulus term; mass_fn must be safe to call concurrently.
using MassFn = std::function<AnnulusMass(int)>;

struct Aggregation {
    std::vector<Term> terms;  // ascending k
    NormStatus status = NormStatus::converged;
    std::pair<int, int> range{0, 0};
};

double lq_of_terms(const std::vector<Term>& terms, Exponent q) {
    if (q.is_inf()) {
        double best = 0.0;
        for (const auto& t : terms) best = std::max(best, t.weighted);
        return best;
    }
    KahanSum s;
    for (const auto& t : terms)
        if (t.weighted != 0.0) s.add(std::pow(t.weighted, q.value()));
    const double sum = s.value();
    return sum <= 0.0 ? 0.0 : std::pow(sum, 1.0 / q.value());
}

// Contribution of a block measured in the same units as the norm.
double block_size(const std::vector<Term>& block, Exponent q) {
    return lq_of_terms(block, q);
}

// Outward-non-decreasing positive terms signal a geometric blow-up at the
// truncation edge; `block` is ordered going outward.
bool looks_divergent(const std::vector<Term>& block, Exponent q) {
    if (block.size() < kBlock) return false;
    if (block.back().weighted <= 0.0) return false;
    for (std::size_t i = 0; i + 1 < block.size(); ++i)
        if (block[i + 1].weighted < block[i].weighted * (1.0 - 1e-12)) return false;
    // constant positive terms keep a sup norm finite
    if (q.is_inf())
        return block.back().weighted > block.front().weighted * (1.0 + 1e-9);
    return true;
}

// Non-increasing going outward (allowing exact ties).
bool decays_outward(const std::vector<Term>& outward) {
    for (std::size_t i = 0; i + 1 < outward.size(); ++i)
        if (outward[i + 1].weighted > outward[i].weighted * (1.0 + 1e-12)) return false;
    return true;
}

Aggregation aggregate_window(const MassFn& mass_fn, double alpha, Exponent q,
                             const SupportInfo& supp, const TruncationPolicy& trunc) {
    if (trunc.k_lo > trunc.k_hi) throw invalid_input("truncation window requires k_lo <= k_hi");
    if (!(trunc.tail_tol > 0.0)) throw invalid_input("tail_tol must be positive");

    // requested window, clipped by known support bounds; an unbounded side
    // may widen past the window while its tail keeps decaying, up to
    // hard_cap annuli on that side
    const int hi_limit = supp.k_max ? std::min(*supp.k_max, trunc.k_hi) : trunc.k_hi;
    const int lo_limit = supp.k_min ? std::max(*supp.k_min, trunc.k_lo) : trunc.k_lo;

    Aggregation agg;
    if (lo_limit > hi_limit) return agg;

    auto compute_block = [&](int k_from, int k_to) {  // inclusive, ascending
        const int count = k_to - k_from + 1;
        std::vector<Term> block(static_cast<std::size_t>(count));
        parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
            const int k = k_from + static_cast<int>(i);
            const AnnulusMass m = mass_fn(k);
            const double w = exp2d(alpha * k);
            block[i] = Term{k, w * m.value, w * m.err_est};
        });
        return block;
    };

    // seed window: known support bounds, otherwise a start near the top
    int seed_hi = hi_limit;
    if (!supp.k_max) seed_hi = std::min(hi_limit, 4);
    int seed_lo = supp.k_min ? lo_limit : std::max(lo_limit, seed_hi - 15);
    if (seed_lo > seed_hi) seed_lo = seed_hi;

    std::vector<Term> terms = compute_block(seed_lo, seed_hi);
    int cur_lo = seed_lo, cur_hi = seed_hi;

    auto running = [&] { return lq_of_terms(terms, q); };
    auto tail_settled = [&](double bs) {
        return bs <= trunc.tail_tol * std::max(running(), 1e-300) || bs < 1e-300;
    };

    // grow one side; `down` selects the direction. Returns the final status
    // contribution of that side.
    auto grow = [&](bool down) -> NormStatus {
        const bool bounded = down ? supp.k_min.has_value() : supp.k_max.has_value();
        const int window_edge = down ? lo_limit : hi_limit;
        int spent = 0;
        int stable_blocks = 0;  // q = inf: blocks that did not raise the sup
        while (spent < trunc.hard_cap) {
            const int cur = down ? cur_lo : cur_hi;
            const bool at_window = down ? cur <= window_edge : cur >= window_edge;
            if (bounded && at_window) return NormStatus::converged;  // nothing beyond
            std::vector<Term> block;
            if (down) {
                const int next = cur_lo - kBlock;
                block = compute_block(next, cur_lo - 1);
                terms.insert(terms.begin(), block.begin(), block.end());
                spent += cur_lo - next;
                cur_lo = next;
            } else {
                const int next = cur_hi + kBlock;
                block = compute_block(cur_hi + 1, next);
                terms.insert(terms.end(), block.begin(), block.end());
                spent += next - cur_hi;
                cur_hi = next;
            }
            std::vector<Term> outward = block;
            if (down) std::reverse(outward.begin(), outward.end());
            if (looks_divergent(outward, q))
                return down ? NormStatus::diverging_low : NormStatus::diverging_high;
            if (q.is_inf()) {
                const double sup_now = running();
                if (block_size(block, q) <= sup_now * (1.0 + 1e-12) &&
                    decays_outward(outward)) {
                    if (++stable_blocks >= 2) return NormStatus::converged;
                } else {
                    stable_blocks = 0;
                }
                continue;
            }
            if (tail_settled(block_size(block, q))) return NormStatus::converged;
            // past the requested window the tail must keep decaying to be
            // worth following
            const bool beyond = down ? cur_lo < window_edge : cur_hi > window_edge;
            if (beyond && !decays_outward(outward)) return NormStatus::truncated;
        }
        return NormStatus::truncated;  // hard cap with a live tail
    };

    const NormStatus down_status = grow(true);
    NormStatus up_status = NormStatus::converged;
    if (down_status != NormStatus::diverging_low) up_status = grow(false);
    agg.status = down_status;
    if (up_status == NormStatus::diverging_high ||
        (up_status == NormStatus::truncated && agg.status == NormStatus::converged))
        agg.status = up_status;

    agg.terms = std::move(terms);
    agg.range = {cur_lo, cur_hi};
    return agg;
}

NormResult finish(Aggregation agg, Exponent q) {
    NormResult out;
    out.status = agg.status;
    out.converged = agg.status == NormStatus::converged;
    out.k_range_used = agg.range;
    out.terms.reserve(agg.terms.size());
    for (const auto& t : agg.terms) out.terms.emplace_back(t.k, t.weighted);

    if (q.is_inf()) {
        double best = 0.0, err = 0.0;
        for (const auto& t : agg.terms)
            if (t.weighted >= best) {
                best = t.weighted;
                err = t.err;
            }
        out.value = best;
        out.err_est = err;
        return out;
    }
    const double qv = q.value();
    KahanSum s;
    for (const auto& t : agg.terms)
        if (t.weighted != 0.0) s.add(std::pow(t.weighted, qv));
    const double sum = s.value();
    out.value = sum <= 0.0 ? 0.0 : std::pow(sum, 1.0 / qv);
    if (out.value > 0.0) {
        double esum = 0.0;
        for (const auto& t : agg.terms)
            if (t.weighted > 0.0) esum += std::pow(t.weighted / out.value, qv - 1.0) * t.err;
        out.err_est = esum;
    }
    return out;
}

void check_dimensions(const FunctionSpec& f, const HerzParams& hp) {
    if (f.dim != hp.n)
        throw invalid_input("function dimension does not match the parameter dimension");
}

// Non-integrability screen for the power weight: a profile behaving like
// r^a near the origin with support touching it needs (a + alpha) p + n > 0.
void screen_origin_singularity(const FunctionSpec& f, double alpha, double p, int n) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, RadialPowerLog>) {
                if (node.r_lo == 0.0 && (node.a + alpha) * p + n <= 0.0)
                    throw quadrature_error(
                        "non-integrable singularity at the origin: (a+alpha)p+n <= 0");
            } else if constexpr (std::is_same_v<T, SmoothBump>) {
                if (euclid_norm(node.center) < node.radius && alpha * p + n <= 0.0)
                    throw quadrature_error(
                        "non-integrable singularity at the origin: alpha*p+n <= 0");
            } else if constexpr (std::is_same_v<T, GaussianSpec>) {
                if (alpha * p + n <= 0.0)
                    throw quadrature_error(
                        "non-integrable singularity at the origin: alpha*p+n <= 0");
            } else if constexpr (std::is_same_v<T, FiniteSum>) {
                for (const auto& m : node.members) screen_origin_singularity(m, alpha, p, n);
            } else if constexpr (std::is_same_v<T, DyadicDilate>) {
                screen_origin_singularity(*node.base, alpha, p, n);
            }
        },
        f.node);
}

}  // namespace

std::vector<std::vector<int>> multi_indices(int n, int order) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(n), 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == n - 1) {
            cur[pos] = left;
            out.push_back(cur);
            return;
        }
        for (int v = left; v >= 0; --v) {
            cur[pos] = v;
            rec(pos + 1, left - v);
        }
    };
    rec(0, order);
    return out;
}

NormResult herz_norm_field(const ScalarField& field, const HerzParams& hp,
                           const DomainSpec& omega, const TruncationPolicy& trunc,
                           const QuadratureOptions& opts) {
    MassFn mass = [&](int k) { return annulus_lp_norm(field, k, hp.p, omega, opts); };
    return finish(aggregate_window(mass, hp.alpha, hp.q, field.support, trunc), hp.q);
}

NormResult herz_norm(const FunctionSpec& f, const HerzParams& hp, const DomainSpec& omega,
                     const TruncationPolicy& trunc, const QuadratureOptions& opts) {
    check_dimensions(f, hp);
    if (opts.mode == QuadraturePath::oracle_exact) {
        MassFn mass = [&](int k) { return annulus_lp_norm(f, k, hp.p, omega, opts); };
        return finish(aggregate_window(mass, hp.alpha, hp.q, support_annuli(f), trunc), hp.q);
    }
    return herz_norm_field(field_of(f), hp, omega, trunc, opts);
}

double weighted_lp_norm_field(const ScalarField& field, double alpha, Exponent p,
                              const DomainSpec& omega, const QuadratureOptions& opts) {
    if (p.is_inf()) throw invalid_input("the power-weighted norm requires a finite exponent");
    const ScalarField weighted = power_weighted(field, alpha);
    MassFn mass = [&](int k) { return annulus_lp_norm(weighted, k, p, omega, opts); };
    const NormResult res =
        finish(aggregate_window(mass, 0.0, p, weighted.support, TruncationPolicy{}), p);
    if (res.status == NormStatus::diverging_low || res.status == NormStatus::diverging_high)
        throw quadrature_error("power-weighted norm diverges");
    return res.value;
}

double weighted_lp_norm(const FunctionSpec& f, double alpha, Exponent p, const DomainSpec& omega,
                        const QuadratureOptions& opts) {
    if (p.is_inf()) throw invalid_input("the power-weighted norm requires a finite exponent");
    if (omega.contains_origin() || omega.is_full_space())
        screen_origin_singularity(f, alpha, p.value(), f.dim);
    return weighted_lp_norm_field(field_of(f), alpha, p, omega, opts);
}

namespace {

NormResult sobolev_aggregate(const FunctionSpec& f, const SobolevParams& sp,
                             const DomainSpec& omega, const TruncationPolicy& trunc,
                             const QuadratureOptions& opts, int order_lo) {
    check_dimensions(f, sp.herz);
    for (int order = std::max(1, order_lo); order <= sp.m; ++order) {
        if (!derivative_available(f, order)) {
            const auto indices = multi_indices(f.dim, order);
            std::string idx;
            for (int b : indices.front()) idx += std::to_string(b);
            throw unsupported("missing derivative D^(" + idx + ") for this function variant");
        }
    }
    std::vector<ScalarField> fields;
    for (int order = order_lo; order <= sp.m; ++order)
        for (const auto& beta : multi_indices(f.dim, order))
            fields.push_back(derivative_field(f, beta));

    const Exponent p = sp.herz.p;
    SupportInfo supp = support_annuli(f);
    if (supp.decay == DecayHint::power) supp.power_a -= sp.m;

    MassFn mass = [&](int k) -> AnnulusMass {
        AnnulusMass out;
        out.k = k;
        if (p.is_inf()) {
            for (const auto& fld : fields) {
                const AnnulusMass m = annulus_lp_norm(fld, k, p, omega, opts);
                out.value = std::max(out.value, m.value);
                out.err_est = std::max(out.err_est, m.err_est);
            }
            return out;
        }
        const double pv = p.value();
        KahanSum s;
        double err = 0.0;
        for (const auto& fld : fields) {
            const AnnulusMass m = annulus_lp_norm(fld, k, p, omega, opts);
            if (m.value > 0.0) s.add(std::pow(m.value, pv));
            err += m.err_est;
        }
        const double sum = s.value();
        out.value = sum <= 0.0 ? 0.0 : std::pow(sum, 1.0 / pv);
        out.err_est = err;
        return out;
    };
    return finish(aggregate_window(mass, sp.herz.alpha, sp.herz.q, supp, trunc), sp.herz.q);
}

}  // namespace

NormResult herz_sobolev_norm(const FunctionSpec& f, const SobolevParams& sp,
                             const DomainSpec& omega, const TruncationPolicy& trunc,
                             const QuadratureOptions& opts) {
    return sobolev_aggregate(f, sp, omega, trunc, opts, 0);
}

NormResult herz_sobolev_seminorm(const FunctionSpec& f, const SobolevParams& sp,
                                 const DomainSpec& omega, const TruncationPolicy& trunc,
                                 const QuadratureOptions& opts) {
    return sobolev_aggregate(f, sp, omega, trunc, opts, sp.m);
}

NormResult gradient_herz_norm(const FunctionSpec& f, double alpha2, Exponent p, Exponent r,
                              const DomainSpec& omega, const TruncationPolicy& trunc,
                              const QuadratureOptions& opts) {
    if (!gradient_available(f)) throw invalid_input("gradient not available for this function");
    const ScalarField g = gradient_magnitude_field(f);
    return herz_norm_field(g, HerzParams{alpha2, p, r, f.dim}, omega, trunc, opts);
}

std::vector<double> hardy_transform(const std::vector<double>& eps, double a) {
    if (!(a > 0.0) || !(a < 1.0)) throw invalid_input("hardy ratio must satisfy 0 < a < 1");
    std::vector<double> delta(eps.size(), 0.0);
    double next = 0.0;
    for (std::size_t i = eps.size(); i-- > 0;) {
        delta[i] = eps[i] + a * next;
        next = delta[i];
    }
    return delta;
}

HardyCheck hardy_bound_check(const std::vector<double>& eps, double a, Exponent q) {
    const std::vector<double> delta = hardy_transform(eps, a);
    auto lq = [&](const std::vector<double>& v) {
        if (q.is_inf()) {
            double best = 0.0;
            for (double x : v) best = std::max(best, std::fabs(x));
            return best;
        }
        KahanSum s;
        for (double x : v)
            if (x != 0.0) s.add(std::pow(std::fabs(x), q.value()));
        const double sum = s.value();
        return sum <= 0.0 ? 0.0 : std::pow(sum, 1.0 / q.value());
    };
    const double c = (q.is_inf() || q.value() >= 1.0)
                         ? 1.0 / (1.0 - a)
                         : std::pow(1.0 - std::pow(a, q.value()), -1.0 / q.value());
    HardyCheck out;
    out.lhs = lq(delta);
    out.rhs_bound = c * lq(eps);
    out.ok = out.lhs <= out.rhs_bound + 1e-12;
    return out;
}

}  // namespace herzkit
