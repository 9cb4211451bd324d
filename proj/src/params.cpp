#include "herzkit/params.hpp"

#include <algorithm>
#include <cmath>

namespace herzkit {

namespace {

const std::pair<TheoremId, const char*> kTags[] = {
    {TheoremId::L1loc, "L1loc"},
    {TheoremId::MaximalInq, "MaximalInq"},
    {TheoremId::Result3, "Result3"},
    {TheoremId::Embeddings1, "Embeddings1"},
    {TheoremId::Embeddings2, "Embeddings2"},
    {TheoremId::Embeddings3, "Embeddings3"},
    {TheoremId::Embeddings4, "Embeddings4"},
    {TheoremId::CKNClassical, "CKNClassical"},
    {TheoremId::EmbeddingsFirst, "EmbeddingsFirst"},
    {TheoremId::EmbedQeqP, "EmbedQeqP"},
    {TheoremId::EmbedQInfty, "EmbedQInfty"},
    {TheoremId::EmbedPltQ, "EmbedPltQ"},
    {TheoremId::EmbedQltP, "EmbedQltP"},
};

}  // namespace

const char* theorem_tag(TheoremId id) {
    for (const auto& [t, s] : kTags)
        if (t == id) return s;
    return "?";
}

TheoremId theorem_from_tag(const std::string& tag) {
    for (const auto& [t, s] : kTags)
        if (tag == s) return t;
    throw schema_error("unknown theorem tag: " + tag);
}

std::vector<TheoremId> all_theorems() {
    std::vector<TheoremId> out;
    for (const auto& [t, s] : kTags) out.push_back(t);
    return out;
}

double ParamBundle::get(const std::string& key) const {
    auto it = vals_.find(key);
    if (it == vals_.end()) throw missing_field(key);
    return it->second;
}

double ParamBundle::get_or(const std::string& key, double fallback) const {
    auto it = vals_.find(key);
    return it == vals_.end() ? fallback : it->second;
}

std::optional<double> ParamBundle::maybe(const std::string& key) const {
    auto it = vals_.find(key);
    if (it == vals_.end()) return std::nullopt;
    return it->second;
}

bool in_V(double alpha, Exponent p, Exponent q, int n) {
    if (n < 1) throw invalid_input("dimension must be >= 1");
    const double edge = n - n * p.reciprocal();  // n - n/p
    if (alpha < edge - kEqualityTol) return true;
    if (nearly_equal(alpha, edge) && nearly_equal(q.is_inf() ? -1.0 : q.value(), 1.0)) return true;
    if (nearly_equal(alpha, 0.0) && p.is_inf() && q.is_inf()) return true;
    return false;
}

bool maximal_admissible(double alpha, Exponent p, int n) {
    if (n < 1) throw invalid_input("dimension must be >= 1");
    if (p.is_inf() || !(p.value() > 1.0)) return false;
    const double lo = -n * p.reciprocal();
    const double hi = n * (1.0 - p.reciprocal());
    return alpha > lo && alpha < hi;
}

bool riesz_admissible(double alpha, Exponent p, double lambda, int n) {
    if (!(lambda > 0.0) || !(lambda < n))
        throw invalid_input("riesz order lambda must lie in (0, n)");
    if (p.is_inf() || !(p.value() > 1.0) || !(p.value() < n / lambda))
        throw invalid_input("riesz source exponent must satisfy 1 < p < n/lambda");
    const double lo = lambda - n * p.reciprocal();
    const double hi = n - n * p.reciprocal();
    return alpha > lo && alpha < hi;
}

Exponent sobolev_exponent(Exponent p, double lambda, int n) {
    if (!(lambda > 0.0)) throw invalid_input("smoothing order lambda must be positive");
    const double inv = p.reciprocal() - lambda / static_cast<double>(n);
    if (!(inv > 0.0))
        throw invalid_input("sobolev exponent undefined: 1/p - lambda/n <= 0");
    return Exponent(1.0 / inv);
}

namespace {

// Builder collecting hypothesis conditions for one statement.
class Checker {
public:
    explicit Checker(const ParamBundle& b) : b_(b) {}

    double val(const std::string& key) { return b_.get(key); }
    double val_or(const std::string& key, double fb) { return b_.get_or(key, fb); }
    bool has(const std::string& key) const { return b_.has(key); }

    void lt(const std::string& name, double lhs, double rhs) {
        push(name, lhs, "<", rhs, lhs < rhs, rhs - lhs);
    }
    void le(const std::string& name, double lhs, double rhs) {
        push(name, lhs, "<=", rhs, lhs <= rhs + kEqualityTol, rhs - lhs);
    }
    void gt(const std::string& name, double lhs, double rhs) {
        push(name, lhs, ">", rhs, lhs > rhs, lhs - rhs);
    }
    void ge(const std::string& name, double lhs, double rhs) {
        push(name, lhs, ">=", rhs, lhs >= rhs - kEqualityTol, lhs - rhs);
    }
    void eq(const std::string& name, double lhs, double rhs) {
        const bool both_inf = std::isinf(lhs) && std::isinf(rhs) && lhs == rhs;
        push(name, lhs, "=", rhs, both_inf || nearly_equal(lhs, rhs), -std::fabs(lhs - rhs));
    }
    void flag(const std::string& name, bool ok) {
        push(name, ok ? 1.0 : 0.0, "=", 1.0, ok, 0.0);
    }

    // Membership in the local-integrability region as a single condition;
    // lhs/rhs report the distance of alpha to the region edge n - n/p.
    void v_region(const std::string& name, double alpha, double p, double q, int n) {
        const bool ok = in_V(alpha, exponent_from(p), exponent_from(q), n);
        const double edge = n - (std::isinf(p) ? 0.0 : n / p);
        push(name, alpha, "in", edge, ok, edge - alpha);
    }

    HypothesisReport report() && { return std::move(rep_); }

private:
    void push(const std::string& name, double lhs, const std::string& rel, double rhs, bool ok,
              double slack) {
        rep_.checked.push_back({name, lhs, rel, rhs, ok, slack});
        rep_.ok = rep_.ok && ok;
    }

    const ParamBundle& b_;
    HypothesisReport rep_;
};

int dim_of(Checker& c) {
    const double n = c.val("n");
    if (!(n >= 1.0) || n != std::floor(n)) throw invalid_input("n must be a positive integer");
    return static_cast<int>(n);
}

}  // namespace

HypothesisReport check_hypotheses(TheoremId thm, const ParamBundle& params) {
    Checker c(params);
    const int n = dim_of(c);
    const double nd = static_cast<double>(n);

    // n/x with the convention that x = inf gives 0.
    auto nover = [nd](double x) { return std::isinf(x) ? 0.0 : nd / x; };

    switch (thm) {
        case TheoremId::L1loc: {
            const double alpha = c.val("alpha"), p = c.val("p"), q = c.val("q");
            c.ge("p>=1", p, 1.0);
            c.ge("q>=1", q, 1.0);
            c.v_region("(alpha,p,q) in V", alpha, p, q, n);
            break;
        }
        case TheoremId::MaximalInq: {
            const double alpha = c.val("alpha"), p = c.val("p"), q = c.val("q");
            c.gt("p>1", p, 1.0);
            c.lt("p<inf", p, std::numeric_limits<double>::infinity());
            c.ge("q>=1", q, 1.0);
            c.gt("alpha>-n/p", alpha, -nover(p));
            c.lt("alpha<n(1-1/p)", alpha, nd * (1.0 - 1.0 / p));
            break;
        }
        case TheoremId::Result3: {
            const double alpha = c.val("alpha"), p = c.val("p"), lambda = c.val("lambda");
            const double q0 = c.val_or("q0", c.val_or("q", 1.0));
            const double q1 = c.val_or("q1", q0);
            c.gt("lambda>0", lambda, 0.0);
            c.lt("lambda<n", lambda, nd);
            c.gt("q0>0", q0, 0.0);
            c.le("q0<=q1", q0, q1);
            c.gt("p>1", p, 1.0);
            c.lt("p<n/lambda", p, nd / lambda);
            c.gt("alpha>lambda-n/p", alpha, lambda - nover(p));
            c.lt("alpha<n-n/p", alpha, nd - nover(p));
            break;
        }
        case TheoremId::Embeddings1: {
            const double a1 = c.val("alpha1"), a2 = c.val("alpha2");
            const double q = c.val("q");
            c.ge("q>=1", q, 1.0);
            c.le("q<=n/(n-1)", q, n == 1 ? std::numeric_limits<double>::infinity() : nd / (nd - 1.0));
            if (c.has("r")) c.gt("r>0", c.val("r"), 0.0);  // free outer exponent
            c.eq("alpha2+n-1 = alpha1+n/q", a2 + nd - 1.0, a1 + nover(q));
            break;
        }
        case TheoremId::Embeddings2: {
            const double a1 = c.val("alpha1"), a2 = c.val("alpha2");
            const double p = c.val("p"), q = c.val("q");
            c.ge("p>=1", p, 1.0);
            // The upper bound n/(n/p - 1) only makes sense when n/p > 1.
            c.lt("p<n (implied by exponent bound)", p, nd);
            if (p < nd) {
                c.ge("q>=1", q, 1.0);
                c.le("q<=n/(n/p-1)", q, nd / (nover(p) - 1.0));
            }
            if (c.has("r")) c.gt("r>0", c.val("r"), 0.0);
            c.ge("alpha2>=alpha1", a2, a1);
            c.eq("n/q-n/p = alpha2-1-alpha1", nover(q) - nover(p), a2 - 1.0 - a1);
            c.le("alpha2-1-alpha1<=0", a2 - 1.0 - a1, 0.0);
            break;
        }
        case TheoremId::Embeddings3:
        case TheoremId::Embeddings4: {
            const bool general_p = (thm == TheoremId::Embeddings4);
            const double p = general_p ? c.val("p") : 1.0;
            const double a1 = c.val("alpha1"), a2 = c.val("alpha2"), a3 = c.val("alpha3");
            const double sigma = c.val("sigma"), theta = c.val("theta");
            const double q = c.val("q"), u = c.val("u");
            const double r = c.val("r"), s = c.val("s"), v = c.val("v");
            if (general_p) c.ge("p>=1", p, 1.0);
            c.ge("u>=1", u, 1.0);
            c.gt("q>0", q, 0.0);
            c.gt("r>0", r, 0.0);
            c.gt("s>0", s, 0.0);
            c.gt("v>0", v, 0.0);
            c.ge("theta>=0", theta, 0.0);
            c.le("theta<=1", theta, 1.0);
            c.gt("n/p+alpha2>0", nover(p) + a2, 0.0);
            c.gt("n/u+alpha3>0", nover(u) + a3, 0.0);
            c.gt("n/q+alpha1>0", nover(q) + a1, 0.0);
            c.ge("alpha2>=sigma", a2, sigma);
            c.le("alpha2<=sigma+1", a2, sigma + 1.0);
            c.eq("alpha1 = theta*sigma+(1-theta)*alpha3", a1, theta * sigma + (1.0 - theta) * a3);
            c.eq("n/q+alpha1 = theta(n/p+alpha2-1)+(1-theta)(n/u+alpha3)", nover(q) + a1,
                 theta * (nover(p) + a2 - 1.0) + (1.0 - theta) * (nover(u) + a3));
            c.eq("1/r = theta/s+(1-theta)/v", 1.0 / r, theta / s + (1.0 - theta) / v);
            break;
        }
        case TheoremId::CKNClassical: {
            // ||x|^gamma f|_p <= c ||x|^alpha grad f|_q. alpha1/alpha2 are
            // accepted as synonyms for gamma/alpha.
            const double gamma = c.has("gamma") ? c.val("gamma") : c.val("alpha1");
            const double alpha = c.has("alpha") ? c.val("alpha") : c.val("alpha2");
            const double p = c.val("p"), q = c.val("q");
            c.ge("q>=1", q, 1.0);
            c.lt("q<inf", q, std::numeric_limits<double>::infinity());
            c.ge("p>=1", p, 1.0);
            c.gt("alpha>1-n/q", alpha, 1.0 - nover(q));
            c.le("alpha-1<=gamma", alpha - 1.0, gamma);
            c.le("gamma<=alpha", gamma, alpha);
            c.eq("n/p-n/q = alpha-gamma-1", nover(p) - nover(q), alpha - gamma - 1.0);
            c.le("alpha-gamma-1<=0", alpha - gamma - 1.0, 0.0);
            break;
        }
        case TheoremId::EmbeddingsFirst: {
            const double a1 = c.val("alpha1"), a2 = c.val("alpha2");
            const double p = c.val("p"), r = c.val_or("r", 2.0), m = c.val("m");
            c.gt("p>1", p, 1.0);
            c.lt("p<inf", p, std::numeric_limits<double>::infinity());
            c.ge("m>=0", m, 0.0);
            c.v_region("(alpha2,p,r) in V", a2, p, r, n);
            c.ge("alpha2>=alpha1", a2, a1);
            c.gt("alpha2>m-n/p", a2, m - nover(p));
            c.lt("alpha2<n-n/p", a2, nd - nover(p));
            c.gt("m-alpha2+alpha1>0", m - a2 + a1, 0.0);
            const double nq = nover(p) - m + a2 - a1;
            c.gt("n/q = n/p-m+alpha2-alpha1 > 0", nq, 0.0);
            if (c.has("q")) c.eq("q matches n/(n/p-m+alpha2-alpha1)", nover(c.val("q")), nq);
            break;
        }
        case TheoremId::EmbedQeqP:
        case TheoremId::EmbedPltQ:
        case TheoremId::EmbedQltP: {
            const double a1 = c.val("alpha1"), a2 = c.val("alpha2");
            const double p = c.val("p"), r = c.val_or("r", 2.0), m = c.val("m");
            c.gt("p>1", p, 1.0);
            c.lt("p<inf", p, std::numeric_limits<double>::infinity());
            c.v_region("(alpha2,p,r) in V", a2, p, r, n);
            if (thm == TheoremId::EmbedQeqP) {
                c.ge("alpha2>=alpha1", a2, a1);
                c.gt("alpha1+n/p>0", a1 + nover(p), 0.0);
            } else if (thm == TheoremId::EmbedPltQ) {
                const double q = c.val("q");
                c.gt("q>p", q, p);
                c.lt("q<inf", q, std::numeric_limits<double>::infinity());
                c.ge("alpha2>=alpha1", a2, a1);
                c.gt("alpha1>-n/p", a1, -nover(p));
            } else {
                const double q = c.val("q");
                c.gt("q>1", q, 1.0);
                c.lt("q<p", q, p);
                c.ge("alpha2+n/p>=alpha1+n/q", a2 + nover(p), a1 + nover(q));
            }
            c.gt("m>n/p+alpha2", m, nover(p) + a2);
            c.gt("m>n/p+alpha2-alpha1", m, nover(p) + a2 - a1);
            c.lt("m<n", m, nd);
            break;
        }
        case TheoremId::EmbedQInfty: {
            const double a1 = c.val("alpha1"), a2 = c.val("alpha2");
            const double p = c.val("p"), r = c.val_or("r", 2.0), m = c.val("m");
            c.gt("p>1", p, 1.0);
            c.lt("p<inf", p, std::numeric_limits<double>::infinity());
            if (c.has("r")) c.ge("r>=1", r, 1.0);
            c.v_region("(alpha2,p,r) in V", a2, p, r, n);
            c.gt("m>n/p+alpha2", m, nover(p) + a2);
            c.lt("m<n", m, nd);
            c.ge("alpha2>=alpha1", a2, a1);
            c.gt("alpha1>-n/p", a1, -nover(p));
            break;
        }
    }
    return std::move(c).report();
}

}  // namespace herzkit
