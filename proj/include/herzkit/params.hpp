#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "herzkit/common.hpp"
#include "herzkit/exponent.hpp"

namespace herzkit {

// Exponent triple of the dyadic-annulus norm plus the ambient dimension.
struct HerzParams {
    double alpha = 0.0;
    Exponent p{2.0};
    Exponent q{2.0};
    int n = 1;

    HerzParams() = default;
    HerzParams(double alpha, Exponent p, Exponent q, int n) : alpha(alpha), p(p), q(q), n(n) {
        if (n < 1) throw invalid_input("dimension must be >= 1");
    }
};

struct SobolevParams {
    HerzParams herz;
    int m = 0;  // weak-derivative order

    SobolevParams() = default;
    SobolevParams(HerzParams hp, int m) : herz(hp), m(m) {
        if (m < 0) throw invalid_input("derivative order must be >= 0");
    }
};

// Parameter set of the weighted interpolation inequalities.
struct CKNParams {
    double alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0;
    double sigma = 0.0;
    double theta = 0.0;  // in [0,1]
    Exponent p{1.0}, q{1.0}, u{1.0}, r{1.0}, s{1.0}, v{1.0};
    int n = 1;
};

enum class TheoremId {
    L1loc,
    MaximalInq,
    Result3,
    Embeddings1,
    Embeddings2,
    Embeddings3,
    Embeddings4,
    CKNClassical,
    EmbeddingsFirst,
    EmbedQeqP,
    EmbedQInfty,
    EmbedPltQ,
    EmbedQltP,
};

const char* theorem_tag(TheoremId id);
TheoremId theorem_from_tag(const std::string& tag);  // throws schema_error on unknown tag
std::vector<TheoremId> all_theorems();

// One evaluated hypothesis condition: `lhs relation rhs`, with slack > 0
// meaning satisfied with room to spare.
struct Condition {
    std::string name;
    double lhs = 0.0;
    std::string relation;
    double rhs = 0.0;
    bool satisfied = false;
    double slack = 0.0;
};

struct HypothesisReport {
    bool ok = true;
    std::vector<Condition> checked;

    std::vector<Condition> violated() const {
        std::vector<Condition> out;
        for (const auto& c : checked)
            if (!c.satisfied) out.push_back(c);
        return out;
    }
};

// Loose name->value bundle feeding check_hypotheses. Exponent-valued entries
// may be IEEE infinity.
class ParamBundle {
public:
    ParamBundle() = default;
    explicit ParamBundle(std::map<std::string, double> vals) : vals_(std::move(vals)) {}

    void set(const std::string& key, double v) { vals_[key] = v; }
    bool has(const std::string& key) const { return vals_.count(key) != 0; }

    // Throws missing_field naming the symbol.
    double get(const std::string& key) const;
    double get_or(const std::string& key, double fallback) const;
    std::optional<double> maybe(const std::string& key) const;

    const std::map<std::string, double>& values() const { return vals_; }

private:
    std::map<std::string, double> vals_;
};

// Membership in the local-integrability region: the set of (alpha, p, q)
// for which the dyadic-annulus space embeds into L^1_loc around the origin.
//   alpha < n - n/p,  or
//   alpha = n - n/p and q = 1,  or
//   alpha = 0, p = inf, q = inf.
// Equality branches compare with absolute tolerance kEqualityTol.
bool in_V(double alpha, Exponent p, Exponent q, int n);

// Maximal-operator boundedness region: 1 < p < inf and -n/p < alpha < n(1 - 1/p).
bool maximal_admissible(double alpha, Exponent p, int n);

// Riesz-potential boundedness region: lambda - n/p < alpha < n - n/p.
// Preconditions 0 < lambda < n and 1 < p < n/lambda are enforced.
bool riesz_admissible(double alpha, Exponent p, double lambda, int n);

// p* with 1/p* = 1/p - lambda/n; throws when the right side is <= 0.
Exponent sobolev_exponent(Exponent p, double lambda, int n);

// Evaluates every hypothesis of the chosen statement on the bundle and
// reports each condition with numeric slack.
HypothesisReport check_hypotheses(TheoremId thm, const ParamBundle& params);

}  // namespace herzkit
