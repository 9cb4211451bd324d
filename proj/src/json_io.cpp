#include "herzkit/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace herzkit {

void require_fields(const json& obj, const std::vector<std::string>& required,
                    const std::vector<std::string>& optional, const std::string& context) {
    if (!obj.is_object()) throw schema_error(context + ": expected a JSON object");
    std::set<std::string> known(required.begin(), required.end());
    known.insert(optional.begin(), optional.end());
    for (const auto& [key, _] : obj.items())
        if (!known.count(key)) throw schema_error(context + ": unknown field \"" + key + "\"");
    for (const auto& req : required)
        if (!obj.contains(req)) throw schema_error(context + ": missing field \"" + req + "\"");
}

json encode_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

double decode_real(const json& v, const std::string& field) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw schema_error("field \"" + field + "\" must be a number or \"inf\"");
}

Exponent decode_exponent(const json& v, const std::string& field) {
    return exponent_from(decode_real(v, field));
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

json point_to_json(const Point& p) {
    json a = json::array();
    for (double v : p) a.push_back(v);
    return a;
}

Point point_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty())
        throw schema_error("field \"" + field + "\" must be a non-empty array");
    Point p;
    for (const auto& v : j) p.push_back(decode_real(v, field));
    return p;
}

}  // namespace

json function_to_json(const FunctionSpec& f) {
    return std::visit(
        [&](const auto& node) -> json {
            using T = std::decay_t<decltype(node)>;
            json j;
            if constexpr (std::is_same_v<T, RadialPowerLog>) {
                j["variant"] = "radial_power_log";
                j["dim"] = f.dim;
                j["a"] = node.a;
                j["b"] = node.b;
                j["r_lo"] = node.r_lo;
                j["r_hi"] = encode_real(node.r_hi);
                j["amplitude"] = node.amplitude;
                j["edge_frac"] = node.edge_frac;
            } else if constexpr (std::is_same_v<T, SmoothBump>) {
                j["variant"] = "bump";
                j["center"] = point_to_json(node.center);
                j["radius"] = node.radius;
                j["amplitude"] = node.amplitude;
            } else if constexpr (std::is_same_v<T, GaussianSpec>) {
                j["variant"] = "gaussian";
                j["center"] = point_to_json(node.center);
                j["scale"] = node.scale;
                j["amplitude"] = node.amplitude;
            } else if constexpr (std::is_same_v<T, SampledGrid>) {
                j["variant"] = "sampled_grid";
                j["dim"] = node.dim;
                j["bbox_lo"] = point_to_json(node.bbox_lo);
                j["spacing"] = node.spacing;
                j["counts"] = node.counts;
                j["values"] = node.values;
                j["interpolation"] = node.interp == SampledGrid::Interp::multilinear
                                         ? "multilinear"
                                         : "piecewise_constant";
            } else if constexpr (std::is_same_v<T, FiniteSum>) {
                j["variant"] = "finite_sum";
                json members = json::array();
                for (const auto& m : node.members) members.push_back(function_to_json(m));
                j["members"] = members;
            } else {
                j["variant"] = "dyadic_dilate";
                j["m"] = node.m;
                j["base"] = function_to_json(*node.base);
            }
            return j;
        },
        f.node);
}

FunctionSpec function_from_json(const json& j) {
    if (!j.is_object() || !j.contains("variant"))
        throw schema_error("function: missing field \"variant\"");
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "radial_power_log") {
        require_fields(j, {"variant", "dim", "a", "r_lo", "r_hi"},
                       {"b", "amplitude", "edge_frac"}, "function(radial_power_log)");
        RadialPowerLog r;
        r.a = decode_real(j.at("a"), "a");
        r.b = j.contains("b") ? decode_real(j.at("b"), "b") : 0.0;
        r.r_lo = decode_real(j.at("r_lo"), "r_lo");
        r.r_hi = decode_real(j.at("r_hi"), "r_hi");
        r.amplitude = j.contains("amplitude") ? decode_real(j.at("amplitude"), "amplitude") : 1.0;
        r.edge_frac = j.contains("edge_frac") ? decode_real(j.at("edge_frac"), "edge_frac") : 0.0;
        return FunctionSpec::radial_power_log(j.at("dim").get<int>(), r);
    }
    if (variant == "bump") {
        require_fields(j, {"variant", "center", "radius"}, {"amplitude"}, "function(bump)");
        return FunctionSpec::bump(point_from_json(j.at("center"), "center"),
                                  decode_real(j.at("radius"), "radius"),
                                  j.contains("amplitude")
                                      ? decode_real(j.at("amplitude"), "amplitude")
                                      : 1.0);
    }
    if (variant == "gaussian") {
        require_fields(j, {"variant", "center", "scale"}, {"amplitude"}, "function(gaussian)");
        return FunctionSpec::gaussian(point_from_json(j.at("center"), "center"),
                                      decode_real(j.at("scale"), "scale"),
                                      j.contains("amplitude")
                                          ? decode_real(j.at("amplitude"), "amplitude")
                                          : 1.0);
    }
    if (variant == "plateau") {
        require_fields(j, {"variant", "dim", "r_lo", "r_hi"}, {"amplitude"}, "function(plateau)");
        return FunctionSpec::plateau(
            j.at("dim").get<int>(), decode_real(j.at("r_lo"), "r_lo"),
            decode_real(j.at("r_hi"), "r_hi"),
            j.contains("amplitude") ? decode_real(j.at("amplitude"), "amplitude") : 1.0);
    }
    if (variant == "sampled_grid") {
        require_fields(j, {"variant", "dim", "bbox_lo", "spacing", "counts", "values"},
                       {"interpolation"}, "function(sampled_grid)");
        SampledGrid g;
        g.dim = j.at("dim").get<int>();
        g.bbox_lo = point_from_json(j.at("bbox_lo"), "bbox_lo");
        g.spacing = decode_real(j.at("spacing"), "spacing");
        g.counts = j.at("counts").get<std::vector<int>>();
        g.values = j.at("values").get<std::vector<double>>();
        if (j.contains("interpolation")) {
            const std::string mode = j.at("interpolation").get<std::string>();
            if (mode == "multilinear")
                g.interp = SampledGrid::Interp::multilinear;
            else if (mode == "piecewise_constant")
                g.interp = SampledGrid::Interp::piecewise_constant;
            else
                throw schema_error("function(sampled_grid): unknown interpolation \"" + mode +
                                   "\"");
        }
        return FunctionSpec::grid(std::move(g));
    }
    if (variant == "finite_sum") {
        require_fields(j, {"variant", "members"}, {}, "function(finite_sum)");
        std::vector<FunctionSpec> members;
        for (const auto& m : j.at("members")) members.push_back(function_from_json(m));
        return FunctionSpec::sum(std::move(members));
    }
    if (variant == "dyadic_dilate") {
        require_fields(j, {"variant", "m", "base"}, {}, "function(dyadic_dilate)");
        return dilate_dyadic(function_from_json(j.at("base")), j.at("m").get<int>());
    }
    throw schema_error("function: unknown variant \"" + variant + "\"");
}

json domain_to_json(const DomainSpec& d) {
    json j;
    std::visit(
        [&](const auto& shape) {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, FullSpace>) {
                j["variant"] = "full_space";
            } else if constexpr (std::is_same_v<T, Ball>) {
                j["variant"] = "ball";
                j["center"] = point_to_json(shape.center);
                j["radius"] = shape.radius;
            } else if constexpr (std::is_same_v<T, AnnulusRange>) {
                j["variant"] = "annulus_range";
                j["k_min"] = shape.k_min;
                j["k_max"] = shape.k_max;
            } else {
                j["variant"] = "cube";
                j["corner"] = point_to_json(shape.corner);
                j["side"] = shape.side;
            }
        },
        d.shape);
    j["cone_condition"] = d.cone_condition;
    j["contains_origin"] = d.contains_origin();
    return j;
}

DomainSpec domain_from_json(const json& j) {
    if (!j.is_object() || !j.contains("variant"))
        throw schema_error("domain: missing field \"variant\"");
    const std::string variant = j.at("variant").get<std::string>();
    DomainSpec d;
    if (variant == "full_space") {
        require_fields(j, {"variant"}, {"cone_condition", "contains_origin"}, "domain");
        d = DomainSpec::full_space();
    } else if (variant == "ball") {
        require_fields(j, {"variant", "center", "radius"}, {"cone_condition", "contains_origin"},
                       "domain");
        d = DomainSpec::ball(point_from_json(j.at("center"), "center"),
                             decode_real(j.at("radius"), "radius"));
    } else if (variant == "annulus_range") {
        require_fields(j, {"variant", "k_min", "k_max"}, {"cone_condition", "contains_origin"},
                       "domain");
        d = DomainSpec::annulus_range(j.at("k_min").get<int>(), j.at("k_max").get<int>());
    } else if (variant == "cube") {
        require_fields(j, {"variant", "corner", "side"}, {"cone_condition", "contains_origin"},
                       "domain");
        d = DomainSpec::cube(point_from_json(j.at("corner"), "corner"),
                             decode_real(j.at("side"), "side"));
    } else {
        throw schema_error("domain: unknown variant \"" + variant + "\"");
    }
    if (j.contains("cone_condition")) d.cone_condition = j.at("cone_condition").get<bool>();
    return d;
}

namespace {

const char* status_name(NormStatus s) {
    switch (s) {
        case NormStatus::converged: return "converged";
        case NormStatus::truncated: return "truncated";
        case NormStatus::diverging_low: return "diverging_low";
        case NormStatus::diverging_high: return "diverging_high";
    }
    return "?";
}

}  // namespace

json norm_result_to_json(const NormResult& r) {
    json j;
    j["value"] = encode_real(r.value);
    j["err_est"] = encode_real(r.err_est);
    j["converged"] = r.converged;
    j["status"] = status_name(r.status);
    j["k_range_used"] = {r.k_range_used.first, r.k_range_used.second};
    json terms = json::array();
    for (const auto& [k, t] : r.terms) terms.push_back({k, encode_real(t)});
    j["terms"] = terms;
    return j;
}

json hypothesis_to_json(const HypothesisReport& r) {
    json j;
    j["ok"] = r.ok;
    json conds = json::array();
    for (const auto& c : r.checked) {
        json cj;
        cj["name"] = c.name;
        cj["lhs"] = encode_real(c.lhs);
        cj["relation"] = c.relation;
        cj["rhs"] = encode_real(c.rhs);
        cj["satisfied"] = c.satisfied;
        cj["slack"] = encode_real(c.slack);
        conds.push_back(cj);
    }
    j["conditions"] = conds;
    json viol = json::array();
    for (const auto& c : r.violated()) viol.push_back(c.name);
    j["violated"] = viol;
    return j;
}

json embedding_report_to_json(const EmbeddingReport& r) {
    json j;
    j["theorem"] = theorem_tag(r.thm);
    j["hypothesis"] = hypothesis_to_json(r.hypothesis);
    j["hypothesis_override"] = r.hypothesis_override;
    json rows = json::array();
    for (const auto& row : r.per_function) {
        json rj;
        rj["func_index"] = row.func_index;
        rj["m"] = row.m;
        rj["evaluated"] = row.evaluated;
        if (row.evaluated) {
            rj["lhs"] = encode_real(row.lhs);
            rj["rhs"] = encode_real(row.rhs);
            rj["ratio"] = encode_real(row.ratio);
            rj["rhs_scaling"] = encode_real(row.rhs_scaling);
            rj["ratio_scaling"] = encode_real(row.ratio_scaling);
        } else {
            rj["error"] = row.error;
        }
        rows.push_back(rj);
    }
    j["per_function"] = rows;
    j["empirical_constant"] = encode_real(r.empirical_constant);
    j["scaling_constant"] = encode_real(r.scaling_constant);
    j["scaling_exponent_lhs"] = encode_real(r.scaling_exponent_lhs);
    j["scaling_exponent_rhs"] = encode_real(r.scaling_exponent_rhs);
    j["scaling_balanced"] = r.scaling_balanced;
    j["scaling_invariant"] = r.scaling_invariant;
    j["max_ratio_drift"] = encode_real(r.max_ratio_drift);
    j["invariance_tol"] = r.invariance_tol;
    j["n_evaluated"] = r.n_evaluated;
    j["n_errors"] = r.n_errors;
    j["pass"] = r.pass;
    return j;
}

EmbeddingReport embedding_report_from_json(const json& j) {
    EmbeddingReport r;
    r.thm = theorem_from_tag(j.at("theorem").get<std::string>());
    r.hypothesis.ok = j.at("hypothesis").at("ok").get<bool>();
    for (const auto& rj : j.at("per_function")) {
        RatioRow row;
        row.func_index = rj.at("func_index").get<int>();
        row.m = rj.at("m").get<int>();
        row.evaluated = rj.at("evaluated").get<bool>();
        if (row.evaluated) {
            row.lhs = decode_real(rj.at("lhs"), "lhs");
            row.rhs = decode_real(rj.at("rhs"), "rhs");
            row.ratio = decode_real(rj.at("ratio"), "ratio");
            row.rhs_scaling = decode_real(rj.at("rhs_scaling"), "rhs_scaling");
            row.ratio_scaling = decode_real(rj.at("ratio_scaling"), "ratio_scaling");
        } else if (rj.contains("error")) {
            row.error = rj.at("error").get<std::string>();
        }
        r.per_function.push_back(row);
    }
    r.empirical_constant = decode_real(j.at("empirical_constant"), "empirical_constant");
    r.scaling_constant = decode_real(j.at("scaling_constant"), "scaling_constant");
    r.pass = j.at("pass").get<bool>();
    r.n_evaluated = j.at("n_evaluated").get<int>();
    r.n_errors = j.at("n_errors").get<int>();
    return r;
}

json case1_to_json(const Case1Table& t) {
    json j;
    j["sphere_area"] = t.sphere;
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"eps", r.eps},
                        {"l1_truncated", encode_real(r.l1_truncated)},
                        {"herz_truncated", encode_real(r.herz_truncated)}});
    j["rows"] = rows;
    return j;
}

json case2_to_json(const Case2Table& t) {
    json j;
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"j", r.j},
                        {"herz_term_q", encode_real(r.herz_term_q)},
                        {"herz_partial", encode_real(r.herz_partial)},
                        {"l1_term", encode_real(r.l1_term)},
                        {"l1_partial", encode_real(r.l1_partial)}});
    j["rows"] = rows;
    j["tail_bound"] = encode_real(t.tail_bound);
    j["envelope_lo"] = encode_real(t.envelope_lo);
    j["envelope_hi"] = encode_real(t.envelope_hi);
    return j;
}

json summary_to_json(const ConstantSummary& s) {
    json rows = json::array();
    for (const auto& r : s.rows)
        rows.push_back({{"theorem", r.theorem},
                        {"func_index", r.func_index},
                        {"label", r.label},
                        {"constant", encode_real(r.constant)}});
    return json{{"rows", rows}};
}

json grid_to_json(const SampledGrid& g) {
    return function_to_json(FunctionSpec{g.dim, g});
}

std::string terms_csv(const NormResult& r) {
    std::ostringstream out;
    out << "k,weighted_term\n";
    for (const auto& [k, t] : r.terms) out << k << "," << format_real(t) << "\n";
    return out.str();
}

std::string ratios_csv(const EmbeddingReport& r) {
    std::ostringstream out;
    out << "func_index,m,lhs,rhs,ratio,ratio_scaling,error\n";
    for (const auto& row : r.per_function) {
        out << row.func_index << "," << row.m << ",";
        if (row.evaluated)
            out << format_real(row.lhs) << "," << format_real(row.rhs) << ","
                << format_real(row.ratio) << "," << format_real(row.ratio_scaling) << ",";
        else
            out << ",,,,\"" << row.error << "\"";
        out << "\n";
    }
    return out.str();
}

std::string scaling_csv(const EmbeddingReport& r) {
    std::ostringstream out;
    out << "func_index,m,ratio_scaling\n";
    for (const auto& row : r.per_function)
        if (row.evaluated)
            out << row.func_index << "," << row.m << "," << format_real(row.ratio_scaling)
                << "\n";
    return out.str();
}

std::string case1_csv(const Case1Table& t) {
    std::ostringstream out;
    out << "eps,l1_truncated,herz_truncated\n";
    for (const auto& r : t.rows)
        out << format_real(r.eps) << "," << format_real(r.l1_truncated) << ","
            << format_real(r.herz_truncated) << "\n";
    return out.str();
}

std::string case2_csv(const Case2Table& t) {
    std::ostringstream out;
    out << "j,herz_term_q,herz_partial,l1_term,l1_partial\n";
    for (const auto& r : t.rows)
        out << r.j << "," << format_real(r.herz_term_q) << "," << format_real(r.herz_partial)
            << "," << format_real(r.l1_term) << "," << format_real(r.l1_partial) << "\n";
    return out.str();
}

std::string summary_csv(const ConstantSummary& s) {
    std::ostringstream out;
    out << "theorem,func_index,label,constant\n";
    for (const auto& r : s.rows)
        out << r.theorem << "," << r.func_index << "," << r.label << ","
            << format_real(r.constant) << "\n";
    return out.str();
}

}  // namespace herzkit
