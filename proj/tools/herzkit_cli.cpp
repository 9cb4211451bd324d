// Command-line front end: norms, hypothesis checks, operators, embedding
// experiments and counterexample tables from JSON configs; writes JSON and
// CSV reports. Exit codes: 0 success/pass, 1 check violated or experiment
// not passed, 2 config/schema error, 3 norm did not converge, 4 every
// family member failed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "herzkit/embeddings.hpp"
#include "herzkit/json_io.hpp"
#include "herzkit/parallel.hpp"

namespace fs = std::filesystem;
using herzkit::json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw herzkit::error("cannot write " + path.string());
    out << content;
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

herzkit::TruncationPolicy truncation_from(const json& payload) {
    herzkit::TruncationPolicy t;
    if (!payload.contains("truncation")) return t;
    const json& j = payload.at("truncation");
    herzkit::require_fields(j, {}, {"k_lo", "k_hi", "tail_tol", "hard_cap"}, "truncation");
    if (j.contains("k_lo")) t.k_lo = j.at("k_lo").get<int>();
    if (j.contains("k_hi")) t.k_hi = j.at("k_hi").get<int>();
    if (j.contains("tail_tol")) t.tail_tol = herzkit::decode_real(j.at("tail_tol"), "tail_tol");
    if (j.contains("hard_cap")) t.hard_cap = j.at("hard_cap").get<int>();
    return t;
}

herzkit::QuadratureOptions quadrature_from(const json& payload) {
    herzkit::QuadratureOptions o;
    if (!payload.contains("quadrature")) return o;
    const json& j = payload.at("quadrature");
    herzkit::require_fields(
        j, {}, {"rel_tol", "grid_rel_tol", "max_subdivisions", "angular_cap", "mode"},
        "quadrature");
    if (j.contains("rel_tol")) o.rel_tol = herzkit::decode_real(j.at("rel_tol"), "rel_tol");
    if (j.contains("grid_rel_tol"))
        o.grid_rel_tol = herzkit::decode_real(j.at("grid_rel_tol"), "grid_rel_tol");
    if (j.contains("max_subdivisions")) o.max_subdivisions = j.at("max_subdivisions").get<int>();
    if (j.contains("angular_cap")) o.angular_cap = j.at("angular_cap").get<int>();
    if (j.contains("mode")) {
        const std::string m = j.at("mode").get<std::string>();
        if (m == "auto")
            o.mode = herzkit::QuadraturePath::auto_select;
        else if (m == "radial_1d")
            o.mode = herzkit::QuadraturePath::radial_1d;
        else if (m == "tensor_grid")
            o.mode = herzkit::QuadraturePath::tensor_grid;
        else if (m == "oracle_exact")
            o.mode = herzkit::QuadraturePath::oracle_exact;
        else
            throw herzkit::schema_error("quadrature: unknown mode \"" + m + "\"");
    }
    return o;
}

herzkit::DomainSpec domain_from(const json& payload) {
    if (!payload.contains("domain")) return herzkit::DomainSpec::full_space();
    return herzkit::domain_from_json(payload.at("domain"));
}

herzkit::ParamBundle bundle_from(const json& j) {
    herzkit::ParamBundle b;
    if (!j.is_object()) throw herzkit::schema_error("params: expected a JSON object");
    for (const auto& [key, value] : j.items()) b.set(key, herzkit::decode_real(value, key));
    return b;
}

int cmd_norm(const json& payload, const fs::path& out_dir) {
    herzkit::require_fields(payload,
                            {"kind", "function", "n", "p"},
                            {"alpha", "q", "m", "r", "domain", "truncation", "quadrature"},
                            "norm payload");
    const std::string kind = payload.at("kind").get<std::string>();
    const herzkit::FunctionSpec f = herzkit::function_from_json(payload.at("function"));
    const int n = payload.at("n").get<int>();
    const herzkit::Exponent p = herzkit::decode_exponent(payload.at("p"), "p");
    const double alpha =
        payload.contains("alpha") ? herzkit::decode_real(payload.at("alpha"), "alpha") : 0.0;
    const auto domain = domain_from(payload);
    const auto trunc = truncation_from(payload);
    const auto opts = quadrature_from(payload);

    herzkit::NormResult res;
    if (kind == "herz") {
        if (!payload.contains("q")) throw herzkit::schema_error("norm payload: missing field \"q\"");
        res = herzkit::herz_norm(
            f, herzkit::HerzParams{alpha, p, herzkit::decode_exponent(payload.at("q"), "q"), n},
            domain, trunc, opts);
    } else if (kind == "weighted_lp") {
        res.value = herzkit::weighted_lp_norm(f, alpha, p, domain, opts);
        res.converged = true;
    } else if (kind == "herz_sobolev") {
        if (!payload.contains("q") || !payload.contains("m"))
            throw herzkit::schema_error("norm payload: herz_sobolev needs \"q\" and \"m\"");
        res = herzkit::herz_sobolev_norm(
            f,
            herzkit::SobolevParams{
                herzkit::HerzParams{alpha, p, herzkit::decode_exponent(payload.at("q"), "q"), n},
                payload.at("m").get<int>()},
            domain, trunc, opts);
    } else if (kind == "gradient_herz") {
        if (!payload.contains("r"))
            throw herzkit::schema_error("norm payload: gradient_herz needs \"r\"");
        res = herzkit::gradient_herz_norm(
            f, alpha, p, herzkit::decode_exponent(payload.at("r"), "r"), domain, trunc, opts);
    } else {
        throw herzkit::schema_error("norm payload: unknown kind \"" + kind + "\"");
    }
    write_json(out_dir / "norm.json", herzkit::norm_result_to_json(res));
    write_file(out_dir / "terms.csv", herzkit::terms_csv(res));
    return res.converged ? 0 : 3;
}

int cmd_check(const json& payload, const fs::path& out_dir) {
    herzkit::require_fields(payload, {"theorem", "params"}, {}, "check payload");
    const herzkit::TheoremId thm =
        herzkit::theorem_from_tag(payload.at("theorem").get<std::string>());
    const herzkit::HypothesisReport rep =
        herzkit::check_hypotheses(thm, bundle_from(payload.at("params")));
    json j = herzkit::hypothesis_to_json(rep);
    j["theorem"] = herzkit::theorem_tag(thm);
    write_json(out_dir / "check.json", j);
    return rep.ok ? 0 : 1;
}

int cmd_embed(const json& payload, const fs::path& out_dir, std::uint64_t seed, bool override_h) {
    herzkit::require_fields(
        payload, {"theorem", "params"},
        {"family", "dilation_levels", "domain", "jitter", "invariance_tol", "truncation",
         "quadrature", "override_hypotheses"},
        "embed payload");
    herzkit::EmbeddingExperiment exp;
    exp.thm = herzkit::theorem_from_tag(payload.at("theorem").get<std::string>());
    exp.params = bundle_from(payload.at("params"));
    exp.override_hypotheses =
        override_h ||
        (payload.contains("override_hypotheses") && payload.at("override_hypotheses").get<bool>());
    if (payload.contains("invariance_tol"))
        exp.invariance_tol = herzkit::decode_real(payload.at("invariance_tol"), "invariance_tol");
    exp.domain = domain_from(payload);
    const int n = static_cast<int>(exp.params.get("n"));
    if (!payload.contains("family") || payload.at("family").is_string()) {
        const std::string preset =
            payload.contains("family") ? payload.at("family").get<std::string>() : "default";
        if (preset != "default")
            throw herzkit::schema_error("embed payload: unknown family preset \"" + preset + "\"");
        exp.family = herzkit::default_family(n);
    } else {
        for (const auto& fj : payload.at("family"))
            exp.family.push_back(herzkit::function_from_json(fj));
    }
    if (exp.family.empty()) throw herzkit::schema_error("embed payload: empty family");
    if (payload.contains("jitter")) {
        const double jit = herzkit::decode_real(payload.at("jitter"), "jitter");
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(1.0 - jit, 1.0 + jit);
        for (auto& f : exp.family) f = herzkit::scale(f, u(rng));
    }
    if (payload.contains("dilation_levels"))
        exp.dilation_levels = payload.at("dilation_levels").get<std::vector<int>>();

    const auto rep = herzkit::run_embedding(exp, truncation_from(payload),
                                            quadrature_from(payload));
    write_json(out_dir / "report.json", herzkit::embedding_report_to_json(rep));
    write_file(out_dir / "ratios.csv", herzkit::ratios_csv(rep));
    write_file(out_dir / "scaling.csv", herzkit::scaling_csv(rep));
    if (rep.n_evaluated == 0 && rep.n_errors > 0) return 4;
    return rep.pass ? 0 : 1;
}

int cmd_counterexample(const json& payload, const fs::path& out_dir) {
    herzkit::require_fields(payload, {"case", "n", "p", "q", "alpha"},
                            {"r", "eps_list", "K", "quadrature"}, "counterexample payload");
    const auto opts = quadrature_from(payload);
    const herzkit::HerzParams hp{herzkit::decode_real(payload.at("alpha"), "alpha"),
                                 herzkit::decode_exponent(payload.at("p"), "p"),
                                 herzkit::decode_exponent(payload.at("q"), "q"),
                                 payload.at("n").get<int>()};
    const int which = payload.at("case").get<int>();
    if (which == 1) {
        if (!payload.contains("r") || !payload.contains("eps_list"))
            throw herzkit::schema_error("counterexample payload: case 1 needs \"r\", \"eps_list\"");
        std::vector<double> eps;
        for (const auto& e : payload.at("eps_list")) eps.push_back(herzkit::decode_real(e, "eps"));
        const auto table = herzkit::counterexample_case1(
            herzkit::decode_real(payload.at("r"), "r"), hp, eps, opts);
        write_json(out_dir / "counterexample.json", herzkit::case1_to_json(table));
        write_file(out_dir / "counterexample.csv", herzkit::case1_csv(table));
        return 0;
    }
    if (which == 2) {
        if (!payload.contains("K"))
            throw herzkit::schema_error("counterexample payload: case 2 needs \"K\"");
        const auto table = herzkit::counterexample_case2(hp, payload.at("K").get<int>(), opts);
        write_json(out_dir / "counterexample.json", herzkit::case2_to_json(table));
        write_file(out_dir / "counterexample.csv", herzkit::case2_csv(table));
        return 0;
    }
    throw herzkit::schema_error("counterexample payload: \"case\" must be 1 or 2");
}

int cmd_operator(const json& payload, const fs::path& out_dir) {
    herzkit::require_fields(payload, {"op", "function"},
                            {"eps", "t", "lambda", "j", "region", "points", "alpha", "p", "q",
                             "n", "domain", "truncation", "quadrature"},
                            "operator payload");
    const std::string op = payload.at("op").get<std::string>();
    const herzkit::FunctionSpec f = herzkit::function_from_json(payload.at("function"));
    const auto opts = quadrature_from(payload);
    json out;
    out["op"] = op;

    auto points_of = [&] {
        std::vector<herzkit::Point> pts;
        if (!payload.contains("points"))
            throw herzkit::schema_error("operator payload: missing field \"points\"");
        for (const auto& pj : payload.at("points")) {
            herzkit::Point x;
            for (const auto& v : pj) x.push_back(herzkit::decode_real(v, "points"));
            pts.push_back(std::move(x));
        }
        return pts;
    };

    if (op == "mollify" || op == "maximal" || op == "frac_maximal" || op == "riesz") {
        json values = json::array();
        for (const auto& x : points_of()) {
            double v = 0.0;
            if (op == "mollify")
                v = herzkit::mollify(f, herzkit::decode_real(payload.at("eps"), "eps"), x, opts);
            else if (op == "maximal")
                v = herzkit::maximal(f, x);
            else if (op == "frac_maximal")
                v = herzkit::frac_maximal(f, herzkit::decode_real(payload.at("t"), "t"), x);
            else
                v = herzkit::riesz(f, herzkit::decode_real(payload.at("lambda"), "lambda"), x,
                                   {}, opts);
            values.push_back(herzkit::encode_real(v));
        }
        out["values"] = values;
    } else if (op == "dyadic_project") {
        if (!payload.contains("j") || !payload.contains("region"))
            throw herzkit::schema_error("operator payload: dyadic_project needs \"j\", \"region\"");
        const auto region_spec = herzkit::domain_from_json(payload.at("region"));
        const auto* cube = std::get_if<herzkit::Cube>(&region_spec.shape);
        if (!cube)
            throw herzkit::schema_error("operator payload: region must be a cube");
        const auto grid =
            herzkit::dyadic_project(f, payload.at("j").get<int>(), *cube, opts);
        out["grid"] = herzkit::grid_to_json(grid);
    } else if (op == "mollify_error_norm") {
        herzkit::HerzParams hp{
            payload.contains("alpha") ? herzkit::decode_real(payload.at("alpha"), "alpha") : 0.0,
            herzkit::decode_exponent(payload.at("p"), "p"),
            herzkit::decode_exponent(payload.at("q"), "q"), payload.at("n").get<int>()};
        const auto res = herzkit::mollify_error_norm(
            f, herzkit::decode_real(payload.at("eps"), "eps"), hp, domain_from(payload),
            truncation_from(payload), opts);
        out["norm"] = herzkit::norm_result_to_json(res);
    } else {
        throw herzkit::schema_error("operator payload: unknown op \"" + op + "\"");
    }
    write_json(out_dir / "operator.json", out);
    return 0;
}

int cmd_report(const json& payload, const fs::path& out_dir) {
    herzkit::require_fields(payload, {"reports"}, {}, "report payload");
    std::vector<herzkit::EmbeddingReport> reports;
    for (const auto& pj : payload.at("reports")) {
        std::ifstream in(pj.get<std::string>());
        if (!in) throw herzkit::schema_error("cannot read report " + pj.get<std::string>());
        json j;
        in >> j;
        reports.push_back(herzkit::embedding_report_from_json(j));
    }
    const auto summary = herzkit::estimate_constant(reports);
    write_json(out_dir / "summary.json", herzkit::summary_to_json(summary));
    write_file(out_dir / "summary.csv", herzkit::summary_csv(summary));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"herzkit: dyadic-annulus norm computations and embedding experiments"};
    std::string config_path;
    std::string out_override;
    std::int64_t seed_override = -1;
    int threads = 0;
    bool override_hypotheses = false;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_override, "output directory (overrides config)");
    app.add_option("--seed", seed_override, "seed (overrides config)");
    app.add_option("--threads", threads, "worker threads (default HERZKIT_THREADS or 1)");
    app.add_flag("--override-hypotheses", override_hypotheses,
                 "evaluate embed experiments even when hypotheses fail (watermarked)");
    CLI11_PARSE(app, argc, argv);

    if (threads <= 0) {
        if (const char* env = std::getenv("HERZKIT_THREADS")) threads = std::atoi(env);
    }
    herzkit::set_worker_threads(threads > 0 ? threads : 1);

    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot read config " << config_path << "\n";
            return 2;
        }
        json cfg;
        try {
            in >> cfg;
        } catch (const std::exception& e) {
            std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
            return 2;
        }
        herzkit::require_fields(cfg, {"command", "payload"}, {"seed", "output_dir"}, "config");
        const std::string command = cfg.at("command").get<std::string>();
        const json& payload = cfg.at("payload");
        std::uint64_t seed = cfg.contains("seed") ? cfg.at("seed").get<std::uint64_t>() : 0;
        if (seed_override >= 0) seed = static_cast<std::uint64_t>(seed_override);
        fs::path out_dir = cfg.contains("output_dir")
                               ? fs::path(cfg.at("output_dir").get<std::string>())
                               : fs::path("out");
        if (!out_override.empty()) out_dir = out_override;
        fs::create_directories(out_dir);

        if (command == "norm") return cmd_norm(payload, out_dir);
        if (command == "check") return cmd_check(payload, out_dir);
        if (command == "embed") return cmd_embed(payload, out_dir, seed, override_hypotheses);
        if (command == "counterexample") return cmd_counterexample(payload, out_dir);
        if (command == "operator") return cmd_operator(payload, out_dir);
        if (command == "report") return cmd_report(payload, out_dir);
        std::cerr << "error: unknown command \"" << command << "\"\n";
        return 2;
    } catch (const herzkit::schema_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const herzkit::invalid_input& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const herzkit::quadrature_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
