#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "qvar/convexity.hpp"
#include "qvar/currents.hpp"
#include "qvar/equiint.hpp"
#include "qvar/errors.hpp"
#include "qvar/json_io.hpp"
#include "qvar/qfield_ops.hpp"

namespace {

using qvar::ojson;

struct CliOptions {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

double finite(double v, const char* what) {
    if (!std::isfinite(v)) throw qvar::NumericalError(std::string(what) + " is not finite");
    return v;
}

int resolved_threads(const CliOptions& opt) {
    if (opt.threads) return std::max(1, *opt.threads);
    if (const char* env = std::getenv("QVAR_THREADS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (...) {
            throw qvar::ConfigError("QVAR_THREADS must be an integer");
        }
    }
    return 1;
}

qvar::OptimizerConfig optimizer_for(const ojson& cfg, const CliOptions& opt) {
    qvar::OptimizerConfig oc;
    if (cfg.contains("optimizer")) oc = qvar::optimizer_from_json(cfg["optimizer"]);
    if (opt.seed) oc.seed = *opt.seed;
    oc.threads = resolved_threads(opt);
    return oc;
}

ojson run_metric(const ojson& cfg, const CliOptions&) {
    qvar::check_keys(cfg, {"schema_version"}, {"T1", "T2"}, "metric config");
    auto t1 = qvar::qpoint_from_json(cfg["T1"]);
    auto t2 = qvar::qpoint_from_json(cfg["T2"]);
    double g;
    try {
        g = qvar::metric_g(t1, t2);
    } catch (const qvar::InvalidInput& e) {
        throw qvar::ConfigError(e.what());
    }
    ojson out;
    out["g"] = finite(g, "g");
    return out;
}

ojson run_energy(const ojson& cfg, const CliOptions&) {
    qvar::check_keys(cfg, {"schema_version"}, {"integrand", "field"}, "energy config");
    auto field = qvar::field_from_json(cfg["field"]);
    auto f = qvar::integrand_from_json(cfg["integrand"], field.m(), field.n(), field.q());
    ojson out;
    out["value"] = finite(qvar::energy(*f, field), "value");
    return out;
}

ojson run_qc_test(const ojson& cfg, const CliOptions& opt) {
    qvar::check_keys(cfg, {"schema_version", "optimizer"}, {"integrand", "affine_map"},
                     "qc-test config");
    auto u = qvar::affine_qmap_from_json(cfg["affine_map"]);
    auto f = qvar::integrand_from_json(cfg["integrand"], u.m(), u.n(), u.total_q());
    auto oc = optimizer_for(cfg, opt);
    auto verdict = qvar::quasiconvexity_test(*f, u, oc);
    finite(verdict.margin, "margin");
    return qvar::verdict_to_json(verdict);
}

ojson run_semielliptic(const ojson& cfg, const CliOptions& opt) {
    qvar::check_keys(cfg, {"schema_version", "optimizer"}, {"m", "n", "Q", "matrix"},
                     "semielliptic config");
    const int m = cfg["m"].get<int>();
    const int n = cfg["n"].get<int>();
    const int q = cfg["Q"].get<int>();
    auto form = qvar::quadratic_from_json(cfg["matrix"], n, m);
    auto oc = optimizer_for(cfg, opt);
    auto verdict = qvar::semiellipticity_test(form, q, oc);
    finite(verdict.margin, "margin");
    return qvar::verdict_to_json(verdict);
}

ojson run_rank_one(const ojson& cfg, const CliOptions& opt) {
    qvar::check_keys(cfg, {"schema_version"}, {"m", "n", "matrix"}, "rank-one config");
    const int m = cfg["m"].get<int>();
    const int n = cfg["n"].get<int>();
    auto form = qvar::quadratic_from_json(cfg["matrix"], n, m);
    auto res = qvar::rank_one_min(form, 12, opt.seed ? *opt.seed : 0x9d2c5680ULL);
    ojson out;
    out["value"] = finite(res.value, "value");
    out["a"] = qvar::vector_to_json(res.a);
    out["b"] = qvar::vector_to_json(res.b);
    return out;
}

ojson run_polyconvex_cert(const ojson& cfg, const CliOptions& opt) {
    qvar::check_keys(cfg, {"schema_version"}, {"m", "n", "matrix"}, "polyconvex-cert config");
    const int m = cfg["m"].get<int>();
    const int n = cfg["n"].get<int>();
    auto form = qvar::quadratic_from_json(cfg["matrix"], n, m);
    auto res = qvar::polyconvexity_certificate(form, opt.seed ? *opt.seed : 0x832c1e5fULL);
    ojson out;
    out["feasible"] = res.feasible;
    out["lambdas"] = qvar::vector_to_json(res.best.lambdas);
    out["min_eigenvalue"] = finite(res.best.min_eigenvalue, "min_eigenvalue");
    return out;
}

ojson run_stokes(const ojson& cfg, const CliOptions&) {
    qvar::check_keys(cfg, {"schema_version"}, {"field", "form"}, "stokes config");
    auto field = qvar::field_from_json(cfg["field"]);
    auto omega = qvar::form_from_json(cfg["form"]);
    double graph, boundary;
    try {
        graph = qvar::pair_graph(field, qvar::exterior_derivative(omega));
        boundary = qvar::pair_boundary(field, omega);
    } catch (const qvar::InvalidForm& e) {
        throw qvar::ConfigError(e.what());
    }
    ojson out;
    out["graph_pairing"] = finite(graph, "graph_pairing");
    out["boundary_pairing"] = finite(boundary, "boundary_pairing");
    out["residual"] = finite(graph - boundary, "residual");
    return out;
}

ojson run_null_lagrangian(const ojson& cfg, const CliOptions&) {
    qvar::check_keys(cfg, {"schema_version"}, {"polyaffine", "w1", "w2"},
                     "null-lagrangian config");
    auto P = qvar::polyaffine_from_json(cfg["polyaffine"]);
    auto w1 = qvar::field_from_json(cfg["w1"]);
    auto w2 = qvar::field_from_json(cfg["w2"]);
    ojson out;
    out["gap"] = finite(qvar::null_lagrangian_gap(P, w1, w2), "gap");
    return out;
}

ojson run_fold(const ojson& cfg, const CliOptions&) {
    qvar::check_keys(cfg, {"schema_version", "emit_field"}, {"affine_map", "competitors", "k", "r"},
                     "fold config");
    auto u = qvar::affine_qmap_from_json(cfg["affine_map"]);
    std::vector<qvar::QSheetField> comps;
    for (const auto& jc : cfg["competitors"]) comps.push_back(qvar::field_from_json(jc));
    const int k = cfg["k"].get<int>();
    const double r = cfg["r"].get<double>();
    auto folded = qvar::fold_sequence(u, comps, k, r);
    ojson out;
    out["cells_per_side"] = folded.mesh().cells_per_side();
    out["boundary_error"] = finite(folded.boundary_trace_distance(u), "boundary_error");
    out["sup_distance"] = finite(qvar::sup_vertex_distance(folded, u), "sup_distance");
    if (cfg.contains("emit_field") && cfg["emit_field"].get<bool>())
        out["field"] = qvar::field_to_json(folded);
    return out;
}

ojson run_lsc(const ojson& cfg, const CliOptions&) {
    qvar::check_keys(cfg, {"schema_version"}, {"integrand", "affine_map", "competitors", "ks", "r"},
                     "lsc config");
    auto u = qvar::affine_qmap_from_json(cfg["affine_map"]);
    auto f = qvar::integrand_from_json(cfg["integrand"], u.m(), u.n(), u.total_q());
    std::vector<qvar::QSheetField> comps;
    for (const auto& jc : cfg["competitors"]) comps.push_back(qvar::field_from_json(jc));
    auto ks = cfg["ks"].get<std::vector<int>>();
    const double r = cfg["r"].get<double>();
    auto rep = qvar::necessity_experiment(*f, u, comps, ks, r);
    ojson out;
    out["affine_energy"] = finite(rep.affine_energy, "affine_energy");
    out["fold_counts"] = rep.fold_counts;
    for (double e : rep.folded_energies) finite(e, "folded_energy");
    out["folded_energies"] = rep.folded_energies;
    out["competitor_energy_scaled"] =
        finite(rep.competitor_energy_scaled, "competitor_energy_scaled");
    out["gradient_only"] = rep.gradient_only;
    out["max_fold_deviation"] = rep.max_fold_deviation;
    out["k_independent"] = rep.k_independent;
    out["semicontinuity_violated"] = rep.semicontinuity_violated;
    return out;
}

ojson run_blowup(const ojson& cfg, const CliOptions&) {
    qvar::check_keys(cfg, {"schema_version", "p"}, {"field", "x0", "model", "rhos"},
                     "blowup config");
    auto field = qvar::field_from_json(cfg["field"]);
    auto model = qvar::affine_qmap_from_json(cfg["model"]);
    Eigen::VectorXd x0 = qvar::vector_from_json(cfg["x0"], "blowup.x0");
    auto rhos = cfg["rhos"].get<std::vector<double>>();
    const double p = cfg.contains("p") ? cfg["p"].get<double>() : 2.0;
    ojson out;
    ojson residuals = ojson::array();
    for (double rho : rhos)
        residuals.push_back(finite(qvar::blowup_residual(field, x0, model, rho, p), "residual"));
    out["p"] = p;
    out["rhos"] = rhos;
    out["residuals"] = residuals;
    return out;
}

qvar::SampledFunctionSeq load_sequence(const ojson& cfg) {
    if (cfg.contains("sequence")) return qvar::sampled_seq_from_json(cfg["sequence"]);
    if (cfg.contains("csv")) {
        if (!cfg.contains("cell_volume"))
            throw qvar::ConfigError("csv input requires 'cell_volume'");
        return qvar::read_sampled_csv(cfg["csv"].get<std::string>(),
                                      cfg["cell_volume"].get<double>());
    }
    throw qvar::ConfigError("either 'sequence' or 'csv' input is required");
}

ojson run_biting(const ojson& cfg, const CliOptions&) {
    qvar::check_keys(cfg, {"schema_version", "sequence", "csv", "cell_volume", "schedule"},
                     {}, "biting config");
    auto seq = load_sequence(cfg);
    qvar::BitingSchedule schedule = qvar::default_biting_schedule(seq);
    if (cfg.contains("schedule")) {
        qvar::check_keys(cfg["schedule"], {"C", "ladder"}, {"kind"}, "biting.schedule");
        const std::string kind = cfg["schedule"]["kind"].get<std::string>();
        const double C = cfg["schedule"].contains("C") ? cfg["schedule"]["C"].get<double>()
                                                       : std::max(1.0, seq.l1_bound());
        if (kind == "inverse_sqrt")
            schedule.epsilon = [C](double t) { return C / std::sqrt(std::max(t, 1e-300)); };
        else if (kind == "inverse")
            schedule.epsilon = [C](double t) { return C / std::max(t, 1e-300); };
        else
            throw qvar::ConfigError("biting.schedule: kind must be inverse_sqrt or inverse");
        if (cfg["schedule"].contains("ladder"))
            schedule.ladder = cfg["schedule"]["ladder"].get<std::vector<double>>();
    }
    auto sel = qvar::biting_truncations(seq, schedule);
    ojson out;
    out["ok"] = sel.ok;
    out["indices"] = sel.indices;
    out["levels"] = sel.levels;
    out["achieved_sup_tails"] = sel.achieved_sup_tails;
    out["message"] = sel.message;
    return out;
}

ojson run_dlvp(const ojson& cfg, const CliOptions&) {
    qvar::check_keys(cfg, {"schema_version", "sequence", "csv", "cell_volume", "cap"}, {"phi"},
                     "dlvp config");
    auto seq = load_sequence(cfg);
    qvar::check_keys(cfg["phi"], {}, {"kind", "exponent"}, "dlvp.phi");
    if (cfg["phi"]["kind"].get<std::string>() != "power")
        throw qvar::ConfigError("dlvp.phi: kind must be 'power'");
    const double e = cfg["phi"]["exponent"].get<double>();
    if (e <= 1.0) throw qvar::ConfigError("dlvp.phi: superlinearity needs exponent > 1");
    const double cap = cfg.contains("cap") ? cfg["cap"].get<double>() : 1e6;
    auto res = qvar::dlvp_check(seq, [e](double t) { return std::pow(t, e); }, cap);
    ojson out;
    out["ok"] = res.ok;
    out["sup"] = finite(res.sup, "sup");
    out["cap"] = res.cap;
    return out;
}

std::string one_line_summary(const std::string& cmd, const ojson& result) {
    if (result.contains("status"))
        return cmd + ": " + result["status"].get<std::string>() +
               " margin=" + result["margin"].dump();
    if (result.contains("g")) return cmd + ": g=" + result["g"].dump();
    if (result.contains("value")) return cmd + ": value=" + result["value"].dump();
    if (result.contains("residual")) return cmd + ": residual=" + result["residual"].dump();
    if (result.contains("gap")) return cmd + ": gap=" + result["gap"].dump();
    if (result.contains("feasible"))
        return cmd + ": feasible=" + result["feasible"].dump() +
               " min_eigenvalue=" + result["min_eigenvalue"].dump();
    if (result.contains("residuals")) return cmd + ": residuals=" + result["residuals"].dump();
    if (result.contains("ok")) return cmd + ": ok=" + result["ok"].dump();
    if (result.contains("boundary_error"))
        return cmd + ": boundary_error=" + result["boundary_error"].dump();
    if (result.contains("folded_energies"))
        return cmd + ": folded=" + result["folded_energies"].dump();
    return cmd + ": done";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qvar - numerical laboratory for Q-valued variational calculus"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, ojson (*)(const ojson&, const CliOptions&)>>
        commands = {{"metric", run_metric},
                    {"energy", run_energy},
                    {"qc-test", run_qc_test},
                    {"semielliptic", run_semielliptic},
                    {"rank-one", run_rank_one},
                    {"polyconvex-cert", run_polyconvex_cert},
                    {"stokes", run_stokes},
                    {"null-lagrangian", run_null_lagrangian},
                    {"fold", run_fold},
                    {"lsc", run_lsc},
                    {"blowup", run_blowup},
                    {"biting", run_biting},
                    {"dlvp", run_dlvp}};

    CliOptions opt;
    std::uint64_t seed_value = 0;
    int threads_value = 0;
    for (const auto& [name, fn] : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config_path, "path to the JSON config")->required();
        sub->add_option("--out", opt.out_path, "path for the JSON result document");
        auto* s = sub->add_option("--seed", seed_value, "override the config seed");
        auto* t = sub->add_option("--threads", threads_value, "worker threads");
        sub->callback([&opt, s, t, &seed_value, &threads_value]() {
            if (s->count()) opt.seed = seed_value;
            if (t->count()) opt.threads = threads_value;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    std::string cmd = app.get_subcommands().front()->get_name();
    ojson (*runner)(const ojson&, const CliOptions&) = nullptr;
    for (const auto& [name, fn] : commands)
        if (name == cmd) runner = fn;

    try {
        std::ifstream in(opt.config_path);
        if (!in) throw qvar::ConfigError("cannot open config file " + opt.config_path);
        ojson cfg;
        try {
            cfg = ojson::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw qvar::ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        if (cfg.contains("schema_version") && cfg["schema_version"].get<int>() != 1)
            throw qvar::ConfigError("unsupported schema_version");

        ojson result;
        result["schema_version"] = 1;
        result["command"] = cmd;
        ojson body = runner(cfg, opt);
        for (auto it = body.begin(); it != body.end(); ++it) result[it.key()] = it.value();

        std::string doc = result.dump(2);
        doc.push_back('\n');
        if (!opt.out_path.empty()) {
            std::ofstream out(opt.out_path, std::ios::binary);
            if (!out) throw qvar::ConfigError("cannot open output path " + opt.out_path);
            out << doc;
            out.close();
            std::cout << one_line_summary(cmd, result) << "\n";
        } else {
            std::cout << doc;
        }
        return 0;
    } catch (const qvar::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qvar::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
