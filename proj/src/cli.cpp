#include "omw/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <json.hpp>

#include "omw/analytic_model.hpp"
#include "omw/optimizer.hpp"
#include "omw/parallel.hpp"
#include "omw/rng.hpp"
#include "omw/statistics.hpp"
#include "omw/verification.hpp"
#include "omw/witness.hpp"

namespace omw::cli {

namespace {

using nlohmann::json;

struct RunConfig {
    std::string command;
    std::optional<SystemParams> system;
    std::optional<HardwareParams> hardware;
    double eta = -1.0;  // with a hardware block the efficiency comes separately
    std::optional<double> alpha, beta;
    std::vector<double> grid_T, grid_eta, grid_n0;
    optimizer::Brackets brackets;
    double significance = 3.0;
    std::int64_t n_cal = 100000;
    std::int64_t n_total = 0;  // 0: derive from required_runs
    int replications = 500;
    int verify_points = 200;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    int cutoff = 0;
    std::string out;     // empty: stdout
    std::string format = "json";
};

[[noreturn]] void config_error(const std::string& what) { throw std::invalid_argument(what); }

double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        config_error(std::string("config: missing numeric field '") + key + "'");
    return j[key].get<double>();
}

RunConfig parse_config_file(const std::string& path) {
    RunConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) config_error("config: cannot read " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        config_error(std::string("config: ") + e.what());
    }

    cfg.command = j.value("command", "");
    if (j.contains("system")) {
        const json& s = j["system"];
        SystemParams sp;
        sp.p = s.value("p", 0.0);
        sp.T = require_number(s, "T");
        sp.eta = require_number(s, "eta");
        sp.n0 = s.value("n0", 0.0);
        cfg.system = sp;
    }
    if (j.contains("hardware")) {
        const json& h = j["hardware"];
        HardwareParams hw;
        const double two_pi = 2.0 * std::numbers::pi;
        hw.g0 = two_pi * require_number(h, "g0_over_2pi_hz");
        hw.kappa = two_pi * require_number(h, "kappa_over_2pi_hz");
        hw.omega_m = two_pi * require_number(h, "omega_m_over_2pi_hz");
        hw.n_plus = require_number(h, "n_plus");
        hw.n_minus = require_number(h, "n_minus");
        hw.t1 = require_number(h, "t1_s");
        hw.t2 = require_number(h, "t2_s");
        hw.n0 = h.value("n0", 0.0);
        cfg.hardware = hw;
    }
    cfg.eta = j.value("eta", -1.0);
    if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
    if (j.contains("beta")) cfg.beta = j["beta"].get<double>();
    if (j.contains("grids")) {
        const json& g = j["grids"];
        if (g.contains("T")) cfg.grid_T = g["T"].get<std::vector<double>>();
        if (g.contains("eta")) cfg.grid_eta = g["eta"].get<std::vector<double>>();
        if (g.contains("n0")) cfg.grid_n0 = g["n0"].get<std::vector<double>>();
    }
    if (j.contains("optimizer")) {
        const json& o = j["optimizer"];
        cfg.brackets.alpha_max = o.value("alpha_max", cfg.brackets.alpha_max);
        cfg.brackets.beta_max = o.value("beta_max", cfg.brackets.beta_max);
        cfg.brackets.p_max = o.value("p_max", cfg.brackets.p_max);
        cfg.brackets.grid_alpha = o.value("grid_alpha", cfg.brackets.grid_alpha);
        cfg.brackets.grid_beta = o.value("grid_beta", cfg.brackets.grid_beta);
        cfg.brackets.grid_p = o.value("grid_p", cfg.brackets.grid_p);
        cfg.brackets.tolerance = o.value("tolerance", cfg.brackets.tolerance);
        cfg.brackets.max_iterations = o.value("max_iterations", cfg.brackets.max_iterations);
    }
    if (j.contains("statistics")) {
        const json& s = j["statistics"];
        cfg.significance = s.value("significance", cfg.significance);
        cfg.n_cal = s.value("n_cal", cfg.n_cal);
        cfg.n_total = s.value("n_total", cfg.n_total);
        cfg.replications = s.value("replications", cfg.replications);
    }
    if (j.contains("verify")) cfg.verify_points = j["verify"].value("points", cfg.verify_points);
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    cfg.threads = j.value("threads", cfg.threads);
    cfg.cutoff = j.value("cutoff", cfg.cutoff);
    cfg.out = j.value("out", cfg.out);
    cfg.format = j.value("format", cfg.format);
    return cfg;
}

// Exactly one parameter block may be given; hardware needs the detection
// efficiency on the side.
SystemParams resolve_params(const RunConfig& cfg, json& echo) {
    if (cfg.system && cfg.hardware)
        config_error("config: give either a system block or a hardware block, not both");
    if (cfg.system) {
        cfg.system->validate();
        return *cfg.system;
    }
    if (!cfg.hardware) config_error("config: this command needs a system or hardware block");
    if (!(cfg.eta > 0.0 && cfg.eta <= 1.0))
        config_error("config: a hardware block needs eta in (0,1]");
    cfg.hardware->validate();
    const SystemParams params = analytic::hardware_to_params(*cfg.hardware, cfg.eta);
    json hw;
    const double two_pi = 2.0 * std::numbers::pi;
    hw["g0_over_2pi_hz"] = cfg.hardware->g0 / two_pi;
    hw["kappa_over_2pi_hz"] = cfg.hardware->kappa / two_pi;
    hw["omega_m_over_2pi_hz"] = cfg.hardware->omega_m / two_pi;
    hw["n_plus"] = cfg.hardware->n_plus;
    hw["n_minus"] = cfg.hardware->n_minus;
    hw["t1_s"] = cfg.hardware->t1;
    hw["t2_s"] = cfg.hardware->t2;
    hw["n0"] = cfg.hardware->n0;
    echo["hardware"] = hw;
    echo["regime_warnings"] = cfg.hardware->regime_warnings();
    return params;
}

json params_json(const SystemParams& p) {
    return json{{"p", p.p}, {"T", p.T}, {"eta", p.eta}, {"n0", p.n0}};
}

json config_echo(const RunConfig& cfg) {
    json e;
    e["command"] = cfg.command;
    e["threads"] = cfg.threads;
    e["cutoff"] = cfg.cutoff;
    e["format"] = cfg.format;
    if (cfg.seed) {
        e["seed"] = *cfg.seed;
        e["rng"] = PhiloxEngine::name();
    }
    return e;
}

void write_output(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(cfg.out, std::ios::binary | std::ios::trunc);
    if (!out) config_error("cannot write output file " + cfg.out);
    out << text;
}

std::string format_sig12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json plan_json(const stats::RunPlan& plan, const stats::LinearFunctional& f) {
    json runs = json::object();
    for (int i = 0; i < stats::kProbCount; ++i)
        if (f.coeffs[i] != 0.0) runs[stats::kProbNames[i]] = plan.runs[i];
    return json{{"runs", runs},
                {"total", plan.total},
                {"predicted_mean", plan.predicted_mean},
                {"predicted_variance", plan.predicted_variance},
                {"predicted_significance", plan.significance},
                {"conservative_sigma",
                 std::sqrt(stats::conservative_variance(f, plan))}};
}

int cmd_verify(const RunConfig& cfg) {
    if (cfg.verify_points < 1) config_error("config: verify needs at least one point");
    const std::uint64_t seed = cfg.seed.value_or(20240901);
    const auto report =
        verify::run_agreement(cfg.verify_points, seed, cfg.cutoff, cfg.threads);

    json out = config_echo(cfg);
    out["seed"] = seed;
    out["rng"] = PhiloxEngine::name();
    out["points"] = report.points;
    out["tolerance"] = report.tolerance;
    out["max_discrepancy"] = report.max_discrepancy;
    out["worst_point"] = {{"params", params_json(report.worst.params)},
                          {"alpha", report.worst.alpha},
                          {"beta", report.worst.beta},
                          {"discrepancy", report.worst.max_discrepancy}};
    out["pass"] = report.pass;
    write_output(cfg, out.dump(2));
    return report.pass ? kExitOk : kExitNumerical;
}

int cmd_sweep(const RunConfig& cfg) {
    if (cfg.grid_T.empty()) config_error("config: sweep needs a non-empty grids.T");
    const std::vector<double> etas = cfg.grid_eta.empty() ? std::vector<double>{1.0} : cfg.grid_eta;
    const std::vector<double> n0s = cfg.grid_n0.empty() ? std::vector<double>{0.0} : cfg.grid_n0;
    const auto rows = optimizer::sweep(etas, n0s, cfg.grid_T, cfg.brackets, cfg.threads);

    if (cfg.format == "csv") {
        std::ostringstream os;
        os << "T,eta,n0,alpha,beta,p,Q,S_star,diff\n";
        for (const auto& r : rows)
            os << format_sig12(r.T) << ',' << format_sig12(r.eta) << ',' << format_sig12(r.n0)
               << ',' << format_sig12(r.alpha) << ',' << format_sig12(r.beta) << ','
               << format_sig12(r.p) << ',' << format_sig12(r.q) << ',' << format_sig12(r.s_star)
               << ',' << format_sig12(r.diff) << '\n';
        write_output(cfg, os.str());
        return kExitOk;
    }
    json out = config_echo(cfg);
    out["grids"] = {{"T", cfg.grid_T}, {"eta", etas}, {"n0", n0s}};
    json jrows = json::array();
    for (const auto& r : rows)
        jrows.push_back(json{{"T", r.T},
                             {"eta", r.eta},
                             {"n0", r.n0},
                             {"alpha", r.alpha},
                             {"beta", r.beta},
                             {"p", r.p},
                             {"Q", r.q},
                             {"S_star", r.s_star},
                             {"diff", r.diff}});
    out["rows"] = jrows;
    write_output(cfg, out.dump(2));
    return kExitOk;
}

int cmd_optimize(const RunConfig& cfg) {
    json extra = json::object();
    const SystemParams base = resolve_params(cfg, extra);
    const bool p_fixed = base.p > 0.0;
    const optimizer::OptimizationResult res =
        p_fixed ? optimizer::optimize_displacements(base.T, base.eta, base.n0, base.p,
                                                    cfg.brackets)
                : optimizer::optimize_setting(base.T, base.eta, base.n0, cfg.brackets);

    json out = config_echo(cfg);
    out.update(extra);
    out["params"] = params_json(base);
    out["p_fixed"] = p_fixed;
    out["result"] = {{"alpha", res.alpha}, {"beta", res.beta},     {"p", res.p},
                     {"Q", res.q},         {"S_star", res.s_star}, {"diff", res.diff},
                     {"iterations", res.iterations}, {"converged", res.converged}};
    write_output(cfg, out.dump(2));
    return kExitOk;
}

int cmd_feasibility(const RunConfig& cfg) {
    json extra = json::object();
    SystemParams params = resolve_params(cfg, extra);
    if (!(params.p > 0.0))
        config_error("config: feasibility needs a positive pair-creation probability p");

    double alpha, beta;
    bool optimized = false;
    if (cfg.alpha && cfg.beta) {
        alpha = *cfg.alpha;
        beta = *cfg.beta;
    } else if (!cfg.alpha && !cfg.beta) {
        const auto res =
            optimizer::optimize_displacements(params.T, params.eta, params.n0, params.p,
                                              cfg.brackets);
        alpha = res.alpha;
        beta = res.beta;
        optimized = true;
    } else {
        config_error("config: give both alpha and beta, or neither");
    }

    const auto ev = witness::evaluate(params, alpha, beta);
    const auto rr = stats::required_runs(params, alpha, beta, cfg.significance, cfg.n_cal);

    const auto probs = analytic::probability_set(params, alpha, beta);
    const auto setting = witness::DisplacementSetting::from_alpha(alpha, beta, params.eta);
    const auto k = stats::calibration_constants(probs, cfg.n_cal);
    const auto f = stats::estimator_functional(setting, k, probs);

    json out = config_echo(cfg);
    out.update(extra);
    out["params"] = params_json(params);
    out["alpha"] = alpha;
    out["beta"] = beta;
    out["displacements_optimized"] = optimized;
    out["Q"] = ev.q;
    out["S_star"] = ev.s_star;
    out["diff"] = ev.diff;
    out["significance_target"] = cfg.significance;
    out["n_cal"] = cfg.n_cal;
    out["n_total"] = rr.n_total;
    out["plan"] = plan_json(rr.plan, f);
    write_output(cfg, out.dump(2));
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg) {
    if (!cfg.seed) config_error("config: simulate needs a seed");
    if (cfg.replications < 1) config_error("config: simulate needs at least one replication");
    json extra = json::object();
    const SystemParams params = resolve_params(cfg, extra);
    if (!cfg.alpha || !cfg.beta) config_error("config: simulate needs alpha and beta");
    const double alpha = *cfg.alpha, beta = *cfg.beta;

    const auto probs = analytic::probability_set(params, alpha, beta);
    const auto setting = witness::DisplacementSetting::from_alpha(alpha, beta, params.eta);
    const auto k = stats::calibration_constants(probs, cfg.n_cal);
    const auto f = stats::estimator_functional(setting, k, probs);

    stats::RunPlan plan;
    std::int64_t n_total = cfg.n_total;
    if (n_total > 0) {
        plan = stats::plan_runs(f, probs, n_total);
    } else {
        const auto rr = stats::required_runs(params, alpha, beta, cfg.significance, cfg.n_cal);
        plan = rr.plan;
        n_total = rr.n_total;
    }

    std::vector<double> values(cfg.replications);
    parallel_for_indexed(cfg.replications, cfg.threads, [&](int i) {
        values[i] = stats::simulate_experiment(params, alpha, beta, plan, *cfg.seed,
                                               static_cast<std::uint64_t>(i), cfg.n_cal);
    });

    double mean = 0.0;
    int positive = 0;
    for (double v : values) {
        mean += v;
        positive += v > 0.0 ? 1 : 0;
    }
    mean /= cfg.replications;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var = cfg.replications > 1 ? var / (cfg.replications - 1) : 0.0;

    if (cfg.format == "csv") {
        std::ostringstream os;
        os << "replication,estimate\n";
        for (int i = 0; i < cfg.replications; ++i)
            os << i << ',' << format_sig12(values[i]) << '\n';
        os << "# mean," << format_sig12(mean) << '\n';
        os << "# stddev," << format_sig12(std::sqrt(var)) << '\n';
        os << "# fraction_positive,"
           << format_sig12(static_cast<double>(positive) / cfg.replications) << '\n';
        write_output(cfg, os.str());
        return kExitOk;
    }
    json out = config_echo(cfg);
    out.update(extra);
    out["params"] = params_json(params);
    out["alpha"] = alpha;
    out["beta"] = beta;
    out["replications"] = cfg.replications;
    out["n_total"] = n_total;
    out["plan"] = plan_json(plan, f);
    out["values"] = values;
    out["summary"] = {{"mean", mean},
                      {"stddev", std::sqrt(var)},
                      {"fraction_positive",
                       static_cast<double>(positive) / cfg.replications},
                      {"predicted_mean", plan.predicted_mean},
                      {"predicted_stddev", std::sqrt(plan.predicted_variance)}};
    write_output(cfg, out.dump(2));
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Opto-mechanical entanglement witness: closed forms, Fock-space checks, "
                 "displacement optimization and run planning"};
    app.fallthrough(true);

    std::string config_path, out_path, format;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0, cutoff = -1;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_path, "output path (default: stdout)");
    app.add_option("--format", format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", seed, "RNG seed (counter-based philox4x32-10)")
        ->each([&](const std::string&) { seed_given = true; });
    app.add_option("--threads", threads, "worker threads for grids and replications");
    app.add_option("--cutoff", cutoff, "fixed Fock cutoff override (0 = adaptive)");

    for (const char* name : {"verify", "sweep", "optimize", "feasibility", "simulate"})
        app.add_subcommand(name);
    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help();
            return kExitOk;
        }
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        RunConfig cfg = parse_config_file(config_path);
        for (const auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
        if (!out_path.empty()) cfg.out = out_path;
        if (!format.empty()) cfg.format = format;
        if (seed_given) cfg.seed = seed;
        if (threads > 0) cfg.threads = threads;
        if (cutoff >= 0) cfg.cutoff = cutoff;
        if (cfg.format != "csv" && cfg.format != "json")
            config_error("config: format must be csv or json");
        if (cfg.threads < 1) config_error("config: threads must be at least 1");

        if (cfg.command == "verify") return cmd_verify(cfg);
        if (cfg.command == "sweep") return cmd_sweep(cfg);
        if (cfg.command == "optimize") return cmd_optimize(cfg);
        if (cfg.command == "feasibility") return cmd_feasibility(cfg);
        if (cfg.command == "simulate") return cmd_simulate(cfg);
        config_error(cfg.command.empty() ? "no command given (verify | sweep | optimize | "
                                           "feasibility | simulate)"
                                         : "unknown command " + cfg.command);
    } catch (const NoViolationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoViolation;
    } catch (const UnderTruncationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace omw::cli
