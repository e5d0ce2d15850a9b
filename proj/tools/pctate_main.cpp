#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "pctate/csv.hpp"
#include "pctate/errors.hpp"
#include "pctate/estimators.hpp"
#include "pctate/inference.hpp"
#include "pctate/montecarlo.hpp"
#include "pctate/ols.hpp"
#include "pctate/report.hpp"
#include "pctate/shares.hpp"
#include "pctate/stagdid.hpp"

namespace {

using nlohmann::json;
using namespace pctate;

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
}

// Command-line flags win over config-file values, which win over defaults.
template <typename T>
void apply_config(const CLI::App& app, const json& cfg, const std::string& flag,
                  const std::string& key, T& value) {
    if (app.count(flag) > 0) return;
    if (auto it = cfg.find(key); it != cfg.end()) {
        try {
            value = it->get<T>();
        } catch (const json::exception&) {
            throw SchemaError("config: bad value for '" + key + "'");
        }
    }
}

void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(output_path);
        if (!out) throw InputError("cannot write '" + output_path + "'");
        out << text;
    }
}

struct EstimateArgs {
    std::string input, config, output;
    EstimateMapping mapping;
    double alpha = 0.05;
    double rho_null_pp = 0.0;  // percentage points, like the report
    bool as_json = false;
};

int run_estimate(const CLI::App& cmd, EstimateArgs& args) {
    const json cfg = load_config(args.config);
    apply_config(cmd, cfg, "--input", "input", args.input);
    apply_config(cmd, cfg, "--outcome", "outcome", args.mapping.outcome);
    apply_config(cmd, cfg, "--subgroup", "subgroup", args.mapping.subgroup);
    apply_config(cmd, cfg, "--covariate", "covariates", args.mapping.covariates);
    apply_config(cmd, cfg, "--cluster", "cluster", args.mapping.cluster);
    apply_config(cmd, cfg, "--control-label", "control_label", args.mapping.control_label);
    apply_config(cmd, cfg, "--alpha", "alpha", args.alpha);
    apply_config(cmd, cfg, "--rho-null", "rho_null", args.rho_null_pp);
    if (args.input.empty()) throw InputError("estimate: no input file given");
    if (args.mapping.outcome.empty() || args.mapping.subgroup.empty())
        throw InputError("estimate: outcome and subgroup columns are required");
    if (!(args.alpha > 0.0 && args.alpha < 1.0)) throw InputError("alpha must be in (0,1)");
    const double rho_0 = args.rho_null_pp / 100.0;
    if (!(rho_0 > -1.0)) throw InputError("rho null must exceed -100");

    const CrossSectionData data = load_cross_section(read_csv(args.input), args.mapping);
    const DesignMatrix design = build_design(data.covariates, data.covariate_names, data.subgroup,
                                             args.mapping.control_label);
    Eigen::VectorXd log_outcome(data.outcome.size());
    for (long i = 0; i < log_outcome.size(); ++i) log_outcome[i] = std::log(data.outcome[i]);

    const OlsFit fit = fit_ols(design, log_outcome);
    const bool clustered = !data.cluster_ids.empty();
    const CovMatrix cov =
        clustered ? cluster_vcov(fit, design, data.cluster_ids) : hc0_vcov(fit, design);

    const int g = design.num_groups();
    EffectEstimates effects;
    effects.tau_hat.resize(g);
    effects.cov_tau.resize(g, g);
    for (int a = 0; a < g; ++a) {
        effects.tau_hat[a] = fit.coefficients[design.treatment_columns[a]];
        for (int b = 0; b < g; ++b)
            effects.cov_tau(a, b) =
                cov.values(design.treatment_columns[a], design.treatment_columns[b]);
    }
    effects.residual_df = fit.residual_df;
    effects.clustered_cov = clustered;

    std::map<std::string, long> counts;
    for (const auto& label : data.subgroup)
        if (label != args.mapping.control_label) ++counts[label];
    std::vector<long> group_counts;
    for (const auto& [label, count] : counts) group_counts.push_back(count);
    const ShareEstimates shares = estimate_shares(group_counts);

    const PointEstimates points = point_estimates(shares, effects);
    const InferenceReport report = infer({shares, effects, args.alpha, rho_0});
    const bool homogeneous = g == 1;
    if (args.as_json) {
        emit(estimate_report_json(points, report, homogeneous, args.alpha, rho_0).dump(2) + "\n",
             args.output);
    } else {
        emit(estimate_report_text(points, report, homogeneous, args.alpha), args.output);
    }
    return 0;
}

struct DidArgs {
    std::string input, config, output;
    PanelMapping mapping;
    EventWindow window;
    double alpha = 0.05;
    bool as_json = false;
};

int run_did(const CLI::App& cmd, DidArgs& args) {
    const json cfg = load_config(args.config);
    apply_config(cmd, cfg, "--input", "input", args.input);
    apply_config(cmd, cfg, "--unit", "unit", args.mapping.unit);
    apply_config(cmd, cfg, "--time", "time", args.mapping.time);
    apply_config(cmd, cfg, "--cohort", "cohort", args.mapping.cohort);
    apply_config(cmd, cfg, "--outcome", "outcome", args.mapping.outcome);
    apply_config(cmd, cfg, "--covariate", "covariates", args.mapping.covariates);
    apply_config(cmd, cfg, "--event-min", "event_min", args.window.r_min);
    apply_config(cmd, cfg, "--event-max", "event_max", args.window.r_max);
    apply_config(cmd, cfg, "--alpha", "alpha", args.alpha);
    if (args.input.empty()) throw InputError("did: no input file given");
    if (args.mapping.unit.empty() || args.mapping.time.empty() || args.mapping.cohort.empty() ||
        args.mapping.outcome.empty())
        throw InputError("did: unit, time, cohort, and outcome columns are required");
    if (!(args.alpha > 0.0 && args.alpha < 1.0)) throw InputError("alpha must be in (0,1)");

    const PanelData panel = load_panel(read_csv(args.input), args.mapping);
    const PanelDesign panel_design = build_panel_design(panel, args.window);
    const EffectEstimates effects = fit_stagdid(panel_design);
    const auto sets = standard_aggregation_sets(panel_design.cells);
    const auto rows = att_report(effects, panel_design, sets, args.alpha);
    if (args.as_json) {
        json out = did_report_json(rows, args.alpha);
        if (!panel_design.dropped_cohorts.empty())
            out["dropped_cohorts"] = panel_design.dropped_cohorts;
        emit(out.dump(2) + "\n", args.output);
    } else {
        std::string text = did_report_text(rows, args.alpha);
        if (!panel_design.dropped_cohorts.empty()) {
            text += "\nDropped cohorts (no post-treatment cells in window):";
            for (long c : panel_design.dropped_cohorts) text += " " + std::to_string(c);
            text += "\n";
        }
        emit(text, args.output);
    }
    return 0;
}

struct SimulateArgs {
    std::string config, output;
    std::vector<long> n_grid;
    SimConfig sim;
    std::vector<double> rho_pp;  // percentage points
    std::string errors = "normal";
    bool serial = false;
    bool as_json = false;
};

int run_simulate(const CLI::App& cmd, SimulateArgs& args) {
    const json cfg = load_config(args.config);
    apply_config(cmd, cfg, "--n", "n", args.n_grid);
    apply_config(cmd, cfg, "--reps", "reps", args.sim.reps);
    apply_config(cmd, cfg, "--rho", "rho", args.rho_pp);
    apply_config(cmd, cfg, "--treated-share", "treated_share", args.sim.p_s);
    apply_config(cmd, cfg, "--errors", "errors", args.errors);
    apply_config(cmd, cfg, "--seed", "seed", args.sim.base_seed);
    apply_config(cmd, cfg, "--alpha", "alpha", args.sim.alpha);
    if (args.n_grid.empty()) args.n_grid = {1000};
    if (!args.rho_pp.empty()) {
        if (args.rho_pp.size() != 4) throw InputError("simulate: --rho needs exactly 4 values");
        for (int g = 0; g < 4; ++g) args.sim.rho_true[g] = args.rho_pp[g] / 100.0;
    }
    if (args.errors == "normal") {
        args.sim.error_kind = ErrorKind::Normal;
    } else if (args.errors == "skew" || args.errors == "skew_normal") {
        args.sim.error_kind = ErrorKind::SkewNormal;
    } else {
        throw InputError("simulate: --errors must be 'normal' or 'skew'");
    }

    const SimTable table = run_experiment(args.sim, args.n_grid, !args.serial);
    if (args.as_json) {
        emit(sim_table_json(table, args.sim).dump(2) + "\n", args.output);
    } else {
        emit(sim_table_csv(table), args.output);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Percentage-point treatment effects for log-outcome regressions"};
    app.require_subcommand(1);

    EstimateArgs est;
    CLI::App* cmd_est = app.add_subcommand("estimate", "Cross-sectional subgroup estimates");
    cmd_est->add_option("--input", est.input, "CSV input file");
    cmd_est->add_option("--config", est.config, "JSON config file");
    cmd_est->add_option("--output", est.output, "output file (default stdout)");
    cmd_est->add_option("--outcome", est.mapping.outcome, "outcome column (level, not log)");
    cmd_est->add_option("--subgroup", est.mapping.subgroup, "subgroup label column");
    cmd_est->add_option("--covariate", est.mapping.covariates, "covariate column (repeatable)");
    cmd_est->add_option("--cluster", est.mapping.cluster, "cluster id column");
    cmd_est->add_option("--control-label", est.mapping.control_label, "label of the control rows");
    cmd_est->add_option("--alpha", est.alpha, "test size");
    cmd_est->add_option("--rho-null", est.rho_null_pp, "null effect in percentage points");
    cmd_est->add_flag("--json", est.as_json, "JSON output instead of text");

    DidArgs did;
    CLI::App* cmd_did = app.add_subcommand("did", "Staggered difference-in-differences");
    cmd_did->add_option("--input", did.input, "CSV panel in long format");
    cmd_did->add_option("--config", did.config, "JSON config file");
    cmd_did->add_option("--output", did.output, "output file (default stdout)");
    cmd_did->add_option("--unit", did.mapping.unit, "unit id column");
    cmd_did->add_option("--time", did.mapping.time, "calendar time column");
    cmd_did->add_option("--cohort", did.mapping.cohort,
                        "first-treated-period column (blank/never/inf = never treated)");
    cmd_did->add_option("--outcome", did.mapping.outcome, "outcome column (level, not log)");
    cmd_did->add_option("--covariate", did.mapping.covariates, "covariate column (repeatable)");
    cmd_did->add_option("--event-min", did.window.r_min, "lowest event time kept");
    cmd_did->add_option("--event-max", did.window.r_max, "highest event time kept");
    cmd_did->add_option("--alpha", did.alpha, "test size");
    cmd_did->add_flag("--json", did.as_json, "JSON output instead of text");

    SimulateArgs sim;
    CLI::App* cmd_sim = app.add_subcommand("simulate", "Monte Carlo study of the estimators");
    cmd_sim->add_option("--config", sim.config, "JSON config file");
    cmd_sim->add_option("--output", sim.output, "output file (default stdout)");
    cmd_sim->add_option("--n", sim.n_grid, "sample size (repeatable for a grid)");
    cmd_sim->add_option("--reps", sim.sim.reps, "replications per cell");
    cmd_sim->add_option("--rho", sim.rho_pp,
                        "four true subgroup effects in percentage points");
    cmd_sim->add_option("--treated-share", sim.sim.p_s, "treated fraction of the sample");
    cmd_sim->add_option("--errors", sim.errors, "'normal' or 'skew'");
    cmd_sim->add_option("--seed", sim.sim.base_seed, "base RNG seed");
    cmd_sim->add_option("--alpha", sim.sim.alpha, "test size");
    cmd_sim->add_flag("--serial", sim.serial, "use the serial reference path");
    cmd_sim->add_flag("--json", sim.as_json, "JSON output instead of CSV");

    try {
        app.parse(argc, argv);
        if (cmd_est->parsed()) return run_estimate(*cmd_est, est);
        if (cmd_did->parsed()) return run_did(*cmd_did, did);
        return run_simulate(*cmd_sim, sim);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const pctate::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
