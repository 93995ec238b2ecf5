#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "uqeval/biaslab.hpp"
#include "uqeval/errors.hpp"
#include "uqeval/report.hpp"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw uqeval::ConfigError("cannot open output file: " + out_path);
    out << content;
}

struct CommonArgs {
    std::string records_path;
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    int workers = 1;
    bool no_normalize_clusters = false;
    std::string judge_endpoint;
    std::string judge_model;
    std::string judge_cache;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args, bool needs_records) {
    auto* records = cmd->add_option("--records", args.records_path, "records JSONL path");
    if (needs_records) records->required();
    cmd->add_option("--config", args.config_path, "run config JSON path");
    cmd->add_option("--out", args.out_path, "output path (default stdout)");
    cmd->add_option("--seed", args.seed, "random seed / probe split seed");
    cmd->add_option("--workers", args.workers, "parallel worker count")->check(CLI::PositiveNumber);
    cmd->add_flag("--no-normalize-clusters", args.no_normalize_clusters,
                  "feed raw unique-sum cluster masses into semantic entropy");
    cmd->add_option("--judge-endpoint", args.judge_endpoint, "chat-completion endpoint URL");
    cmd->add_option("--judge-model", args.judge_model, "judge model name");
    cmd->add_option("--judge-cache", args.judge_cache, "judge verdict cache path");
}

uqeval::RunConfig make_run_config(const CommonArgs& args) {
    uqeval::RunConfig config = args.config_path.empty()
                                   ? uqeval::parse_run_config(json::object())
                                   : uqeval::load_run_config(args.config_path);
    if (args.no_normalize_clusters) config.normalize_clusters = false;
    if (!args.judge_endpoint.empty() || !args.judge_model.empty() || !args.judge_cache.empty()) {
        uqeval::JudgeConfig judge = config.judge.value_or(uqeval::JudgeConfig{});
        if (!args.judge_endpoint.empty()) judge.endpoint_url = args.judge_endpoint;
        if (!args.judge_model.empty()) judge.model = args.judge_model;
        if (!args.judge_cache.empty()) judge.cache_path = args.judge_cache;
        judge.generator_model = config.generator_model;
        config.judge = std::move(judge);
    }
    if (config.judge && config.judge->endpoint_url.empty()) {
        throw uqeval::ConfigError("judge configured without an endpoint URL");
    }
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bias-aware evaluation toolkit for uncertainty quantification in LMs"};
    app.require_subcommand(1);

    CommonArgs args;

    auto* evaluate_cmd = app.add_subcommand(
        "evaluate", "AUROC of every configured UQ method under every correctness metric");
    add_common_flags(evaluate_cmd, args, true);
    std::string probe_out_dir;
    evaluate_cmd->add_option("--probe-out", probe_out_dir,
                             "directory for trained probe model JSON files");

    auto* agree_cmd = app.add_subcommand(
        "agree", "Cohen's kappa of correctness metrics against human majority labels");
    add_common_flags(agree_cmd, args, true);
    std::string annotations_path;
    agree_cmd->add_option("--annotations", annotations_path, "annotations JSONL path")->required();

    auto* sweep_cmd =
        app.add_subcommand("sweep", "kappa-vs-threshold curve for one continuous metric");
    add_common_flags(sweep_cmd, args, true);
    std::string sweep_annotations, sweep_metric;
    std::vector<double> sweep_grid;
    sweep_cmd->add_option("--annotations", sweep_annotations, "annotations JSONL path")->required();
    sweep_cmd->add_option("--metric", sweep_metric, "metric id to sweep")->required();
    sweep_cmd->add_option("--grid", sweep_grid,
                          "threshold grid (default 0.1 0.2 ... 1.0)");

    auto* correlate_cmd =
        app.add_subcommand("correlate", "Spearman correlation of UQ scores with answer length");
    add_common_flags(correlate_cmd, args, true);

    auto* simulate_cmd = app.add_subcommand(
        "simulate", "Monte Carlo draws of estimated vs true AUROC under label noise");
    add_common_flags(simulate_cmd, args, false);
    double sim_rho = 0.0, sim_true_auroc = 0.8, sim_tpr = 0.9, sim_tnr = 0.9, sim_prevalence = 0.5;
    std::size_t sim_n = 100000, sim_trials = 1;
    simulate_cmd->add_option("--rho", sim_rho, "error-score correlation in [-1,1]");
    simulate_cmd->add_option("--true-auroc", sim_true_auroc, "target true AUROC");
    simulate_cmd->add_option("--tpr", sim_tpr, "target P(h=1 | h_hat=1)");
    simulate_cmd->add_option("--tnr", sim_tnr, "target P(h=0 | h_hat=0)");
    simulate_cmd->add_option("--prevalence", sim_prevalence, "P(h=1)");
    simulate_cmd->add_option("--n", sim_n, "items per trial");
    simulate_cmd->add_option("--trials", sim_trials, "number of seeded trials");

    auto* verify_cmd = app.add_subcommand(
        "verify", "check the closed-form estimated-AUROC formula and the ranking experiment");
    add_common_flags(verify_cmd, args, false);
    std::size_t verify_n = 200000;
    double verify_tolerance = 0.005;
    std::string scenario_path;
    std::size_t ranking_trials = 100;
    bool skip_ranking = false;
    verify_cmd->add_option("--n", verify_n, "items per grid point");
    verify_cmd->add_option("--tolerance", verify_tolerance, "max |MC - closed form|");
    verify_cmd->add_option("--scenario", scenario_path,
                           "confounded scenario JSON (default: built-in pinned scenario)");
    verify_cmd->add_option("--ranking-trials", ranking_trials, "seeded confounded trials");
    verify_cmd->add_flag("--skip-ranking", skip_ranking, "grid check only");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*evaluate_cmd) {
            const auto records = uqeval::parse_records_file(args.records_path);
            const auto config = make_run_config(args);
            uqeval::EvaluateOptions options{args.records_path, args.seed, args.workers};
            if (!probe_out_dir.empty()) options.probe_model_dir = probe_out_dir;
            const auto report = uqeval::cmd_evaluate(records, config, options);
            write_output(args.out_path, report.dump(2) + "\n");
        } else if (*agree_cmd) {
            const auto records = uqeval::parse_records_file(args.records_path);
            const auto annotations = uqeval::parse_annotations_file(annotations_path);
            const auto config = make_run_config(args);
            const auto report = uqeval::cmd_agree(records, annotations, config);
            write_output(args.out_path, report.dump(2) + "\n");
        } else if (*sweep_cmd) {
            const auto records = uqeval::parse_records_file(args.records_path);
            const auto annotations = uqeval::parse_annotations_file(sweep_annotations);
            if (sweep_grid.empty()) {
                for (int i = 1; i <= 10; ++i) sweep_grid.push_back(i / 10.0);
            }
            write_output(args.out_path,
                         uqeval::cmd_sweep(records, annotations, sweep_metric, sweep_grid));
        } else if (*correlate_cmd) {
            const auto records = uqeval::parse_records_file(args.records_path);
            const auto config = make_run_config(args);
            const auto report = uqeval::cmd_correlate(records, config, args.seed);
            write_output(args.out_path, report.dump(2) + "\n");
        } else if (*simulate_cmd) {
            std::ostringstream csv;
            csv << "seed,rho,true_auroc,estimated_auroc,tpr,tnr,n\n";
            for (std::size_t trial = 0; trial < sim_trials; ++trial) {
                uqeval::SimulationConfig config;
                config.n_items = sim_n;
                config.prevalence = sim_prevalence;
                config.scores = uqeval::ScoreModel::from_true_auroc(sim_true_auroc);
                config.target_tpr = sim_tpr;
                config.target_tnr = sim_tnr;
                config.rho = sim_rho;
                config.seed = args.seed + trial;
                const auto draw = uqeval::simulate_correlated(config);
                std::vector<uqeval::ScoredLabel> vs_estimated(draw.g.size()), vs_true(draw.g.size());
                for (std::size_t i = 0; i < draw.g.size(); ++i) {
                    vs_estimated[i] = {draw.g[i], draw.h_hat[i]};
                    vs_true[i] = {draw.g[i], draw.h[i]};
                }
                const double estimated = uqeval::auroc(vs_estimated).value;
                const double true_auroc = uqeval::auroc(vs_true).value;
                const auto rates = uqeval::confusion_rates(draw.h, draw.h_hat);
                csv << config.seed << ',' << json(sim_rho).dump() << ','
                    << json(true_auroc).dump() << ',' << json(estimated).dump() << ','
                    << json(rates.tpr).dump() << ',' << json(rates.tnr).dump() << ','
                    << sim_n << '\n';
            }
            write_output(args.out_path, csv.str());
        } else if (*verify_cmd) {
            const auto grid = uqeval::default_verification_grid();
            const auto results =
                uqeval::verify_closed_form(grid, verify_n, verify_tolerance, args.seed);
            ordered_json report;
            report["tool"] = uqeval::kToolName;
            report["version"] = uqeval::kToolVersion;
            report["n"] = verify_n;
            report["tolerance"] = verify_tolerance;
            bool all_pass = true;
            ordered_json rows = ordered_json::array();
            for (const auto& res : results) {
                all_pass = all_pass && res.pass;
                rows.push_back(ordered_json{{"true_auroc", res.point.true_auroc},
                                            {"tpr", res.point.tpr},
                                            {"tnr", res.point.tnr},
                                            {"predicted", res.predicted},
                                            {"monte_carlo", res.monte_carlo},
                                            {"abs_error", res.abs_error},
                                            {"pass", res.pass}});
            }
            report["grid"] = std::move(rows);
            report["all_pass"] = all_pass;

            if (!skip_ranking) {
                uqeval::ConfoundedConfig scenario =
                    scenario_path.empty() ? uqeval::ConfoundedConfig{}
                                          : uqeval::ConfoundedConfig::from_json_file(scenario_path);
                std::size_t inverted = 0, preserved_at_zero = 0;
                for (std::size_t trial = 0; trial < ranking_trials; ++trial) {
                    const auto confounded =
                        uqeval::run_confounded_trial(scenario, args.seed + trial);
                    if (confounded.estimated_b > confounded.estimated_a) ++inverted;
                    uqeval::ConfoundedConfig base = scenario;
                    base.strength = 0.0;
                    const auto clean = uqeval::run_confounded_trial(base, args.seed + trial);
                    if (clean.estimated_a > clean.estimated_b) ++preserved_at_zero;
                }
                report["ranking_experiment"] =
                    ordered_json{{"scenario", nlohmann::ordered_json::parse(scenario.to_json())},
                                 {"trials", ranking_trials},
                                 {"inverted_at_strength", inverted},
                                 {"preserved_at_strength_zero", preserved_at_zero}};
            }
            write_output(args.out_path, report.dump(2) + "\n");
        }
    } catch (const uqeval::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
