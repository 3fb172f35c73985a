#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "epirl/bench.hpp"
#include "epirl/checkpoint.hpp"
#include "epirl/env.hpp"
#include "epirl/io.hpp"
#include "epirl/suite.hpp"
#include "epirl/train.hpp"

namespace epirl {

/// Storage for every CLI flag; bound into the CLI11 app by build_cli.
struct CliOptions {
    // global
    std::uint64_t seed = 42;
    std::string config_path;
    bool quiet = false;
    // dynamics (simulate / compare)
    std::string model = "abm";
    double beta = 0.2;
    double gamma = 0.1;
    std::int64_t n = 500;
    std::int64_t i0 = 5;
    std::int64_t days = 500;
    std::int64_t runs = 100;
    // rl (train / eval / sweep)
    std::string env_name = "ode";
    std::int64_t horizon = 100;
    double kappa = 5.0;
    std::int64_t timesteps = 200000;
    std::string policy_path;
    std::int64_t episodes = 200;
    bool greedy = false;
    double beta_lo = 0.2;
    double beta_hi = 0.8;
    std::int64_t samples = 16;
    // suite
    std::int64_t sweep_episodes = 12;
    std::int64_t compare_days = 500;
    std::int64_t compare_runs = 100;
    // io
    std::string out;
    std::string svg_out;
    std::string in_path;
    std::string kind = "auto";
};

namespace cli_detail {

inline void log_line(const CliOptions& opt, const std::string& line) {
    if (!opt.quiet) std::cout << line << "\n";
}

inline nlohmann::json load_config_file(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const std::exception& e) {
        throw InvalidConfig("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw InvalidConfig("config file " + path + " must hold a JSON object");
    return j;
}

/// Applies the fields present in `j` onto `cfg` (partial configs allowed).
inline void apply_env_config(const nlohmann::json& j, EnvConfig& cfg) {
    if (j.contains("variant")) cfg.variant = variant_from_string(j.at("variant").get<std::string>());
    if (j.contains("params")) {
        const auto& p = j.at("params");
        if (p.contains("beta")) p.at("beta").get_to(cfg.params.beta);
        if (p.contains("gamma")) p.at("gamma").get_to(cfg.params.gamma);
        if (p.contains("population")) p.at("population").get_to(cfg.params.population);
        if (p.contains("initial_infected"))
            p.at("initial_infected").get_to(cfg.params.initial_infected);
    }
    if (j.contains("horizon")) j.at("horizon").get_to(cfg.horizon);
    if (j.contains("action_multipliers"))
        for (Action a : kAllActions)
            if (j.at("action_multipliers").contains(to_string(a)))
                j.at("action_multipliers")
                    .at(to_string(a))
                    .get_to(cfg.action_multipliers[static_cast<std::size_t>(a)]);
    if (j.contains("openness"))
        for (Action a : kAllActions)
            if (j.at("openness").contains(to_string(a)))
                j.at("openness").at(to_string(a)).get_to(
                    cfg.openness[static_cast<std::size_t>(a)]);
    if (j.contains("infection_penalty")) j.at("infection_penalty").get_to(cfg.infection_penalty);
    if (j.contains("noise_lo")) j.at("noise_lo").get_to(cfg.noise_lo);
    if (j.contains("noise_hi")) j.at("noise_hi").get_to(cfg.noise_hi);
    if (j.contains("beta_sample_range") && !j.at("beta_sample_range").is_null()) {
        const auto& arr = j.at("beta_sample_range");
        cfg.beta_sample_range = std::make_pair(arr.at(0).get<double>(), arr.at(1).get<double>());
    }
}

inline void apply_ppo_config(const nlohmann::json& j, PpoConfig& cfg) {
    if (j.contains("learning_rate")) j.at("learning_rate").get_to(cfg.learning_rate);
    if (j.contains("rollout_steps")) j.at("rollout_steps").get_to(cfg.rollout_steps);
    if (j.contains("minibatch")) j.at("minibatch").get_to(cfg.minibatch);
    if (j.contains("epochs_per_update")) j.at("epochs_per_update").get_to(cfg.epochs_per_update);
    if (j.contains("discount")) j.at("discount").get_to(cfg.discount);
    if (j.contains("gae_lambda")) j.at("gae_lambda").get_to(cfg.gae_lambda);
    if (j.contains("clip_range")) j.at("clip_range").get_to(cfg.clip_range);
    if (j.contains("value_coef")) j.at("value_coef").get_to(cfg.value_coef);
    if (j.contains("entropy_coef")) j.at("entropy_coef").get_to(cfg.entropy_coef);
    if (j.contains("max_grad_norm")) j.at("max_grad_norm").get_to(cfg.max_grad_norm);
    if (j.contains("total_timesteps")) j.at("total_timesteps").get_to(cfg.total_timesteps);
}

inline EnvVariant variant_from_cli(const std::string& name) {
    if (name == "ode") return EnvVariant::Ode;
    if (name == "randomized_ode") return EnvVariant::RandomizedOde;
    if (name == "abm") return EnvVariant::Abm;
    throw InvalidConfig("--env must be one of ode, randomized_ode, abm (got '" + name + "')");
}

inline std::string svg_path_for(const std::string& csv_path) {
    std::filesystem::path p(csv_path);
    p.replace_extension(".svg");
    return p.string();
}

} // namespace cli_detail

/// Builds the CLI11 command tree over `opt`. Kept separate from dispatch so
/// tests can introspect the flag table (e.g. the help-coverage check).
inline std::unique_ptr<CLI::App> build_cli(CliOptions& opt) {
    auto app = std::make_unique<CLI::App>(
        "epidemic RL artifact: SIR dynamics, PPO training, and experiment suite");
    app->name("epirl");
    app->require_subcommand(1);
    app->fallthrough();
    app->add_option("--seed", opt.seed, "master random seed")->capture_default_str();
    app->add_option("--config", opt.config_path,
                    "JSON config file; flags override its values");
    app->add_flag("--quiet", opt.quiet, "suppress progress logging");

    auto* simulate = app->add_subcommand("simulate", "run one dynamics model, write a CSV");
    simulate->fallthrough();
    simulate->add_option("--model", opt.model, "ode or abm")->capture_default_str();
    simulate->add_option("--beta", opt.beta, "contact rate per day")->capture_default_str();
    simulate->add_option("--gamma", opt.gamma, "recovery rate per day")->capture_default_str();
    simulate->add_option("--n", opt.n, "population size")->capture_default_str();
    simulate->add_option("--i0", opt.i0, "initially infected")->capture_default_str();
    simulate->add_option("--days", opt.days, "days to simulate")->capture_default_str();
    simulate->add_option("--runs", opt.runs, "ABM realizations")->capture_default_str();
    simulate->add_option("--out", opt.out, "output trajectory CSV path")->required();

    auto* compare = app->add_subcommand("compare", "ODE vs ABM ensemble comparison (CSV + SVG)");
    compare->fallthrough();
    compare->add_option("--beta", opt.beta, "contact rate per day")->capture_default_str();
    compare->add_option("--gamma", opt.gamma, "recovery rate per day")->capture_default_str();
    compare->add_option("--n", opt.n, "population size")->capture_default_str();
    compare->add_option("--i0", opt.i0, "initially infected")->capture_default_str();
    compare->add_option("--days", opt.days, "days to simulate")->capture_default_str();
    compare->add_option("--runs", opt.runs, "ABM realizations")->capture_default_str();
    compare->add_option("--out", opt.out, "output trajectory CSV path")->required();
    compare->add_option("--svg", opt.svg_out, "output SVG path (default: CSV path with .svg)");

    auto* train_cmd = app->add_subcommand("train", "train a PPO policy, write a checkpoint");
    train_cmd->fallthrough();
    train_cmd->add_option("--env", opt.env_name, "ode, randomized_ode, or abm")
        ->capture_default_str();
    train_cmd->add_option("--beta", opt.beta, "contact rate per day")->capture_default_str();
    train_cmd->add_option("--gamma", opt.gamma, "recovery rate per day")->capture_default_str();
    train_cmd->add_option("--n", opt.n, "population size")->capture_default_str();
    train_cmd->add_option("--i0", opt.i0, "initially infected")->capture_default_str();
    train_cmd->add_option("--horizon", opt.horizon, "episode length in days")
        ->capture_default_str();
    train_cmd->add_option("--kappa", opt.kappa, "infection penalty weight")
        ->capture_default_str();
    train_cmd->add_option("--timesteps", opt.timesteps, "total environment steps")
        ->capture_default_str();
    train_cmd->add_option("--out", opt.out, "output checkpoint path")->required();

    auto* eval_cmd = app->add_subcommand("eval", "evaluate a checkpoint, write an eval CSV");
    eval_cmd->fallthrough();
    eval_cmd->add_option("--policy", opt.policy_path, "checkpoint JSON path")->required();
    eval_cmd->add_option("--env", opt.env_name,
                         "override env variant (default: checkpoint's)");
    eval_cmd->add_option("--beta", opt.beta, "override contact rate");
    eval_cmd->add_option("--episodes", opt.episodes, "evaluation episodes")
        ->capture_default_str();
    eval_cmd->add_flag("--greedy", opt.greedy, "argmax actions instead of sampling");
    eval_cmd->add_option("--out", opt.out, "output eval CSV path")->required();

    auto* sweep_cmd = app->add_subcommand("sweep", "beta-generalization sweep of a checkpoint");
    sweep_cmd->fallthrough();
    sweep_cmd->add_option("--policy", opt.policy_path, "checkpoint JSON path")->required();
    sweep_cmd->add_option("--beta-lo", opt.beta_lo, "sweep lower bound")->capture_default_str();
    sweep_cmd->add_option("--beta-hi", opt.beta_hi, "sweep upper bound")->capture_default_str();
    sweep_cmd->add_option("--samples", opt.samples, "number of beta draws")
        ->capture_default_str();
    sweep_cmd->add_option("--episodes", opt.episodes, "episodes per beta draw")
        ->capture_default_str();
    sweep_cmd->add_option("--out", opt.out, "output sweep CSV path")->required();

    auto* suite_cmd = app->add_subcommand("suite", "full experiment grid with manifest");
    suite_cmd->fallthrough();
    suite_cmd->add_option("--out", opt.out, "output directory")->required();
    suite_cmd->add_option("--timesteps", opt.timesteps, "training steps per agent")
        ->capture_default_str();
    suite_cmd->add_option("--episodes", opt.episodes, "evaluation episodes per agent")
        ->capture_default_str();
    suite_cmd->add_option("--sweep-samples", opt.samples, "beta draws per sweep")
        ->capture_default_str();
    suite_cmd->add_option("--sweep-episodes", opt.sweep_episodes, "episodes per beta draw")
        ->capture_default_str();
    suite_cmd->add_option("--compare-days", opt.compare_days, "dynamics comparison days")
        ->capture_default_str();
    suite_cmd->add_option("--compare-runs", opt.compare_runs, "dynamics comparison runs")
        ->capture_default_str();

    auto* plot = app->add_subcommand("plot", "render an SVG from a report CSV");
    plot->fallthrough();
    plot->add_option("--in", opt.in_path, "input CSV (trajectory, eval, or sweep)")->required();
    plot->add_option("--kind", opt.kind, "trajectory, eval, sweep, or auto")
        ->capture_default_str();
    plot->add_option("--out", opt.out, "output SVG path")->required();

    return app;
}

namespace cli_detail {

inline int cmd_simulate(const CliOptions& opt, const CLI::App&) {
    EpidemicParams params{opt.beta, opt.gamma, opt.n, opt.i0};
    params.validate();
    if (opt.days < 1) throw InvalidConfig("--days must be >= 1");

    nlohmann::json pjson = params;
    TrajectoryCsv csv;
    csv.provenance = {"model: " + opt.model, "params: " + pjson.dump(),
                      "days: " + std::to_string(opt.days), "seed: " + std::to_string(opt.seed)};
    if (opt.model == "ode") {
        OdeState st = ode_init(params);
        csv.rows.push_back({-1, 0, st.s, st.i, st.r});
        for (std::int64_t day = 0; day < opt.days; ++day) {
            st = ode_step(st, params, 1.0);
            csv.rows.push_back({-1, day + 1, st.s, st.i, st.r});
        }
    } else if (opt.model == "abm") {
        csv.provenance.insert(csv.provenance.begin() + 3,
                              "runs: " + std::to_string(opt.runs));
        const EnsembleResult ens = run_ensemble(params, opt.days, opt.runs, opt.seed);
        for (std::int64_t run = 0; run < opt.runs; ++run) {
            const auto& traj = ens.trajectories[static_cast<std::size_t>(run)];
            for (std::size_t t = 0; t < traj.size(); ++t)
                csv.rows.push_back({run, static_cast<std::int64_t>(t),
                                    static_cast<double>(traj[t][0]),
                                    static_cast<double>(traj[t][1]),
                                    static_cast<double>(traj[t][2])});
        }
    } else {
        throw InvalidConfig("--model must be ode or abm (got '" + opt.model + "')");
    }
    atomic_write_file(opt.out, emit_trajectory_csv(csv));
    log_line(opt, "wrote " + opt.out + " (" + std::to_string(csv.rows.size()) + " rows)");
    return 0;
}

inline int cmd_compare(const CliOptions& opt, const CLI::App&) {
    EpidemicParams params{opt.beta, opt.gamma, opt.n, opt.i0};
    const DynamicsComparison cmp = compare_dynamics(params, opt.days, opt.runs, opt.seed);
    atomic_write_file(opt.out, emit_trajectory_csv(dynamics_to_csv(cmp)));
    const std::string svg = opt.svg_out.empty() ? svg_path_for(opt.out) : opt.svg_out;
    atomic_write_file(svg, dynamics_to_svg(cmp));
    char line[256];
    std::snprintf(line, sizeof line,
                  "final fractions: ode=%.4f abm_mean=%.4f analytic=%.4f",
                  cmp.ode_final_fraction(), cmp.abm_final_fraction(), cmp.final_size_fraction);
    log_line(opt, "wrote " + opt.out + " and " + svg);
    log_line(opt, line);
    return 0;
}

inline int cmd_train(const CliOptions& opt, const CLI::App& sub, const nlohmann::json& file_cfg) {
    EnvConfig env_config;
    if (file_cfg.contains("env_config")) apply_env_config(file_cfg.at("env_config"), env_config);
    if (sub.count("--env")) env_config.variant = variant_from_cli(opt.env_name);
    else if (!file_cfg.contains("env_config")) env_config.variant = variant_from_cli(opt.env_name);
    if (sub.count("--beta")) env_config.params.beta = opt.beta;
    if (sub.count("--gamma")) env_config.params.gamma = opt.gamma;
    if (sub.count("--n")) env_config.params.population = opt.n;
    if (sub.count("--i0")) env_config.params.initial_infected = opt.i0;
    if (sub.count("--horizon")) env_config.horizon = opt.horizon;
    if (sub.count("--kappa")) env_config.infection_penalty = opt.kappa;

    PpoConfig ppo_config;
    if (file_cfg.contains("ppo_config")) apply_ppo_config(file_cfg.at("ppo_config"), ppo_config);
    if (sub.count("--timesteps")) ppo_config.total_timesteps = opt.timesteps;

    env_config.validate();
    ppo_config.validate();

    TrainCallback cb;
    if (!opt.quiet) {
        const std::int64_t total = ppo_config.total_timesteps;
        cb = [total](const TrainProgress& p) {
            char line[192];
            std::snprintf(line, sizeof line,
                          "update %lld: timesteps %lld/%lld, mean episode return %.4f, "
                          "policy loss %.4f, value loss %.4f",
                          static_cast<long long>(p.updates),
                          static_cast<long long>(p.timesteps), static_cast<long long>(total),
                          p.mean_episode_return, p.stats.policy_loss, p.stats.value_loss);
            std::cout << line << "\n";
        };
    }
    const PolicyCheckpoint cp = train(env_config, ppo_config, opt.seed, cb);
    atomic_write_file(opt.out, checkpoint_to_string(cp));
    log_line(opt, "wrote " + opt.out + " (" + std::to_string(cp.timesteps_trained) +
                      " timesteps trained)");
    return 0;
}

inline int cmd_eval(const CliOptions& opt, const CLI::App& sub, const nlohmann::json& file_cfg) {
    const PolicyCheckpoint cp = checkpoint_from_string(read_file(opt.policy_path));
    EnvConfig env_config = cp.env_config;
    if (file_cfg.contains("env_config")) apply_env_config(file_cfg.at("env_config"), env_config);
    if (sub.count("--env")) env_config.variant = variant_from_cli(opt.env_name);
    if (sub.count("--beta")) env_config.params.beta = opt.beta;
    env_config.validate();

    const EvalReport report = evaluate(cp, env_config, opt.episodes, opt.seed, opt.greedy);
    atomic_write_file(opt.out, emit_eval_csv(eval_report_to_csv(report)));
    const auto pct = report.action_percent();
    char line[224];
    std::snprintf(line, sizeof line,
                  "mean return %.4f (std %.4f) over %lld episodes; actions: lockdown %.1f%%, "
                  "distancing %.1f%%, open %.1f%%",
                  report.mean_return(), report.std_return(),
                  static_cast<long long>(report.episodes.size()), pct[0], pct[1], pct[2]);
    log_line(opt, "wrote " + opt.out);
    log_line(opt, line);
    return 0;
}

inline int cmd_sweep(const CliOptions& opt, const CLI::App&) {
    const PolicyCheckpoint cp = checkpoint_from_string(read_file(opt.policy_path));
    const SweepReport report = generalization_sweep(cp, opt.beta_lo, opt.beta_hi, opt.samples,
                                                    opt.episodes, opt.seed);
    atomic_write_file(opt.out, emit_sweep_csv(sweep_report_to_csv(report)));
    char line[192];
    std::snprintf(line, sizeof line,
                  "sweep mean %.4f vs train-regime mean %.4f: relative drop %.2f%%",
                  report.sweep_mean(), report.baseline_mean, 100.0 * report.drop());
    log_line(opt, "wrote " + opt.out);
    log_line(opt, line);
    return 0;
}

inline int cmd_suite(const CliOptions& opt, const CLI::App& sub, const nlohmann::json& file_cfg) {
    SuiteConfig config;
    if (file_cfg.contains("suite")) file_cfg.at("suite").get_to(config);
    if (sub.count("--timesteps")) config.timesteps = opt.timesteps;
    if (sub.count("--episodes")) config.eval_episodes = opt.episodes;
    if (sub.count("--sweep-samples")) config.sweep_samples = opt.samples;
    if (sub.count("--sweep-episodes")) config.sweep_episodes_per_sample = opt.sweep_episodes;
    if (sub.count("--compare-days")) config.compare_days = opt.compare_days;
    if (sub.count("--compare-runs")) config.compare_runs = opt.compare_runs;
    config.validate();

    SuiteLogger logger;
    if (!opt.quiet) logger = [](const std::string& line) { std::cout << line << "\n"; };
    const SuiteResult result = run_suite(config, opt.out, opt.seed, logger);
    std::int64_t failed = 0;
    for (const auto& cell : result.cells)
        if (cell.status != "ok") ++failed;
    log_line(opt, "suite complete: " + std::to_string(result.cells.size()) + " cells, " +
                      std::to_string(failed) + " failed");
    return 0;
}

inline int cmd_plot(const CliOptions& opt, const CLI::App&) {
    const std::string text = read_file(opt.in_path);
    std::string kind = opt.kind;
    if (kind == "auto") {
        // Sniff the header: first non-comment line.
        kind = "";
        for (auto line : detail::split_lines(text)) {
            if (line.empty() || line.front() == '#') continue;
            if (line == "run_id,t,s,i,r") kind = "trajectory";
            else if (line == "episode,return,n_lockdown,n_distancing,n_open,beta") kind = "eval";
            else if (line == "sample,beta,mean_return") kind = "sweep";
            break;
        }
        if (kind.empty())
            throw InvalidConfig("cannot infer CSV kind from header; pass --kind");
    }

    std::string svg;
    if (kind == "trajectory") {
        const TrajectoryCsv csv = parse_trajectory_csv(text);
        // ODE rows (run_id = -1) become three named lines; ABM runs are
        // averaged per day into three more.
        std::vector<SvgSeries> series;
        std::map<std::int64_t, std::array<std::vector<double>, 3>> by_run_unused;
        std::vector<std::array<double, 4>> ode_rows; // t,s,i,r
        std::map<std::int64_t, std::array<double, 3>> abm_sum;
        std::map<std::int64_t, std::int64_t> abm_count;
        for (const auto& row : csv.rows) {
            if (row.run_id < 0) {
                ode_rows.push_back({static_cast<double>(row.t), row.s, row.i, row.r});
            } else {
                auto& acc = abm_sum[row.t];
                acc[0] += row.s;
                acc[1] += row.i;
                acc[2] += row.r;
                ++abm_count[row.t];
            }
        }
        const char* names[3] = {"S", "I", "R"};
        for (std::size_t c = 0; c < 3 && !ode_rows.empty(); ++c) {
            SvgSeries s{std::string("ODE ") + names[c], {}, 1.0, 2.0};
            for (const auto& row : ode_rows) s.points.emplace_back(row[0], row[c + 1]);
            series.push_back(std::move(s));
        }
        for (std::size_t c = 0; c < 3 && !abm_sum.empty(); ++c) {
            SvgSeries s{std::string("ABM mean ") + names[c], {}, 0.85, 2.0};
            for (const auto& [t, acc] : abm_sum)
                s.points.emplace_back(static_cast<double>(t),
                                      acc[c] / static_cast<double>(abm_count[t]));
            series.push_back(std::move(s));
        }
        svg = svg_line_chart("SIR trajectories", "day", "individuals", series);
    } else if (kind == "eval") {
        const EvalCsv csv = parse_eval_csv(text);
        SvgSeries s{"return", {}, 1.0, 1.5};
        for (const auto& row : csv.rows)
            s.points.emplace_back(static_cast<double>(row.episode), row.ret);
        svg = svg_line_chart("Per-episode return", "episode", "mean per-step reward", {s});
    } else if (kind == "sweep") {
        const SweepCsv csv = parse_sweep_csv(text);
        std::vector<SweepRow> rows = csv.rows;
        std::sort(rows.begin(), rows.end(),
                  [](const SweepRow& a, const SweepRow& b) { return a.beta < b.beta; });
        SvgSeries s{"mean return", {}, 1.0, 2.0};
        for (const auto& row : rows) s.points.emplace_back(row.beta, row.mean_return);
        svg = svg_line_chart("Return vs beta", "beta", "mean return", {s});
    } else {
        throw InvalidConfig("--kind must be trajectory, eval, sweep, or auto (got '" + kind +
                            "')");
    }
    atomic_write_file(opt.out, svg);
    log_line(opt, "wrote " + opt.out);
    return 0;
}

} // namespace cli_detail

/// Parses argv and runs the selected subcommand.
/// Exit codes: 0 success, 2 usage/validation error, 1 runtime failure.
inline int run_cli(int argc, const char* const* argv) {
    CliOptions opt;
    auto app = build_cli(opt);
    try {
        app->parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app->exit(e); // prints help or the parse error
        return code == 0 ? 0 : 2;
    }

    try {
        const nlohmann::json file_cfg = cli_detail::load_config_file(opt.config_path);
        if (app->got_subcommand("simulate"))
            return cli_detail::cmd_simulate(opt, *app->get_subcommand("simulate"));
        if (app->got_subcommand("compare"))
            return cli_detail::cmd_compare(opt, *app->get_subcommand("compare"));
        if (app->got_subcommand("train"))
            return cli_detail::cmd_train(opt, *app->get_subcommand("train"), file_cfg);
        if (app->got_subcommand("eval"))
            return cli_detail::cmd_eval(opt, *app->get_subcommand("eval"), file_cfg);
        if (app->got_subcommand("sweep"))
            return cli_detail::cmd_sweep(opt, *app->get_subcommand("sweep"));
        if (app->got_subcommand("suite"))
            return cli_detail::cmd_suite(opt, *app->get_subcommand("suite"), file_cfg);
        if (app->got_subcommand("plot"))
            return cli_detail::cmd_plot(opt, *app->get_subcommand("plot"));
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const InvalidParams& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace epirl
