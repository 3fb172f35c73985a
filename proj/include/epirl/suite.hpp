#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "epirl/bench.hpp"
#include "epirl/checkpoint.hpp"
#include "epirl/env.hpp"
#include "epirl/io.hpp"
#include "epirl/train.hpp"

namespace epirl {

/// Full experiment grid: 3 env variants x 2 transmission regimes, trained,
/// evaluated, and swept, plus one ODE-vs-ABM dynamics comparison.
struct SuiteConfig {
    EpidemicParams params{0.2, 0.1, 500, 5}; // canonical moderate-transmission scenario
    std::vector<double> betas{0.2, 0.8};
    std::vector<EnvVariant> variants{EnvVariant::Ode, EnvVariant::RandomizedOde,
                                     EnvVariant::Abm};
    std::int64_t horizon = 100;
    double infection_penalty = 5.0;
    std::int64_t timesteps = 200000;
    std::int64_t eval_episodes = 200;
    std::int64_t sweep_samples = 16;
    std::int64_t sweep_episodes_per_sample = 12;
    double sweep_beta_lo = 0.2;
    double sweep_beta_hi = 0.8;
    std::int64_t compare_days = 500;
    std::int64_t compare_runs = 100;

    void validate() const {
        params.validate();
        if (betas.empty()) throw InvalidConfig("suite: betas must be non-empty");
        for (double b : betas)
            if (!(b >= 0.0)) throw InvalidConfig("suite: betas must be >= 0");
        if (variants.empty()) throw InvalidConfig("suite: variants must be non-empty");
        if (horizon < 1) throw InvalidConfig("suite: horizon must be >= 1");
        if (timesteps < 1) throw InvalidConfig("suite: timesteps must be >= 1");
        if (eval_episodes < 1) throw InvalidConfig("suite: eval_episodes must be >= 1");
        if (sweep_samples < 1) throw InvalidConfig("suite: sweep_samples must be >= 1");
        if (sweep_episodes_per_sample < 1)
            throw InvalidConfig("suite: sweep_episodes_per_sample must be >= 1");
        if (!(sweep_beta_lo >= 0.0 && sweep_beta_lo <= sweep_beta_hi))
            throw InvalidConfig("suite: need 0 <= sweep_beta_lo <= sweep_beta_hi");
        if (compare_days < 1) throw InvalidConfig("suite: compare_days must be >= 1");
        if (compare_runs < 1) throw InvalidConfig("suite: compare_runs must be >= 1");
    }
};

inline void to_json(nlohmann::json& j, const SuiteConfig& c) {
    nlohmann::json variants = nlohmann::json::array();
    for (auto v : c.variants) variants.push_back(to_string(v));
    j = nlohmann::json{{"params", c.params},
                       {"betas", c.betas},
                       {"variants", variants},
                       {"horizon", c.horizon},
                       {"infection_penalty", c.infection_penalty},
                       {"timesteps", c.timesteps},
                       {"eval_episodes", c.eval_episodes},
                       {"sweep_samples", c.sweep_samples},
                       {"sweep_episodes_per_sample", c.sweep_episodes_per_sample},
                       {"sweep_beta_lo", c.sweep_beta_lo},
                       {"sweep_beta_hi", c.sweep_beta_hi},
                       {"compare_days", c.compare_days},
                       {"compare_runs", c.compare_runs}};
}

inline void from_json(const nlohmann::json& j, SuiteConfig& c) {
    if (j.contains("params")) j.at("params").get_to(c.params);
    if (j.contains("betas")) j.at("betas").get_to(c.betas);
    if (j.contains("variants")) {
        c.variants.clear();
        for (const auto& v : j.at("variants"))
            c.variants.push_back(variant_from_string(v.get<std::string>()));
    }
    if (j.contains("horizon")) j.at("horizon").get_to(c.horizon);
    if (j.contains("infection_penalty")) j.at("infection_penalty").get_to(c.infection_penalty);
    if (j.contains("timesteps")) j.at("timesteps").get_to(c.timesteps);
    if (j.contains("eval_episodes")) j.at("eval_episodes").get_to(c.eval_episodes);
    if (j.contains("sweep_samples")) j.at("sweep_samples").get_to(c.sweep_samples);
    if (j.contains("sweep_episodes_per_sample"))
        j.at("sweep_episodes_per_sample").get_to(c.sweep_episodes_per_sample);
    if (j.contains("sweep_beta_lo")) j.at("sweep_beta_lo").get_to(c.sweep_beta_lo);
    if (j.contains("sweep_beta_hi")) j.at("sweep_beta_hi").get_to(c.sweep_beta_hi);
    if (j.contains("compare_days")) j.at("compare_days").get_to(c.compare_days);
    if (j.contains("compare_runs")) j.at("compare_runs").get_to(c.compare_runs);
}

inline const char* variant_slug(EnvVariant v) {
    switch (v) {
        case EnvVariant::Ode: return "ode";
        case EnvVariant::RandomizedOde: return "randomized_ode";
        case EnvVariant::Abm: return "abm";
    }
    return "?";
}

struct SuiteCell {
    std::string name;
    nlohmann::json config;
    std::uint64_t seed = 0;
    std::vector<std::string> artifacts; // paths relative to the suite directory
    std::string status;                 // "ok" or "error: <cause>"
};

struct SuiteResult {
    std::filesystem::path out_dir;
    std::uint64_t master_seed = 0;
    std::vector<SuiteCell> cells;
    std::map<std::string, double> eval_means;  // agent cell -> mean return
    std::map<std::string, double> sweep_drops; // agent cell -> relative drop
    nlohmann::json manifest;
};

using SuiteLogger = std::function<void(const std::string&)>;

namespace detail {

inline std::string beta_tag(double beta) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", beta);
    return buf;
}

} // namespace detail

/// Runs the whole grid; a failing cell is recorded in its manifest entry and
/// the suite moves on. Every artifact path in the manifest is relative to
/// `out_dir`, so the directory relocates cleanly.
inline SuiteResult run_suite(const SuiteConfig& config, const std::filesystem::path& out_dir,
                             std::uint64_t master_seed, const SuiteLogger& log = {}) {
    config.validate();
    std::filesystem::create_directories(out_dir);

    SuiteResult result;
    result.out_dir = out_dir;
    result.master_seed = master_seed;

    auto say = [&log](const std::string& line) {
        if (log) log(line);
    };
    auto write_rel = [&out_dir](const std::string& rel, const std::string& content) {
        atomic_write_file(out_dir / rel, content);
    };

    // --- Dynamics comparison cell ---
    {
        SuiteCell cell;
        cell.name = "dynamics";
        cell.seed = derive_seed(master_seed, fnv1a64("suite/dynamics"));
        EpidemicParams params = config.params;
        cell.config = nlohmann::json{{"params", params},
                                     {"days", config.compare_days},
                                     {"runs", config.compare_runs}};
        say("[suite] dynamics: ODE vs ABM, " + std::to_string(config.compare_runs) + " runs, " +
            std::to_string(config.compare_days) + " days");
        try {
            const DynamicsComparison cmp =
                compare_dynamics(params, config.compare_days, config.compare_runs, cell.seed);
            write_rel("dynamics/compare.csv", emit_trajectory_csv(dynamics_to_csv(cmp)));
            cell.artifacts.push_back("dynamics/compare.csv");
            write_rel("dynamics/compare.svg", dynamics_to_svg(cmp));
            cell.artifacts.push_back("dynamics/compare.svg");
            cell.status = "ok";
        } catch (const std::exception& e) {
            cell.status = std::string("error: ") + e.what();
        }
        result.cells.push_back(std::move(cell));
    }

    // --- Agent cells: train + eval + sweep per (variant, beta) ---
    struct AgentOutcome {
        std::string name;
        EnvVariant variant{};
        double beta = 0.0;
        EvalReport eval;
        SweepReport sweep;
        bool ok = false;
    };
    std::vector<AgentOutcome> outcomes;

    for (EnvVariant variant : config.variants) {
        for (double beta : config.betas) {
            SuiteCell cell;
            cell.name = std::string(variant_slug(variant)) + "_beta" + detail::beta_tag(beta);
            cell.seed = derive_seed(master_seed, fnv1a64(cell.name.c_str()));

            EnvConfig env_config;
            env_config.variant = variant;
            env_config.params = config.params;
            env_config.params.beta = beta;
            env_config.horizon = config.horizon;
            env_config.infection_penalty = config.infection_penalty;

            PpoConfig ppo_config;
            ppo_config.total_timesteps = config.timesteps;

            cell.config = nlohmann::json{{"env_config", env_config},
                                         {"ppo_config", ppo_config},
                                         {"eval_episodes", config.eval_episodes},
                                         {"sweep_samples", config.sweep_samples},
                                         {"sweep_episodes_per_sample",
                                          config.sweep_episodes_per_sample},
                                         {"sweep_beta_lo", config.sweep_beta_lo},
                                         {"sweep_beta_hi", config.sweep_beta_hi}};

            AgentOutcome outcome;
            outcome.name = cell.name;
            outcome.variant = variant;
            outcome.beta = beta;
            try {
                say("[suite] " + cell.name + ": training " +
                    std::to_string(config.timesteps) + " timesteps");
                const PolicyCheckpoint cp =
                    train(env_config, ppo_config, derive_seed(cell.seed, fnv1a64("train")));
                const std::string policy_rel = "train/" + cell.name + "/policy.json";
                write_rel(policy_rel, checkpoint_to_string(cp));
                cell.artifacts.push_back(policy_rel);

                say("[suite] " + cell.name + ": evaluating " +
                    std::to_string(config.eval_episodes) + " episodes");
                outcome.eval = evaluate(cp, env_config, config.eval_episodes,
                                        derive_seed(cell.seed, fnv1a64("eval")));
                const std::string eval_rel = "eval/" + cell.name + ".csv";
                write_rel(eval_rel, emit_eval_csv(eval_report_to_csv(outcome.eval)));
                cell.artifacts.push_back(eval_rel);
                result.eval_means[cell.name] = outcome.eval.mean_return();

                say("[suite] " + cell.name + ": sweeping beta in [" +
                    detail::beta_tag(config.sweep_beta_lo) + ", " +
                    detail::beta_tag(config.sweep_beta_hi) + "]");
                outcome.sweep = generalization_sweep(
                    cp, config.sweep_beta_lo, config.sweep_beta_hi, config.sweep_samples,
                    config.sweep_episodes_per_sample, derive_seed(cell.seed, fnv1a64("sweep")));
                const std::string sweep_rel = "sweep/" + cell.name + ".csv";
                write_rel(sweep_rel, emit_sweep_csv(sweep_report_to_csv(outcome.sweep)));
                cell.artifacts.push_back(sweep_rel);
                result.sweep_drops[cell.name] = outcome.sweep.drop();

                outcome.ok = true;
                cell.status = "ok";
            } catch (const std::exception& e) {
                cell.status = std::string("error: ") + e.what();
                say("[suite] " + cell.name + ": FAILED: " + e.what());
            }
            outcomes.push_back(std::move(outcome));
            result.cells.push_back(std::move(cell));
        }
    }

    // --- Summary cell: reward table, action bars, sweep overlay ---
    {
        SuiteCell cell;
        cell.name = "summary";
        cell.seed = master_seed;
        cell.config = nlohmann::json::object();
        try {
            std::string rewards;
            rewards += "cell,variant,beta,mean_return,std_return,pct_lockdown,pct_distancing,"
                       "pct_open,sweep_drop\n";
            for (const auto& o : outcomes) {
                if (!o.ok) continue;
                const auto pct = o.eval.action_percent();
                rewards += o.name;
                rewards += ',';
                rewards += to_string(o.variant);
                rewards += ',';
                rewards += detail::csv_double(o.beta);
                rewards += ',';
                rewards += detail::csv_double(o.eval.mean_return());
                rewards += ',';
                rewards += detail::csv_double(o.eval.std_return());
                rewards += ',';
                rewards += detail::csv_double(pct[0]);
                rewards += ',';
                rewards += detail::csv_double(pct[1]);
                rewards += ',';
                rewards += detail::csv_double(pct[2]);
                rewards += ',';
                rewards += detail::csv_double(o.sweep.drop());
                rewards += '\n';
            }
            write_rel("summary/rewards.csv", rewards);
            cell.artifacts.push_back("summary/rewards.csv");

            // Action-distribution bars, one chart per beta regime.
            for (double beta : config.betas) {
                std::vector<SvgBarGroup> groups;
                for (const auto& o : outcomes) {
                    if (!o.ok || o.beta != beta) continue;
                    const auto pct = o.eval.action_percent();
                    groups.push_back({to_string(o.variant), {pct[0], pct[1], pct[2]}});
                }
                if (groups.empty()) continue;
                const std::string rel = "summary/actions_beta" + detail::beta_tag(beta) + ".svg";
                write_rel(rel, svg_bar_chart("Action distribution, beta=" +
                                                 detail::beta_tag(beta),
                                             "% of steps", {"Lockdown", "Distancing", "Open"},
                                             groups));
                cell.artifacts.push_back(rel);
            }

            // Mean-return bars per regime and variant.
            {
                std::vector<std::string> names;
                for (double beta : config.betas) names.push_back("beta=" + detail::beta_tag(beta));
                std::vector<SvgBarGroup> groups;
                for (EnvVariant variant : config.variants) {
                    SvgBarGroup g{to_string(variant), {}};
                    for (double beta : config.betas) {
                        double v = 0.0;
                        for (const auto& o : outcomes)
                            if (o.ok && o.variant == variant && o.beta == beta)
                                v = o.eval.mean_return();
                        g.values.push_back(v);
                    }
                    groups.push_back(std::move(g));
                }
                write_rel("summary/rewards.svg",
                          svg_bar_chart("Mean evaluation return", "mean return", names, groups));
                cell.artifacts.push_back("summary/rewards.svg");
            }

            // Sweep overlay.
            {
                std::vector<SweepReport> reports;
                std::vector<std::string> names;
                for (const auto& o : outcomes) {
                    if (!o.ok) continue;
                    reports.push_back(o.sweep);
                    names.push_back(o.name);
                }
                if (!reports.empty()) {
                    write_rel("summary/sweep.svg",
                              sweep_to_svg("Generalization across beta", reports, names));
                    cell.artifacts.push_back("summary/sweep.svg");
                }
            }
            cell.status = "ok";
        } catch (const std::exception& e) {
            cell.status = std::string("error: ") + e.what();
        }
        result.cells.push_back(std::move(cell));
    }

    // --- Manifest ---
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : result.cells)
        cells.push_back(nlohmann::json{{"name", cell.name},
                                       {"config", cell.config},
                                       {"seed", cell.seed},
                                       {"artifacts", cell.artifacts},
                                       {"status", cell.status}});
    result.manifest = nlohmann::json{{"version", 1}, {"master_seed", master_seed},
                                     {"cells", cells}};
    atomic_write_file(out_dir / "manifest.json", result.manifest.dump(2) + "\n");
    say("[suite] wrote " + (out_dir / "manifest.json").string());
    return result;
}

} // namespace epirl
