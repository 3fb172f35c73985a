#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "epirl/abm.hpp"
#include "epirl/checkpoint.hpp"
#include "epirl/env.hpp"
#include "epirl/io.hpp"
#include "epirl/mlp.hpp"
#include "epirl/ode.hpp"
#include "epirl/rng.hpp"
#include "epirl/svg.hpp"
#include "epirl/train.hpp"

namespace epirl {

/// Deterministic seed for sub-experiment k of an experiment seeded `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt, std::uint64_t k = 0) {
    return mix64(mix64(seed) ^ salt ^ (0x9e3779b97f4a7c15ull * (k + 1)));
}

// ---------------------------------------------------------------------------
// Policy evaluation (Tables 1-3 analogues)

struct EpisodeStats {
    double ret = 0.0; // mean per-step reward
    std::array<std::int64_t, 3> actions{}; // indexed by Action
    double beta = 0.0;
};

struct EvalReport {
    std::vector<EpisodeStats> episodes;
    EnvConfig env_config;
    std::string policy; // provenance label
    bool greedy = false;
    std::uint64_t seed = 0;

    double mean_return() const {
        double sum = 0.0;
        for (const auto& e : episodes) sum += e.ret;
        return episodes.empty() ? 0.0 : sum / static_cast<double>(episodes.size());
    }

    double std_return() const {
        if (episodes.empty()) return 0.0;
        const double mean = mean_return();
        double var = 0.0;
        for (const auto& e : episodes) var += (e.ret - mean) * (e.ret - mean);
        return std::sqrt(var / static_cast<double>(episodes.size()));
    }

    std::array<std::int64_t, 3> total_actions() const {
        std::array<std::int64_t, 3> total{};
        for (const auto& e : episodes)
            for (std::size_t a = 0; a < 3; ++a) total[a] += e.actions[a];
        return total;
    }

    std::array<double, 3> action_percent() const {
        const auto total = total_actions();
        const double n = static_cast<double>(total[0] + total[1] + total[2]);
        if (n == 0.0) return {0.0, 0.0, 0.0};
        return {100.0 * static_cast<double>(total[0]) / n,
                100.0 * static_cast<double>(total[1]) / n,
                100.0 * static_cast<double>(total[2]) / n};
    }
};

using PolicyFn = std::function<std::int64_t(const Observation&, RngStream&)>;

inline EvalReport evaluate_policy(const PolicyFn& policy, const EnvConfig& env_config,
                                  std::int64_t episodes, std::uint64_t seed,
                                  std::string label) {
    if (episodes < 1) throw InvalidConfig("evaluate: episodes must be >= 1");
    RngStream action_rng(seed, stream_id::kEvalAction);
    SirEnv env(env_config, RngStream(seed, stream_id::kEvalEnv));

    EvalReport report;
    report.env_config = env_config;
    report.policy = std::move(label);
    report.seed = seed;
    report.episodes.reserve(static_cast<std::size_t>(episodes));
    for (std::int64_t ep = 0; ep < episodes; ++ep) {
        Observation obs = env.reset();
        EpisodeStats stats;
        stats.beta = env.episode_beta();
        double reward_sum = 0.0;
        while (true) {
            const std::int64_t a = policy(obs, action_rng);
            const StepResult sr = env.step(static_cast<Action>(a));
            ++stats.actions[static_cast<std::size_t>(a)];
            reward_sum += sr.reward;
            obs = sr.observation;
            if (sr.done) break;
        }
        // Per-step mean over the episode's horizon: an episode that ends
        // early sits in a zero-reward terminal state for its remaining
        // steps. Keeps returns on one scale across horizons and ranks
        // policies by the same total-reward objective training optimizes,
        // rather than length-biased averaging over steps survived.
        stats.ret = reward_sum / static_cast<double>(env_config.horizon);
        report.episodes.push_back(stats);
    }
    return report;
}

/// Evaluate a trained checkpoint; stochastic action sampling by default
/// (matching training), argmax under `greedy`.
inline EvalReport evaluate(const PolicyCheckpoint& checkpoint, const EnvConfig& env_config,
                           std::int64_t episodes, std::uint64_t seed, bool greedy = false) {
    const MlpParams params = checkpoint.to_params();
    auto ws = std::make_shared<MlpWorkspace>();
    PolicyFn fn = [params, ws, greedy](const Observation& obs, RngStream& rng) {
        mlp_forward(params, obs.data(), *ws);
        return greedy ? greedy_action(ws->logits) : sample_action(ws->logits, rng);
    };
    std::string label = std::string("policy(") + to_string(checkpoint.env_config.variant) +
                        ", train_seed=" + std::to_string(checkpoint.seed) +
                        ", timesteps=" + std::to_string(checkpoint.timesteps_trained) + ")";
    EvalReport report = evaluate_policy(fn, env_config, episodes, seed, std::move(label));
    report.greedy = greedy;
    return report;
}

inline EvalReport evaluate_random(const EnvConfig& env_config, std::int64_t episodes,
                                  std::uint64_t seed) {
    PolicyFn fn = [](const Observation&, RngStream& rng) {
        return static_cast<std::int64_t>(rng.next_below(3));
    };
    return evaluate_policy(fn, env_config, episodes, seed, "uniform-random");
}

inline EvalCsv eval_report_to_csv(const EvalReport& report,
                                  std::vector<std::string> provenance = {}) {
    EvalCsv csv;
    if (provenance.empty()) {
        nlohmann::json cfg = report.env_config;
        provenance.push_back("policy: " + report.policy);
        provenance.push_back(std::string("mode: ") + (report.greedy ? "greedy" : "stochastic"));
        provenance.push_back("episodes: " + std::to_string(report.episodes.size()));
        provenance.push_back("seed: " + std::to_string(report.seed));
        provenance.push_back("env_config: " + cfg.dump());
    }
    csv.provenance = std::move(provenance);
    csv.rows.reserve(report.episodes.size());
    for (std::size_t ep = 0; ep < report.episodes.size(); ++ep) {
        const auto& e = report.episodes[ep];
        EvalRow row;
        row.episode = static_cast<std::int64_t>(ep);
        row.ret = e.ret;
        row.n_lockdown = e.actions[0];
        row.n_distancing = e.actions[1];
        row.n_open = e.actions[2];
        row.beta = e.beta;
        csv.rows.push_back(row);
    }
    return csv;
}

// ---------------------------------------------------------------------------
// Dynamics comparison

struct DynamicsComparison {
    EpidemicParams params;
    std::int64_t days = 0;
    std::int64_t runs = 0;
    std::uint64_t seed = 0;
    std::vector<OdeState> ode; // day 0..days
    EnsembleResult ensemble;   // same day grid
    double final_size_fraction = 0.0; // analytic R(inf)/N

    double ode_final_fraction() const {
        return ode.back().r / static_cast<double>(params.population);
    }
    double abm_final_fraction() const {
        return ensemble.mean_final_r() / static_cast<double>(params.population);
    }
};

inline DynamicsComparison compare_dynamics(const EpidemicParams& params, std::int64_t days,
                                           std::int64_t runs, std::uint64_t seed) {
    params.validate();
    if (days < 1) throw InvalidParams("compare_dynamics: days must be >= 1");
    if (runs < 1) throw InvalidParams("compare_dynamics: runs must be >= 1");

    DynamicsComparison cmp;
    cmp.params = params;
    cmp.days = days;
    cmp.runs = runs;
    cmp.seed = seed;
    cmp.ode.reserve(static_cast<std::size_t>(days) + 1);
    OdeState st = ode_init(params);
    cmp.ode.push_back(st);
    for (std::int64_t day = 0; day < days; ++day) {
        st = ode_step(st, params, 1.0);
        cmp.ode.push_back(st);
    }
    cmp.ensemble = run_ensemble(params, days, runs, seed);
    cmp.final_size_fraction = final_size(params);
    return cmp;
}

inline TrajectoryCsv dynamics_to_csv(const DynamicsComparison& cmp,
                                     std::vector<std::string> provenance = {}) {
    TrajectoryCsv csv;
    if (provenance.empty()) {
        nlohmann::json p = cmp.params;
        provenance.push_back("params: " + p.dump());
        provenance.push_back("days: " + std::to_string(cmp.days));
        provenance.push_back("runs: " + std::to_string(cmp.runs));
        provenance.push_back("seed: " + std::to_string(cmp.seed));
        provenance.push_back("ode rows use run_id = -1");
    }
    csv.provenance = std::move(provenance);
    csv.rows.reserve(static_cast<std::size_t>((cmp.days + 1) * (cmp.runs + 1)));
    for (std::size_t t = 0; t < cmp.ode.size(); ++t)
        csv.rows.push_back({-1, static_cast<std::int64_t>(t), cmp.ode[t].s, cmp.ode[t].i,
                            cmp.ode[t].r});
    for (std::int64_t run = 0; run < cmp.runs; ++run) {
        const auto& traj = cmp.ensemble.trajectories[static_cast<std::size_t>(run)];
        for (std::size_t t = 0; t < traj.size(); ++t)
            csv.rows.push_back({run, static_cast<std::int64_t>(t),
                                static_cast<double>(traj[t][0]), static_cast<double>(traj[t][1]),
                                static_cast<double>(traj[t][2])});
    }
    return csv;
}

inline std::string dynamics_to_svg(const DynamicsComparison& cmp) {
    std::vector<SvgSeries> series;
    const char* names[3] = {"S", "I", "R"};
    for (std::size_t c = 0; c < 3; ++c) {
        SvgSeries ode_series{std::string("ODE ") + names[c], {}, 1.0, 2.0};
        SvgSeries abm_series{std::string("ABM mean ") + names[c], {}, 0.85, 2.0};
        for (std::size_t t = 0; t < cmp.ode.size(); ++t) {
            const double x = static_cast<double>(t);
            const double ode_v = c == 0 ? cmp.ode[t].s : c == 1 ? cmp.ode[t].i : cmp.ode[t].r;
            ode_series.points.emplace_back(x, ode_v);
            abm_series.points.emplace_back(x, cmp.ensemble.mean[t][c]);
        }
        series.push_back(std::move(ode_series));
        series.push_back(std::move(abm_series));
    }
    char title[160];
    std::snprintf(title, sizeof title,
                  "SIR dynamics: ODE vs ABM ensemble (N=%lld, beta=%g, gamma=%g, %lld runs)",
                  static_cast<long long>(cmp.params.population), cmp.params.beta,
                  cmp.params.gamma, static_cast<long long>(cmp.runs));
    return svg_line_chart(title, "day", "individuals", series);
}

// ---------------------------------------------------------------------------
// Generalization sweep

struct SweepSample {
    double beta = 0.0;
    double mean_return = 0.0;
};

struct SweepReport {
    std::vector<SweepSample> samples;
    double beta_lo = 0.0, beta_hi = 0.0;
    std::int64_t episodes_per_sample = 0;
    std::uint64_t seed = 0;
    double baseline_mean = 0.0; // train-regime mean return
    std::string policy;

    double sweep_mean() const {
        double sum = 0.0;
        for (const auto& s : samples) sum += s.mean_return;
        return samples.empty() ? 0.0 : sum / static_cast<double>(samples.size());
    }

    double sweep_std() const {
        if (samples.empty()) return 0.0;
        const double mean = sweep_mean();
        double var = 0.0;
        for (const auto& s : samples) var += (s.mean_return - mean) * (s.mean_return - mean);
        return std::sqrt(var / static_cast<double>(samples.size()));
    }

    /// Relative degradation vs the train regime; positive = worse off-regime.
    double drop() const {
        const double denom = std::max(std::abs(baseline_mean), 1e-12);
        return (baseline_mean - sweep_mean()) / denom;
    }
};

inline SweepReport generalization_sweep(const PolicyCheckpoint& checkpoint, double beta_lo,
                                        double beta_hi, std::int64_t samples,
                                        std::int64_t episodes_per_sample, std::uint64_t seed) {
    if (samples < 1) throw InvalidConfig("sweep: samples must be >= 1");
    if (episodes_per_sample < 1) throw InvalidConfig("sweep: episodes_per_sample must be >= 1");
    if (!(beta_lo >= 0.0 && beta_lo <= beta_hi))
        throw InvalidConfig("sweep: need 0 <= beta_lo <= beta_hi");

    SweepReport report;
    report.beta_lo = beta_lo;
    report.beta_hi = beta_hi;
    report.episodes_per_sample = episodes_per_sample;
    report.seed = seed;

    RngStream beta_rng(seed, fnv1a64("sweep/beta"));
    for (std::int64_t k = 0; k < samples; ++k) {
        EnvConfig cfg = checkpoint.env_config;
        cfg.beta_sample_range.reset();
        cfg.params.beta = beta_rng.uniform(beta_lo, beta_hi);
        const EvalReport eval = evaluate(checkpoint, cfg, episodes_per_sample,
                                         derive_seed(seed, fnv1a64("sweep/eval"),
                                                     static_cast<std::uint64_t>(k)));
        report.samples.push_back({cfg.params.beta, eval.mean_return()});
        if (report.policy.empty()) report.policy = eval.policy;
    }

    const EvalReport baseline =
        evaluate(checkpoint, checkpoint.env_config, samples * episodes_per_sample,
                 derive_seed(seed, fnv1a64("sweep/baseline")));
    report.baseline_mean = baseline.mean_return();
    return report;
}

inline SweepCsv sweep_report_to_csv(const SweepReport& report,
                                    std::vector<std::string> provenance = {}) {
    SweepCsv csv;
    if (provenance.empty()) {
        provenance.push_back("policy: " + report.policy);
        provenance.push_back("beta_range: [" + detail::csv_double(report.beta_lo) + ", " +
                             detail::csv_double(report.beta_hi) + "]");
        provenance.push_back("episodes_per_sample: " +
                             std::to_string(report.episodes_per_sample));
        provenance.push_back("seed: " + std::to_string(report.seed));
        provenance.push_back("baseline_mean: " + detail::csv_double(report.baseline_mean));
        provenance.push_back("drop: " + detail::csv_double(report.drop()));
    }
    csv.provenance = std::move(provenance);
    for (std::size_t k = 0; k < report.samples.size(); ++k)
        csv.rows.push_back({static_cast<std::int64_t>(k), report.samples[k].beta,
                            report.samples[k].mean_return});
    return csv;
}

inline std::string sweep_to_svg(const std::string& title,
                                const std::vector<SweepReport>& reports,
                                const std::vector<std::string>& names) {
    std::vector<SvgSeries> series;
    for (std::size_t k = 0; k < reports.size(); ++k) {
        // Scatter-ish: sort samples by beta so the polyline reads as a curve.
        std::vector<SweepSample> sorted = reports[k].samples;
        std::sort(sorted.begin(), sorted.end(),
                  [](const SweepSample& a, const SweepSample& b) { return a.beta < b.beta; });
        SvgSeries s{k < names.size() ? names[k] : "series " + std::to_string(k), {}, 1.0, 2.0};
        for (const auto& sample : sorted) s.points.emplace_back(sample.beta, sample.mean_return);
        series.push_back(std::move(s));
    }
    return svg_line_chart(title, "beta", "mean return", series);
}

} // namespace epirl
