#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "epirl/abm.hpp"
#include "epirl/errors.hpp"
#include "epirl/ode.hpp"
#include "epirl/params.hpp"
#include "epirl/rng.hpp"

namespace epirl {

/// Intervention set; integer encoding is part of the policy interface.
enum class Action : int { Lockdown = 0, Distancing = 1, Open = 2 };

inline constexpr std::array<Action, 3> kAllActions{Action::Lockdown, Action::Distancing,
                                                   Action::Open};
inline constexpr int kActionCount = 3;

inline const char* to_string(Action a) {
    switch (a) {
        case Action::Lockdown: return "Lockdown";
        case Action::Distancing: return "Distancing";
        case Action::Open: return "Open";
    }
    return "?";
}

inline Action action_from_string(const std::string& s) {
    for (Action a : kAllActions)
        if (s == to_string(a)) return a;
    throw InvalidConfig("unknown action name: " + s);
}

enum class EnvVariant { Ode, RandomizedOde, Abm };

inline const char* to_string(EnvVariant v) {
    switch (v) {
        case EnvVariant::Ode: return "Ode";
        case EnvVariant::RandomizedOde: return "RandomizedOde";
        case EnvVariant::Abm: return "Abm";
    }
    return "?";
}

inline EnvVariant variant_from_string(const std::string& s) {
    if (s == "Ode") return EnvVariant::Ode;
    if (s == "RandomizedOde") return EnvVariant::RandomizedOde;
    if (s == "Abm") return EnvVariant::Abm;
    throw InvalidConfig("unknown env variant: " + s);
}

struct EnvConfig {
    EnvVariant variant = EnvVariant::Ode;
    EpidemicParams params;
    std::int64_t horizon = 100; // episode length in days
    // Indexed by Action: multiplicative effect on beta, and the economic
    // openness term of the reward.
    std::array<double, 3> action_multipliers{0.1, 0.5, 1.0};
    std::array<double, 3> openness{0.0, 0.5, 1.0};
    double infection_penalty = 5.0; // kappa
    std::int64_t noise_lo = 1;      // RandomizedOde only
    std::int64_t noise_hi = 10;
    std::optional<std::pair<double, double>> beta_sample_range;

    void validate() const {
        params.validate();
        if (horizon < 1) throw InvalidConfig("horizon must be >= 1");
        for (double m : action_multipliers)
            if (!(m > 0.0 && m <= 1.0))
                throw InvalidConfig("action multipliers must lie in (0, 1]");
        for (double o : openness)
            if (!std::isfinite(o)) throw InvalidConfig("openness values must be finite");
        if (!(infection_penalty >= 0.0) || !std::isfinite(infection_penalty))
            throw InvalidConfig("infection_penalty must be >= 0");
        if (noise_lo < 0 || noise_lo > noise_hi)
            throw InvalidConfig("need 0 <= noise_lo <= noise_hi");
        if (beta_sample_range) {
            auto [lo, hi] = *beta_sample_range;
            if (!(lo >= 0.0 && lo <= hi))
                throw InvalidConfig("beta_sample_range must satisfy 0 <= lo <= hi");
        }
    }

    bool operator==(const EnvConfig&) const = default;
};

inline void to_json(nlohmann::json& j, const EnvConfig& c) {
    nlohmann::json multipliers, open;
    for (Action a : kAllActions) {
        multipliers[to_string(a)] = c.action_multipliers[static_cast<std::size_t>(a)];
        open[to_string(a)] = c.openness[static_cast<std::size_t>(a)];
    }
    j = nlohmann::json{{"variant", to_string(c.variant)},
                       {"params", c.params},
                       {"horizon", c.horizon},
                       {"action_multipliers", multipliers},
                       {"openness", open},
                       {"infection_penalty", c.infection_penalty},
                       {"noise_lo", c.noise_lo},
                       {"noise_hi", c.noise_hi}};
    if (c.beta_sample_range)
        j["beta_sample_range"] = {c.beta_sample_range->first, c.beta_sample_range->second};
    else
        j["beta_sample_range"] = nullptr;
}

inline void from_json(const nlohmann::json& j, EnvConfig& c) {
    c.variant = variant_from_string(j.at("variant").get<std::string>());
    j.at("params").get_to(c.params);
    j.at("horizon").get_to(c.horizon);
    for (Action a : kAllActions) {
        c.action_multipliers[static_cast<std::size_t>(a)] =
            j.at("action_multipliers").at(to_string(a)).get<double>();
        c.openness[static_cast<std::size_t>(a)] = j.at("openness").at(to_string(a)).get<double>();
    }
    j.at("infection_penalty").get_to(c.infection_penalty);
    j.at("noise_lo").get_to(c.noise_lo);
    j.at("noise_hi").get_to(c.noise_hi);
    if (j.contains("beta_sample_range") && !j.at("beta_sample_range").is_null()) {
        auto arr = j.at("beta_sample_range");
        c.beta_sample_range = std::make_pair(arr.at(0).get<double>(), arr.at(1).get<double>());
    } else {
        c.beta_sample_range.reset();
    }
}

/// (S/N, I/N, R/N, t/horizon), each clamped to [0, 1].
using Observation = std::array<double, 4>;

struct StepResult {
    Observation observation{};
    double reward = 0.0;
    bool done = false;
    std::map<std::string, double> info; // raw s/i/r and effective beta
};

/// Effective contact rate under an intervention.
inline double apply_action(double beta, Action action, const EnvConfig& config) {
    return beta * config.action_multipliers[static_cast<std::size_t>(action)];
}

/// Shift each compartment by a signed delta, clamp to [0, N], then rescale so
/// the compartments again sum to N. All-zero deltas leave the state untouched
/// bit-for-bit (this is what makes noise range [0,0] degenerate to plain Ode).
inline OdeState apply_state_noise(OdeState state, const std::array<std::int64_t, 3>& deltas,
                                  double population) {
    if (deltas[0] == 0 && deltas[1] == 0 && deltas[2] == 0) return state;
    state.s = std::clamp(state.s + static_cast<double>(deltas[0]), 0.0, population);
    state.i = std::clamp(state.i + static_cast<double>(deltas[1]), 0.0, population);
    state.r = std::clamp(state.r + static_cast<double>(deltas[2]), 0.0, population);
    const double sum = state.s + state.i + state.r;
    if (sum <= 0.0) {
        // All mass clamped away (only reachable for tiny populations).
        state.r = population;
        return state;
    }
    if (sum != population) {
        const double scale = population / sum;
        state.s *= scale;
        state.i *= scale;
        state.r *= scale;
    }
    return state;
}

/// Uniform state perturbation of the RandomizedOde variant: each compartment
/// moves by sign * magnitude with sign uniform on {-1,+1} and magnitude
/// uniform on {noise_lo..noise_hi} individuals. Draw order: S, then I, then R;
/// per compartment sign before magnitude.
inline OdeState randomize_state(const OdeState& state, RngStream& rng, const EnvConfig& config) {
    std::array<std::int64_t, 3> deltas{};
    for (auto& d : deltas) {
        const std::int64_t sign = rng.next_below(2) == 0 ? 1 : -1;
        const std::int64_t magnitude = rng.uniform_int(config.noise_lo, config.noise_hi);
        d = sign * magnitude;
    }
    return apply_state_noise(state, deltas, static_cast<double>(config.params.population));
}

/// Episodic RL wrapper over the three SIR backends.
///
/// One step = one day. Reward is openness(action) - kappa * I(t+1)/N, so it
/// lies in [-kappa, 1]. Episodes end at the horizon or when the epidemic is
/// extinct (I = 0 for the ABM, I < 0.5 for the ODE variants).
class SirEnv {
public:
    SirEnv(EnvConfig config, RngStream rng) : config_(std::move(config)), rng_(rng) {
        config_.validate();
    }

    Observation reset() {
        episode_beta_ = config_.params.beta;
        if (config_.beta_sample_range)
            episode_beta_ =
                rng_.uniform(config_.beta_sample_range->first, config_.beta_sample_range->second);
        if (config_.variant == EnvVariant::Abm) {
            abm_ = abm_init(config_.params);
        } else {
            ode_ = ode_init(config_.params);
        }
        t_ = 0;
        done_ = false;
        return observe();
    }

    StepResult step(Action action) {
        if (done_) throw EpisodeFinished("step() called on a finished episode; call reset()");

        EpidemicParams effective = config_.params;
        effective.beta = apply_action(episode_beta_, action, config_);

        StepResult out;
        double infected_next = 0.0;
        if (config_.variant == EnvVariant::Abm) {
            abm_ = abm_step(abm_, effective, rng_);
            infected_next = static_cast<double>(abm_.infected());
            out.info["s"] = static_cast<double>(abm_.s);
            out.info["i"] = infected_next;
            out.info["r"] = static_cast<double>(abm_.r);
        } else {
            ode_ = ode_step(ode_, effective, 1.0);
            if (config_.variant == EnvVariant::RandomizedOde)
                ode_ = randomize_state(ode_, rng_, config_);
            infected_next = ode_.i;
            out.info["s"] = ode_.s;
            out.info["i"] = ode_.i;
            out.info["r"] = ode_.r;
        }
        out.info["effective_beta"] = effective.beta;

        ++t_;
        const double n = static_cast<double>(config_.params.population);
        out.reward = config_.openness[static_cast<std::size_t>(action)] -
                     config_.infection_penalty * infected_next / n;
        done_ = t_ >= config_.horizon || epidemic_over();
        out.done = done_;
        out.observation = observe();
        return out;
    }

    bool done() const { return done_; }
    std::int64_t t() const { return t_; }
    double episode_beta() const { return episode_beta_; }
    const EnvConfig& config() const { return config_; }

    /// Raw counts of the current state, ABM or ODE alike.
    std::array<double, 3> raw_sir() const {
        if (config_.variant == EnvVariant::Abm)
            return {static_cast<double>(abm_.s), static_cast<double>(abm_.infected()),
                    static_cast<double>(abm_.r)};
        return {ode_.s, ode_.i, ode_.r};
    }

private:
    bool epidemic_over() const {
        if (config_.variant == EnvVariant::Abm) return abm_.infected() == 0;
        return ode_.i < 0.5;
    }

    Observation observe() const {
        const double n = static_cast<double>(config_.params.population);
        const auto sir = raw_sir();
        const double progress = static_cast<double>(t_) / static_cast<double>(config_.horizon);
        Observation obs{sir[0] / n, sir[1] / n, sir[2] / n, progress};
        for (double& x : obs) x = std::clamp(x, 0.0, 1.0);
        return obs;
    }

    EnvConfig config_;
    RngStream rng_;
    OdeState ode_;
    AbmState abm_;
    double episode_beta_ = 0.0;
    std::int64_t t_ = 0;
    bool done_ = true; // reset() must run before step()
};

} // namespace epirl
