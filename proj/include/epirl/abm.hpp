#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "epirl/binomial.hpp"
#include "epirl/params.hpp"
#include "epirl/rng.hpp"

namespace epirl {

/// Number of days an infected agent stays infectious: D = round(1/gamma).
inline std::int64_t infectious_days(const EpidemicParams& params) {
    return std::max<std::int64_t>(1, std::llround(1.0 / params.gamma));
}

/// Aggregated agent-based SIR state on a complete graph.
///
/// cohorts[k] counts agents infected exactly k+1 days ago; they all recover
/// together after infectious_days() steps, so the per-agent roster never has
/// to be materialized on the fast path.
struct AbmState {
    std::int64_t s = 0;
    std::vector<std::int64_t> cohorts;
    std::int64_t r = 0;
    std::int64_t t = 0;

    std::int64_t infected() const {
        return std::accumulate(cohorts.begin(), cohorts.end(), std::int64_t{0});
    }
    std::int64_t total() const { return s + infected() + r; }

    bool operator==(const AbmState&) const = default;
};

inline AbmState abm_init(const EpidemicParams& params) {
    params.validate();
    AbmState st;
    st.s = params.population - params.initial_infected;
    st.cohorts.assign(static_cast<std::size_t>(infectious_days(params)), 0);
    st.cohorts.front() = params.initial_infected;
    return st;
}

/// Per-susceptible probability of at least one transmission when i agents are
/// infectious: p = 1 - (1 - beta/N)^i.
inline double infection_probability(std::int64_t infected, const EpidemicParams& params) {
    params.validate();
    const double p_trans = params.beta / static_cast<double>(params.population);
    if (p_trans > 1.0)
        throw InvalidParams("infection_probability: beta/N must be <= 1, got " +
                            std::to_string(p_trans));
    if (infected < 0 || infected > params.population)
        throw InvalidParams("infection_probability: infected count out of range");
    if (infected == 0 || p_trans == 0.0) return 0.0;
    // expm1/log1p keeps precision for tiny beta/N
    return -std::expm1(static_cast<double>(infected) * std::log1p(-p_trans));
}

/// One day of the aggregated dynamics. New infections are drawn from the
/// pre-step infected count, then the oldest cohort recovers and every cohort
/// ages by one day; the integer population sum is preserved exactly.
inline AbmState abm_step(const AbmState& state, const EpidemicParams& params, RngStream& rng) {
    const double p = infection_probability(state.infected(), params);
    const std::int64_t new_infections = sample_binomial(rng, state.s, p);

    AbmState next = state;
    next.r += next.cohorts.back();
    for (std::size_t k = next.cohorts.size() - 1; k > 0; --k)
        next.cohorts[k] = next.cohorts[k - 1];
    next.cohorts.front() = new_infections;
    next.s -= new_infections;
    next.t += 1;
    return next;
}

// ---------------------------------------------------------------------------
// Naive per-agent reference backend. O(S*I) per step; kept as a distributional
// oracle for abm_step and as the seam for future non-complete topologies.
// ---------------------------------------------------------------------------

enum class AgentKind : std::uint8_t { Susceptible, Infected, Recovered };

struct Agent {
    AgentKind kind = AgentKind::Susceptible;
    std::int64_t days_infected = 0; // >= 1 while infected
};

struct AgentRoster {
    std::vector<Agent> agents;
    std::int64_t t = 0;

    std::int64_t count(AgentKind k) const {
        return std::count_if(agents.begin(), agents.end(),
                             [k](const Agent& a) { return a.kind == k; });
    }
    std::array<std::int64_t, 3> counts() const {
        std::array<std::int64_t, 3> c{0, 0, 0};
        for (const Agent& a : agents) ++c[static_cast<std::size_t>(a.kind)];
        return c;
    }
};

inline AgentRoster roster_init(const EpidemicParams& params) {
    params.validate();
    AgentRoster roster;
    roster.agents.assign(static_cast<std::size_t>(params.population), Agent{});
    for (std::int64_t k = 0; k < params.initial_infected; ++k)
        roster.agents[static_cast<std::size_t>(k)] = Agent{AgentKind::Infected, 1};
    return roster;
}

/// Literal rules: every infected agent attempts an independent
/// Bernoulli(beta/N) transmission to every susceptible agent; a susceptible is
/// infected if any attempt lands. Infected agents on day D recover.
inline AgentRoster abm_step_naive(const AgentRoster& roster, const EpidemicParams& params,
                                  RngStream& rng) {
    const double p_trans = params.beta / static_cast<double>(params.population);
    if (p_trans > 1.0)
        throw InvalidParams("abm_step_naive: beta/N must be <= 1, got " +
                            std::to_string(p_trans));
    const std::int64_t duration = infectious_days(params);

    AgentRoster next = roster;
    for (std::size_t target = 0; target < roster.agents.size(); ++target) {
        if (roster.agents[target].kind != AgentKind::Susceptible) continue;
        bool hit = false;
        for (const Agent& source : roster.agents) {
            if (source.kind != AgentKind::Infected) continue;
            if (rng.bernoulli(p_trans)) hit = true;
        }
        if (hit) next.agents[target] = Agent{AgentKind::Infected, 1};
    }
    for (std::size_t k = 0; k < roster.agents.size(); ++k) {
        const Agent& was = roster.agents[k];
        if (was.kind != AgentKind::Infected) continue;
        next.agents[k] = was.days_infected >= duration
                             ? Agent{AgentKind::Recovered, 0}
                             : Agent{AgentKind::Infected, was.days_infected + 1};
    }
    next.t += 1;
    return next;
}

// ---------------------------------------------------------------------------
// Monte Carlo ensembles
// ---------------------------------------------------------------------------

struct EnsembleResult {
    std::int64_t days = 0;
    std::int64_t runs = 0;
    // Row t (0..days): ensemble mean / stddev of (S, I, R) at day t.
    std::vector<std::array<double, 3>> mean;
    std::vector<std::array<double, 3>> stddev;
    // trajectories[run][t] = (S, I, R)
    std::vector<std::vector<std::array<std::int64_t, 3>>> trajectories;

    double mean_final_r() const { return mean.back()[2]; }
};

/// Run `runs` independent realizations for `days` days; run k draws from
/// RngStream(master_seed, k), so the ensemble is reproducible and
/// schedule-independent.
inline EnsembleResult run_ensemble(const EpidemicParams& params, std::int64_t days,
                                   std::int64_t runs, std::uint64_t master_seed) {
    if (runs < 1) throw InvalidParams("run_ensemble: runs must be >= 1");
    if (days < 1) throw InvalidParams("run_ensemble: days must be >= 1");
    params.validate();

    EnsembleResult result;
    result.days = days;
    result.runs = runs;
    result.trajectories.resize(static_cast<std::size_t>(runs));

    for (std::int64_t run = 0; run < runs; ++run) {
        RngStream rng(master_seed, static_cast<std::uint64_t>(run));
        AbmState st = abm_init(params);
        auto& traj = result.trajectories[static_cast<std::size_t>(run)];
        traj.reserve(static_cast<std::size_t>(days) + 1);
        traj.push_back({st.s, st.infected(), st.r});
        for (std::int64_t day = 0; day < days; ++day) {
            st = abm_step(st, params, rng);
            traj.push_back({st.s, st.infected(), st.r});
        }
    }

    const auto rows = static_cast<std::size_t>(days) + 1;
    result.mean.assign(rows, {0.0, 0.0, 0.0});
    result.stddev.assign(rows, {0.0, 0.0, 0.0});
    for (std::size_t t = 0; t < rows; ++t) {
        for (std::size_t c = 0; c < 3; ++c) {
            double sum = 0.0;
            for (const auto& traj : result.trajectories)
                sum += static_cast<double>(traj[t][c]);
            const double mu = sum / static_cast<double>(runs);
            double sq = 0.0;
            for (const auto& traj : result.trajectories) {
                const double d = static_cast<double>(traj[t][c]) - mu;
                sq += d * d;
            }
            result.mean[t][c] = mu;
            result.stddev[t][c] = std::sqrt(sq / static_cast<double>(runs));
        }
    }
    return result;
}

} // namespace epirl
