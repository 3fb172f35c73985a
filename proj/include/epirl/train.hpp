#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "epirl/checkpoint.hpp"
#include "epirl/env.hpp"
#include "epirl/mlp.hpp"
#include "epirl/ppo.hpp"
#include "epirl/rng.hpp"

namespace epirl {

namespace stream_id {
// Fixed substream labels; training is a pure function of (configs, seed).
inline const std::uint64_t kTrainInit = fnv1a64("train/init");
inline const std::uint64_t kTrainEnv = fnv1a64("train/env");
inline const std::uint64_t kTrainAction = fnv1a64("train/action");
inline const std::uint64_t kTrainShuffle = fnv1a64("train/shuffle");
inline const std::uint64_t kEvalEnv = fnv1a64("eval/env");
inline const std::uint64_t kEvalAction = fnv1a64("eval/action");
} // namespace stream_id

struct TrainProgress {
    std::int64_t timesteps = 0;
    std::int64_t updates = 0;
    double mean_episode_return = 0.0; // per-step mean over horizon, completed episodes
    PpoUpdateStats stats;
};

using TrainCallback = std::function<void(const TrainProgress&)>;

/// Full PPO training loop: alternate rollout collection and optimization
/// until at least total_timesteps environment steps are consumed (rounded up
/// to whole rollouts). Deterministic given (env_config, ppo_config, seed).
inline PolicyCheckpoint train(const EnvConfig& env_config, const PpoConfig& ppo_config,
                              std::uint64_t seed, const TrainCallback& on_update = {}) {
    env_config.validate();
    ppo_config.validate();

    RngStream init_rng(seed, stream_id::kTrainInit);
    RngStream action_rng(seed, stream_id::kTrainAction);
    RngStream shuffle_rng(seed, stream_id::kTrainShuffle);
    SirEnv env(env_config, RngStream(seed, stream_id::kTrainEnv));

    MlpConfig arch; // 4 -> 64 -> 64 trunk, 3 logits + value
    MlpParams params = init_mlp(arch, init_rng);
    AdamState adam(params.layout.size);
    RolloutBuffer buffer(ppo_config.rollout_steps, arch.input_dim);
    MlpWorkspace ws;

    Observation obs = env.reset();
    std::int64_t steps_done = 0;
    std::int64_t updates = 0;
    double episode_reward_sum = 0.0;

    while (steps_done < ppo_config.total_timesteps) {
        double finished_return_sum = 0.0;
        std::int64_t finished_episodes = 0;
        for (std::int64_t t = 0; t < ppo_config.rollout_steps; ++t) {
            const PolicyDecision d = act(params, obs.data(), action_rng, ws);
            const StepResult sr = env.step(static_cast<Action>(d.action));

            std::copy_n(obs.data(), buffer.obs_dim, buffer.obs_row(t));
            const auto ti = static_cast<std::size_t>(t);
            buffer.actions[ti] = d.action;
            buffer.log_probs[ti] = d.log_prob;
            buffer.values[ti] = d.value;
            buffer.rewards[ti] = sr.reward;
            buffer.dones[ti] = sr.done ? 1 : 0;

            episode_reward_sum += sr.reward;
            if (sr.done) {
                // Same convention as evaluate(): per-step mean over the
                // horizon, early termination padding with zero reward.
                finished_return_sum += episode_reward_sum / static_cast<double>(env_config.horizon);
                ++finished_episodes;
                episode_reward_sum = 0.0;
                obs = env.reset();
            } else {
                obs = sr.observation;
            }
        }
        mlp_forward(params, obs.data(), ws);
        compute_gae(buffer, ws.value, ppo_config);
        const PpoUpdateStats stats = ppo_update(params, buffer, ppo_config, shuffle_rng, adam);
        steps_done += ppo_config.rollout_steps;
        ++updates;
        if (on_update) {
            TrainProgress p;
            p.timesteps = steps_done;
            p.updates = updates;
            p.mean_episode_return = finished_episodes > 0
                                        ? finished_return_sum / static_cast<double>(finished_episodes)
                                        : 0.0;
            p.stats = stats;
            on_update(p);
        }
    }

    PolicyCheckpoint cp;
    cp.architecture = arch;
    cp.weights = std::move(params.weights);
    cp.env_config = env_config;
    cp.ppo_config = ppo_config;
    cp.seed = seed;
    cp.timesteps_trained = steps_done;
    return cp;
}

} // namespace epirl
