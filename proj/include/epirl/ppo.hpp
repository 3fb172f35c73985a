#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "epirl/errors.hpp"
#include "epirl/mlp.hpp"
#include "epirl/rng.hpp"

namespace epirl {

struct PpoConfig {
    double learning_rate = 3e-4;
    std::int64_t rollout_steps = 2048;
    std::int64_t minibatch = 64;
    std::int64_t epochs_per_update = 10;
    double discount = 0.99;
    double gae_lambda = 0.95;
    double clip_range = 0.2;
    double value_coef = 0.5;
    double entropy_coef = 0.0;
    double max_grad_norm = 0.5;
    std::int64_t total_timesteps = 200000;

    void validate() const {
        if (!(learning_rate > 0.0)) throw InvalidConfig("learning_rate must be > 0");
        if (rollout_steps < 1) throw InvalidConfig("rollout_steps must be >= 1");
        if (minibatch < 1) throw InvalidConfig("minibatch must be >= 1");
        if (epochs_per_update < 1) throw InvalidConfig("epochs_per_update must be >= 1");
        if (!(discount >= 0.0 && discount <= 1.0)) throw InvalidConfig("discount must be in [0,1]");
        if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0))
            throw InvalidConfig("gae_lambda must be in [0,1]");
        if (!(clip_range > 0.0 && clip_range < 1.0))
            throw InvalidConfig("clip_range must be in (0,1)");
        if (!(value_coef >= 0.0)) throw InvalidConfig("value_coef must be >= 0");
        if (!(entropy_coef >= 0.0)) throw InvalidConfig("entropy_coef must be >= 0");
        if (!(max_grad_norm > 0.0)) throw InvalidConfig("max_grad_norm must be > 0");
        if (total_timesteps < 1) throw InvalidConfig("total_timesteps must be >= 1");
    }

    bool operator==(const PpoConfig&) const = default;
};

inline void to_json(nlohmann::json& j, const PpoConfig& c) {
    j = nlohmann::json{{"learning_rate", c.learning_rate},
                       {"rollout_steps", c.rollout_steps},
                       {"minibatch", c.minibatch},
                       {"epochs_per_update", c.epochs_per_update},
                       {"discount", c.discount},
                       {"gae_lambda", c.gae_lambda},
                       {"clip_range", c.clip_range},
                       {"value_coef", c.value_coef},
                       {"entropy_coef", c.entropy_coef},
                       {"max_grad_norm", c.max_grad_norm},
                       {"total_timesteps", c.total_timesteps}};
}

inline void from_json(const nlohmann::json& j, PpoConfig& c) {
    j.at("learning_rate").get_to(c.learning_rate);
    j.at("rollout_steps").get_to(c.rollout_steps);
    j.at("minibatch").get_to(c.minibatch);
    j.at("epochs_per_update").get_to(c.epochs_per_update);
    j.at("discount").get_to(c.discount);
    j.at("gae_lambda").get_to(c.gae_lambda);
    j.at("clip_range").get_to(c.clip_range);
    j.at("value_coef").get_to(c.value_coef);
    j.at("entropy_coef").get_to(c.entropy_coef);
    j.at("max_grad_norm").get_to(c.max_grad_norm);
    j.at("total_timesteps").get_to(c.total_timesteps);
}

/// One rollout's worth of transitions, stored flat. dones[t] marks that the
/// episode terminated after the step taken at t.
struct RolloutBuffer {
    std::int64_t n_steps = 0;
    std::int64_t obs_dim = 0;
    std::vector<double> observations; // n_steps * obs_dim, row per step
    std::vector<std::int64_t> actions;
    std::vector<double> log_probs;
    std::vector<double> rewards;
    std::vector<double> values;
    std::vector<std::uint8_t> dones;
    std::vector<double> advantages;
    std::vector<double> returns;

    RolloutBuffer(std::int64_t steps, std::int64_t dim) : n_steps(steps), obs_dim(dim) {
        observations.resize(static_cast<std::size_t>(steps * dim));
        actions.resize(static_cast<std::size_t>(steps));
        log_probs.resize(static_cast<std::size_t>(steps));
        rewards.resize(static_cast<std::size_t>(steps));
        values.resize(static_cast<std::size_t>(steps));
        dones.resize(static_cast<std::size_t>(steps));
        advantages.resize(static_cast<std::size_t>(steps));
        returns.resize(static_cast<std::size_t>(steps));
    }

    const double* obs_row(std::int64_t t) const {
        return observations.data() + static_cast<std::size_t>(t * obs_dim);
    }
    double* obs_row(std::int64_t t) {
        return observations.data() + static_cast<std::size_t>(t * obs_dim);
    }
};

/// delta_t = r_t + discount * V(s_{t+1}) * (1 - done_t) - V(s_t)
/// A_t     = delta_t + discount * lambda * (1 - done_t) * A_{t+1}
/// returns = advantages + values.
/// `bootstrap_value` is V of the observation after the final step (it is
/// masked out when that step ended its episode).
inline void compute_gae(RolloutBuffer& buffer, double bootstrap_value, const PpoConfig& config) {
    double next_advantage = 0.0;
    for (std::int64_t t = buffer.n_steps - 1; t >= 0; --t) {
        const auto ti = static_cast<std::size_t>(t);
        const double not_done = buffer.dones[ti] ? 0.0 : 1.0;
        const double next_value =
            t + 1 < buffer.n_steps ? buffer.values[ti + 1] : bootstrap_value;
        const double delta =
            buffer.rewards[ti] + config.discount * next_value * not_done - buffer.values[ti];
        next_advantage = delta + config.discount * config.gae_lambda * not_done * next_advantage;
        buffer.advantages[ti] = next_advantage;
        buffer.returns[ti] = next_advantage + buffer.values[ti];
    }
}

/// A gathered minibatch; advantages are expected pre-normalized.
struct PpoBatch {
    std::int64_t n = 0;
    std::int64_t obs_dim = 0;
    const double* observations = nullptr; // n * obs_dim
    const std::int64_t* actions = nullptr;
    const double* old_log_probs = nullptr;
    const double* advantages = nullptr;
    const double* returns = nullptr;
};

struct PpoLossStats {
    double total = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double clip_fraction = 0.0;
    double approx_kl = 0.0;
};

/// Clipped-surrogate PPO loss over one minibatch:
///   L = -mean(min(rho*A, clip(rho, 1-eps, 1+eps)*A))
///       + value_coef * mean((V - R)^2) - entropy_coef * mean(H).
/// Writes d(L)/d(weights) into `grad` (overwritten, not accumulated).
inline PpoLossStats ppo_loss_grad(const MlpParams& params, const PpoBatch& batch,
                                  const PpoConfig& config, std::vector<double>& grad,
                                  MlpWorkspace& ws, MlpWorkspace& scratch) {
    grad.assign(params.layout.size, 0.0);
    PpoLossStats stats;
    const double inv_n = 1.0 / static_cast<double>(batch.n);
    const double eps = config.clip_range;
    const auto n_actions = static_cast<std::size_t>(params.config.n_actions);
    std::vector<double> log_p(n_actions), p(n_actions), dlogits(n_actions);

    for (std::int64_t k = 0; k < batch.n; ++k) {
        const double* obs = batch.observations + static_cast<std::size_t>(k * batch.obs_dim);
        mlp_forward(params, obs, ws);
        log_p = ws.logits;
        log_softmax_inplace(log_p);
        for (std::size_t a = 0; a < n_actions; ++a) p[a] = std::exp(log_p[a]);

        const auto action = static_cast<std::size_t>(batch.actions[k]);
        const double adv = batch.advantages[k];
        const double log_ratio = log_p[action] - batch.old_log_probs[k];
        const double ratio = std::exp(log_ratio);
        const double surr1 = ratio * adv;
        const double surr2 = std::clamp(ratio, 1.0 - eps, 1.0 + eps) * adv;

        double entropy = 0.0;
        for (std::size_t a = 0; a < n_actions; ++a)
            if (p[a] > 0.0) entropy -= p[a] * log_p[a];

        const double value_err = ws.value - batch.returns[k];

        stats.policy_loss += -std::min(surr1, surr2) * inv_n;
        stats.value_loss += value_err * value_err * inv_n;
        stats.entropy += entropy * inv_n;
        if (std::abs(ratio - 1.0) > eps) stats.clip_fraction += inv_n;
        stats.approx_kl += (ratio - 1.0 - log_ratio) * inv_n;

        // d(-min(surr1, surr2))/dlogits: the unclipped branch contributes
        // -adv * rho * (onehot - p); the clipped branch is constant in theta.
        std::fill(dlogits.begin(), dlogits.end(), 0.0);
        if (surr1 <= surr2) {
            const double c = -adv * ratio * inv_n;
            for (std::size_t a = 0; a < n_actions; ++a)
                dlogits[a] = c * ((a == action ? 1.0 : 0.0) - p[a]);
        }
        if (config.entropy_coef != 0.0) {
            // d(-coef*H)/dz_a = coef * p_a * (log p_a + H)
            for (std::size_t a = 0; a < n_actions; ++a)
                dlogits[a] += config.entropy_coef * inv_n * p[a] * (log_p[a] + entropy);
        }
        const double dvalue = 2.0 * config.value_coef * value_err * inv_n;
        mlp_backward(params, ws, dlogits.data(), dvalue, grad, scratch);
    }

    stats.total = stats.policy_loss + config.value_coef * stats.value_loss -
                  config.entropy_coef * stats.entropy;
    return stats;
}

/// First-order adaptive-moment optimizer state (bias-corrected; beta1 = 0.9,
/// beta2 = 0.999, eps = 1e-8).
struct AdamState {
    std::vector<double> m, v;
    std::int64_t step = 0;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

    void apply(std::vector<double>& weights, const std::vector<double>& grad, double lr) {
        constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
        ++step;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
        for (std::size_t i = 0; i < weights.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
            weights[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
        }
    }
};

/// Scales `grad` so its global L2 norm is at most `max_norm`; returns the
/// pre-clip norm.
inline double clip_grad_norm(std::vector<double>& grad, double max_norm) {
    double norm2 = 0.0;
    for (double g : grad) norm2 += g * g;
    const double norm = std::sqrt(norm2);
    if (norm > max_norm && norm > 0.0) {
        const double scale = max_norm / norm;
        for (double& g : grad) g *= scale;
    }
    return norm;
}

struct PpoUpdateStats {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double clip_fraction = 0.0;
    double approx_kl = 0.0;
    std::int64_t minibatches = 0;
};

/// One PPO optimization phase over a filled rollout buffer:
/// epochs x shuffled minibatches, per-minibatch advantage normalization,
/// gradient-norm clipping, adaptive-moment steps.
inline PpoUpdateStats ppo_update(MlpParams& params, const RolloutBuffer& buffer,
                                 const PpoConfig& config, RngStream& shuffle_rng,
                                 AdamState& adam) {
    const std::int64_t n = buffer.n_steps;
    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    std::vector<double> mb_obs, mb_logp, mb_adv, mb_ret, grad;
    std::vector<std::int64_t> mb_act;
    MlpWorkspace ws, scratch;
    PpoUpdateStats agg;

    for (std::int64_t epoch = 0; epoch < config.epochs_per_update; ++epoch) {
        // Fisher-Yates driven by the training stream.
        for (std::int64_t i = n - 1; i > 0; --i) {
            const auto j = static_cast<std::int64_t>(
                shuffle_rng.next_below(static_cast<std::uint64_t>(i) + 1));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }
        for (std::int64_t start = 0; start < n; start += config.minibatch) {
            const std::int64_t m = std::min(config.minibatch, n - start);
            mb_obs.resize(static_cast<std::size_t>(m * buffer.obs_dim));
            mb_act.resize(static_cast<std::size_t>(m));
            mb_logp.resize(static_cast<std::size_t>(m));
            mb_adv.resize(static_cast<std::size_t>(m));
            mb_ret.resize(static_cast<std::size_t>(m));
            for (std::int64_t k = 0; k < m; ++k) {
                const auto src = static_cast<std::size_t>(order[static_cast<std::size_t>(start + k)]);
                std::copy_n(buffer.obs_row(static_cast<std::int64_t>(src)), buffer.obs_dim,
                            mb_obs.data() + static_cast<std::size_t>(k * buffer.obs_dim));
                mb_act[static_cast<std::size_t>(k)] = buffer.actions[src];
                mb_logp[static_cast<std::size_t>(k)] = buffer.log_probs[src];
                mb_adv[static_cast<std::size_t>(k)] = buffer.advantages[src];
                mb_ret[static_cast<std::size_t>(k)] = buffer.returns[src];
            }
            // Normalize advantages within the minibatch (mean 0, std 1).
            double mean = 0.0;
            for (double a : mb_adv) mean += a;
            mean /= static_cast<double>(m);
            double var = 0.0;
            for (double a : mb_adv) var += (a - mean) * (a - mean);
            var /= static_cast<double>(m);
            const double inv_std = 1.0 / (std::sqrt(var) + 1e-8);
            for (double& a : mb_adv) a = (a - mean) * inv_std;

            PpoBatch batch;
            batch.n = m;
            batch.obs_dim = buffer.obs_dim;
            batch.observations = mb_obs.data();
            batch.actions = mb_act.data();
            batch.old_log_probs = mb_logp.data();
            batch.advantages = mb_adv.data();
            batch.returns = mb_ret.data();

            const PpoLossStats stats = ppo_loss_grad(params, batch, config, grad, ws, scratch);
            if (!std::isfinite(stats.total))
                throw NonFiniteLoss("non-finite PPO loss at optimizer step " +
                                    std::to_string(adam.step + 1) + " (policy=" +
                                    std::to_string(stats.policy_loss) + ", value=" +
                                    std::to_string(stats.value_loss) + ")");
            clip_grad_norm(grad, config.max_grad_norm);
            adam.apply(params.weights, grad, config.learning_rate);

            agg.policy_loss += stats.policy_loss;
            agg.value_loss += stats.value_loss;
            agg.entropy += stats.entropy;
            agg.clip_fraction += stats.clip_fraction;
            agg.approx_kl += stats.approx_kl;
            ++agg.minibatches;
        }
    }
    if (agg.minibatches > 0) {
        const double inv = 1.0 / static_cast<double>(agg.minibatches);
        agg.policy_loss *= inv;
        agg.value_loss *= inv;
        agg.entropy *= inv;
        agg.clip_fraction *= inv;
        agg.approx_kl *= inv;
    }
    return agg;
}

} // namespace epirl
