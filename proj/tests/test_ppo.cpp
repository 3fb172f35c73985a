#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <json.hpp>

#include "epirl/mlp.hpp"
#include "epirl/ppo.hpp"
#include "epirl/rng.hpp"
#include "support/reference.hpp"

using epirl::MlpConfig;
using epirl::MlpParams;
using epirl::MlpWorkspace;
using epirl::PpoBatch;
using epirl::PpoConfig;
using epirl::RngStream;
using epirl::RolloutBuffer;

namespace {

// A single-observation batch against a zero-weight network whose policy is
// uniform: old_log_prob = log(1/3) - log(ratio) makes the importance ratio
// exactly `ratio`.
struct SingleSample {
    MlpParams params;
    std::vector<double> obs = {0.2, 0.4, 0.1, 0.3};
    std::int64_t action = 1;
    double old_log_prob = 0.0;
    double advantage = 0.0;
    double ret = 0.0;

    PpoBatch batch() const {
        PpoBatch b;
        b.n = 1;
        b.obs_dim = 4;
        b.observations = obs.data();
        b.actions = &action;
        b.old_log_probs = &old_log_prob;
        b.advantages = &advantage;
        b.returns = &ret;
        return b;
    }
};

SingleSample make_sample(double ratio, double advantage) {
    SingleSample s;
    s.old_log_prob = std::log(1.0 / 3.0) - std::log(ratio);
    s.advantage = advantage;
    return s;
}

}  // namespace

TEST_CASE("GAE of a single terminal step is its reward", "[ppo]") {
    PpoConfig cfg;
    RolloutBuffer buf(1, 4);
    buf.rewards[0] = 1.0;
    buf.values[0] = 0.0;
    buf.dones[0] = 1;
    epirl::compute_gae(buf, 123.0, cfg);  // bootstrap must be masked by done
    REQUIRE(buf.advantages[0] == 1.0);
    REQUIRE(buf.returns[0] == 1.0);
}

TEST_CASE("GAE with zero lambda reduces to one-step TD errors", "[ppo]") {
    PpoConfig cfg;
    cfg.gae_lambda = 0.0;
    cfg.discount = 0.9;
    RngStream rng(3, 0);
    RolloutBuffer buf(32, 4);
    for (std::int64_t t = 0; t < 32; ++t) {
        buf.rewards[static_cast<std::size_t>(t)] = rng.uniform(-1.0, 1.0);
        buf.values[static_cast<std::size_t>(t)] = rng.uniform(-1.0, 1.0);
        buf.dones[static_cast<std::size_t>(t)] = rng.next_below(4) == 0 ? 1 : 0;
    }
    const double bootstrap = 0.37;
    epirl::compute_gae(buf, bootstrap, cfg);
    for (std::int64_t t = 0; t < 32; ++t) {
        const auto ti = static_cast<std::size_t>(t);
        const double not_done = buf.dones[ti] ? 0.0 : 1.0;
        const double next_v = t + 1 < 32 ? buf.values[ti + 1] : bootstrap;
        const double delta = buf.rewards[ti] + 0.9 * next_v * not_done - buf.values[ti];
        REQUIRE(buf.advantages[ti] == Catch::Approx(delta).margin(1e-15));
    }
}

TEST_CASE("GAE matches the hand-unrolled three-step recursion", "[ppo]") {
    // r = (1,1,1), V = 0, discount 0.9, lambda 0.8, no dones, bootstrap 0:
    // A2 = 1, A1 = 1 + 0.72*1 = 1.72, A0 = 1 + 0.72*1.72 = 2.2384.
    PpoConfig cfg;
    cfg.discount = 0.9;
    cfg.gae_lambda = 0.8;
    RolloutBuffer buf(3, 4);
    for (std::size_t t = 0; t < 3; ++t) {
        buf.rewards[t] = 1.0;
        buf.values[t] = 0.0;
        buf.dones[t] = 0;
    }
    epirl::compute_gae(buf, 0.0, cfg);
    REQUIRE(buf.advantages[2] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(buf.advantages[1] == Catch::Approx(1.72).margin(1e-12));
    REQUIRE(buf.advantages[0] == Catch::Approx(2.2384).margin(1e-12));
    REQUIRE(buf.returns[0] == Catch::Approx(2.2384).margin(1e-12));
}

TEST_CASE("unclipped surrogate at ratio one equals the mean advantage", "[ppo]") {
    PpoConfig cfg;
    MlpWorkspace ws, scratch;
    std::vector<double> grad;
    auto s = make_sample(1.0, 0.7313);
    const auto stats = epirl::ppo_loss_grad(s.params, s.batch(), cfg, grad, ws, scratch);
    REQUIRE(stats.policy_loss == Catch::Approx(-0.7313).margin(1e-12));
    REQUIRE(stats.clip_fraction == 0.0);
    REQUIRE(stats.approx_kl == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("clipped surrogate takes the pessimistic branch on every side", "[ppo]") {
    PpoConfig cfg;  // clip_range 0.2
    MlpWorkspace ws, scratch;
    std::vector<double> grad;

    struct Case {
        double ratio, adv, expected_objective;
    };
    // min(rho*A, clip(rho)*A) with eps = 0.2
    const Case cases[] = {
        {1.5, 1.0, 1.2},    // positive advantage, ratio above: clipped to 1.2
        {1.5, -1.0, -1.5},  // negative advantage, ratio above: unclipped -1.5
        {0.5, 1.0, 0.5},    // positive advantage, ratio below: unclipped 0.5
        {0.5, -1.0, -0.8},  // negative advantage, ratio below: clipped -0.8
    };
    for (const auto& c : cases) {
        auto s = make_sample(c.ratio, c.adv);
        const auto stats = epirl::ppo_loss_grad(s.params, s.batch(), cfg, grad, ws, scratch);
        REQUIRE(stats.policy_loss == Catch::Approx(-c.expected_objective).margin(1e-12));
        REQUIRE(stats.clip_fraction == 1.0);
    }
}

TEST_CASE("per-sample objective is always the min of both surrogates", "[ppo]") {
    PpoConfig cfg;
    MlpWorkspace ws, scratch;
    std::vector<double> grad;
    RngStream rng(17, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const double ratio = rng.uniform(0.3, 2.5);
        const double adv = rng.uniform(-2.0, 2.0);
        auto s = make_sample(ratio, adv);
        const auto stats = epirl::ppo_loss_grad(s.params, s.batch(), cfg, grad, ws, scratch);
        const double surr1 = ratio * adv;
        const double surr2 = std::clamp(ratio, 0.8, 1.2) * adv;
        REQUIRE(stats.policy_loss ==
                Catch::Approx(-std::min(surr1, surr2)).margin(1e-9));
    }
}

TEST_CASE("backpropagated gradients match central finite differences", "[ppo]") {
    // Random small networks and batches; the full loss (policy + value +
    // entropy) must match finite differences to high relative accuracy.
    RngStream rng(23, 0);
    PpoConfig cfg;
    cfg.value_coef = 0.5;
    cfg.entropy_coef = 0.01;

    double worst = 0.0;
    for (int trial = 0; trial < 6; ++trial) {
        MlpConfig net;
        net.input_dim = 4;
        net.hidden = {5};
        net.n_actions = 3;
        MlpParams params = epirl::init_mlp(net, rng);
        for (double& w : params.weights) w += 0.05 * rng.next_gaussian();

        const std::int64_t n = 8;
        std::vector<double> obs(static_cast<std::size_t>(n) * 4);
        std::vector<std::int64_t> actions(static_cast<std::size_t>(n));
        std::vector<double> old_logp(static_cast<std::size_t>(n));
        std::vector<double> advantages(static_cast<std::size_t>(n));
        std::vector<double> returns(static_cast<std::size_t>(n));
        for (std::int64_t k = 0; k < n; ++k) {
            for (int d = 0; d < 4; ++d)
                obs[static_cast<std::size_t>(k * 4 + d)] = rng.next_double();
            actions[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(rng.next_below(3));
            old_logp[static_cast<std::size_t>(k)] = std::log(rng.uniform(0.2, 0.6));
            advantages[static_cast<std::size_t>(k)] = rng.next_gaussian();
            returns[static_cast<std::size_t>(k)] = rng.next_gaussian();
        }
        PpoBatch batch;
        batch.n = n;
        batch.obs_dim = 4;
        batch.observations = obs.data();
        batch.actions = actions.data();
        batch.old_log_probs = old_logp.data();
        batch.advantages = advantages.data();
        batch.returns = returns.data();

        MlpWorkspace ws, scratch;
        std::vector<double> grad;
        epirl::ppo_loss_grad(params, batch, cfg, grad, ws, scratch);

        auto loss_at = [&](const std::vector<double>& w) {
            MlpParams probe = params;
            probe.weights = w;
            MlpWorkspace pw, psc;
            std::vector<double> pg;
            return epirl::ppo_loss_grad(probe, batch, cfg, pg, pw, psc).total;
        };
        for (std::size_t i = 0; i < params.weights.size(); ++i) {
            const double fd = testsupport::central_diff(loss_at, params.weights, i, 1e-5);
            const double scale = std::max({1.0, std::fabs(grad[i]), std::fabs(fd)});
            worst = std::max(worst, std::fabs(grad[i] - fd) / scale);
        }
    }
    REQUIRE(worst < 1e-4);
}

TEST_CASE("constant advantages normalize to a no-op policy update", "[ppo]") {
    // Per-minibatch normalization maps a constant advantage vector to zero,
    // so with value and entropy terms disabled the update cannot move the
    // parameters.
    PpoConfig cfg;
    cfg.rollout_steps = 64;
    cfg.minibatch = 32;
    cfg.epochs_per_update = 3;
    cfg.value_coef = 0.0;
    cfg.entropy_coef = 0.0;

    RngStream init_rng(29, 0);
    MlpParams params = epirl::init_mlp(MlpConfig{}, init_rng);
    const std::vector<double> before = params.weights;

    RolloutBuffer buf(64, 4);
    RngStream rng(31, 0);
    MlpWorkspace ws;
    for (std::int64_t t = 0; t < 64; ++t) {
        for (int d = 0; d < 4; ++d) buf.obs_row(t)[d] = rng.next_double();
        const auto ti = static_cast<std::size_t>(t);
        const auto d = epirl::act(params, buf.obs_row(t), rng, ws);
        buf.actions[ti] = d.action;
        buf.log_probs[ti] = d.log_prob;
        buf.values[ti] = d.value;
        buf.rewards[ti] = 1.0;  // constant reward
        buf.dones[ti] = 1;      // every step terminal -> advantage = 1 - V
    }
    // Force exactly constant advantages regardless of value outputs.
    epirl::compute_gae(buf, 0.0, cfg);
    for (auto& a : buf.advantages) a = 0.875;

    RngStream shuffle(37, 0);
    epirl::AdamState adam(params.layout.size);
    epirl::ppo_update(params, buf, cfg, shuffle, adam);
    REQUIRE(params.weights == before);
}

TEST_CASE("non-finite rollouts abort the update", "[ppo]") {
    PpoConfig cfg;
    cfg.rollout_steps = 16;
    cfg.minibatch = 16;
    RngStream init_rng(41, 0);
    MlpParams params = epirl::init_mlp(MlpConfig{}, init_rng);
    RolloutBuffer buf(16, 4);
    RngStream rng(43, 0);
    MlpWorkspace ws;
    for (std::int64_t t = 0; t < 16; ++t) {
        for (int d = 0; d < 4; ++d) buf.obs_row(t)[d] = rng.next_double();
        const auto ti = static_cast<std::size_t>(t);
        const auto d = epirl::act(params, buf.obs_row(t), rng, ws);
        buf.actions[ti] = d.action;
        buf.log_probs[ti] = d.log_prob;
        buf.values[ti] = d.value;
        buf.rewards[ti] = 1.0;
        buf.dones[ti] = 0;
    }
    buf.rewards[7] = std::numeric_limits<double>::quiet_NaN();
    epirl::compute_gae(buf, 0.0, cfg);
    RngStream shuffle(47, 0);
    epirl::AdamState adam(params.layout.size);
    REQUIRE_THROWS_AS(epirl::ppo_update(params, buf, cfg, shuffle, adam),
                      epirl::NonFiniteLoss);
}

TEST_CASE("updates are a pure function of the shuffle stream", "[ppo]") {
    PpoConfig cfg;
    cfg.rollout_steps = 64;
    cfg.minibatch = 16;
    cfg.epochs_per_update = 2;

    auto build = [&](MlpParams& params, RolloutBuffer& buf) {
        RngStream rng(53, 0);
        MlpWorkspace ws;
        for (std::int64_t t = 0; t < 64; ++t) {
            for (int d = 0; d < 4; ++d) buf.obs_row(t)[d] = rng.next_double();
            const auto ti = static_cast<std::size_t>(t);
            const auto d = epirl::act(params, buf.obs_row(t), rng, ws);
            buf.actions[ti] = d.action;
            buf.log_probs[ti] = d.log_prob;
            buf.values[ti] = d.value;
            buf.rewards[ti] = rng.uniform(-1.0, 1.0);
            buf.dones[ti] = rng.next_below(8) == 0 ? 1 : 0;
        }
        epirl::compute_gae(buf, 0.25, cfg);
    };

    RngStream init_a(59, 0), init_b(59, 0);
    MlpParams pa = epirl::init_mlp(MlpConfig{}, init_a);
    MlpParams pb = epirl::init_mlp(MlpConfig{}, init_b);
    RolloutBuffer ba(64, 4), bb(64, 4);
    build(pa, ba);
    build(pb, bb);

    RngStream sa(61, 0), sb(61, 0);
    epirl::AdamState aa(pa.layout.size), ab(pb.layout.size);
    const auto stats_a = epirl::ppo_update(pa, ba, cfg, sa, aa);
    const auto stats_b = epirl::ppo_update(pb, bb, cfg, sb, ab);
    REQUIRE(pa.weights == pb.weights);
    REQUIRE(stats_a.policy_loss == stats_b.policy_loss);
    REQUIRE(stats_a.minibatches == stats_b.minibatches);

    // A different shuffle stream visits minibatches in a different order and
    // lands on different weights.
    RngStream init_c(59, 0);
    MlpParams pc = epirl::init_mlp(MlpConfig{}, init_c);
    RolloutBuffer bc(64, 4);
    build(pc, bc);
    RngStream sc(62, 0);
    epirl::AdamState ac(pc.layout.size);
    epirl::ppo_update(pc, bc, cfg, sc, ac);
    REQUIRE(pc.weights != pa.weights);
}

TEST_CASE("adaptive-moment steps follow the bias-corrected formula", "[ppo]") {
    std::vector<double> w{0.0};
    epirl::AdamState adam(1);
    const double g1 = 3.0, lr = 3e-4;
    adam.apply(w, {g1}, lr);
    // Step 1: mhat = g, vhat = g^2 -> delta = lr * g / (|g| + eps).
    const double expect1 = -lr * g1 / (std::fabs(g1) + 1e-8);
    REQUIRE(w[0] == Catch::Approx(expect1).margin(1e-18));

    // Step 2 with a different gradient, tracked by hand.
    const double g2 = -1.0;
    double m = 0.1 * g1;
    double v = 0.001 * g1 * g1;
    m = 0.9 * m + 0.1 * g2;
    v = 0.999 * v + 0.001 * g2 * g2;
    const double mhat = m / (1.0 - 0.9 * 0.9);
    const double vhat = v / (1.0 - 0.999 * 0.999);
    const double expect2 = expect1 - lr * mhat / (std::sqrt(vhat) + 1e-8);
    adam.apply(w, {g2}, lr);
    REQUIRE(w[0] == Catch::Approx(expect2).margin(1e-15));
}

TEST_CASE("gradient clipping rescales to the global norm bound", "[ppo]") {
    std::vector<double> g{3.0, 4.0};  // norm 5
    const double pre = epirl::clip_grad_norm(g, 0.5);
    REQUIRE(pre == Catch::Approx(5.0).margin(1e-12));
    REQUIRE(std::sqrt(g[0] * g[0] + g[1] * g[1]) == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(g[0] / g[1] == Catch::Approx(0.75).margin(1e-12));  // direction kept

    std::vector<double> small{0.1, 0.2};
    const std::vector<double> copy = small;
    epirl::clip_grad_norm(small, 0.5);
    REQUIRE(small == copy);
}

TEST_CASE("ppo config round-trips through JSON and validates", "[ppo]") {
    PpoConfig c;
    c.total_timesteps = 12345;
    c.entropy_coef = 0.01;
    nlohmann::json j = c;
    REQUIRE(j.get<PpoConfig>() == c);

    PpoConfig bad;
    bad.clip_range = 1.0;
    REQUIRE_THROWS_AS(bad.validate(), epirl::InvalidConfig);
    PpoConfig bad2;
    bad2.learning_rate = 0.0;
    REQUIRE_THROWS_AS(bad2.validate(), epirl::InvalidConfig);
}
