#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "epirl/mlp.hpp"
#include "epirl/rng.hpp"
#include "support/reference.hpp"

using epirl::MlpConfig;
using epirl::MlpParams;
using epirl::MlpWorkspace;
using epirl::RngStream;

TEST_CASE("zero weights yield zero logits, zero value, uniform policy", "[mlp]") {
    MlpParams params;  // default [4, 64, 64] + 3 actions, zero-filled
    MlpWorkspace ws;
    const double obs[4] = {0.3, 0.1, 0.6, 0.5};
    epirl::mlp_forward(params, obs, ws);
    REQUIRE(ws.logits == std::vector<double>{0.0, 0.0, 0.0});
    REQUIRE(ws.value == 0.0);
    std::vector<double> probs = ws.logits;
    epirl::softmax_inplace(probs);
    for (double p : probs) REQUIRE(p == Catch::Approx(1.0 / 3.0).margin(1e-15));
}

TEST_CASE("forward pass is deterministic", "[mlp]") {
    RngStream rng(1, 0);
    const MlpParams params = epirl::init_mlp(MlpConfig{}, rng);
    MlpWorkspace w1, w2;
    const double obs[4] = {0.9, 0.02, 0.08, 0.25};
    epirl::mlp_forward(params, obs, w1);
    epirl::mlp_forward(params, obs, w2);
    REQUIRE(w1.logits == w2.logits);
    REQUIRE(w1.value == w2.value);
}

TEST_CASE("forward pass matches an independent reference implementation", "[mlp]") {
    RngStream rng(7, 0);
    for (int trial = 0; trial < 20; ++trial) {
        MlpConfig cfg;
        cfg.input_dim = 4;
        cfg.hidden = {static_cast<std::int64_t>(3 + rng.next_below(8)),
                      static_cast<std::int64_t>(3 + rng.next_below(8))};
        cfg.n_actions = 3;
        MlpParams params = epirl::init_mlp(cfg, rng);
        // Perturb away from the orthogonal structure so the check is generic.
        for (double& w : params.weights) w += 0.1 * rng.next_gaussian();

        std::vector<double> obs(4);
        for (double& x : obs) x = rng.next_double();

        MlpWorkspace ws;
        epirl::mlp_forward(params, obs.data(), ws);
        const auto ref = testsupport::ref_mlp_forward(params, obs);
        REQUIRE(ws.value == Catch::Approx(ref.value).margin(1e-10));
        REQUIRE(ws.logits.size() == ref.logits.size());
        for (std::size_t k = 0; k < ref.logits.size(); ++k)
            REQUIRE(ws.logits[k] == Catch::Approx(ref.logits[k]).margin(1e-10));
    }
}

TEST_CASE("softmax probabilities sum to one for any finite logits", "[mlp]") {
    RngStream rng(9, 0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> z(3);
        for (double& v : z) v = rng.uniform(-40.0, 40.0);
        if (trial % 3 == 0)
            for (double& v : z) v += 1000.0;  // large common offset must not overflow
        epirl::softmax_inplace(z);
        double sum = 0.0;
        for (double p : z) {
            REQUIRE(p >= 0.0);
            sum += p;
        }
        REQUIRE(std::fabs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("uniform logits sample uniformly", "[mlp]") {
    RngStream rng(11, 0);
    const std::vector<double> logits{0.0, 0.0, 0.0};
    std::array<int, 3> counts{0, 0, 0};
    const int n = 100000;
    for (int k = 0; k < n; ++k)
        ++counts[static_cast<std::size_t>(epirl::sample_action(logits, rng))];
    for (int c : counts)
        REQUIRE(std::fabs(static_cast<double>(c) / n - 1.0 / 3.0) < 0.01);
}

TEST_CASE("dominant logit is sampled almost surely", "[mlp]") {
    RngStream rng(12, 0);
    const std::vector<double> logits{50.0, 0.0, 0.0};
    int zeros = 0;
    const int n = 100000;
    for (int k = 0; k < n; ++k)
        if (epirl::sample_action(logits, rng) == 0) ++zeros;
    REQUIRE(static_cast<double>(zeros) / n > 0.999);
}

TEST_CASE("log probabilities match the analytic softmax", "[mlp]") {
    RngStream rng(13, 0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> logits(3);
        for (double& v : logits) v = rng.uniform(-5.0, 5.0);
        std::vector<double> logp = logits;
        epirl::log_softmax_inplace(logp);
        // direct evaluation: log(p_a) = z_a - log(sum exp z)
        double denom = 0.0;
        for (double z : logits) denom += std::exp(z);
        for (std::size_t a = 0; a < 3; ++a)
            REQUIRE(logp[a] == Catch::Approx(logits[a] - std::log(denom)).margin(1e-12));
    }
}

TEST_CASE("greedy action picks the argmax", "[mlp]") {
    REQUIRE(epirl::greedy_action({0.1, 0.9, 0.3}) == 1);
    REQUIRE(epirl::greedy_action({2.0, -1.0, 0.0}) == 0);
    REQUIRE(epirl::greedy_action({-3.0, -2.0, -1.0}) == 2);
}

TEST_CASE("act returns a consistent decision", "[mlp]") {
    RngStream init_rng(14, 0);
    const MlpParams params = epirl::init_mlp(MlpConfig{}, init_rng);
    RngStream rng(15, 0);
    MlpWorkspace ws;
    const double obs[4] = {0.99, 0.01, 0.0, 0.0};
    for (int k = 0; k < 50; ++k) {
        const auto d = epirl::act(params, obs, rng, ws);
        REQUIRE(d.action >= 0);
        REQUIRE(d.action < 3);
        // log_prob is the log-softmax of the logits at the sampled action
        std::vector<double> logp = ws.logits;
        epirl::log_softmax_inplace(logp);
        REQUIRE(d.log_prob == Catch::Approx(logp[static_cast<std::size_t>(d.action)])
                                  .margin(1e-12));
        REQUIRE(d.value == ws.value);
    }
}

TEST_CASE("initialization scales each block by its gain", "[mlp]") {
    RngStream rng(16, 0);
    const MlpParams params = epirl::init_mlp(MlpConfig{}, rng);
    const auto& lay = params.layout;

    // Policy head gain 0.01: all entries tiny, giving a near-uniform policy.
    double max_policy = 0.0;
    for (std::int64_t k = 0; k < lay.policy.rows * lay.policy.cols; ++k)
        max_policy = std::max(max_policy,
                              std::fabs(params.weights[lay.policy.w + static_cast<std::size_t>(k)]));
    REQUIRE(max_policy < 0.05);
    REQUIRE(max_policy > 0.0);

    // The first trunk layer is 64x4, so its four columns form the
    // orthonormal set; after the sqrt(2) gain each column norm is sqrt(2)
    // and distinct columns stay orthogonal.
    const auto& first = lay.trunk[0];
    auto col_dot = [&](std::int64_t c1, std::int64_t c2) {
        double acc = 0.0;
        for (std::int64_t r = 0; r < first.rows; ++r)
            acc += params.weights[first.w + static_cast<std::size_t>(r * first.cols + c1)] *
                   params.weights[first.w + static_cast<std::size_t>(r * first.cols + c2)];
        return acc;
    };
    for (std::int64_t c = 0; c < first.cols; ++c)
        REQUIRE(std::sqrt(col_dot(c, c)) == Catch::Approx(std::sqrt(2.0)).margin(1e-9));
    for (std::int64_t c1 = 0; c1 < first.cols; ++c1)
        for (std::int64_t c2 = c1 + 1; c2 < first.cols; ++c2)
            REQUIRE(std::fabs(col_dot(c1, c2)) < 1e-9);

    // Biases start at zero.
    for (std::int64_t r = 0; r < first.rows; ++r)
        REQUIRE(params.weights[first.b + static_cast<std::size_t>(r)] == 0.0);
}

TEST_CASE("layout is packed and sized exactly", "[mlp]") {
    MlpConfig cfg;
    cfg.input_dim = 4;
    cfg.hidden = {64, 64};
    cfg.n_actions = 3;
    const auto lay = epirl::make_layout(cfg);
    // (4*64+64) + (64*64+64) + (64*3+3) + (64*1+1) = 320+4160+195+65
    REQUIRE(lay.size == 4740);
    REQUIRE(lay.trunk.size() == 2);
    REQUIRE(lay.policy.rows == 3);
    REQUIRE(lay.value.rows == 1);
}

TEST_CASE("invalid mlp configs are rejected", "[mlp]") {
    MlpConfig bad;
    bad.input_dim = 0;
    REQUIRE_THROWS_AS(bad.validate(), epirl::InvalidConfig);
    MlpConfig bad2;
    bad2.hidden = {8, 0};
    REQUIRE_THROWS_AS(bad2.validate(), epirl::InvalidConfig);
}
