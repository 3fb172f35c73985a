#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "epirl/errors.hpp"
#include "epirl/rng.hpp"

namespace epirl {

/// Two-headed MLP: shared tanh trunk, linear policy head (one logit per
/// action) and linear scalar value head.
struct MlpConfig {
    std::int64_t input_dim = 4;
    std::vector<std::int64_t> hidden{64, 64};
    std::int64_t n_actions = 3;

    void validate() const {
        if (input_dim < 1) throw InvalidConfig("input_dim must be >= 1");
        if (n_actions < 2) throw InvalidConfig("n_actions must be >= 2");
        for (auto h : hidden)
            if (h < 1) throw InvalidConfig("hidden layer sizes must be >= 1");
    }

    bool operator==(const MlpConfig&) const = default;
};

inline void to_json(nlohmann::json& j, const MlpConfig& c) {
    j = nlohmann::json{{"input_dim", c.input_dim}, {"hidden", c.hidden},
                       {"n_actions", c.n_actions}};
}

inline void from_json(const nlohmann::json& j, MlpConfig& c) {
    j.at("input_dim").get_to(c.input_dim);
    j.at("hidden").get_to(c.hidden);
    j.at("n_actions").get_to(c.n_actions);
}

/// Offsets of each linear layer inside the flat weight vector. Weight
/// matrices are row-major (rows = outputs), biases follow their matrix.
struct MlpLayout {
    struct Linear {
        std::size_t w = 0, b = 0;
        std::int64_t rows = 0, cols = 0;
    };
    std::vector<Linear> trunk;
    Linear policy, value;
    std::size_t size = 0;
};

inline MlpLayout make_layout(const MlpConfig& config) {
    config.validate();
    MlpLayout layout;
    std::size_t at = 0;
    auto push = [&at](std::int64_t rows, std::int64_t cols) {
        MlpLayout::Linear lin;
        lin.rows = rows;
        lin.cols = cols;
        lin.w = at;
        at += static_cast<std::size_t>(rows * cols);
        lin.b = at;
        at += static_cast<std::size_t>(rows);
        return lin;
    };
    std::int64_t in = config.input_dim;
    for (auto h : config.hidden) {
        layout.trunk.push_back(push(h, in));
        in = h;
    }
    layout.policy = push(config.n_actions, in);
    layout.value = push(1, in);
    layout.size = at;
    return layout;
}

struct MlpParams {
    MlpConfig config;
    MlpLayout layout;
    std::vector<double> weights;

    explicit MlpParams(MlpConfig cfg = {}) : config(std::move(cfg)), layout(make_layout(config)) {
        weights.assign(layout.size, 0.0);
    }
};

namespace detail {

/// Orthogonal-ish init: draw a gaussian matrix, orthonormalize whichever of
/// rows/columns fits (modified Gram-Schmidt), then scale by `gain`.
inline void fill_orthogonal(RngStream& rng, double* w, std::int64_t rows, std::int64_t cols,
                            double gain) {
    const std::int64_t r = rows, c = cols;
    for (std::int64_t k = 0; k < r * c; ++k) w[k] = rng.next_gaussian();

    const bool by_rows = r <= c; // orthonormalize the smaller set of vectors
    const std::int64_t nvec = by_rows ? r : c;
    const std::int64_t dim = by_rows ? c : r;
    auto at = [&](std::int64_t v, std::int64_t d) -> double& {
        return by_rows ? w[v * c + d] : w[d * c + v];
    };
    for (std::int64_t v = 0; v < nvec; ++v) {
        for (;;) {
            for (std::int64_t u = 0; u < v; ++u) {
                double dot = 0.0;
                for (std::int64_t d = 0; d < dim; ++d) dot += at(v, d) * at(u, d);
                for (std::int64_t d = 0; d < dim; ++d) at(v, d) -= dot * at(u, d);
            }
            double norm2 = 0.0;
            for (std::int64_t d = 0; d < dim; ++d) norm2 += at(v, d) * at(v, d);
            if (norm2 > 1e-12) {
                const double inv = 1.0 / std::sqrt(norm2);
                for (std::int64_t d = 0; d < dim; ++d) at(v, d) *= inv;
                break;
            }
            // Degenerate draw (essentially never happens); redraw this vector.
            for (std::int64_t d = 0; d < dim; ++d) at(v, d) = rng.next_gaussian();
        }
    }
    for (std::int64_t k = 0; k < r * c; ++k) w[k] *= gain;
}

} // namespace detail

/// Gains follow the usual actor-critic convention: sqrt(2) for the trunk,
/// 0.01 for the policy head (near-uniform initial policy), 1 for the value
/// head. Biases start at zero.
inline MlpParams init_mlp(const MlpConfig& config, RngStream& rng) {
    MlpParams params(config);
    double* w = params.weights.data();
    for (const auto& lin : params.layout.trunk)
        detail::fill_orthogonal(rng, w + lin.w, lin.rows, lin.cols, std::sqrt(2.0));
    detail::fill_orthogonal(rng, w + params.layout.policy.w, params.layout.policy.rows,
                            params.layout.policy.cols, 0.01);
    detail::fill_orthogonal(rng, w + params.layout.value.w, params.layout.value.rows,
                            params.layout.value.cols, 1.0);
    return params;
}

/// Per-forward scratch. h[0] is the input, h[l+1] the post-tanh output of
/// trunk layer l; reused across calls to avoid reallocation.
struct MlpWorkspace {
    std::vector<std::vector<double>> h;
    std::vector<double> logits;
    double value = 0.0;
    std::vector<double> dh_a, dh_b; // backward scratch
};

namespace detail {

inline void linear_forward(const double* w, const MlpLayout::Linear& lin, const double* x,
                           double* y) {
    for (std::int64_t row = 0; row < lin.rows; ++row) {
        double acc = w[lin.b + static_cast<std::size_t>(row)];
        const double* wr = w + lin.w + static_cast<std::size_t>(row * lin.cols);
        for (std::int64_t col = 0; col < lin.cols; ++col) acc += wr[col] * x[col];
        y[row] = acc;
    }
}

} // namespace detail

inline void mlp_forward(const MlpParams& params, const double* x, MlpWorkspace& ws) {
    const auto& layout = params.layout;
    const double* w = params.weights.data();
    const std::size_t n_trunk = layout.trunk.size();
    ws.h.resize(n_trunk + 1);
    ws.h[0].assign(x, x + params.config.input_dim);
    for (std::size_t l = 0; l < n_trunk; ++l) {
        const auto& lin = layout.trunk[l];
        ws.h[l + 1].resize(static_cast<std::size_t>(lin.rows));
        detail::linear_forward(w, lin, ws.h[l].data(), ws.h[l + 1].data());
        for (double& v : ws.h[l + 1]) v = std::tanh(v);
    }
    ws.logits.resize(static_cast<std::size_t>(params.config.n_actions));
    detail::linear_forward(w, layout.policy, ws.h[n_trunk].data(), ws.logits.data());
    double value = 0.0;
    detail::linear_forward(w, layout.value, ws.h[n_trunk].data(), &value);
    ws.value = value;
}

/// Accumulates d(loss)/d(weights) into `grad` given upstream gradients on the
/// logits and the value output. Requires the workspace of the matching
/// forward pass.
inline void mlp_backward(const MlpParams& params, const MlpWorkspace& ws, const double* dlogits,
                         double dvalue, std::vector<double>& grad, MlpWorkspace& scratch) {
    const auto& layout = params.layout;
    const double* w = params.weights.data();
    double* g = grad.data();
    const std::size_t n_trunk = layout.trunk.size();
    const std::vector<double>& top = ws.h[n_trunk];

    auto& dh = scratch.dh_a;
    auto& dh_prev = scratch.dh_b;
    dh.assign(top.size(), 0.0);

    // Policy head.
    {
        const auto& lin = layout.policy;
        for (std::int64_t row = 0; row < lin.rows; ++row) {
            const double d = dlogits[row];
            if (d == 0.0) continue;
            double* gr = g + lin.w + static_cast<std::size_t>(row * lin.cols);
            const double* wr = w + lin.w + static_cast<std::size_t>(row * lin.cols);
            for (std::int64_t col = 0; col < lin.cols; ++col) {
                gr[col] += d * top[static_cast<std::size_t>(col)];
                dh[static_cast<std::size_t>(col)] += d * wr[col];
            }
            g[lin.b + static_cast<std::size_t>(row)] += d;
        }
    }
    // Value head.
    if (dvalue != 0.0) {
        const auto& lin = layout.value;
        double* gr = g + lin.w;
        const double* wr = w + lin.w;
        for (std::int64_t col = 0; col < lin.cols; ++col) {
            gr[col] += dvalue * top[static_cast<std::size_t>(col)];
            dh[static_cast<std::size_t>(col)] += dvalue * wr[col];
        }
        g[lin.b] += dvalue;
    }
    // Trunk, top down.
    for (std::size_t l = n_trunk; l-- > 0;) {
        const auto& lin = layout.trunk[l];
        const std::vector<double>& out = ws.h[l + 1];
        const std::vector<double>& in = ws.h[l];
        dh_prev.assign(in.size(), 0.0);
        for (std::int64_t row = 0; row < lin.rows; ++row) {
            const double hr = out[static_cast<std::size_t>(row)];
            const double dz = dh[static_cast<std::size_t>(row)] * (1.0 - hr * hr);
            if (dz == 0.0) continue;
            double* gr = g + lin.w + static_cast<std::size_t>(row * lin.cols);
            const double* wr = w + lin.w + static_cast<std::size_t>(row * lin.cols);
            for (std::int64_t col = 0; col < lin.cols; ++col) {
                gr[col] += dz * in[static_cast<std::size_t>(col)];
                dh_prev[static_cast<std::size_t>(col)] += dz * wr[col];
            }
            g[lin.b + static_cast<std::size_t>(row)] += dz;
        }
        std::swap(dh, dh_prev);
    }
}

/// Numerically stable log-softmax (in place: logits -> log-probabilities).
inline void log_softmax_inplace(std::vector<double>& z) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - zmax);
    const double lse = zmax + std::log(sum);
    for (double& v : z) v -= lse;
}

inline void softmax_inplace(std::vector<double>& z) {
    log_softmax_inplace(z);
    for (double& v : z) v = std::exp(v);
}

/// Categorical sample from logits via inverse CDF on one uniform draw.
inline std::int64_t sample_action(const std::vector<double>& logits, RngStream& rng) {
    std::vector<double> p = logits;
    softmax_inplace(p);
    const double u = rng.next_double();
    double cdf = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) {
        cdf += p[a];
        if (u < cdf) return static_cast<std::int64_t>(a);
    }
    return static_cast<std::int64_t>(p.size()) - 1;
}

/// Argmax action; ties break toward the lowest index.
inline std::int64_t greedy_action(const std::vector<double>& logits) {
    return static_cast<std::int64_t>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
}

struct PolicyDecision {
    std::int64_t action = 0;
    double log_prob = 0.0;
    double value = 0.0;
};

/// Forward + sample in one call (rollout collection path).
inline PolicyDecision act(const MlpParams& params, const double* obs, RngStream& rng,
                          MlpWorkspace& ws) {
    mlp_forward(params, obs, ws);
    PolicyDecision d;
    d.value = ws.value;
    d.action = sample_action(ws.logits, rng);
    std::vector<double> logp = ws.logits;
    log_softmax_inplace(logp);
    d.log_prob = logp[static_cast<std::size_t>(d.action)];
    return d;
}

} // namespace epirl
