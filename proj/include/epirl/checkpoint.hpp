#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "epirl/env.hpp"
#include "epirl/errors.hpp"
#include "epirl/mlp.hpp"
#include "epirl/ppo.hpp"
#include "epirl/rng.hpp"

namespace epirl {

struct PolicyCheckpoint {
    std::int64_t version = 1;
    MlpConfig architecture;
    std::vector<double> weights;
    EnvConfig env_config;
    PpoConfig ppo_config;
    std::uint64_t seed = 0;
    std::int64_t timesteps_trained = 0;

    bool operator==(const PolicyCheckpoint&) const = default;

    MlpParams to_params() const {
        MlpParams params(architecture);
        if (weights.size() != params.layout.size)
            throw CheckpointError("weight vector length " + std::to_string(weights.size()) +
                                  " does not match architecture (expected " +
                                  std::to_string(params.layout.size) + ")");
        params.weights = weights;
        return params;
    }
};

namespace detail {

/// Checksum over the IEEE-754 bit patterns of the weights, in order
/// (whitespace/format independent).
inline std::uint64_t weights_checksum(const std::vector<double>& weights) {
    std::uint64_t h = 14695981039346656037ull;
    for (double w : weights) {
        std::uint64_t bits;
        std::memcpy(&bits, &w, sizeof bits);
        for (int k = 0; k < 8; ++k) {
            h ^= (bits >> (8 * k)) & 0xff;
            h *= 1099511628211ull;
        }
    }
    return h;
}

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // Bare "-0" is valid JSON but parses as the integer zero, losing the
    // sign bit; force a float-typed literal so the bit pattern survives.
    if (std::strcmp(buf, "-0") == 0) return "-0.0";
    return buf;
}

} // namespace detail

/// Serializes a checkpoint. Weights are written as decimals with 17
/// significant digits so the parse round-trips every double bit-for-bit;
/// `weights_checksum` guards against truncated or edited files.
inline std::string checkpoint_to_string(const PolicyCheckpoint& cp) {
    for (double w : cp.weights)
        if (!std::isfinite(w)) throw CheckpointError("refusing to save non-finite weights");
    static constexpr const char* kPlaceholder = "@WEIGHTS@";
    nlohmann::json j{{"version", cp.version},
                     {"architecture", cp.architecture},
                     {"weights", kPlaceholder},
                     {"weights_checksum", detail::weights_checksum(cp.weights)},
                     {"env_config", cp.env_config},
                     {"ppo_config", cp.ppo_config},
                     {"seed", cp.seed},
                     {"timesteps_trained", cp.timesteps_trained}};
    std::string out = j.dump(2);

    std::string arr = "[";
    for (std::size_t i = 0; i < cp.weights.size(); ++i) {
        if (i) arr += ',';
        arr += detail::format_g17(cp.weights[i]);
    }
    arr += ']';
    const std::string needle = std::string("\"") + kPlaceholder + "\"";
    const auto at = out.find(needle);
    out.replace(at, needle.size(), arr);
    out += '\n';
    return out;
}

inline PolicyCheckpoint checkpoint_from_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("checkpoint is not valid JSON: ") + e.what());
    }
    PolicyCheckpoint cp;
    try {
        j.at("version").get_to(cp.version);
        if (cp.version != 1)
            throw CheckpointError("unsupported checkpoint version " + std::to_string(cp.version));
        j.at("architecture").get_to(cp.architecture);
        j.at("weights").get_to(cp.weights);
        j.at("env_config").get_to(cp.env_config);
        j.at("ppo_config").get_to(cp.ppo_config);
        j.at("seed").get_to(cp.seed);
        j.at("timesteps_trained").get_to(cp.timesteps_trained);
        const auto stored = j.at("weights_checksum").get<std::uint64_t>();
        const auto actual = detail::weights_checksum(cp.weights);
        if (stored != actual)
            throw ChecksumMismatch("checkpoint weights_checksum mismatch (stored " +
                                   std::to_string(stored) + ", recomputed " +
                                   std::to_string(actual) + ")");
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
    }
    for (double w : cp.weights)
        if (!std::isfinite(w)) throw CheckpointError("checkpoint contains non-finite weights");
    cp.to_params(); // validates weight count against the architecture
    cp.env_config.validate();
    cp.ppo_config.validate();
    return cp;
}

} // namespace epirl
