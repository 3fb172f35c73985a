#pragma once

#include <stdexcept>
#include <string>

namespace epirl {

/// Parameter or configuration values outside their documented domain.
struct InvalidParams : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidConfig : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// step() was called on an environment whose episode already ended.
struct EpisodeFinished : std::logic_error {
    using std::logic_error::logic_error;
};

/// A PPO loss or gradient became NaN/inf; carries diagnostics in what().
struct NonFiniteLoss : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Checkpoint file failed structural validation or integrity check.
struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ChecksumMismatch : CheckpointError {
    using CheckpointError::CheckpointError;
};

} // namespace epirl
