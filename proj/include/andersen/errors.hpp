#pragma once

#include <stdexcept>
#include <string>

namespace andersen {

// Invalid or inconsistent user input (config file, CLI flags, bad parameter
// combinations).  Maps to process exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failure while running a simulation or estimator (non-finite state, too many
// aborted replicas, ...).  Maps to process exit code 2.
struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rate fitting asked for on a window where -log(mean) is undefined.
struct FitDomainError : SimulationError {
  using SimulationError::SimulationError;
};

}  // namespace andersen
