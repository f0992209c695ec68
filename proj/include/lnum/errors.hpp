#pragma once

#include <stdexcept>
#include <string>

namespace lnum {

// Bad topology, state, action or config input.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Value outside a declared domain (job size, utility argument, ...).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Internal bookkeeping broke (e.g. feedback for a job nobody injected).
// Callers must not continue the run.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

// Iterative solver stopped before reaching its tolerance.
struct ConvergenceError : std::runtime_error {
  double final_gap;
  ConvergenceError(const std::string& msg, double gap)
      : std::runtime_error(msg), final_gap(gap) {}
};

// Requested computation would exceed a sanity budget (grid too large, ...).
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Capacity region has (numerically) empty interior.
struct NonInteriorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lnum
