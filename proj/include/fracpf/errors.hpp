#pragma once

#include <stdexcept>
#include <string>

namespace fracpf {

/// Violated precondition between cooperating components (mesh mismatch,
/// wrong sequence length, SOE queried outside its window).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A time step could not be completed (linear solver breakdown, scalar
/// closure degenerate). The caller may retry with a smaller step.
class StepFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ContractError(what);
}

inline void require_param(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace detail
}  // namespace fracpf
