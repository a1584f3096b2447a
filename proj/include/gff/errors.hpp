#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gff {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Discretization produced no usable site set (empty, disconnected, or holey).
struct EmptyDiscretization : Error {
  using Error::Error;
};
struct DisconnectedDiscretization : EmptyDiscretization {
  using EmptyDiscretization::EmptyDiscretization;
};

// A delta-interior collapsed or lost C^2 regularity (delta >= 1/kappa_max).
struct DegenerateInterior : Error {
  using Error::Error;
};

struct NoConvergence : Error {
  NoConvergence(const std::string& what, double residual)
      : Error(what), residual(residual) {}
  double residual;
};

struct DomainTooLarge : Error {
  using Error::Error;
};

struct StepBudgetExceeded : Error {
  StepBudgetExceeded(const std::string& what, std::uint64_t steps)
      : Error(what), steps(steps) {}
  std::uint64_t steps;
};

struct ConfigInvalid : Error {
  ConfigInvalid(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field(field) {}
  std::string field;
};

}  // namespace gff
