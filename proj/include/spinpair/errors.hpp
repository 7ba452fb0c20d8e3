#pragma once

#include <stdexcept>
#include <string>

namespace spinpair {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

#define SPINPAIR_ERROR(Name, Kind)                                  \
  struct Name : Error {                                             \
    using Error::Error;                                             \
    const char* kind() const noexcept override { return Kind; }     \
  };

SPINPAIR_ERROR(InvalidParameter, "invalid_parameter")
SPINPAIR_ERROR(ResourceError, "resource")
SPINPAIR_ERROR(DegeneracyError, "degeneracy")
SPINPAIR_ERROR(NumericalInconsistency, "numerical_inconsistency")
SPINPAIR_ERROR(ModeError, "mode")
SPINPAIR_ERROR(RangeError, "range")
SPINPAIR_ERROR(DegenerateBaseline, "degenerate_baseline")
SPINPAIR_ERROR(ModeMixing, "mode_mixing")
SPINPAIR_ERROR(DivergentIntegral, "divergent_integral")
SPINPAIR_ERROR(TomographyError, "tomography_inconsistency")
SPINPAIR_ERROR(InconsistentSteadyState, "inconsistent_steady_state")

#undef SPINPAIR_ERROR

struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual(residual) {}
  const char* kind() const noexcept override { return "convergence"; }
  double residual;
};

struct LimitCycleError : ConvergenceError {
  using ConvergenceError::ConvergenceError;
  const char* kind() const noexcept override { return "limit_cycle"; }
};

}  // namespace spinpair
