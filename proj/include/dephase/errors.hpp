// dephase/errors.hpp — exception taxonomy for engine and configuration failures
//
// Three top-level families, matching the CLI exit codes: ConfigError and
// ParameterError are usage problems (exit 2), NumericalError covers engine
// breakdowns (exit 3), IoError covers file-system trouble (exit 4).
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dephase {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- usage / parameter-domain errors ----

struct ParameterError : Error {
  using Error::Error;
};

// Evaluation that is deliberately out of scope (e.g. stable densities with
// alpha outside {1, 2}, which have no closed form here).
struct UnsupportedError : ParameterError {
  using ParameterError::ParameterError;
};

// Rejection sampling would loop (almost) forever: acceptance below 1e-6.
struct DegenerateTruncationError : ParameterError {
  using ParameterError::ParameterError;
};

// Expected collision count per particle exceeds the hard cap of 1e9.
struct RateTooHighError : ParameterError {
  using ParameterError::ParameterError;
};

// Aggregated, field-addressed config validation failure.
struct ConfigError : Error {
  std::vector<std::string> issues;
  explicit ConfigError(std::vector<std::string> list)
      : Error(join(list)), issues(std::move(list)) {}

private:
  static std::string join(const std::vector<std::string>& list) {
    std::string out = "config validation failed:";
    for (const auto& s : list) out += "\n  - " + s;
    return out;
  }
};

// ---- numerical-engine errors ----

struct NumericalError : Error {
  using Error::Error;
};

// Adaptive quadrature could not reach the requested tolerance; the tolerance
// actually achieved is attached for diagnostics.
struct IntegrationError : NumericalError {
  double achieved_tolerance;
  IntegrationError(const std::string& msg, double achieved)
      : NumericalError(msg + " (achieved tolerance " +
                       std::to_string(achieved) + ")"),
        achieved_tolerance(achieved) {}
};

// Laplace-transform integral requested where it diverges.
struct DomainError : NumericalError {
  using NumericalError::NumericalError;
};

// Denominator of the resolvent relation within 1e-12 of zero.
struct PoleError : NumericalError {
  using NumericalError::NumericalError;
};

// Numerical inverse Laplace transform failed to converge.
struct InversionError : NumericalError {
  using NumericalError::NumericalError;
};

// Half-maximum (or peak) not bracketed by the frequency grid.
struct GridError : NumericalError {
  using NumericalError::NumericalError;
};

// Decay-fit window empty or too short.
struct WindowError : NumericalError {
  using NumericalError::NumericalError;
};

// More than half of the fit window sits below the noise floor.
struct NoiseFloorError : NumericalError {
  using NumericalError::NumericalError;
};

// Nonlinear fit failed to converge after the restart ladder.
struct FitError : NumericalError {
  using NumericalError::NumericalError;
};

// Scanned curve has no interior minimum.
struct ScanRangeError : NumericalError {
  using NumericalError::NumericalError;
};

// Normalizing by a reference coherence too close to zero.
struct IllConditionedError : NumericalError {
  using NumericalError::NumericalError;
};

// ---- I/O ----

struct IoError : Error {
  using Error::Error;
};

} // namespace dephase
