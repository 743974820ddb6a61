#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace tdreg {

/// Base class of every error thrown by the toolkit.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A DelayRational was constructed with an identically zero denominator,
/// or the inverse of the zero function was requested.
struct ZeroDenominator : Error {
  using Error::Error;
};

/// Evaluation hit a point where the denominator magnitude is below the
/// pole floor. Carries the offending point.
struct PoleProximity : Error {
  std::complex<double> at;
  explicit PoleProximity(std::complex<double> s, const std::string& context = "")
      : Error("denominator vanishes near s = (" + std::to_string(s.real()) + ", " +
              std::to_string(s.imag()) + ")" + (context.empty() ? "" : "; " + context)),
        at(s) {}
};

struct InvalidPole : Error {
  using Error::Error;
};

struct InvalidMu : Error {
  using Error::Error;
};

struct ImproperPlant : Error {
  using Error::Error;
};

/// A factor denominator has a located root with nonnegative real part.
struct UnstableFactor : Error {
  using Error::Error;
};

/// The plant numerator factor vanishes at a targeted harmonic; regulation
/// at that frequency is impossible.
struct PlantZeroAtHarmonic : Error {
  double omega;
  explicit PlantZeroAtHarmonic(double w)
      : Error("plant numerator factor N_G vanishes at omega = " + std::to_string(w) +
              " rad/s; the regulation condition has no solution there"),
        omega(w) {}
};

/// find_roots was handed the identically zero quasipolynomial.
struct ZeroFunction : Error {
  using Error::Error;
};

/// The argument-principle counter detected a (near-)root on the region
/// boundary; the winding number is not well defined.
struct BoundaryRoot : Error {
  using Error::Error;
};

/// A DelayRational cannot be realized as a causal input-output DDE.
struct NotRealizable : Error {
  using Error::Error;
};

/// The closed-loop block graph has a delay-free cycle of direct
/// feedthroughs.
struct AlgebraicLoop : Error {
  using Error::Error;
};

/// A block delay is not an integer multiple of the simulation step.
struct StepMismatch : Error {
  using Error::Error;
};

/// Scenario file parse or validation failure.
struct ScenarioError : Error {
  using Error::Error;
};

}  // namespace tdreg
