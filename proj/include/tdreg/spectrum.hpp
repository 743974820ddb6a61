#pragma once

/**
 * @file spectrum.hpp
 * @brief Root location for quasipolynomials over a rectangle of the complex
 *        plane, plus sensitivity pole/zero spectra.
 *
 * The finder follows the mapping approach: evaluate on a rectangular grid,
 * extract the zero-level contours of the real and imaginary parts by
 * marching squares, intersect contour segments within shared cells to get
 * seeds, then Newton-polish each seed against the analytic derivative.
 * An independent argument-principle counter serves as a completeness
 * cross-check for simple-root configurations.
 */

#include <string>
#include <vector>

#include "tdreg/factorization.hpp"
#include "tdreg/quasipoly.hpp"

namespace tdreg {

/// Rectangle, grid resolution and Newton settings for a root search.
struct RegionSpec {
  double re_min = -1.0;
  double re_max = 1.0;
  double im_min = 0.0;
  double im_max = 1.0;
  double grid_step = 0.0;   ///< <= 0 selects default_grid_step(qp)
  double newton_tol = 1e-12;
  int max_newton_iters = 50;
};

struct Root {
  Complex s;
  double residual = 0.0;  ///< |qp(s)|
};

/// Located roots, sorted by (Im, Re). Roots may sit up to one grid step
/// outside the requested rectangle (Newton polish is allowed to cross the
/// boundary). grid_too_coarse flags a grid cell holding more than one
/// polished root.
struct RootSet {
  std::vector<Root> roots;
  RegionSpec region;  ///< with the effective grid step filled in
  bool grid_too_coarse = false;
  std::vector<std::string> warnings;
};

/// min(0.1, pi/(8 (1 + theta_max))): at least 16 grid samples per
/// oscillation of the fastest exponential along the imaginary axis.
double default_grid_step(const Quasipolynomial& qp);

RootSet find_roots(const Quasipolynomial& qp, RegionSpec region);

/// Winding number of qp along the rectangle boundary, counted with
/// adaptive phase subdivision; equals the number of enclosed roots with
/// multiplicity. Throws BoundaryRoot when the boundary minimum of |qp|
/// falls below 1e-8 of the boundary maximum. boundary_samples <= 0 selects
/// a default based on the edge lengths.
int count_roots_argument_principle(const Quasipolynomial& qp,
                                   const RegionSpec& region,
                                   int boundary_samples = 0);

/// Zero/pole spectra of the assembled sensitivity. Computed for Im >= 0 and
/// mirrored into the requested region (real-coefficient symmetry);
/// coincident lists zero locations matched by a pole within 1e-6, the
/// artifacts of the uncancelled factorization.
struct SensitivitySpectrum {
  RootSet zeros;
  RootSet poles;
  std::vector<Complex> coincident;
};

SensitivitySpectrum sensitivity_spectrum(const CoprimeFactorization& plant_f,
                                         const CoprimeFactorization& ctrl_f,
                                         const FirDelayParameter& qm,
                                         RegionSpec region);

/// Zero/pole pairs closer than this are reported as coincident.
inline constexpr double kCoincidenceTol = 1e-6;

/// Stability window for factor denominators (lazy validation).
inline RegionSpec factor_stability_window() {
  return RegionSpec{-50.0, 0.5, 0.0, 500.0, 0.0, 1e-12, 50};
}

struct FactorStabilityReport {
  bool stable = true;
  std::vector<Root> unstable_roots;  ///< denominator roots with Re >= 0
};

/// Locates the roots of both factor denominators inside the window and
/// reports any with nonnegative real part.
FactorStabilityReport verify_factor_stability(const CoprimeFactorization& f,
                                              RegionSpec window = factor_stability_window());

/// Throwing form of the check above.
void ensure_stable_factors(const CoprimeFactorization& f,
                           RegionSpec window = factor_stability_window());

}  // namespace tdreg
