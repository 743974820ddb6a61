#pragma once

/**
 * @file synthesis.hpp
 * @brief Turns the periodic-regulation requirement S(0) = S(j w_l) = 0 into
 *        a real linear system over the lumped-delay gains and solves it.
 *
 * Zeroing the sensitivity at DC and at the harmonics w_l = 2 pi l / T is
 * equivalent to interpolation conditions Q_M(j w_l) = D_p(j w_l)/N_G(j w_l)
 * on the parameter. With Q_M a gain vector over equidistant delays the
 * conditions are linear: one all-ones DC row, cosine rows, then sine rows.
 * The system is solved by minimum-norm least squares (SVD); for a square
 * nonsingular system this coincides with the plain inverse.
 */

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tdreg/factorization.hpp"

namespace tdreg {

/// Default pass tolerance on |S(j w_l)| after a design.
inline constexpr double kRegulationTol = 1e-8;

/// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kRankCutoff = 1e-10;

/// The periodic signal class to reject/track: period T and the number of
/// harmonics M_d; harmonic frequencies are w_l = 2 pi l / T, l = 1..M_d.
struct HarmonicTarget {
  double period = 1.0;
  int harmonic_count = 1;
  bool include_dc = true;

  static HarmonicTarget fromHz(double f_hz, int harmonic_count, bool include_dc = true);
};

/// [w_1 .. w_Md], strictly increasing.
Eigen::VectorXd harmonic_frequencies(const HarmonicTarget& target);

/// Interpolation targets D_p(j w)/N_G(j w), DC value first when included.
/// Throws PlantZeroAtHarmonic when N_G vanishes at a target frequency.
Eigen::VectorXcd rhs_targets(const CoprimeFactorization& plant_f,
                             const CoprimeFactorization& ctrl_f,
                             const Eigen::VectorXd& omegas,
                             bool include_dc);

/// The assembled real system A x = B over the gains x = [a_0 .. a_N].
struct RegulationSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::VectorXd omegas;
  Eigen::VectorXcd rhs_values;  ///< the complex targets behind B
  bool include_dc = true;
  double spacing = 0.0;
};

RegulationSystem build_linear_system(const Eigen::VectorXcd& targets,
                                     const Eigen::VectorXd& omegas,
                                     double spacing,
                                     int count,
                                     bool include_dc);

/// Minimum-norm least-squares solution and its diagnostics.
struct GainSolution {
  Eigen::VectorXd gains;
  double residual_inf = 0.0;
  int rank = 0;
  double condition = 0.0;  ///< ratio of extreme singular values
  bool rank_deficient = false;
  std::vector<std::string> warnings;
};

GainSolution solve_gains(const RegulationSystem& system);

/// Optional replacement for the built-in SVD solve (e.g. a constrained
/// optimizer); must return gains honoring A x = B.
using LinearSolver = std::function<Eigen::VectorXd(const Eigen::MatrixXd&, const Eigen::VectorXd&)>;

/// Full design outcome: the parameter, solver diagnostics and the verified
/// sensitivity magnitudes (DC first when included).
struct DesignResult {
  FirDelayParameter qm = FirDelayParameter::zeros(1.0, 0);
  double residual_inf = 0.0;
  int rank = 0;
  double condition = 0.0;
  Eigen::VectorXd sensitivity_at_harmonics;
  Eigen::VectorXd omegas;
  bool include_dc = true;
  bool rank_deficient = false;
  std::vector<std::string> warnings;

  bool pass(double tol = kRegulationTol) const;
};

/// The four-step pipeline: targets -> linear system -> gains -> assembled
/// sensitivity, verified at every targeted frequency.
DesignResult design_qm(const CoprimeFactorization& plant_f,
                       const CoprimeFactorization& ctrl_f,
                       const HarmonicTarget& target,
                       double spacing,
                       int count,
                       const LinearSolver& solver = nullptr);

/// |S(j0)| (when include_dc) followed by |S(j w_l)| for every harmonic.
Eigen::VectorXd verify_regulation(const DelayRational& sensitivity,
                                  const Eigen::VectorXd& omegas,
                                  bool include_dc);

}  // namespace tdreg
