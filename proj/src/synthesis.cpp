#include "tdreg/synthesis.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/SVD>

namespace tdreg {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

HarmonicTarget HarmonicTarget::fromHz(double f_hz, int harmonic_count, bool include_dc) {
  if (!(f_hz > 0.0)) throw Error("base frequency must be positive");
  return HarmonicTarget{1.0 / f_hz, harmonic_count, include_dc};
}

Eigen::VectorXd harmonic_frequencies(const HarmonicTarget& target) {
  if (!(target.period > 0.0)) throw Error("signal period must be positive");
  if (target.harmonic_count < 1) throw Error("harmonic count must be at least 1");
  Eigen::VectorXd w(target.harmonic_count);
  for (int l = 1; l <= target.harmonic_count; ++l)
    w[l - 1] = kTwoPi * static_cast<double>(l) / target.period;
  return w;
}

Eigen::VectorXcd rhs_targets(const CoprimeFactorization& plant_f,
                             const CoprimeFactorization& ctrl_f,
                             const Eigen::VectorXd& omegas,
                             bool include_dc) {
  const Eigen::Index rows = omegas.size() + (include_dc ? 1 : 0);
  Eigen::VectorXcd targets(rows);
  Eigen::Index row = 0;
  auto target_at = [&](double omega) {
    const Complex s(0.0, omega);
    const Complex ng = plant_f.n.eval(s);
    const Complex dp = ctrl_f.d.eval(s);
    if (std::abs(ng) <= 1e-12 * std::max(1.0, std::abs(dp))) throw PlantZeroAtHarmonic(omega);
    return dp / ng;
  };
  if (include_dc) targets[row++] = target_at(0.0);
  for (Eigen::Index l = 0; l < omegas.size(); ++l) targets[row++] = target_at(omegas[l]);
  return targets;
}

RegulationSystem build_linear_system(const Eigen::VectorXcd& targets,
                                     const Eigen::VectorXd& omegas,
                                     double spacing,
                                     int count,
                                     bool include_dc) {
  if (count < 0) throw Error("delay count must be nonnegative");
  if (!(spacing > 0.0)) throw Error("delay spacing must be positive");
  const Eigen::Index m = omegas.size();
  if (targets.size() != m + (include_dc ? 1 : 0))
    throw Error("target vector does not match the harmonic list");

  const Eigen::Index rows = 2 * m + (include_dc ? 1 : 0);
  const Eigen::Index cols = count + 1;
  RegulationSystem sys;
  sys.A.setZero(rows, cols);
  sys.B.setZero(rows);
  sys.omegas = omegas;
  sys.rhs_values = targets;
  sys.include_dc = include_dc;
  sys.spacing = spacing;

  Eigen::Index row = 0;
  if (include_dc) {
    sys.A.row(row).setOnes();
    sys.B[row] = targets[0].real();
    ++row;
  }
  const Eigen::Index harmonic_base = include_dc ? 1 : 0;
  for (Eigen::Index l = 0; l < m; ++l) {
    for (Eigen::Index k = 0; k < cols; ++k)
      sys.A(row, k) = std::cos(omegas[l] * static_cast<double>(k) * spacing);
    sys.B[row] = targets[harmonic_base + l].real();
    ++row;
  }
  for (Eigen::Index l = 0; l < m; ++l) {
    for (Eigen::Index k = 0; k < cols; ++k)
      sys.A(row, k) = std::sin(omegas[l] * static_cast<double>(k) * spacing);
    sys.B[row] = -targets[harmonic_base + l].imag();
    ++row;
  }
  return sys;
}

GainSolution solve_gains(const RegulationSystem& system) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(system.A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankCutoff);

  GainSolution sol;
  sol.gains = svd.solve(system.B);
  sol.rank = static_cast<int>(svd.rank());
  sol.residual_inf = (system.A * sol.gains - system.B).cwiseAbs().maxCoeff();
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double smin = sigma[sigma.size() - 1];
  sol.condition = (smin > 0.0) ? sigma[0] / smin : std::numeric_limits<double>::infinity();
  sol.rank_deficient = sol.rank < system.A.rows();

  if (sol.rank_deficient) {
    std::string hint = "rank " + std::to_string(sol.rank) + " < " +
                       std::to_string(system.A.rows()) + " rows; residual will not vanish";
    for (Eigen::Index l = 0; l < system.omegas.size(); ++l) {
      const double cycles = system.omegas[l] * system.spacing / kTwoPi;
      if (std::abs(cycles - std::round(cycles)) <= 1e-9 * std::max(1.0, std::abs(cycles))) {
        hint += "; harmonic " + std::to_string(l + 1) + " (omega = " +
                std::to_string(system.omegas[l]) +
                " rad/s) aliases the delay spacing (omega * spacing is a multiple of 2*pi)";
      }
    }
    sol.warnings.push_back(hint);
  }
  return sol;
}

bool DesignResult::pass(double tol) const {
  if (sensitivity_at_harmonics.size() == 0) return false;
  return (sensitivity_at_harmonics.array() <= tol).all();
}

DesignResult design_qm(const CoprimeFactorization& plant_f,
                       const CoprimeFactorization& ctrl_f,
                       const HarmonicTarget& target,
                       double spacing,
                       int count,
                       const LinearSolver& solver) {
  const Eigen::VectorXd omegas = harmonic_frequencies(target);
  const Eigen::VectorXcd targets = rhs_targets(plant_f, ctrl_f, omegas, target.include_dc);
  const RegulationSystem system =
      build_linear_system(targets, omegas, spacing, count, target.include_dc);

  GainSolution sol = solve_gains(system);
  if (solver) {
    sol.gains = solver(system.A, system.B);
    if (sol.gains.size() != system.A.cols())
      throw Error("custom solver returned a gain vector of the wrong size");
    sol.residual_inf = (system.A * sol.gains - system.B).cwiseAbs().maxCoeff();
  }

  DesignResult result{FirDelayParameter(spacing, sol.gains),
                      sol.residual_inf,
                      sol.rank,
                      sol.condition,
                      {},
                      omegas,
                      target.include_dc,
                      sol.rank_deficient,
                      sol.warnings};

  const int recommended = 2 * target.harmonic_count + (target.include_dc ? 1 : 0) - 1;
  if (count < recommended) {
    result.warnings.push_back("delay count N = " + std::to_string(count) +
                              " is below the recommended N >= " + std::to_string(recommended) +
                              " for " + std::to_string(target.harmonic_count) + " harmonics");
  }

  const DelayRational sens = assemble_sensitivity(plant_f, ctrl_f, result.qm);
  result.sensitivity_at_harmonics = verify_regulation(sens, omegas, target.include_dc);
  return result;
}

Eigen::VectorXd verify_regulation(const DelayRational& sensitivity,
                                  const Eigen::VectorXd& omegas,
                                  bool include_dc) {
  Eigen::VectorXd mags(omegas.size() + (include_dc ? 1 : 0));
  Eigen::Index row = 0;
  if (include_dc) mags[row++] = std::abs(sensitivity.eval(Complex(0.0, 0.0)));
  for (Eigen::Index l = 0; l < omegas.size(); ++l)
    mags[row++] = std::abs(sensitivity.eval(Complex(0.0, omegas[l])));
  return mags;
}

}  // namespace tdreg
