#pragma once

/**
 * @file factorization.hpp
 * @brief Stable-proper coprime factorizations and the augmented-controller /
 *        sensitivity assembly around a weighted lumped-delay parameter.
 *
 * A plant G and a stabilizing controller C_p are each written as a ratio of
 * stable proper factors, G = N_G/D_G and C_p = N_p/D_p. Augmenting C_p with
 * a free stable parameter Q_M gives
 *
 *   C  = (N_p + D_G Q_M) / (D_p - N_G Q_M)
 *   S  = U_p^{-1} D_G (D_p - N_G Q_M),   U_p = D_G D_p + N_G N_p,
 *
 * so the sensitivity is affine in Q_M and the original closed-loop poles are
 * untouched. All assembly is plain rational arithmetic over
 * quasipolynomials; shared factors are never cancelled.
 */

#include <Eigen/Core>

#include "tdreg/quasipoly.hpp"

namespace tdreg {

/// A stable-proper factor pair together with the transfer function it
/// factors (kept for cross-checks).
struct CoprimeFactorization {
  DelayRational n;         ///< numerator factor
  DelayRational d;         ///< denominator factor
  DelayRational original;  ///< n/d composed
};

/// Factorize the PI controller (kp s + ki)/s over (s + pole):
/// N_p = (kp s + ki)/(s + pole), D_p = s/(s + pole).
CoprimeFactorization factorize_pi(double kp, double ki, double pole);

/// Factorize G = e^{-s tau}/(s - a) over the repeated-root quadratic
/// s^2 + 2 sqrt(mu) s + mu; the delay stays with the numerator factor so
/// both factors remain causal.
CoprimeFactorization factorize_delayed_first_order(double a, double tau, double mu);

/// Divide numerator and denominator of a proper plant by (s + shift_pole)^m,
/// m being the largest polynomial degree appearing in either.
CoprimeFactorization factorize_by_shift(const DelayRational& plant, double shift_pole);

/// The weighted lumped-delay parameter Q_M(s) = sum_k a_k e^{-s k spacing},
/// k = 0..N. Entire in s, hence stable and proper by construction.
class FirDelayParameter {
 public:
  FirDelayParameter(double spacing, Eigen::VectorXd gains);
  static FirDelayParameter zeros(double spacing, int count);

  double spacing() const { return spacing_; }
  int count() const { return static_cast<int>(gains_.size()) - 1; }  ///< N
  double span() const { return spacing_ * count(); }                 ///< T_D
  const Eigen::VectorXd& gains() const { return gains_; }
  double delayAt(int k) const { return spacing_ * k; }

  Complex eval(Complex s) const;
  Quasipolynomial asQuasipolynomial() const;
  DelayRational asDelayRational() const;

 private:
  double spacing_;
  Eigen::VectorXd gains_;
};

/// U_p = D_G D_p + N_G N_p.
DelayRational compute_up(const CoprimeFactorization& plant_f, const CoprimeFactorization& ctrl_f);

/// C = (N_p + D_G Q_M)/(D_p - N_G Q_M). With a zero parameter this reduces
/// to the original controller.
DelayRational assemble_controller(const CoprimeFactorization& plant_f,
                                  const CoprimeFactorization& ctrl_f,
                                  const FirDelayParameter& qm);

/// S = U_p^{-1} D_G (D_p - N_G Q_M), uncancelled.
DelayRational assemble_sensitivity(const CoprimeFactorization& plant_f,
                                   const CoprimeFactorization& ctrl_f,
                                   const FirDelayParameter& qm);

}  // namespace tdreg
