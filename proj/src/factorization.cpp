#include "tdreg/factorization.hpp"

#include <cmath>
#include <utility>

namespace tdreg {

CoprimeFactorization factorize_pi(double kp, double ki, double pole) {
  if (!(pole > 0.0)) throw InvalidPole("factorization pole must be positive");
  if (kp == 0.0 && ki == 0.0) throw Error("PI controller gains must not both be zero");
  const Polynomial shift{pole, 1.0};
  const Polynomial num{ki, kp};
  const Polynomial integrator{0.0, 1.0};
  CoprimeFactorization f;
  f.n = DelayRational(num, shift);
  f.d = DelayRational(integrator, shift);
  f.original = DelayRational(num, integrator);
  return f;
}

CoprimeFactorization factorize_delayed_first_order(double a, double tau, double mu) {
  if (!(mu > 0.0)) throw InvalidMu("mu must be positive");
  if (tau < 0.0) throw Error("plant delay must be nonnegative");
  const Polynomial quad{mu, 2.0 * std::sqrt(mu), 1.0};
  const Quasipolynomial quad_qp(quad);
  CoprimeFactorization f;
  f.n = DelayRational(Quasipolynomial(Polynomial{mu}).delayedBy(tau), quad_qp);
  f.d = DelayRational(Quasipolynomial(mu * Polynomial{-a, 1.0}), quad_qp);
  f.original = DelayRational(Quasipolynomial(Polynomial{1.0}).delayedBy(tau),
                             Quasipolynomial(Polynomial{-a, 1.0}));
  return f;
}

CoprimeFactorization factorize_by_shift(const DelayRational& plant, double shift_pole) {
  if (!(shift_pole > 0.0)) throw InvalidPole("shift pole must be positive");
  if (!plant.isProper()) throw ImproperPlant("plant transfer function is not proper");
  const int m = std::max(plant.num().maxDegree(), plant.den().maxDegree());
  const Quasipolynomial shift(shifted_monomial_power(shift_pole, m));
  CoprimeFactorization f;
  f.n = DelayRational(plant.num(), shift);
  f.d = DelayRational(plant.den(), shift);
  f.original = plant;
  return f;
}

FirDelayParameter::FirDelayParameter(double spacing, Eigen::VectorXd gains)
    : spacing_(spacing), gains_(std::move(gains)) {
  if (!(spacing_ > 0.0)) throw Error("lumped-delay spacing must be positive");
  if (gains_.size() < 1) throw Error("lumped-delay parameter needs at least one gain");
}

FirDelayParameter FirDelayParameter::zeros(double spacing, int count) {
  if (count < 0) throw Error("lumped-delay count must be nonnegative");
  return FirDelayParameter(spacing, Eigen::VectorXd::Zero(count + 1));
}

Complex FirDelayParameter::eval(Complex s) const {
  Complex acc(0.0, 0.0);
  for (Eigen::Index k = 0; k < gains_.size(); ++k)
    acc += gains_[k] * std::exp(-s * (spacing_ * static_cast<double>(k)));
  return acc;
}

Quasipolynomial FirDelayParameter::asQuasipolynomial() const {
  std::vector<QpTerm> terms;
  terms.reserve(gains_.size());
  for (Eigen::Index k = 0; k < gains_.size(); ++k)
    terms.push_back({spacing_ * static_cast<double>(k), Polynomial{gains_[k]}});
  return Quasipolynomial(std::move(terms));
}

DelayRational FirDelayParameter::asDelayRational() const {
  return DelayRational(asQuasipolynomial(), Quasipolynomial(Polynomial{1.0}));
}

DelayRational compute_up(const CoprimeFactorization& plant_f, const CoprimeFactorization& ctrl_f) {
  return plant_f.d * ctrl_f.d + plant_f.n * ctrl_f.n;
}

DelayRational assemble_controller(const CoprimeFactorization& plant_f,
                                  const CoprimeFactorization& ctrl_f,
                                  const FirDelayParameter& qm) {
  const DelayRational q = qm.asDelayRational();
  const DelayRational num = ctrl_f.n + plant_f.d * q;
  const DelayRational den = ctrl_f.d - plant_f.n * q;
  return num * den.inverse();
}

DelayRational assemble_sensitivity(const CoprimeFactorization& plant_f,
                                   const CoprimeFactorization& ctrl_f,
                                   const FirDelayParameter& qm) {
  const DelayRational up = compute_up(plant_f, ctrl_f);
  const DelayRational q = qm.asDelayRational();
  return up.inverse() * plant_f.d * (ctrl_f.d - plant_f.n * q);
}

}  // namespace tdreg
