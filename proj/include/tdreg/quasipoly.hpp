#pragma once

/**
 * @file quasipoly.hpp
 * @brief Quasipolynomials  sum_i p_i(s) e^{-s theta_i}  and their ratios.
 *
 * Quasipolynomials are the characteristic-function class of linear
 * time-delay systems; every transfer function handled by this toolkit is a
 * ratio of two of them (DelayRational). All types are immutable values
 * after construction and safe to share read-only across threads; the
 * operations are pure functions.
 *
 * Arithmetic keeps results canonical (strictly increasing delays, trimmed
 * polynomials) but never attempts pole-zero cancellation: common factors
 * introduced by factorizations are retained and reported downstream as
 * coincident pole/zero pairs.
 */

#include <complex>
#include <initializer_list>
#include <vector>

#include <Eigen/Core>

#include "tdreg/errors.hpp"

namespace tdreg {

using Complex = std::complex<double>;

/// Two delays coalesce when |t1 - t2| <= kDelayMergeTol * max(1, theta_max).
inline constexpr double kDelayMergeTol = 1e-12;

/// Coefficients below kCoeffTrimTol * max|coeff| are trimmed during
/// polynomial canonicalization.
inline constexpr double kCoeffTrimTol = 1e-14;

/// Real univariate polynomial with coefficients stored ascending in degree
/// (coeffs[k] multiplies s^k). Canonical form: the highest-degree
/// coefficient is nonzero; the zero polynomial has an empty coefficient
/// vector and degree -1.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(Eigen::VectorXd coeffs);
  Polynomial(std::initializer_list<double> coeffs);

  static Polynomial constant(double c);

  bool isZero() const { return coeffs_.size() == 0; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  /// Coefficient of s^k, zero outside the stored range.
  double coeff(int k) const;

  /// Horner evaluation.
  Complex operator()(Complex s) const;
  double operator()(double s) const;

  Polynomial derivative() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double c, const Polynomial& p);
  Polynomial operator-() const;

  /// Exact structural equality (same degree, bitwise-equal coefficients).
  bool operator==(const Polynomial& other) const;

 private:
  Eigen::VectorXd coeffs_;
  void trim();
};

/// Integer power (s + c)^m, exact binomial coefficients.
Polynomial shifted_monomial_power(double c, int m);

/// One term p(s) e^{-s delay} of a quasipolynomial.
struct QpTerm {
  double delay = 0.0;
  Polynomial poly;
};

/// Finite sum of delayed polynomial terms. Canonical invariants: delays are
/// strictly increasing and nonnegative, no term carries an identically zero
/// polynomial, and the empty term list is the zero quasipolynomial.
class Quasipolynomial {
 public:
  Quasipolynomial() = default;
  Quasipolynomial(const Polynomial& p);  // delay-free term, implicit by design
  Quasipolynomial(std::initializer_list<QpTerm> terms);
  explicit Quasipolynomial(std::vector<QpTerm> terms);

  bool isZero() const { return terms_.empty(); }
  const std::vector<QpTerm>& terms() const { return terms_; }
  std::size_t termCount() const { return terms_.size(); }

  double maxDelay() const;
  /// Largest polynomial degree across terms; -1 for the zero quasipolynomial.
  int maxDegree() const;
  /// The polynomial attached to delay 0, or nullptr when absent.
  const Polynomial* zeroDelayPoly() const;

  Complex eval(Complex s) const;
  Complex operator()(Complex s) const { return eval(s); }

  /// Termwise d/ds: (p e^{-s t})' = (p' - t p) e^{-s t}.
  Quasipolynomial derivative() const;
  /// Multiplication by e^{-s theta}.
  Quasipolynomial delayedBy(double theta) const;

  friend Quasipolynomial operator+(const Quasipolynomial& a, const Quasipolynomial& b);
  friend Quasipolynomial operator-(const Quasipolynomial& a, const Quasipolynomial& b);
  friend Quasipolynomial operator*(const Quasipolynomial& a, const Quasipolynomial& b);
  friend Quasipolynomial operator*(double c, const Quasipolynomial& q);
  Quasipolynomial operator-() const;

  /// Exact structural equality, used to detect shared denominators.
  bool operator==(const Quasipolynomial& other) const;

 private:
  std::vector<QpTerm> terms_;
  void normalize();
};

/// Ratio of two quasipolynomials. No cancellation is ever attempted; a zero
/// numerator normalizes the denominator to 1.
class DelayRational {
 public:
  DelayRational();  // the zero function 0/1
  DelayRational(Quasipolynomial num, Quasipolynomial den);
  DelayRational(const Polynomial& num, const Polynomial& den);

  static DelayRational one();

  const Quasipolynomial& num() const { return num_; }
  const Quasipolynomial& den() const { return den_; }
  bool isZero() const { return num_.isZero(); }

  /// num(s)/den(s). Throws PoleProximity when |den(s)| is below the pole
  /// floor 1e-300 * (1 + |num(s)|); the caller decides how to proceed.
  Complex eval(Complex s) const;
  Complex operator()(Complex s) const { return eval(s); }

  /// Swaps numerator and denominator; throws ZeroDenominator on the zero
  /// function.
  DelayRational inverse() const;

  /// Proper: a delay-free denominator term exists and bounds every
  /// numerator (and denominator) polynomial degree.
  bool isProper() const;
  /// No instantaneous feedthrough: proper and the delay-free numerator
  /// degree is strictly below the delay-free denominator degree.
  bool isStrictlyProper() const;

  friend DelayRational operator+(const DelayRational& a, const DelayRational& b);
  friend DelayRational operator-(const DelayRational& a, const DelayRational& b);
  friend DelayRational operator*(const DelayRational& a, const DelayRational& b);
  friend DelayRational operator*(double c, const DelayRational& f);
  DelayRational operator-() const;

 private:
  Quasipolynomial num_;
  Quasipolynomial den_;
};

/// dr_eval at s = j*omega for each entry, in order. PoleProximity is
/// rethrown with the offending frequency in the message.
Eigen::VectorXcd frequency_response(const DelayRational& f, const Eigen::VectorXd& omegas);

}  // namespace tdreg
