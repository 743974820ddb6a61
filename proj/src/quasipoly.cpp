#include "tdreg/quasipoly.hpp"

#include <algorithm>
#include <cmath>

namespace tdreg {

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(Eigen::VectorXd coeffs) : coeffs_(std::move(coeffs)) { trim(); }

Polynomial::Polynomial(std::initializer_list<double> coeffs)
    : coeffs_(Eigen::Map<const Eigen::VectorXd>(coeffs.begin(),
                                                static_cast<Eigen::Index>(coeffs.size()))) {
  trim();
}

Polynomial Polynomial::constant(double c) { return Polynomial{c}; }

void Polynomial::trim() {
  if (coeffs_.size() == 0) return;
  const double scale = coeffs_.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    coeffs_.resize(0);
    return;
  }
  const double floor = kCoeffTrimTol * scale;
  for (Eigen::Index k = 0; k < coeffs_.size(); ++k) {
    if (std::abs(coeffs_[k]) <= floor) coeffs_[k] = 0.0;
  }
  Eigen::Index deg = coeffs_.size() - 1;
  while (deg >= 0 && coeffs_[deg] == 0.0) --deg;
  coeffs_.conservativeResize(deg + 1);
}

double Polynomial::coeff(int k) const {
  if (k < 0 || k >= coeffs_.size()) return 0.0;
  return coeffs_[k];
}

Complex Polynomial::operator()(Complex s) const {
  if (isZero()) return {0.0, 0.0};
  Complex acc(coeffs_[coeffs_.size() - 1], 0.0);
  for (Eigen::Index k = coeffs_.size() - 2; k >= 0; --k) acc = acc * s + coeffs_[k];
  return acc;
}

double Polynomial::operator()(double s) const {
  if (isZero()) return 0.0;
  double acc = coeffs_[coeffs_.size() - 1];
  for (Eigen::Index k = coeffs_.size() - 2; k >= 0; --k) acc = acc * s + coeffs_[k];
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (degree() <= 0) return Polynomial{};
  Eigen::VectorXd d(coeffs_.size() - 1);
  for (Eigen::Index k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<double>(k);
  return Polynomial(std::move(d));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  const Eigen::Index n = std::max(a.coeffs_.size(), b.coeffs_.size());
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  c.head(a.coeffs_.size()) = a.coeffs_;
  c.head(b.coeffs_.size()) += b.coeffs_;
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  r.coeffs_ = -r.coeffs_;
  return r;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.isZero() || b.isZero()) return Polynomial{};
  Eigen::VectorXd c = Eigen::VectorXd::Zero(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (Eigen::Index i = 0; i < a.coeffs_.size(); ++i)
    for (Eigen::Index j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(c));
}

Polynomial operator*(double c, const Polynomial& p) { return Polynomial(c * p.coeffs_); }

bool Polynomial::operator==(const Polynomial& other) const {
  if (coeffs_.size() != other.coeffs_.size()) return false;
  for (Eigen::Index k = 0; k < coeffs_.size(); ++k)
    if (coeffs_[k] != other.coeffs_[k]) return false;
  return true;
}

Polynomial shifted_monomial_power(double c, int m) {
  Polynomial acc{1.0};
  const Polynomial base{c, 1.0};
  for (int k = 0; k < m; ++k) acc = acc * base;
  return acc;
}

// ---------------------------------------------------------------------------
// Quasipolynomial

Quasipolynomial::Quasipolynomial(const Polynomial& p) {
  if (!p.isZero()) terms_.push_back({0.0, p});
}

Quasipolynomial::Quasipolynomial(std::initializer_list<QpTerm> terms) : terms_(terms) {
  normalize();
}

Quasipolynomial::Quasipolynomial(std::vector<QpTerm> terms) : terms_(std::move(terms)) {
  normalize();
}

void Quasipolynomial::normalize() {
  for (const QpTerm& t : terms_) {
    if (t.delay < 0.0) throw Error("quasipolynomial delay must be nonnegative");
  }
  std::stable_sort(terms_.begin(), terms_.end(),
                   [](const QpTerm& a, const QpTerm& b) { return a.delay < b.delay; });
  double theta_max = 0.0;
  for (const QpTerm& t : terms_) theta_max = std::max(theta_max, t.delay);
  const double merge_tol = kDelayMergeTol * std::max(1.0, theta_max);

  std::vector<QpTerm> merged;
  for (QpTerm& t : terms_) {
    if (!merged.empty() && t.delay - merged.back().delay <= merge_tol) {
      merged.back().poly = merged.back().poly + t.poly;
    } else {
      merged.push_back(std::move(t));
    }
  }
  terms_.clear();
  for (QpTerm& t : merged) {
    if (!t.poly.isZero()) terms_.push_back(std::move(t));
  }
}

double Quasipolynomial::maxDelay() const {
  return terms_.empty() ? 0.0 : terms_.back().delay;
}

int Quasipolynomial::maxDegree() const {
  int deg = -1;
  for (const QpTerm& t : terms_) deg = std::max(deg, t.poly.degree());
  return deg;
}

const Polynomial* Quasipolynomial::zeroDelayPoly() const {
  if (!terms_.empty() && terms_.front().delay == 0.0) return &terms_.front().poly;
  return nullptr;
}

Complex Quasipolynomial::eval(Complex s) const {
  Complex acc(0.0, 0.0);
  for (const QpTerm& t : terms_) {
    Complex v = t.poly(s);
    if (t.delay != 0.0) v *= std::exp(-s * t.delay);
    acc += v;
  }
  return acc;
}

Quasipolynomial Quasipolynomial::derivative() const {
  std::vector<QpTerm> out;
  out.reserve(terms_.size());
  for (const QpTerm& t : terms_) {
    Polynomial p = t.poly.derivative() - t.delay * t.poly;
    if (!p.isZero()) out.push_back({t.delay, std::move(p)});
  }
  return Quasipolynomial(std::move(out));
}

Quasipolynomial Quasipolynomial::delayedBy(double theta) const {
  if (theta < 0.0) throw Error("delay shift must be nonnegative");
  std::vector<QpTerm> out = terms_;
  for (QpTerm& t : out) t.delay += theta;
  return Quasipolynomial(std::move(out));
}

Quasipolynomial operator+(const Quasipolynomial& a, const Quasipolynomial& b) {
  std::vector<QpTerm> out = a.terms_;
  out.insert(out.end(), b.terms_.begin(), b.terms_.end());
  return Quasipolynomial(std::move(out));
}

Quasipolynomial operator-(const Quasipolynomial& a, const Quasipolynomial& b) {
  return a + (-b);
}

Quasipolynomial Quasipolynomial::operator-() const {
  std::vector<QpTerm> out = terms_;
  for (QpTerm& t : out) t.poly = -t.poly;
  return Quasipolynomial(std::move(out));
}

Quasipolynomial operator*(const Quasipolynomial& a, const Quasipolynomial& b) {
  std::vector<QpTerm> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const QpTerm& ta : a.terms_)
    for (const QpTerm& tb : b.terms_) out.push_back({ta.delay + tb.delay, ta.poly * tb.poly});
  return Quasipolynomial(std::move(out));
}

Quasipolynomial operator*(double c, const Quasipolynomial& q) {
  std::vector<QpTerm> out = q.terms_;
  for (QpTerm& t : out) t.poly = c * t.poly;
  return Quasipolynomial(std::move(out));
}

bool Quasipolynomial::operator==(const Quasipolynomial& other) const {
  if (terms_.size() != other.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].delay != other.terms_[i].delay) return false;
    if (!(terms_[i].poly == other.terms_[i].poly)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// DelayRational

DelayRational::DelayRational() : num_(), den_(Polynomial{1.0}) {}

DelayRational::DelayRational(Quasipolynomial num, Quasipolynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.isZero()) throw ZeroDenominator("DelayRational denominator is identically zero");
  if (num_.isZero()) den_ = Quasipolynomial(Polynomial{1.0});
}

DelayRational::DelayRational(const Polynomial& num, const Polynomial& den)
    : DelayRational(Quasipolynomial(num), Quasipolynomial(den)) {}

DelayRational DelayRational::one() {
  return DelayRational(Polynomial{1.0}, Polynomial{1.0});
}

Complex DelayRational::eval(Complex s) const {
  const Complex n = num_.eval(s);
  const Complex d = den_.eval(s);
  const double floor = 1e-300 * (1.0 + std::abs(n));
  if (!(std::abs(d) > floor)) throw PoleProximity(s);
  return n / d;
}

DelayRational DelayRational::inverse() const {
  if (num_.isZero()) throw ZeroDenominator("cannot invert the zero function");
  return DelayRational(den_, num_);
}

bool DelayRational::isProper() const {
  const Polynomial* d0 = den_.zeroDelayPoly();
  if (d0 == nullptr) return false;
  const int lead = d0->degree();
  return num_.maxDegree() <= lead && den_.maxDegree() <= lead;
}

bool DelayRational::isStrictlyProper() const {
  if (!isProper()) return false;
  const Polynomial* d0 = den_.zeroDelayPoly();
  const Polynomial* n0 = num_.zeroDelayPoly();
  const int n0deg = (n0 == nullptr) ? -1 : n0->degree();
  return n0deg < d0->degree();
}

DelayRational operator+(const DelayRational& a, const DelayRational& b) {
  if (a.isZero()) return b;
  if (b.isZero()) return a;
  if (a.den_ == b.den_) return DelayRational(a.num_ + b.num_, a.den_);
  return DelayRational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

DelayRational operator-(const DelayRational& a, const DelayRational& b) { return a + (-b); }

DelayRational DelayRational::operator-() const {
  DelayRational r = *this;
  r.num_ = -r.num_;
  return r;
}

DelayRational operator*(const DelayRational& a, const DelayRational& b) {
  if (a.isZero() || b.isZero()) return DelayRational();
  return DelayRational(a.num_ * b.num_, a.den_ * b.den_);
}

DelayRational operator*(double c, const DelayRational& f) {
  return DelayRational(c * f.num_, f.den_);
}

Eigen::VectorXcd frequency_response(const DelayRational& f, const Eigen::VectorXd& omegas) {
  Eigen::VectorXcd out(omegas.size());
  for (Eigen::Index i = 0; i < omegas.size(); ++i) {
    try {
      out[i] = f.eval(Complex(0.0, omegas[i]));
    } catch (const PoleProximity&) {
      throw PoleProximity(Complex(0.0, omegas[i]),
                          "frequency response undefined at omega = " + std::to_string(omegas[i]));
    }
  }
  return out;
}

}  // namespace tdreg
