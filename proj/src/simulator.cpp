#include "tdreg/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace tdreg {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double FourierSignal::value(double t) const {
  double acc = 0.5 * c0;
  for (std::size_t l = 0; l < harmonics.size(); ++l) {
    const double w = kTwoPi * static_cast<double>(l + 1) / period;
    acc += harmonics[l].amplitude * std::cos(w * t - harmonics[l].phase);
  }
  return acc;
}

double FourierSignal::peak() const {
  if (harmonics.empty()) return std::abs(0.5 * c0);
  double m = 0.0;
  const int samples = 4096;
  for (int k = 0; k < samples; ++k)
    m = std::max(m, std::abs(value(period * static_cast<double>(k) / samples)));
  return m;
}

bool FourierSignal::isZero() const {
  if (c0 != 0.0) return false;
  for (const Harmonic& h : harmonics)
    if (h.amplitude != 0.0) return false;
  return true;
}

double fourier_value(const FourierSignal& sig, double t) { return sig.value(t); }

DdeRealization realize_dde(const DelayRational& block) {
  const Quasipolynomial& den = block.den();
  const Quasipolynomial& num = block.num();
  const Polynomial* d0 = den.zeroDelayPoly();
  if (d0 == nullptr)
    throw NotRealizable("denominator has no delay-free term (advanced-type relation)");
  const int n = d0->degree();
  if (den.maxDegree() > n)
    throw NotRealizable("a delayed denominator degree exceeds the delay-free degree");
  if (num.maxDegree() > n)
    throw NotRealizable("numerator degree exceeds the delay-free denominator degree");

  DdeRealization r;
  r.order = n;
  r.lead = d0->coeff(n);
  for (const QpTerm& t : den.terms()) {
    for (int k = 0; k <= t.poly.degree(); ++k) {
      const double c = t.poly.coeff(k);
      if (c == 0.0) continue;
      if (t.delay == 0.0 && k == n) continue;  // solvability pivot
      r.den_rest.push_back({t.delay, k, c});
      r.max_delay = std::max(r.max_delay, t.delay);
    }
  }
  for (const QpTerm& t : num.terms()) {
    for (int k = 0; k <= t.poly.degree(); ++k) {
      const double c = t.poly.coeff(k);
      if (c == 0.0) continue;
      r.num_terms.push_back({t.delay, k, c});
      r.max_delay = std::max(r.max_delay, t.delay);
      if (t.delay == 0.0 && k == n) r.feedthrough = c / r.lead;
    }
  }
  return r;
}

namespace {

long aligned_steps(double delay, double h, const std::string& what) {
  const double ratio = delay / h;
  const long m = std::lround(ratio);
  if (m < 0 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * std::max(1.0, ratio))
    throw StepMismatch(what + ": delay " + std::to_string(delay) +
                       " s is not an integer multiple of the step " + std::to_string(h) + " s");
  return m;
}

/// Which one-sided limit a stage evaluation at a grid time represents. The
/// predictor start and the finalized state are right limits; the corrector
/// endpoint approximates the integrand inside the step, a left limit. The
/// distinction only matters where histories jump: the top derivative of a
/// neutral block, a gated branch input, the disturbance switch-on.
enum class Side { Left, Right };

/// Runtime for one realized block: full-run history of w and its
/// derivatives, indexed by grid step with a pre-history pad. Orders below
/// the top are continuous and share one array; the top derivative jumps at
/// propagated breakpoints and is stored with both one-sided limits.
class DdeBlock {
 public:
  DdeBlock(const DelayRational& tf, double h, long total_steps, std::string name)
      : r_(realize_dde(tf)), name_(std::move(name)) {
    for (const DdeTerm& t : r_.den_rest) den_steps_.push_back(aligned_steps(t.delay, h, name_));
    for (const DdeTerm& t : r_.num_terms) num_steps_.push_back(aligned_steps(t.delay, h, name_));
    pad_ = aligned_steps(r_.max_delay, h, name_) + 2;
    const std::size_t len = static_cast<std::size_t>(pad_ + total_steps + 1);
    hist_.assign(static_cast<std::size_t>(r_.order), std::vector<double>(len, 0.0));
    top_left_.assign(len, 0.0);
    top_right_.assign(len, 0.0);
  }

  int order() const { return r_.order; }
  double feedthrough() const { return r_.feedthrough; }

  void setConstantPreHistory(double w0) {
    pre_history_w_ = w0;
    if (r_.order > 0) {
      for (long j = 0; j < pad_; ++j) hist_[0][static_cast<std::size_t>(j)] = w0;
    } else {
      for (long j = 0; j < pad_; ++j) top_left_[static_cast<std::size_t>(j)] =
          top_right_[static_cast<std::size_t>(j)] = w0;
    }
  }

  double output(long i, const Eigen::VectorXd& x, double u, Side side) const {
    double acc = 0.0;
    for (std::size_t idx = 0; idx < r_.num_terms.size(); ++idx) {
      const DdeTerm& t = r_.num_terms[idx];
      acc += t.coeff * delayedValue(t.order, i, num_steps_[idx], x, u, side);
    }
    return acc;
  }

  Eigen::VectorXd deriv(long i, const Eigen::VectorXd& x, double u, Side side) const {
    Eigen::VectorXd dx(r_.order);
    for (int k = 0; k + 1 < r_.order; ++k) dx[k] = x[k + 1];
    if (r_.order > 0) dx[r_.order - 1] = highestDerivative(i, x, u, side);
    return dx;
  }

  /// Finalizes grid point i with the one-sided inputs of the surrounding
  /// cascades.
  void record(long i, const Eigen::VectorXd& x, double u_left, double u_right) {
    const std::size_t at = static_cast<std::size_t>(pad_ + i);
    for (int k = 0; k < r_.order; ++k) hist_[k][at] = x[k];
    top_right_[at] = highestDerivative(i, x, u_right, Side::Right);
    if (i == 0) {
      // the relation does not hold before the start; the left limit is the
      // pre-history derivative (zero for a constant history, w0 at order 0)
      top_left_[at] = (r_.order == 0) ? pre_history_w_ : 0.0;
    } else {
      top_left_[at] = highestDerivative(i, x, u_left, Side::Left);
    }
  }

 private:
  // lead * w^(n)(t) = u(t) - sum(den_rest coeff * w^(k)(t - delay))
  double highestDerivative(long i, const Eigen::VectorXd& x, double u, Side side) const {
    double acc = u;
    for (std::size_t idx = 0; idx < r_.den_rest.size(); ++idx) {
      const DdeTerm& t = r_.den_rest[idx];
      acc -= t.coeff * delayedHistory(t.order, i, den_steps_[idx], x, side);
    }
    return acc / r_.lead;
  }

  // delayed reads never hit (delay 0, order n); that case is the pivot
  double delayedHistory(int k, long i, long m, const Eigen::VectorXd& x, Side side) const {
    if (m == 0) return x[k];
    const std::size_t at = static_cast<std::size_t>(pad_ + i - m);
    if (k < r_.order) return hist_[k][at];
    return side == Side::Left ? top_left_[at] : top_right_[at];
  }

  double delayedValue(int k, long i, long m, const Eigen::VectorXd& x, double u,
                      Side side) const {
    if (m == 0 && k == r_.order) return highestDerivative(i, x, u, side);
    return delayedHistory(k, i, m, x, side);
  }

  DdeRealization r_;
  std::string name_;
  long pad_ = 0;
  double pre_history_w_ = 0.0;
  std::vector<long> den_steps_;
  std::vector<long> num_steps_;
  std::vector<std::vector<double>> hist_;
  std::vector<double> top_left_;
  std::vector<double> top_right_;
};

/// Gain line over equidistant taps of its gated input history; the gate
/// makes the input jump, so both one-sided limits are stored.
class FirBlock {
 public:
  FirBlock(const FirDelayParameter& qm, double h, long total_steps)
      : gains_(qm.gains()), stride_(aligned_steps(qm.spacing(), h, "Q_M")) {
    pad_ = stride_ * (gains_.size() - 1) + 2;
    const std::size_t len = static_cast<std::size_t>(pad_ + total_steps + 1);
    left_.assign(len, 0.0);
    right_.assign(len, 0.0);
  }

  double output(long i, double u_now, Side side) const {
    const std::vector<double>& hist = side == Side::Left ? left_ : right_;
    double acc = gains_[0] * u_now;
    for (Eigen::Index k = 1; k < gains_.size(); ++k)
      acc += gains_[k] * hist[static_cast<std::size_t>(pad_ + i - k * stride_)];
    return acc;
  }

  void record(long i, double u_left, double u_right) {
    left_[static_cast<std::size_t>(pad_ + i)] = u_left;
    right_[static_cast<std::size_t>(pad_ + i)] = u_right;
  }

 private:
  Eigen::VectorXd gains_;
  long stride_;
  long pad_ = 0;
  std::vector<double> left_;
  std::vector<double> right_;
};

struct LoopState {
  Eigen::VectorXd plant, dpinv, np, ng, dg;
};

struct CascadeOut {
  double y = 0, d = 0, e = 0, v2 = 0, dp = 0, np_out = 0, uq = 0, qm_out = 0, dg_out = 0, u = 0;
  Eigen::VectorXd k_plant, k_dpinv, k_np, k_ng, k_dg;
};

}  // namespace

TimeSeries simulate_closed_loop(const SimScenario& sc) {
  if (!(sc.step > 0.0)) throw Error("simulation step must be positive");
  if (!(sc.t_end > 0.0)) throw Error("t_end must be positive");
  if (sc.t_disturbance_on < 0.0 || sc.t_augmentation_on < sc.t_disturbance_on)
    throw Error("required: 0 <= t_disturbance_on <= t_augmentation_on");
  if (sc.activation_ramp < 0.0) throw Error("activation ramp must be nonnegative");
  if (!(sc.disturbance.period > 0.0) || !(sc.reference.period > 0.0))
    throw Error("signal periods must be positive");

  const double h = sc.step;
  const long steps = static_cast<long>(std::floor(sc.t_end / h + 1e-9));

  DdeBlock plant(sc.plant_f.original, h, steps, "plant");
  DdeBlock dpinv(sc.ctrl_f.d.inverse(), h, steps, "D_p^{-1}");
  DdeBlock np(sc.ctrl_f.n, h, steps, "N_p");
  DdeBlock ng(sc.plant_f.n, h, steps, "N_G");
  DdeBlock dg(sc.plant_f.d, h, steps, "D_G");
  FirBlock fir(sc.qm, h, steps);

  if (plant.feedthrough() != 0.0)
    throw AlgebraicLoop("plant has direct feedthrough; the outer loop is algebraic");
  if (ng.feedthrough() != 0.0)
    throw AlgebraicLoop("N_G has direct feedthrough; the augmentation loop is algebraic");

  // Constant output pre-history maps to a constant internal-signal history
  // through the numerator DC gain.
  const double num_dc = sc.plant_f.original.num().eval(Complex(0.0, 0.0)).real();
  double w0 = 0.0;
  if (sc.initial_output != 0.0) {
    if (std::abs(num_dc) < 1e-12)
      throw Error("plant numerator has zero DC gain; nonzero initial_output is unrealizable");
    w0 = sc.initial_output / num_dc;
  }
  plant.setConstantPreHistory(w0);

  LoopState x;
  x.plant = Eigen::VectorXd::Zero(plant.order());
  if (plant.order() > 0) x.plant[0] = w0;
  x.dpinv = Eigen::VectorXd::Zero(dpinv.order());
  x.np = Eigen::VectorXd::Zero(np.order());
  x.ng = Eigen::VectorXd::Zero(ng.order());
  x.dg = Eigen::VectorXd::Zero(dg.order());

  const double t_dist = sc.t_disturbance_on;
  const double t_aug = sc.t_augmentation_on;
  // left limits at a switch instant still see the switch off
  auto gate = [&](double t, Side side) -> double {
    const double tol = 1e-12 * std::max(1.0, t_aug);
    if (t < t_aug - tol) return 0.0;
    if (side == Side::Left && t <= t_aug + tol) return 0.0;
    if (sc.activation_ramp > 0.0) return std::min(1.0, (t - t_aug) / sc.activation_ramp);
    return 1.0;
  };
  auto disturbance_at = [&](double t, Side side) -> double {
    const double tol = 1e-12 * std::max(1.0, t_dist);
    if (t < t_dist - tol) return 0.0;
    if (side == Side::Left && t <= t_dist + tol) return 0.0;
    return sc.disturbance.value(t - t_dist);
  };

  auto cascade = [&](long i, const LoopState& s, Side side) -> CascadeOut {
    const double t = static_cast<double>(i) * h;
    CascadeOut c;
    const double y_plant = plant.output(i, s.plant, 0.0, side);
    c.d = disturbance_at(t, side);
    c.y = y_plant + c.d;
    c.e = sc.reference.value(t) - c.y;
    const double ng_out = ng.output(i, s.ng, 0.0, side);
    c.v2 = c.e + ng_out;
    c.dp = dpinv.output(i, s.dpinv, c.v2, side);
    c.np_out = np.output(i, s.np, c.dp, side);
    c.uq = gate(t, side) * c.dp;
    c.qm_out = fir.output(i, c.uq, side);
    c.dg_out = dg.output(i, s.dg, c.qm_out, side);
    c.u = c.np_out + c.dg_out;
    c.k_plant = plant.deriv(i, s.plant, c.u, side);
    c.k_dpinv = dpinv.deriv(i, s.dpinv, c.v2, side);
    c.k_np = np.deriv(i, s.np, c.dp, side);
    c.k_ng = ng.deriv(i, s.ng, c.qm_out, side);
    c.k_dg = dg.deriv(i, s.dg, c.qm_out, side);
    return c;
  };
  auto record_all = [&](long i, const LoopState& s, const CascadeOut& cl, const CascadeOut& cr) {
    plant.record(i, s.plant, cl.u, cr.u);
    dpinv.record(i, s.dpinv, cl.v2, cr.v2);
    np.record(i, s.np, cl.dp, cr.dp);
    ng.record(i, s.ng, cl.qm_out, cr.qm_out);
    dg.record(i, s.dg, cl.qm_out, cr.qm_out);
    fir.record(i, cl.uq, cr.uq);
  };

  TimeSeries ts;
  ts.t.resize(steps + 1);
  ts.y.resize(steps + 1);
  ts.u.resize(steps + 1);
  ts.d.resize(steps + 1);
  ts.e.resize(steps + 1);
  ts.qm_input.resize(steps + 1);
  auto log_at = [&](long i, const CascadeOut& c) {
    ts.t[i] = static_cast<double>(i) * h;
    ts.y[i] = c.y;
    ts.u[i] = c.u;
    ts.d[i] = c.d;
    ts.e[i] = c.e;
    ts.qm_input[i] = c.dp;
  };

  CascadeOut current = cascade(0, x, Side::Right);
  record_all(0, x, cascade(0, x, Side::Left), current);
  log_at(0, current);

  LoopState pred;
  for (long i = 0; i < steps; ++i) {
    const CascadeOut& s1 = current;  // right limit at t_i
    pred.plant = x.plant + h * s1.k_plant;
    pred.dpinv = x.dpinv + h * s1.k_dpinv;
    pred.np = x.np + h * s1.k_np;
    pred.ng = x.ng + h * s1.k_ng;
    pred.dg = x.dg + h * s1.k_dg;
    const CascadeOut s2 = cascade(i + 1, pred, Side::Left);
    x.plant += 0.5 * h * (s1.k_plant + s2.k_plant);
    x.dpinv += 0.5 * h * (s1.k_dpinv + s2.k_dpinv);
    x.np += 0.5 * h * (s1.k_np + s2.k_np);
    x.ng += 0.5 * h * (s1.k_ng + s2.k_ng);
    x.dg += 0.5 * h * (s1.k_dg + s2.k_dg);
    current = cascade(i + 1, x, Side::Right);
    record_all(i + 1, x, cascade(i + 1, x, Side::Left), current);
    log_at(i + 1, current);
  }
  return ts;
}

double steady_state_residual(const TimeSeries& ts, double window) {
  if (ts.t.size() == 0) throw Error("empty time series");
  const double t_last = ts.t[ts.t.size() - 1];
  return window_residual(ts, t_last - window, t_last);
}

double window_residual(const TimeSeries& ts, double t_begin, double t_end_window) {
  if (ts.t.size() == 0) throw Error("empty time series");
  if (t_begin > t_end_window) throw Error("window is empty");
  double m = 0.0;
  bool any = false;
  for (Eigen::Index i = 0; i < ts.t.size(); ++i) {
    if (ts.t[i] >= t_begin - 1e-12 && ts.t[i] <= t_end_window + 1e-12) {
      m = std::max(m, std::abs(ts.y[i]));
      any = true;
    }
  }
  if (!any) throw Error("window contains no samples");
  return m;
}

Eigen::VectorXd simulate_block_response(const DelayRational& block,
                                        const std::function<double(double)>& input,
                                        double t_end,
                                        double step) {
  if (!(step > 0.0) || !(t_end > 0.0)) throw Error("step and t_end must be positive");
  const long steps = static_cast<long>(std::floor(t_end / step + 1e-9));
  DdeBlock b(block, step, steps, "block");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.order());
  Eigen::VectorXd out(steps + 1);

  const double u0 = input(0.0);
  out[0] = b.output(0, x, u0, Side::Right);
  b.record(0, x, u0, u0);
  for (long i = 0; i < steps; ++i) {
    const double t0 = static_cast<double>(i) * step;
    const double t1 = static_cast<double>(i + 1) * step;
    const Eigen::VectorXd k1 = b.deriv(i, x, input(t0), Side::Right);
    const Eigen::VectorXd xp = x + step * k1;
    const Eigen::VectorXd k2 = b.deriv(i + 1, xp, input(t1), Side::Left);
    x += 0.5 * step * (k1 + k2);
    const double u1 = input(t1);
    out[i + 1] = b.output(i + 1, x, u1, Side::Right);
    b.record(i + 1, x, u1, u1);
  }
  return out;
}

}  // namespace tdreg
