#pragma once

/**
 * @file simulator.hpp
 * @brief Fixed-step time-domain simulation of the augmented closed loop
 *        with retarded and neutral delay dynamics.
 *
 * Every transfer block (plant, the controller factors, the lumped-delay
 * parameter) is realized as a scalar input-output delay-differential
 * equation and integrated with an explicit two-stage Heun scheme. Delays
 * must be integer multiples of the step, so every delayed value lands on a
 * stored grid sample; derivative histories are stored for neutral terms.
 *
 * The wiring follows the augmented-controller block diagram: the loop error
 * plus the N_G back-injection feeds D_p^{-1}; its output drives N_p and,
 * once activated, the lumped-delay branch through D_G into the plant input.
 * The disturbance enters at the plant output.
 */

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "tdreg/factorization.hpp"
#include "tdreg/quasipoly.hpp"

namespace tdreg {

/// v(t) = c0/2 + sum_l c_l cos(2 pi l t / T - phi_l).
struct FourierSignal {
  struct Harmonic {
    double amplitude = 0.0;
    double phase = 0.0;  ///< radians
  };

  double c0 = 0.0;
  std::vector<Harmonic> harmonics;
  double period = 1.0;

  double value(double t) const;
  /// max |v| over one period (dense sampling).
  double peak() const;
  bool isZero() const;
  static FourierSignal zero() { return {}; }
};

double fourier_value(const FourierSignal& sig, double t);

/// One coefficient of a scalar DDE: coeff * x^(order)(t - delay).
struct DdeTerm {
  double delay = 0.0;
  int order = 0;
  double coeff = 0.0;
};

/// Canonical realization of a proper DelayRational num/den: an internal
/// signal w obeys den(d/dt, delays) w = u and the output is
/// y = num(d/dt, delays) w. The leading (delay-free, order-n) denominator
/// coefficient is the solvability pivot for w^(n).
struct DdeRealization {
  int order = 0;                     ///< n
  double lead = 1.0;                 ///< delay-free coefficient of w^(n)
  std::vector<DdeTerm> den_rest;     ///< remaining denominator terms
  std::vector<DdeTerm> num_terms;    ///< output combination
  double feedthrough = 0.0;          ///< instantaneous dy/du
  double max_delay = 0.0;
};

/// Throws NotRealizable unless the delay-free denominator degree bounds
/// every other denominator degree and every numerator degree.
DdeRealization realize_dde(const DelayRational& block);

/// Closed-loop run description. Delays of every block must be integer
/// multiples of step (within 1e-9 relative); the plant output pre-history
/// is the constant initial_output, every other state starts at zero.
struct SimScenario {
  CoprimeFactorization plant_f;
  CoprimeFactorization ctrl_f;
  FirDelayParameter qm = FirDelayParameter::zeros(1.0, 0);
  FourierSignal disturbance;
  FourierSignal reference;
  double t_disturbance_on = 0.0;
  double t_augmentation_on = 0.0;  ///< beyond t_end = never activated
  double t_end = 1.0;
  double step = 1e-3;
  double initial_output = 0.0;
  double activation_ramp = 0.0;  ///< 0 = hard switch, else linear ramp [s]
};

/// Uniformly sampled run log. qm_input is the D_p^{-1} output tap feeding
/// the lumped-delay branch (diagnostic, not part of the CSV contract).
struct TimeSeries {
  Eigen::VectorXd t;
  Eigen::VectorXd y;  ///< plant output including disturbance
  Eigen::VectorXd u;  ///< control
  Eigen::VectorXd d;  ///< disturbance
  Eigen::VectorXd e;  ///< reference - y
  Eigen::VectorXd qm_input;
};

TimeSeries simulate_closed_loop(const SimScenario& scenario);

/// max |y| over the trailing window.
double steady_state_residual(const TimeSeries& ts, double window);

/// max |y| over [t_begin, t_end_window].
double window_residual(const TimeSeries& ts, double t_begin, double t_end_window);

/// Open-loop response of a single realizable block to an arbitrary input,
/// from zero initial history. Used to tie the integrator back to the
/// frequency-domain evaluation path.
Eigen::VectorXd simulate_block_response(const DelayRational& block,
                                        const std::function<double(double)>& input,
                                        double t_end,
                                        double step);

}  // namespace tdreg
