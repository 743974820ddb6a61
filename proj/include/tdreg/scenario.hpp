#pragma once

/**
 * @file scenario.hpp
 * @brief Self-contained scenario files: plant, controller, regulation
 *        target, parameter structure, spectrum window and simulation
 *        staging. Strict JSON schema; unknown keys are fatal.
 *
 * Three presets bundle the demonstration systems: an unstable first-order
 * plant with input delay under a weak PI controller (example1), an
 * unstable retarded plant (example2) and an unstable neutral plant
 * (example3), both under PI(10, 10).
 */

#include <optional>
#include <string>
#include <vector>

#include "tdreg/simulator.hpp"
#include "tdreg/spectrum.hpp"
#include "tdreg/synthesis.hpp"

namespace tdreg {

struct ScenarioFile {
  std::string name;

  // plant and its factorization scheme
  std::string scheme;  ///< "first-order-mu" | "generic-shift" | "pid-shift"
  double fo_a = 0.0;
  double fo_tau = 0.0;
  double fo_mu = 1.0;
  DelayRational plant;
  double shift_pole = 1.0;

  // stabilizing PI controller
  double kp = 0.0;
  double ki = 0.0;
  double ctrl_pole = 1.0;

  HarmonicTarget target;

  double qm_spacing = 0.1;
  int qm_count = 0;
  std::optional<Eigen::VectorXd> qm_gains;  ///< fixed gains skip the design

  RegionSpec spectrum_region;

  double t_disturbance_on = 0.0;
  double t_augmentation_on = 0.0;
  double t_end = 1.0;
  double sim_step = 1e-3;
  double initial_output = 0.0;
  double activation_ramp = 0.0;
  std::optional<FourierSignal> disturbance;
  std::optional<FourierSignal> reference;

  CoprimeFactorization plantFactorization() const;
  CoprimeFactorization controllerFactorization() const;

  /// The file's disturbance, or unit-amplitude zero-phase harmonics of the
  /// target when none is given.
  FourierSignal effectiveDisturbance() const;

  SimScenario simScenario(const FirDelayParameter& qm) const;
};

/// Parses and validates a scenario document.
ScenarioFile parse_scenario(const std::string& json_text, const std::string& name);

/// Loads from a filesystem path, or from the bundled presets when the
/// argument names one of them.
ScenarioFile load_scenario(const std::string& path_or_preset);

std::vector<std::string> preset_names();

/// Raw JSON of a bundled preset, nullptr when unknown.
const char* preset_text(const std::string& name);

}  // namespace tdreg
