#include "tdreg/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tdreg {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// bundled presets

const char* kExample1 = R"json({
  "plant": {"scheme": "first-order-mu", "a": 1.0, "tau": 0.5, "mu": 100.0},
  "controller": {"kp": 1.27, "ki": 0.0536, "pole": 1.0},
  "target": {"f_hz": 4.0, "harmonics": 1, "include_dc": true},
  "qm": {"spacing": 0.01, "count": 2},
  "spectrum": {"re_min": -9.0, "re_max": 3.0, "im_min": 0.0, "im_max": 40.0, "grid_step": 0.05},
  "simulation": {"t_disturbance_on": 20.0, "t_augmentation_on": 30.0, "t_end": 40.0,
                 "step": 0.001, "initial_output": 1.0}
})json";

const char* kExample2 = R"json({
  "plant": {"scheme": "generic-shift",
            "num": [{"delay": 0.0, "coeffs": [1.0]}],
            "den": [{"delay": 0.0, "coeffs": [-2.0, 1.0]}, {"delay": 1.0, "coeffs": [-1.0]}],
            "shift_pole": 1.0},
  "controller": {"kp": 10.0, "ki": 10.0, "pole": 1.0},
  "target": {"f_hz": 4.0, "harmonics": 2, "include_dc": true},
  "qm": {"spacing": 0.05, "count": 4},
  "spectrum": {"re_min": -5.0, "re_max": 3.0, "im_min": 0.0, "im_max": 60.0, "grid_step": 0.05},
  "simulation": {"t_disturbance_on": 3.0, "t_augmentation_on": 5.0, "t_end": 15.0,
                 "step": 0.001, "initial_output": 1.0}
})json";

const char* kExample3 = R"json({
  "plant": {"scheme": "generic-shift",
            "num": [{"delay": 0.0, "coeffs": [1.0]}],
            "den": [{"delay": 0.0, "coeffs": [-3.0, 1.0]}, {"delay": 1.0, "coeffs": [0.0, -0.5]},
                    {"delay": 1.5, "coeffs": [-2.0]}],
            "shift_pole": 1.0},
  "controller": {"kp": 10.0, "ki": 10.0, "pole": 1.0},
  "target": {"f_hz": 4.0, "harmonics": 8, "include_dc": true},
  "qm": {"spacing": 0.08, "count": 25},
  "spectrum": {"re_min": -5.0, "re_max": 3.0, "im_min": 0.0, "im_max": 210.0, "grid_step": 0.05},
  "simulation": {"t_disturbance_on": 8.0, "t_augmentation_on": 15.0, "t_end": 28.0,
                 "step": 0.001, "initial_output": 1.0}
})json";

// ---------------------------------------------------------------------------
// strict parsing helpers

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ScenarioError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) throw ScenarioError(where + ": unknown key '" + it.key() + "'");
  }
}

const json& need(const json& j, const std::string& where, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ScenarioError(where + ": missing required key '" + key + "'");
  return *it;
}

double need_number(const json& j, const std::string& where, const char* key) {
  const json& v = need(j, where, key);
  if (!v.is_number()) throw ScenarioError(where + "." + key + ": expected a number");
  return v.get<double>();
}

double opt_number(const json& j, const std::string& where, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw ScenarioError(where + "." + key + ": expected a number");
  return it->get<double>();
}

int need_int(const json& j, const std::string& where, const char* key) {
  const json& v = need(j, where, key);
  if (!v.is_number_integer()) throw ScenarioError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

int opt_int(const json& j, const std::string& where, const char* key, int fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) throw ScenarioError(where + "." + key + ": expected an integer");
  return it->get<int>();
}

bool opt_bool(const json& j, const std::string& where, const char* key, bool fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) throw ScenarioError(where + "." + key + ": expected a boolean");
  return it->get<bool>();
}

Quasipolynomial parse_terms(const json& j, const std::string& where) {
  if (!j.is_array()) throw ScenarioError(where + ": expected an array of terms");
  std::vector<QpTerm> terms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string here = where + "[" + std::to_string(i) + "]";
    const json& t = j[i];
    check_keys(t, here, {"delay", "coeffs"});
    const double delay = need_number(t, here, "delay");
    const json& c = need(t, here, "coeffs");
    if (!c.is_array() || c.empty())
      throw ScenarioError(here + ".coeffs: expected a nonempty array of numbers");
    Eigen::VectorXd coeffs(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (!c[k].is_number()) throw ScenarioError(here + ".coeffs: expected numbers");
      coeffs[static_cast<Eigen::Index>(k)] = c[k].get<double>();
    }
    terms.push_back({delay, Polynomial(coeffs)});
  }
  return Quasipolynomial(std::move(terms));
}

FourierSignal parse_signal(const json& j, const std::string& where, double default_period) {
  check_keys(j, where, {"c0", "period", "harmonics"});
  FourierSignal sig;
  sig.c0 = opt_number(j, where, "c0", 0.0);
  sig.period = opt_number(j, where, "period", default_period);
  if (!(sig.period > 0.0)) throw ScenarioError(where + ".period: must be positive");
  auto it = j.find("harmonics");
  if (it != j.end()) {
    if (!it->is_array()) throw ScenarioError(where + ".harmonics: expected an array");
    for (std::size_t l = 0; l < it->size(); ++l) {
      const std::string here = where + ".harmonics[" + std::to_string(l) + "]";
      check_keys((*it)[l], here, {"amplitude", "phase"});
      FourierSignal::Harmonic h;
      h.amplitude = need_number((*it)[l], here, "amplitude");
      h.phase = opt_number((*it)[l], here, "phase", 0.0);
      sig.harmonics.push_back(h);
    }
  }
  return sig;
}

}  // namespace

ScenarioFile parse_scenario(const std::string& json_text, const std::string& name) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("scenario '" + name + "': " + e.what());
  }
  check_keys(j, name, {"plant", "controller", "target", "qm", "spectrum", "simulation"});

  ScenarioFile sc;
  sc.name = name;

  {
    const json& p = need(j, name, "plant");
    const std::string where = name + ".plant";
    const json& scheme_v = need(p, where, "scheme");
    if (!scheme_v.is_string()) throw ScenarioError(where + ".scheme: expected a string");
    sc.scheme = scheme_v.get<std::string>();
    if (sc.scheme == "first-order-mu") {
      check_keys(p, where, {"scheme", "a", "tau", "mu"});
      sc.fo_a = need_number(p, where, "a");
      sc.fo_tau = need_number(p, where, "tau");
      sc.fo_mu = need_number(p, where, "mu");
    } else if (sc.scheme == "generic-shift" || sc.scheme == "pid-shift") {
      check_keys(p, where, {"scheme", "num", "den", "shift_pole"});
      const Quasipolynomial num = parse_terms(need(p, where, "num"), where + ".num");
      const Quasipolynomial den = parse_terms(need(p, where, "den"), where + ".den");
      sc.plant = DelayRational(num, den);
      sc.shift_pole = opt_number(p, where, "shift_pole", 1.0);
      if (sc.scheme == "pid-shift" && (num.maxDelay() > 0.0 || den.maxDelay() > 0.0))
        throw ScenarioError(where + ": scheme 'pid-shift' expects a delay-free rational plant");
    } else {
      throw ScenarioError(where + ".scheme: expected 'first-order-mu', 'generic-shift' or 'pid-shift'");
    }
  }

  {
    const json& c = need(j, name, "controller");
    const std::string where = name + ".controller";
    check_keys(c, where, {"kp", "ki", "pole"});
    sc.kp = need_number(c, where, "kp");
    sc.ki = need_number(c, where, "ki");
    sc.ctrl_pole = opt_number(c, where, "pole", 1.0);
  }

  {
    const json& t = need(j, name, "target");
    const std::string where = name + ".target";
    check_keys(t, where, {"f_hz", "period", "harmonics", "include_dc"});
    const bool has_f = t.find("f_hz") != t.end();
    const bool has_T = t.find("period") != t.end();
    if (has_f == has_T)
      throw ScenarioError(where + ": give exactly one of 'f_hz' or 'period'");
    sc.target.period = has_f ? 1.0 / need_number(t, where, "f_hz") : need_number(t, where, "period");
    if (!(sc.target.period > 0.0)) throw ScenarioError(where + ": period must be positive");
    sc.target.harmonic_count = need_int(t, where, "harmonics");
    if (sc.target.harmonic_count < 1) throw ScenarioError(where + ".harmonics: must be >= 1");
    sc.target.include_dc = opt_bool(t, where, "include_dc", true);
  }

  {
    const json& q = need(j, name, "qm");
    const std::string where = name + ".qm";
    check_keys(q, where, {"spacing", "count", "gains"});
    sc.qm_spacing = need_number(q, where, "spacing");
    sc.qm_count = need_int(q, where, "count");
    if (!(sc.qm_spacing > 0.0)) throw ScenarioError(where + ".spacing: must be positive");
    if (sc.qm_count < 0) throw ScenarioError(where + ".count: must be nonnegative");
    auto it = q.find("gains");
    if (it != q.end()) {
      if (!it->is_array() || it->size() != static_cast<std::size_t>(sc.qm_count) + 1)
        throw ScenarioError(where + ".gains: expected an array of count+1 numbers");
      Eigen::VectorXd g(it->size());
      for (std::size_t k = 0; k < it->size(); ++k) {
        if (!(*it)[k].is_number()) throw ScenarioError(where + ".gains: expected numbers");
        g[static_cast<Eigen::Index>(k)] = (*it)[k].get<double>();
      }
      sc.qm_gains = g;
    }
  }

  {
    const json& s = need(j, name, "spectrum");
    const std::string where = name + ".spectrum";
    check_keys(s, where,
               {"re_min", "re_max", "im_min", "im_max", "grid_step", "newton_tol",
                "max_newton_iters"});
    sc.spectrum_region.re_min = need_number(s, where, "re_min");
    sc.spectrum_region.re_max = need_number(s, where, "re_max");
    sc.spectrum_region.im_min = need_number(s, where, "im_min");
    sc.spectrum_region.im_max = need_number(s, where, "im_max");
    sc.spectrum_region.grid_step = opt_number(s, where, "grid_step", 0.0);
    sc.spectrum_region.newton_tol = opt_number(s, where, "newton_tol", 1e-12);
    sc.spectrum_region.max_newton_iters = opt_int(s, where, "max_newton_iters", 50);
    if (!(sc.spectrum_region.re_min < sc.spectrum_region.re_max) ||
        !(sc.spectrum_region.im_min <= sc.spectrum_region.im_max))
      throw ScenarioError(where + ": degenerate region bounds");
  }

  {
    const json& s = need(j, name, "simulation");
    const std::string where = name + ".simulation";
    check_keys(s, where,
               {"t_disturbance_on", "t_augmentation_on", "t_end", "step", "initial_output",
                "activation_ramp", "disturbance", "reference"});
    sc.t_disturbance_on = need_number(s, where, "t_disturbance_on");
    sc.t_augmentation_on = need_number(s, where, "t_augmentation_on");
    sc.t_end = need_number(s, where, "t_end");
    sc.sim_step = need_number(s, where, "step");
    sc.initial_output = opt_number(s, where, "initial_output", 0.0);
    sc.activation_ramp = opt_number(s, where, "activation_ramp", 0.0);
    if (!(sc.sim_step > 0.0)) throw ScenarioError(where + ".step: must be positive");
    if (sc.t_disturbance_on < 0.0 || sc.t_augmentation_on < sc.t_disturbance_on)
      throw ScenarioError(where + ": required 0 <= t_disturbance_on <= t_augmentation_on");
    auto d = s.find("disturbance");
    if (d != s.end()) sc.disturbance = parse_signal(*d, where + ".disturbance", sc.target.period);
    auto r = s.find("reference");
    if (r != s.end()) sc.reference = parse_signal(*r, where + ".reference", sc.target.period);
  }

  return sc;
}

ScenarioFile load_scenario(const std::string& path_or_preset) {
  namespace fs = std::filesystem;
  if (fs::exists(fs::path(path_or_preset))) {
    std::ifstream in(path_or_preset);
    if (!in) throw ScenarioError("cannot read scenario file '" + path_or_preset + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), fs::path(path_or_preset).stem().string());
  }
  if (const char* text = preset_text(path_or_preset)) {
    return parse_scenario(text, path_or_preset);
  }
  throw ScenarioError("'" + path_or_preset +
                      "' is neither a scenario file nor a bundled preset (example1|example2|example3)");
}

std::vector<std::string> preset_names() { return {"example1", "example2", "example3"}; }

const char* preset_text(const std::string& name) {
  if (name == "example1") return kExample1;
  if (name == "example2") return kExample2;
  if (name == "example3") return kExample3;
  return nullptr;
}

CoprimeFactorization ScenarioFile::plantFactorization() const {
  if (scheme == "first-order-mu") return factorize_delayed_first_order(fo_a, fo_tau, fo_mu);
  return factorize_by_shift(plant, shift_pole);
}

CoprimeFactorization ScenarioFile::controllerFactorization() const {
  return factorize_pi(kp, ki, ctrl_pole);
}

FourierSignal ScenarioFile::effectiveDisturbance() const {
  if (disturbance.has_value()) return *disturbance;
  FourierSignal sig;
  sig.period = target.period;
  sig.harmonics.assign(static_cast<std::size_t>(target.harmonic_count), {1.0, 0.0});
  return sig;
}

SimScenario ScenarioFile::simScenario(const FirDelayParameter& qm) const {
  SimScenario sim{plantFactorization(),
                  controllerFactorization(),
                  qm,
                  effectiveDisturbance(),
                  reference.value_or(FourierSignal::zero()),
                  t_disturbance_on,
                  t_augmentation_on,
                  t_end,
                  sim_step,
                  initial_output,
                  activation_ramp};
  if (sim.reference.period <= 0.0) sim.reference.period = 1.0;
  return sim;
}

}  // namespace tdreg
