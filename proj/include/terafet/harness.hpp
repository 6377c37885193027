#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "terafet/analytic.hpp"
#include "terafet/circuit.hpp"
#include "terafet/engine.hpp"
#include "terafet/hydro.hpp"
#include "terafet/response.hpp"

namespace terafet {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key(key) {}
  std::string key;
};

// One simulation scenario: device, bias, drive, frequency grid, methods.
struct Scenario {
  std::string name = "scenario";
  DeviceParams device;
  BiasPoint bias;
  double amplitude = 1.5e-3; // V
  std::vector<double> frequencies;
  BoundaryCondition boundary;
  std::vector<Method> methods;
  SolverConfig solver;
  HydroConfig hydro;
  bool parasitics = false; // off: R_s = R_d = 0 and external caps 0
  std::string output_dir = "out";

  // Device with parasitics zeroed unless enabled.
  DeviceParams effective_device() const;
  void validate() const; // throws ConfigError
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path); // throws ConfigError
std::string config_hash(const Scenario& s);      // FNV-1a64 of canonical JSON

// Bundled presets: fig5a fig5b fig5c fig5d fig8a fig8b fig2.
Scenario preset(const std::string& name);
std::vector<std::string> preset_names();

// Rectified response of the segmented circuit at one frequency, reported in
// the source-to-drain convention shared by all methods (positive when the
// open drain is pulled below the source).
ResponsePoint circuit_response_point(const Scenario& s, InductanceMode mode,
                                     double frequency, double amplitude);

// Dispatch one method over the scenario's frequency grid; points may run
// concurrently (threads <= 0: hardware concurrency).
ResponseCurve frequency_sweep(const Scenario& s, Method method,
                              int threads = 0);

struct PeakInfo {
  double frequency = 0.0;
  double delta_u = 0.0;
  bool interior = false; // true if a genuine interior local maximum was found
};

// First interior local maximum (parabolic refinement); falls back to the
// grid argmax for monotone curves.
PeakInfo first_peak(const ResponseCurve& c);

struct ComparisonReport {
  std::string scenario;
  std::string hash;
  std::map<std::string, PeakInfo> peaks; // by method name
  // RMS log10 error keyed "methodA|methodB", over points valid in both.
  std::map<std::string, double> rms_log10;
  std::vector<Regime> regime_per_frequency;
  Regime regime_at_peak = Regime::non_resonant;
  bool gate_exempt = false; // true when the peak is outside strong resonance
  std::optional<bool> varying_beats_uniform;
};

// Requires >= 2 curves on identical grids (hard error otherwise).
ComparisonReport compare_methods(const std::vector<ResponseCurve>& curves,
                                 const Scenario& s);
nlohmann::json report_to_json(const ComparisonReport& r);

double rms_log10_error(const ResponseCurve& a, const ResponseCurve& b);

// Per-segment Drude inductance variation over one steady cycle.
struct DrudeProfileRow {
  double position;  // segment midpoint, m
  double l_drude0;  // H, no-excitation value
  double delta_max; // H, max |L(t) - L0| over the cycle
};
std::vector<DrudeProfileRow> drude_profile_at(const Scenario& s,
                                              double frequency,
                                              double amplitude);

struct RunOptions {
  int threads = 0;
  bool want_profiles = false;
  double profile_frequency = 0.0; // 0: analytic peak
};

// Execute the scenario: one response CSV per method, a comparison report
// when >= 2 methods ran, optional profiles. Returns 0, or 3 when any sweep
// point failed hard (partial artifacts retained).
int run_scenario(const Scenario& s, const RunOptions& opt);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

// Acceptance gate; prints one PASS/FAIL line per criterion to `log`.
// artifact_dir (optional) receives the curves the gate was computed from.
std::vector<CriterionResult> run_acceptance(std::ostream& log, int threads = 0,
                                            const std::string& artifact_dir = "");

// Engine verification helpers (used by the gate and the test suite).

// Driven series RLC versus the closed-form phasor solution.
struct RlcSmoke {
  double amp_rel_err = 0.0;
  double phase_err_deg = 0.0;
};
RlcSmoke rlc_smoke(int steps_per_cycle);

// Worst relative deviation of the analytic MNA Jacobian from central finite
// differences (DC and one transient-step assembly), on a perturbed state.
double max_jacobian_fd_error(const SegmentedCircuit& c, const SolverConfig& cfg);

} // namespace terafet
