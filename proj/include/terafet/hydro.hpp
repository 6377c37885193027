#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "terafet/device.hpp"
#include "terafet/response.hpp"

namespace terafet {

enum class HydroScheme { maccormack, lax_wendroff };

// Boundary handling: driven_open is the detector configuration
// (U(0,t) = V_gt + V_a cos(wt), zero current at x = L); reflecting and
// periodic exist for scheme verification.
enum class HydroBoundary { driven_open, reflecting, periodic };

struct HydroConfig {
  int grid_points = 201;
  double cfl = 0.5;
  int max_cycles = 300;
  HydroScheme scheme = HydroScheme::maccormack;
  double settle_rtol = 1e-4;
  int settle_quiet_cycles = 5;
  int profile_time_samples = 100;

  void validate() const; // grid_points >= 51, 0 < cfl < 1
};

// Local gate-to-channel voltage U and drift velocity v on the grid.
struct HydroState {
  std::vector<double> u; // V
  std::vector<double> v; // m/s
  double dx = 0.0;
  double time = 0.0;
};

struct CflViolation : std::runtime_error {
  explicit CflViolation(const std::string& w) : std::runtime_error(w) {}
};
struct ThresholdCrossing : std::runtime_error {
  explicit ThresholdCrossing(const std::string& w) : std::runtime_error(w) {}
};

// dt = cfl * dx / max_j(|v_j| + sqrt(q U_j / m)); throws on non-finite state.
double cfl_dt(const HydroState& s, const HydroConfig& cfg,
              const DeviceParams& p);

// Low-level stepper for the 1-D electron fluid
//   dU/dt + d(U v)/dx = 0
//   dv/dt + d(v^2/2 + (q/m) U)/dx = -v/tau
// with the friction term applied as an exact exponential factor (Strang
// split) around the hyperbolic update.
class HydroSolver {
 public:
  HydroSolver(const DeviceParams& p, const BiasPoint& b, const Excitation& e,
              const HydroConfig& cfg, HydroBoundary bc, double domain_length);

  // Advance one step of size dt; drive_t is the time used for the driven
  // boundary value (end-of-step time).
  void step(double dt);

  const HydroState& state() const { return state_; }
  HydroState& state() { return state_; }
  double v_gt() const { return v_gt_; }
  double g_eff() const { return g_eff_; }

 private:
  void apply_bc(std::vector<double>& u, std::vector<double>& v, double t) const;
  void hyperbolic(double dt);

  DeviceParams params_;
  HydroConfig cfg_;
  HydroBoundary bc_;
  Excitation exc_;
  double v_gt_, g_eff_, tau_;
  HydroState state_;
  std::vector<double> up_, vp_, f1_, f2_; // predictor scratch
  long step_count_ = 0;
};

struct HydroResult {
  double delta_u = 0.0;   // cycle-averaged U(L) - V_gt after settling
  bool settled = false;
  int cycles_run = 0;
  std::vector<double> cycle_averages;
  ChannelProfile profile; // filled when requested
};

// Driven solve: integrates until the cycle average of U(L) settles (or
// max_cycles), then extracts the rectified response and optionally one
// steady-state cycle of profiles.
// Errors: CflViolation, ThresholdCrossing (U <= 0: amplitude too large).
HydroResult solve_hydro(const DeviceParams& p, const BiasPoint& b,
                        const Excitation& e, const HydroConfig& cfg,
                        bool want_profile = false);

// One solve per grid frequency; per-point failures are recorded in the
// curve, not fatal to the sweep.
ResponseCurve hydro_response_sweep(const DeviceParams& p, const BiasPoint& b,
                                   double v_a,
                                   const std::vector<double>& frequencies,
                                   const HydroConfig& cfg, int threads = 0);

} // namespace terafet
