#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "terafet/circuit.hpp"
#include "terafet/response.hpp"

namespace terafet {

enum class Integrator { trapezoidal, backward_euler };

// Dynamic law for the bias-dependent inductor: v = d(L i)/dt (flux) or
// v = L di/dt. The two differ at second order in the modulation depth.
enum class InductorLaw { flux, di_dt };

struct SolverConfig {
  int steps_per_cycle = 200;
  int max_cycles = 400;
  double settle_tol = 1e-3;   // relative cycle-to-cycle drift of the observable
  double newton_tol_v = 1e-9; // V
  double newton_tol_i = 1e-12; // A
  int newton_max_iter = 50;
  Integrator integrator = Integrator::trapezoidal;
  InductorLaw inductor_law = InductorLaw::flux;
  int min_cycles = 8;         // always run (and retain) at least this many
  int settle_quiet_cycles = 3;

  void validate() const; // steps_per_cycle >= 50, everything positive
};

struct NonConvergence : std::runtime_error {
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

// Time-sampled node voltages and branch currents from a transient run.
// Retains the final min(cycles_run, min_cycles) full cycles.
struct WaveformSet {
  std::vector<double> time;  // s, strictly increasing, cycle-aligned
  Eigen::MatrixXd voltages;  // n_nodes x n_samples (row 0 = reference)
  Eigen::MatrixXd currents;  // n_branches x n_samples
  int steps_per_cycle = 0;
  int cycles_run = 0;
  bool settled = false;
  std::vector<double> cycle_averages; // observed node, one entry per cycle
  double baseline_observe = 0.0;      // DC value of the observed node
  double max_kcl_residual = 0.0;      // worst post-convergence KCL residual, A
  double dt = 0.0;
};

// Newton-Raphson DC operating point with analytic Jacobians; falls back to
// source stepping (<= 10 ramp steps). Returns the full unknown vector
// [node voltages 1..n-1, branch currents]. Throws NonConvergence.
Eigen::VectorXd dc_operating_point(const SegmentedCircuit& c,
                                   const SolverConfig& cfg);

double node_voltage(const SegmentedCircuit& c, const Eigen::VectorXd& x,
                    int node);

// Implicit transient from the DC operating point at dt = 1/(f*steps_per_cycle)
// until the cycle-averaged observable drifts less than settle_tol or
// max_cycles is reached (result flagged, not fatal).
WaveformSet transient(const SegmentedCircuit& c, const SolverConfig& cfg);

struct DcResponse {
  double delta_u = 0.0; // V, observed-node average minus baseline
  bool flagged = false; // last-4-cycle averages disagree beyond settle_tol
};

// Mean observed-node voltage over the final 4 cycles minus the DC baseline.
// Positive when the node rises above the no-excitation level.
DcResponse extract_dc_response(const WaveformSet& w, double baseline,
                               double settle_tol);

// Drift velocity v = I_branch/(q n W) and midpoint density per segment over
// the final retained cycle.
ChannelProfile extract_profiles(const WaveformSet& w,
                                const SegmentedCircuit& c);

struct IvPoint {
  double v_gs, v_ds, i_d;
};

// DC drain current over a (V_gs, V_ds) grid using the full segmented circuit.
std::vector<IvPoint> iv_sweep(const DeviceParams& params,
                              const std::vector<double>& vgs_grid,
                              const std::vector<double>& vds_grid,
                              const SolverConfig& cfg);

// Residual and Jacobian assembly for the circuit equations; exposed for
// Jacobian verification against finite differences.
class MnaSystem {
 public:
  explicit MnaSystem(const SegmentedCircuit& c);

  int n_voltage_unknowns() const { return nv_; }
  int n_unknowns() const { return nv_ + nb_; }

  // src_scale ramps all source DC values (source stepping).
  void assemble_dc(const Eigen::VectorXd& x, double src_scale,
                   Eigen::MatrixXd& J, Eigen::VectorXd& F) const;
  void assemble_step(const Eigen::VectorXd& x, double t_new, double dt,
                     const SolverConfig& cfg, Eigen::MatrixXd& J,
                     Eigen::VectorXd& F) const;

  void init_state(const Eigen::VectorXd& x_dc);
  void commit_step(const Eigen::VectorXd& x, double dt,
                   const SolverConfig& cfg);

  // true if the branch-equation row carries units of volts.
  bool branch_row_is_voltage(int branch, const SolverConfig& cfg) const;

 private:
  struct ElemState {
    double q = 0.0;    // stored charge, C
    double i = 0.0;    // element current, A
    double flux = 0.0; // L*i, Wb
    double v = 0.0;    // voltage across, V
    double ind = 0.0;  // inductance at last accepted step, H
  };

  double volt(const Eigen::VectorXd& x, int node) const {
    return node == 0 ? 0.0 : x[node - 1];
  }

  struct DrudeEval {
    double l;
    double dl_dvg, dl_dvs, dl_dvd;
  };
  DrudeEval eval_drude(const Element& e, const Eigen::VectorXd& x) const;

  struct KineticEval {
    double k = 0.0; // (m/2q)(v_d^2 - v_s^2), V
    double dk_dvs = 0.0, dk_dvd = 0.0, dk_dvg = 0.0;
    double dk_di[4] = {0.0, 0.0, 0.0, 0.0}; // wrt kin_s_br[0..1], kin_d_br[0..1]
  };
  KineticEval eval_kinetic(const Element& e, const Eigen::VectorXd& x) const;

  const SegmentedCircuit& ckt_;
  int nv_, nb_;
  std::vector<ElemState> st_;
};

} // namespace terafet
