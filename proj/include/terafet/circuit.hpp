#pragma once

#include <string>
#include <vector>

#include "terafet/device.hpp"

namespace terafet {

enum class InductanceMode { varying, uniform };

enum class BoundaryMode { open_drain, resistive_load, voltage_drive };

struct BoundaryCondition {
  BoundaryMode mode = BoundaryMode::open_drain;
  double r_load = 1e8; // ohm; open_drain requires > 1e6
};

enum class ElementKind {
  resistor,         // linear, value ohms
  channel,          // nonlinear channel conductor (printed as resistor/eval)
  drude_inductor,   // bias-dependent inductor; ctrl_len <= 0 means fixed value
  nonlinear_charge, // gate-channel charge element
  linear_capacitor,
  voltage_source,   // value + amp*cos(omega*t), terminals p - n
  current_probe     // zero-volt source, current readout
};

// One branch of the equivalent circuit. Through-current is defined p -> n
// inside the element; KCL adds +i at p and -i at n.
struct Element {
  ElementKind kind;
  std::string name;
  int p = 0;
  int n = 0;
  double value = 0.0;   // R (ohm), C (F), fixed L (H), or source DC value (V)
  double amp = 0.0;     // source AC amplitude
  double omega = 0.0;   // source angular frequency
  double seg_len = 0.0; // channel / charge length share, m
  int gate = -1;        // controlling gate node for evaluators
  int ctrl_s = -1;      // drude: conductance evaluation source node
  int ctrl_d = -1;      // drude: conductance evaluation drain node
  double ctrl_len = 0.0;// drude: conductance evaluation length (<= 0: fixed L)
  double divide = 1.0;  // drude: L = tau/(divide * g)
  int branch = -1;      // branch-current index (inductors, sources, probes)

  // Convective (Bernoulli) drop (m/2q)(v_d^2 - v_s^2) carried by the segment
  // branch during transients; node velocities come from the adjacent branch
  // currents. Telescopes over the chain, so DC solves are unaffected.
  int kin_s = -1, kin_d = -1;      // segment boundary nodes (-1: no term)
  int kin_s_br[2] = {-1, -1};      // adjacent branch indices at kin_s
  int kin_d_br[2] = {-1, -1};      // adjacent branch indices at kin_d
};

// Fig.-1-family N-segment equivalent circuit. Node 0 is the reference and
// coincides with the external source terminal. Segment i is the series pair
// channel(s_i -> mid_i) + drude_inductor(mid_i -> d_i) with d_i = s_{i+1};
// gate-channel charges sit at the boundary nodes (half-length cells at the
// channel ends).
struct SegmentedCircuit {
  DeviceParams params;
  BiasPoint bias;
  Excitation exc;
  InductanceMode mode = InductanceMode::varying;
  BoundaryCondition boundary;

  int n_nodes = 1; // including reference node 0
  int n_branches = 0;
  std::vector<std::string> node_names;
  std::vector<Element> elements;

  // Landmark nodes.
  int gate = -1;
  int source_ext = 0;
  int source = -1;    // intrinsic channel source end (s)
  int drain = -1;     // intrinsic channel drain end (d)
  int drain_ext = -1;
  int observe = -1;   // node monitored for steady-state settling

  // Per-segment bookkeeping (size n_segments).
  std::vector<int> seg_s, seg_d, seg_mid;
  std::vector<int> seg_inductor_elem, seg_channel_elem;

  int gate_source_elem = -1;
  int drive_probe_elem = -1; // voltage_drive mode only

  int add_node(const std::string& name);
  double segment_length() const {
    return params.channel_length / params.n_segments;
  }
};

// Expand device + bias + excitation + boundary into the segmented circuit.
SegmentedCircuit build_segmented(const DeviceParams& params,
                                 const BiasPoint& bias, const Excitation& exc,
                                 const BoundaryCondition& bc,
                                 InductanceMode mode);

// Set the gate-source drive to V_gs + V_a*cos(omega t). Topology unchanged.
void apply_excitation(SegmentedCircuit& c, const Excitation& exc);

// Attach the drain termination: open drain as a large resistor to ground
// (mode open_drain, r_load > 1e6 ohm), or an explicit resistive load.
void apply_open_drain(SegmentedCircuit& c, const BoundaryCondition& bc);

// Deterministic human-readable netlist, one element per line.
std::string netlist_export(const SegmentedCircuit& c);

} // namespace terafet
