#include "terafet/circuit.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "terafet/constants.hpp"

namespace terafet {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

} // namespace

int SegmentedCircuit::add_node(const std::string& name) {
  node_names.push_back(name);
  return n_nodes++;
}

SegmentedCircuit build_segmented(const DeviceParams& params,
                                 const BiasPoint& bias, const Excitation& exc,
                                 const BoundaryCondition& bc,
                                 InductanceMode mode) {
  params.validate();
  if (exc.amplitude < 0.0)
    throw std::invalid_argument("Excitation.amplitude: must be >= 0");

  SegmentedCircuit c;
  c.params = params;
  c.bias = bias;
  c.exc = exc;
  c.mode = mode;
  c.boundary = bc;

  const int n = params.n_segments;
  const double seg_len = params.channel_length / n;

  c.node_names.push_back("source_ext");
  c.gate = c.add_node("gate");
  if (params.r_source > 0.0) {
    c.source = c.add_node("s");
  } else {
    c.source = 0;
    c.node_names[0] += " s";
  }

  c.seg_s.resize(n);
  c.seg_d.resize(n);
  c.seg_mid.resize(n);
  c.seg_channel_elem.resize(n);
  c.seg_inductor_elem.resize(n);

  int prev = c.source;
  for (int i = 0; i < n; ++i) {
    c.seg_s[i] = prev;
    c.seg_mid[i] = c.add_node("m" + std::to_string(i + 1));
    c.seg_d[i] = (i + 1 < n) ? c.add_node("d" + std::to_string(i + 1))
                             : c.add_node("d");
    prev = c.seg_d[i];
  }
  c.drain = c.seg_d[n - 1];
  if (params.r_drain > 0.0) {
    c.drain_ext = c.add_node("drain_ext");
  } else {
    c.drain_ext = c.drain;
    c.node_names[c.drain] += " drain_ext";
  }
  c.observe = c.drain_ext;

  if (params.r_source > 0.0) {
    Element r;
    r.kind = ElementKind::resistor;
    r.name = "Rs";
    r.p = c.source;
    r.n = 0;
    r.value = params.r_source;
    c.elements.push_back(r);
  }

  for (int i = 0; i < n; ++i) {
    Element ch;
    ch.kind = ElementKind::channel;
    ch.name = "CH" + std::to_string(i + 1);
    ch.p = c.seg_mid[i]; // drain-side terminal
    ch.n = c.seg_s[i];   // source-side terminal
    ch.seg_len = seg_len;
    ch.gate = c.gate;
    c.seg_channel_elem[i] = static_cast<int>(c.elements.size());
    c.elements.push_back(ch);

    Element ld;
    ld.kind = ElementKind::drude_inductor;
    ld.name = "LD" + std::to_string(i + 1);
    ld.p = c.seg_d[i];
    ld.n = c.seg_mid[i];
    ld.gate = c.gate;
    if (mode == InductanceMode::varying) {
      ld.ctrl_s = c.seg_s[i];
      ld.ctrl_d = c.seg_d[i];
      ld.ctrl_len = seg_len;
      ld.divide = 1.0;
    } else {
      ld.ctrl_s = c.source;
      ld.ctrl_d = c.drain;
      ld.ctrl_len = params.channel_length;
      ld.divide = static_cast<double>(n);
    }
    ld.branch = c.n_branches++;
    if (mode == InductanceMode::varying) {
      ld.kin_s = c.seg_s[i];
      ld.kin_d = c.seg_d[i];
    }
    c.seg_inductor_elem[i] = static_cast<int>(c.elements.size());
    c.elements.push_back(ld);
  }
  // Local-evaluation mode carries the convective drop per segment; wire the
  // velocity estimators (each boundary node averages the branch currents of
  // its adjacent segments, single branch at the channel ends). The uniform
  // baseline keeps plain series R+L branches.
  if (mode == InductanceMode::varying) {
    for (int i = 0; i < n; ++i) {
      Element& ld = c.elements[c.seg_inductor_elem[i]];
      const int br = ld.branch;
      ld.kin_s_br[0] =
          (i > 0) ? c.elements[c.seg_inductor_elem[i - 1]].branch : -1;
      ld.kin_s_br[1] = br;
      ld.kin_d_br[0] = br;
      ld.kin_d_br[1] =
          (i + 1 < n) ? c.elements[c.seg_inductor_elem[i + 1]].branch : -1;
    }
  }

  if (params.r_drain > 0.0) {
    Element r;
    r.kind = ElementKind::resistor;
    r.name = "Rd";
    r.p = c.drain;
    r.n = c.drain_ext;
    r.value = params.r_drain;
    c.elements.push_back(r);
  }

  // Gate-channel charges at segment-boundary nodes; half-length cells at the
  // channel ends (LC-ladder discretization, second order in N).
  for (int i = 0; i <= n; ++i) {
    Element q;
    q.kind = ElementKind::nonlinear_charge;
    q.p = c.gate;
    q.n = (i == 0) ? c.source : c.seg_d[i - 1];
    q.seg_len = (i == 0 || i == n) ? 0.5 * seg_len : seg_len;
    q.gate = c.gate;
    if (i == 0)
      q.name = "QGs";
    else if (i == n)
      q.name = "QGd";
    else
      q.name = "QG" + std::to_string(i);
    c.elements.push_back(q);
  }

  if (params.c_gs_ext > 0.0) {
    Element cap;
    cap.kind = ElementKind::linear_capacitor;
    cap.name = "Cgs_ext";
    cap.p = c.gate;
    cap.n = 0;
    cap.value = params.c_gs_ext;
    c.elements.push_back(cap);
  }
  if (params.c_gd_ext > 0.0) {
    Element cap;
    cap.kind = ElementKind::linear_capacitor;
    cap.name = "Cgd_ext";
    cap.p = c.gate;
    cap.n = c.drain_ext;
    cap.value = params.c_gd_ext;
    c.elements.push_back(cap);
  }

  if (bc.mode == BoundaryMode::voltage_drive) {
    const int nd = c.add_node("nd");
    Element probe;
    probe.kind = ElementKind::current_probe;
    probe.name = "PRB";
    probe.p = c.drain_ext;
    probe.n = nd;
    probe.branch = c.n_branches++;
    c.drive_probe_elem = static_cast<int>(c.elements.size());
    c.elements.push_back(probe);

    Element vd;
    vd.kind = ElementKind::voltage_source;
    vd.name = "VD";
    vd.p = nd;
    vd.n = 0;
    vd.value = bias.v_ds;
    vd.branch = c.n_branches++;
    c.elements.push_back(vd);
  } else {
    apply_open_drain(c, bc);
  }

  Element vg;
  vg.kind = ElementKind::voltage_source;
  vg.name = "VG";
  vg.p = c.gate;
  vg.n = 0;
  vg.value = bias.v_gs;
  vg.branch = c.n_branches++;
  c.gate_source_elem = static_cast<int>(c.elements.size());
  c.elements.push_back(vg);

  apply_excitation(c, exc);
  return c;
}

void apply_excitation(SegmentedCircuit& c, const Excitation& exc) {
  if (exc.port != ExcitationPort::gate_source)
    throw std::invalid_argument("apply_excitation: only gate_source drive supported");
  if (c.gate_source_elem < 0) return; // still under construction
  Element& vg = c.elements[c.gate_source_elem];
  vg.amp = exc.amplitude;
  vg.omega = exc.omega();
  c.exc = exc;
}

void apply_open_drain(SegmentedCircuit& c, const BoundaryCondition& bc) {
  if (bc.mode == BoundaryMode::open_drain && bc.r_load <= 1e6)
    throw std::invalid_argument("BoundaryCondition.r_load: open drain requires > 1e6 ohm");
  if (bc.r_load <= 0.0)
    throw std::invalid_argument("BoundaryCondition.r_load: must be > 0");
  for (Element& e : c.elements)
    if (e.name == "Rload") { // already attached, reconfigure
      e.value = bc.r_load;
      c.boundary = bc;
      return;
    }
  Element r;
  r.kind = ElementKind::resistor;
  r.name = "Rload";
  r.p = c.drain_ext;
  r.n = 0;
  r.value = bc.r_load;
  c.elements.push_back(r);
  c.boundary = bc;
}

std::string netlist_export(const SegmentedCircuit& c) {
  std::ostringstream os;
  os << "terafet netlist v1\n";
  os << "segments " << c.params.n_segments << " mode "
     << (c.mode == InductanceMode::varying ? "varying" : "uniform")
     << " nodes " << c.n_nodes << " branches " << c.n_branches << "\n";
  for (int i = 0; i < c.n_nodes; ++i)
    os << "node " << i << " " << c.node_names[i] << "\n";
  for (const Element& e : c.elements) {
    switch (e.kind) {
      case ElementKind::resistor:
        os << "resistor " << e.name << " " << e.p << " " << e.n
           << " r=" << num(e.value) << "\n";
        break;
      case ElementKind::channel:
        os << "resistor " << e.name << " " << e.p << " " << e.n
           << " eval=uccm_channel gate=" << e.gate << " len=" << num(e.seg_len)
           << "\n";
        break;
      case ElementKind::drude_inductor:
        if (e.ctrl_len > 0.0)
          os << "drude_inductor " << e.name << " " << e.p << " " << e.n
             << " eval=tau_over_g gate=" << e.gate << " vs=" << e.ctrl_s
             << " vd=" << e.ctrl_d << " len=" << num(e.ctrl_len)
             << " div=" << num(e.divide) << "\n";
        else
          os << "drude_inductor " << e.name << " " << e.p << " " << e.n
             << " l=" << num(e.value) << "\n";
        break;
      case ElementKind::nonlinear_charge:
        os << "nonlinear_charge " << e.name << " " << e.p << " " << e.n
           << " eval=uccm_charge gate=" << e.gate << " len=" << num(e.seg_len)
           << "\n";
        break;
      case ElementKind::linear_capacitor:
        os << "linear_capacitor " << e.name << " " << e.p << " " << e.n
           << " c=" << num(e.value) << "\n";
        break;
      case ElementKind::voltage_source:
        os << "voltage_source " << e.name << " " << e.p << " " << e.n
           << " dc=" << num(e.value) << " amp=" << num(e.amp)
           << " omega=" << num(e.omega) << "\n";
        break;
      case ElementKind::current_probe:
        os << "current_probe " << e.name << " " << e.p << " " << e.n << "\n";
        break;
    }
  }
  return os.str();
}

} // namespace terafet
