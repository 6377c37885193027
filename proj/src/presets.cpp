#include "terafet/harness.hpp"

namespace terafet {

namespace {

std::vector<double> linear_grid(double start, double stop, int points) {
  std::vector<double> g(points);
  const double step = (stop - start) / (points - 1);
  for (int i = 0; i < points; ++i) g[i] = start + i * step;
  return g;
}

Scenario base_scenario() {
  Scenario s;
  s.device = DeviceParams{}; // 90 nm / 0.4 m^2/Vs defaults
  s.device.r_source = 10.0;  // parasitic values; applied only with parasitics on
  s.device.r_drain = 10.0;
  s.device.c_gs_ext = 0.1 * s.device.c_ox * s.device.width * s.device.channel_length;
  s.device.c_gd_ext = s.device.c_gs_ext;
  s.bias = BiasPoint{0.45, 0.0}; // V_gt = 0.15 V
  s.amplitude = 0.01 * 0.15;     // small signal, documented choice
  s.boundary = BoundaryCondition{BoundaryMode::open_drain, 1e8};
  s.methods = {Method::analytic, Method::hydro, Method::circuit_varying,
               Method::circuit_uniform};
  s.solver.settle_tol = 1e-4;
  s.parasitics = false;
  return s;
}

void set_geometry(Scenario& s, double length, double mobility) {
  s.device.channel_length = length;
  s.device.mobility = mobility;
  s.device.c_gs_ext = 0.1 * s.device.c_ox * s.device.width * length;
  s.device.c_gd_ext = s.device.c_gs_ext;
}

} // namespace

std::vector<std::string> preset_names() {
  return {"fig5a", "fig5b", "fig5c", "fig5d", "fig8a", "fig8b", "fig2"};
}

Scenario preset(const std::string& name) {
  Scenario s = base_scenario();
  s.name = name;
  if (name == "fig5a") {
    set_geometry(s, 90e-9, 0.4);
    s.frequencies = linear_grid(0.2e12, 3.0e12, 29);
  } else if (name == "fig5b") {
    set_geometry(s, 45e-9, 0.4);
    s.frequencies = linear_grid(0.3e12, 5.1e12, 25);
  } else if (name == "fig5c") {
    set_geometry(s, 20e-9, 0.4);
    s.frequencies = linear_grid(1.0e12, 9.0e12, 25);
  } else if (name == "fig5d") {
    set_geometry(s, 20e-9, 0.1);
    s.frequencies = linear_grid(1.0e12, 9.0e12, 25);
  } else if (name == "fig8a") {
    set_geometry(s, 45e-9, 0.1);
    s.frequencies = linear_grid(0.3e12, 5.1e12, 25);
  } else if (name == "fig8b") {
    set_geometry(s, 90e-9, 0.1);
    s.frequencies = linear_grid(0.2e12, 3.0e12, 29);
  } else if (name == "fig2") {
    set_geometry(s, 90e-9, 0.4);
    s.frequencies = linear_grid(0.2e12, 3.0e12, 15);
    s.methods = {Method::circuit_varying};
  } else {
    throw ConfigError("preset", "unknown preset '" + name + "'");
  }
  s.output_dir = "out/" + name;
  return s;
}

} // namespace terafet
