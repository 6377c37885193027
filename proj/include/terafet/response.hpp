#pragma once

#include <string>
#include <vector>

namespace terafet {

enum class Method { analytic, hydro, circuit_varying, circuit_uniform };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct ResponsePoint {
  double frequency = 0.0; // Hz
  double delta_u = 0.0;   // V, rectified response (source-to-drain convention)
  bool ok = true;
  std::string flag = "ok"; // ok | no_settle | non_convergence | ...
};

// Rectified DC response versus excitation frequency for one method.
struct ResponseCurve {
  Method method = Method::analytic;
  std::vector<ResponsePoint> points;
  std::string scenario;
};

// Position- and time-resolved drift velocity and sheet density over one
// steady-state excitation cycle.
struct ChannelProfile {
  std::vector<double> positions; // m
  std::vector<double> times;     // s
  // Row-major [position][time].
  std::vector<std::vector<double>> velocity; // m/s
  std::vector<std::vector<double>> density;  // 1/m^2
};

} // namespace terafet
