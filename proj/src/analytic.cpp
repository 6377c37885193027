#include "terafet/analytic.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "terafet/constants.hpp"

namespace terafet {

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::strong_resonant: return "strong_resonant";
    case Regime::marginal: return "marginal";
    case Regime::non_resonant: return "non_resonant";
  }
  return "unknown";
}

std::string method_name(Method m) {
  switch (m) {
    case Method::analytic: return "analytic";
    case Method::hydro: return "hydro";
    case Method::circuit_varying: return "circuit_varying";
    case Method::circuit_uniform: return "circuit_uniform";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "analytic") return Method::analytic;
  if (name == "hydro") return Method::hydro;
  if (name == "circuit_varying") return Method::circuit_varying;
  if (name == "circuit_uniform") return Method::circuit_uniform;
  throw std::invalid_argument("unknown method: " + name);
}

double ds_f(double omega, const DeviceParams& p, const BiasPoint& b) {
  if (omega < 0.0) throw std::domain_error("ds_f: omega must be >= 0");
  const Transport tr = derive_transport(p, b);
  const double wt = omega * tr.tau;
  const double beta = 2.0 * wt / std::sqrt(1.0 + wt * wt);
  // Principal branch gives k', k'' >= 0 for omega >= 0.
  const std::complex<double> k =
      std::sqrt(std::complex<double>(omega * omega, omega / tr.tau)) /
      tr.s_plasma;
  const double kpl = k.real() * p.channel_length;
  const double kppl = k.imag() * p.channel_length;
  if (kppl > 350.0) return 1.0 + beta; // fully decayed cavity
  const double sh = std::sinh(kppl);
  const double c = std::cos(kpl);
  return 1.0 + beta - (1.0 + beta * std::cos(2.0 * kpl)) / (sh * sh + c * c);
}

double ds_response(double omega, const DeviceParams& p, const BiasPoint& b,
                   double v_a) {
  const double v_gt = b.v_gt(p);
  if (v_gt <= 0.0) throw std::domain_error("ds_response: V_gt must be > 0");
  return v_a * v_a * ds_f(omega, p, b) / (4.0 * v_gt);
}

double critical_length(double omega, const DeviceParams& p,
                       const BiasPoint& b) {
  if (omega <= 0.0)
    throw std::domain_error("critical_length: omega must be > 0");
  const Transport tr = derive_transport(p, b);
  const double wt = omega * tr.tau;
  return tr.s_plasma * tr.tau * std::sqrt(1.0 + 1.0 / wt);
}

RegimeReport classify_regime(const DeviceParams& p, const BiasPoint& b,
                             double omega) {
  RegimeReport r;
  const Transport tr = derive_transport(p, b);
  if (omega <= 0.0) {
    r.omega_tau = 0.0;
    r.l_cr = std::numeric_limits<double>::infinity();
    r.length_ratio = 0.0;
    r.regime = Regime::non_resonant;
    return r;
  }
  r.omega_tau = omega * tr.tau;
  r.l_cr = critical_length(omega, p, b);
  r.length_ratio = p.channel_length / r.l_cr;
  if (r.omega_tau > 1.0 && r.length_ratio < 0.5)
    r.regime = Regime::strong_resonant;
  else if (r.omega_tau < 1.0 || r.length_ratio > 1.0)
    r.regime = Regime::non_resonant;
  else
    r.regime = Regime::marginal;
  return r;
}

ResponseCurve analytic_response_sweep(const DeviceParams& p, const BiasPoint& b,
                                      double v_a,
                                      const std::vector<double>& frequencies) {
  ResponseCurve curve;
  curve.method = Method::analytic;
  curve.points.reserve(frequencies.size());
  for (double f : frequencies) {
    ResponsePoint pt;
    pt.frequency = f;
    pt.delta_u = ds_response(2.0 * constants::pi * f, p, b, v_a);
    curve.points.push_back(pt);
  }
  return curve;
}

} // namespace terafet
