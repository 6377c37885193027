#include "terafet/device.hpp"

#include <cmath>
#include <stdexcept>

#include "terafet/constants.hpp"
#include "terafet/math_util.hpp"

namespace terafet {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw std::invalid_argument("DeviceParams." + field + ": " + what);
}

} // namespace

void DeviceParams::validate() const {
  for (double v : {channel_length, width, mobility, m_eff, c_ox, v_t0, eta,
                   temperature, r_source, r_drain, c_gs_ext, c_gd_ext})
    if (!std::isfinite(v))
      throw std::invalid_argument("DeviceParams: all fields must be finite");
  require(channel_length > 0.0, "channel_length", "must be > 0");
  require(width > 0.0, "width", "must be > 0");
  require(mobility > 0.0, "mobility", "must be > 0");
  require(m_eff > 0.0, "m_eff", "must be > 0");
  require(c_ox > 0.0, "c_ox", "must be > 0");
  require(temperature > 0.0, "temperature", "must be > 0");
  require(eta >= 1.0, "eta", "must be >= 1");
  require(n_segments >= 1, "n_segments", "must be >= 1");
  require(r_source >= 0.0, "r_source", "must be >= 0");
  require(r_drain >= 0.0, "r_drain", "must be >= 0");
  require(c_gs_ext >= 0.0, "c_gs_ext", "must be >= 0");
  require(c_gd_ext >= 0.0, "c_gd_ext", "must be >= 0");
}

double DeviceParams::tau() const { return m_eff * mobility / constants::q_e; }

double DeviceParams::thermal_voltage() const {
  return constants::k_b * temperature / constants::q_e;
}

double Excitation::omega() const { return 2.0 * constants::pi * frequency; }

void Excitation::validate() const {
  if (amplitude < 0.0)
    throw std::invalid_argument("Excitation.amplitude: must be >= 0");
  if (frequency <= 0.0)
    throw std::invalid_argument("Excitation.frequency: must be > 0");
}

Transport derive_transport(const DeviceParams& p, const BiasPoint& b) {
  p.validate();
  const double v_gt = b.v_gt(p);
  if (v_gt <= 0.0)
    throw std::domain_error(
        "derive_transport: V_gt <= 0, plasma velocity undefined below threshold");
  Transport t;
  t.tau = p.tau();
  t.s_plasma = std::sqrt(constants::q_e * v_gt / p.m_eff);
  t.v_therm = p.thermal_voltage();
  return t;
}

double uccm_density(const DeviceParams& p, double v_g, double v_ch) {
  const double ve = p.eta * p.thermal_voltage();
  const double x = (v_g - p.v_t0 - v_ch) / ve;
  return p.c_ox * ve / constants::q_e * softplus(x);
}

double uccm_density_dvg(const DeviceParams& p, double v_g, double v_ch) {
  const double ve = p.eta * p.thermal_voltage();
  const double x = (v_g - p.v_t0 - v_ch) / ve;
  return p.c_ox / constants::q_e * logistic(x);
}

double channel_current(const DeviceParams& p, double v_g, double v_s,
                       double v_d, double seg_len) {
  if (seg_len <= 0.0)
    throw std::invalid_argument("channel_current: seg_len must be > 0");
  const double ve = p.eta * p.thermal_voltage();
  const double xs = (v_g - p.v_t0 - v_s) / ve;
  const double xd = (v_g - p.v_t0 - v_d) / ve;
  const double k = p.width * p.mobility * p.c_ox * ve * ve / seg_len;
  return k * (softplus_antiderivative(xs) - softplus_antiderivative(xd));
}

double channel_current_quadrature(const DeviceParams& p, double v_g,
                                  double v_s, double v_d, double seg_len,
                                  int order) {
  if (seg_len <= 0.0)
    throw std::invalid_argument("channel_current_quadrature: seg_len must be > 0");
  // I_d = (W*mu/seg_len) * integral_{v_s}^{v_d} q*n_s(v) dv
  const double integral = gl_integrate(
      [&](double v) { return constants::q_e * uccm_density(p, v_g, v); }, v_s,
      v_d, order);
  return p.width * p.mobility / seg_len * integral;
}

double segment_conductance(const DeviceParams& p, double v_g, double v_s,
                           double v_d, double seg_len) {
  if (seg_len <= 0.0)
    throw std::invalid_argument("segment_conductance: seg_len must be > 0");
  (void)v_s; // dI_d/dV_d depends on the drain-side charge only
  return p.width * p.mobility / seg_len * constants::q_e *
         uccm_density(p, v_g, v_d);
}

DrudeInductance drude_inductance(double g_ch, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("drude_inductance: tau must be > 0");
  if (g_ch < g_floor) return {tau / g_floor, true};
  return {tau / g_ch, false};
}

double segment_charge(const DeviceParams& p, double v_g, double v_node,
                      double seg_len) {
  if (seg_len <= 0.0)
    throw std::invalid_argument("segment_charge: seg_len must be > 0");
  return constants::q_e * p.width * seg_len * uccm_density(p, v_g, v_node);
}

double segment_capacitance(const DeviceParams& p, double v_g, double v_node,
                           double seg_len) {
  if (seg_len <= 0.0)
    throw std::invalid_argument("segment_capacitance: seg_len must be > 0");
  const double ve = p.eta * p.thermal_voltage();
  const double x = (v_g - p.v_t0 - v_node) / ve;
  return p.c_ox * p.width * seg_len * logistic(x);
}

} // namespace terafet
