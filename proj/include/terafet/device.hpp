#pragma once

#include <string>

namespace terafet {

// Geometry, transport and gate-stack parameters of one device.
// All quantities SI.
struct DeviceParams {
  double channel_length = 90e-9;   // m
  double width = 1e-6;             // m
  double mobility = 0.4;           // m^2/Vs
  double m_eff = 1.8218767403e-31; // kg (0.2 m_e default)
  double c_ox = 0.015;             // F/m^2
  double v_t0 = 0.3;               // V
  double eta = 1.2;                // subthreshold ideality, >= 1
  double temperature = 300.0;      // K
  int n_segments = 50;
  double r_source = 0.0;           // ohm
  double r_drain = 0.0;            // ohm
  double c_gs_ext = 0.0;           // F
  double c_gd_ext = 0.0;           // F

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  double tau() const;              // momentum relaxation time m*mu/q, s
  double thermal_voltage() const;  // kT/q, V
};

struct BiasPoint {
  double v_gs = 0.45; // V
  double v_ds = 0.0;  // V
  // Gate voltage swing, always recomputed.
  double v_gt(const DeviceParams& p) const { return v_gs - p.v_t0; }
};

enum class ExcitationPort { gate_source };

struct Excitation {
  double amplitude = 0.0;  // V
  double frequency = 1e12; // Hz
  ExcitationPort port = ExcitationPort::gate_source;
  double omega() const;    // 2*pi*f, rad/s
  void validate() const;
};

struct Transport {
  double tau;      // s
  double s_plasma; // m/s
  double v_therm;  // V
};

// tau = m*mu/q, s = sqrt(q*V_gt/m), V_therm = kT/q.
// Rejects V_gt <= 0 (plasma velocity undefined below threshold).
Transport derive_transport(const DeviceParams& p, const BiasPoint& b);

// Unified charge-control sheet density, 1/m^2:
//   n_s = (eta*c_ox*V_therm/q) * ln(1 + exp((V_g - V_T0 - V_ch)/(eta*V_therm)))
// Strictly positive and smooth for all inputs.
double uccm_density(const DeviceParams& p, double v_g, double v_ch);

// Analytic dn_s/dV_g (= -dn_s/dV_ch).
double uccm_density_dvg(const DeviceParams& p, double v_g, double v_ch);

// Drift current through a channel piece of length seg_len, gradual channel
// approximation in charge form. Positive into the drain terminal when
// v_d > v_s; antisymmetric under terminal swap.
double channel_current(const DeviceParams& p, double v_g, double v_s,
                       double v_d, double seg_len);

// Same integral by Gauss-Legendre quadrature of q*n_s over channel
// potential. Validation route for the closed form above.
double channel_current_quadrature(const DeviceParams& p, double v_g,
                                  double v_s, double v_d, double seg_len,
                                  int order = 32);

// g_ch = dI_d/dV_d evaluated analytically; strictly positive.
double segment_conductance(const DeviceParams& p, double v_g, double v_s,
                           double v_d, double seg_len);

// Conductance floor below which the Drude inductance is clamped.
inline constexpr double g_floor = 1e-12; // S

struct DrudeInductance {
  double value;  // H
  bool clamped;  // true when g < g_floor and L_max = tau/g_floor was returned
};

// L_drude = tau/g_ch, clamped at tau/g_floor for degenerate conductance.
DrudeInductance drude_inductance(double g_ch, double tau);

// Inductance variation against the no-excitation reference.
inline double delta_drude(double l_drude, double l_drude0) {
  return l_drude - l_drude0;
}

// Gate-channel charge of a channel piece: Q = q*W*seg_len*n_s(V_g, V_node).
// Function of the gate-to-channel voltage V_g - V_node.
double segment_charge(const DeviceParams& p, double v_g, double v_node,
                      double seg_len);

// dQ/d(V_g - V_node); approaches c_ox*W*seg_len in strong inversion.
double segment_capacitance(const DeviceParams& p, double v_g, double v_node,
                           double seg_len);

} // namespace terafet
