#pragma once

#include <vector>

#include "terafet/device.hpp"
#include "terafet/response.hpp"

namespace terafet {

enum class Regime { strong_resonant, marginal, non_resonant };

std::string regime_name(Regime r);

struct RegimeReport {
  double omega_tau = 0.0;
  double l_cr = 0.0;        // m (+inf at omega = 0)
  double length_ratio = 0.0; // L / L_cr
  Regime regime = Regime::non_resonant;
};

// Dimensionless Dyakonov-Shur response function:
//   f = 1 + beta - (1 + beta*cos(2k'L)) / (sinh^2(k''L) + cos^2(k'L))
// with k' + i k'' = sqrt(omega*(omega + i/tau))/s (k', k'' >= 0) and
// beta = 2*omega*tau / sqrt(1 + (omega*tau)^2).
double ds_f(double omega, const DeviceParams& p, const BiasPoint& b);

// Rectified response delta_U = V_a^2 * f(omega) / (4 V_gt).
double ds_response(double omega, const DeviceParams& p, const BiasPoint& b,
                   double v_a);

// Plasma-wave travel distance L_cr = s*tau*sqrt(1 + 1/(omega*tau)).
// Rejects omega <= 0 (diverges).
double critical_length(double omega, const DeviceParams& p, const BiasPoint& b);

// strong_resonant iff omega*tau > 1 and L/L_cr < 0.5;
// non_resonant iff omega*tau < 1 or L/L_cr > 1; marginal otherwise.
RegimeReport classify_regime(const DeviceParams& p, const BiasPoint& b,
                             double omega);

// Analytic response over a frequency grid.
ResponseCurve analytic_response_sweep(const DeviceParams& p, const BiasPoint& b,
                                      double v_a,
                                      const std::vector<double>& frequencies);

} // namespace terafet
