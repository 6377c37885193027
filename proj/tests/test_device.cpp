#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "terafet/constants.hpp"
#include "terafet/device.hpp"
#include "terafet/math_util.hpp"

using namespace terafet;

namespace {

DeviceParams default_params() { return DeviceParams{}; }

} // namespace

TEST_CASE("softplus antiderivative: value, derivative, quadrature") {
  CHECK(softplus_antiderivative(0.0) ==
        doctest::Approx(constants::pi * constants::pi / 12.0).epsilon(1e-14));
  // dS/dx = softplus(x) by central differences
  for (double x : {-30.0, -8.0, -2.0, -0.4, 0.0, 0.3, 1.7, 5.0, 12.0, 40.0}) {
    const double h = 1e-6 * std::max(1.0, std::fabs(x));
    const double fd =
        (softplus_antiderivative(x + h) - softplus_antiderivative(x - h)) /
        (2.0 * h);
    CHECK(fd == doctest::Approx(softplus(x)).epsilon(1e-8));
  }
  // agrees with composite quadrature of softplus (short panels keep the
  // rule spectrally accurate despite the poles at +-i*pi)
  for (double x : {-5.0, -1.0, 0.5, 3.0, 9.0}) {
    double quad = softplus_antiderivative(-40.0);
    double a = -40.0;
    while (a < x) {
      const double b = std::min(a + 2.0, x);
      quad += gl_integrate([](double t) { return softplus(t); }, a, b, 32);
      a = b;
    }
    CHECK(quad == doctest::Approx(softplus_antiderivative(x)).epsilon(1e-12));
  }
}

TEST_CASE("derive_transport reproduces hand values") {
  DeviceParams p = default_params();
  BiasPoint b{0.45, 0.0};
  const Transport t = derive_transport(p, b);
  // tau = m*mu/q with m = 0.2 m_e, mu = 0.4 m^2/Vs
  CHECK(t.tau == doctest::Approx(4.5485e-13).epsilon(1e-4));
  // s = sqrt(q V_gt / m) at V_gt = 0.15 V
  CHECK(t.s_plasma == doctest::Approx(3.632e5).epsilon(1e-3));
  CHECK(t.v_therm == doctest::Approx(0.025852).epsilon(1e-4));

  SUBCASE("tau linear in mobility") {
    DeviceParams p2 = p;
    p2.mobility = 2.0 * p.mobility;
    CHECK(derive_transport(p2, b).tau == doctest::Approx(2.0 * t.tau).epsilon(1e-15));
  }
  SUBCASE("s scales as sqrt(V_gt)") {
    for (double scale : {2.0, 4.0, 9.0}) {
      BiasPoint b2{p.v_t0 + scale * 0.15, 0.0};
      CHECK(derive_transport(p, b2).s_plasma ==
            doctest::Approx(std::sqrt(scale) * t.s_plasma).epsilon(1e-12));
    }
  }
  SUBCASE("rejects V_gt <= 0") {
    CHECK_THROWS_AS(derive_transport(p, BiasPoint{p.v_t0, 0.0}),
                    std::domain_error);
    CHECK_THROWS_AS(derive_transport(p, BiasPoint{0.0, 0.0}), std::domain_error);
  }
}

TEST_CASE("params validation names the offending field") {
  DeviceParams p = default_params();
  p.mobility = -1.0;
  try {
    p.validate();
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("mobility") != std::string::npos);
  }
  DeviceParams p2 = default_params();
  p2.n_segments = 0;
  CHECK_THROWS_AS(p2.validate(), std::invalid_argument);
}

TEST_CASE("uccm density: asymptotes and smoothness") {
  const DeviceParams p = default_params();
  const double ve = p.eta * p.thermal_voltage();
  const double lead = p.c_ox * ve / constants::q_e;

  SUBCASE("strong inversion approaches c_ox overdrive") {
    const double vg = p.v_t0 + 0.8;
    const double ns = uccm_density(p, vg, 0.0);
    CHECK(ns == doctest::Approx(p.c_ox * 0.8 / constants::q_e).epsilon(2e-3));
  }
  SUBCASE("ln 2 at zero overdrive") {
    const double ns = uccm_density(p, p.v_t0, 0.0);
    CHECK(ns == doctest::Approx(lead * std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("deep subthreshold matches exponential within 1e-4") {
    const double vg = p.v_t0 - 10.0 * ve;
    const double ns = uccm_density(p, vg, 0.0);
    CHECK(ns == doctest::Approx(lead * std::exp(-10.0)).epsilon(1e-4));
  }
  SUBCASE("analytic dn/dVg matches central differences over the bias grid") {
    const double h = 1e-6;
    for (double vgt = -0.3; vgt <= 0.5001; vgt += 0.02) {
      const double vg = p.v_t0 + vgt;
      const double fd =
          (uccm_density(p, vg + h, 0.0) - uccm_density(p, vg - h, 0.0)) /
          (2.0 * h);
      CHECK(uccm_density_dvg(p, vg, 0.0) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
  SUBCASE("strictly positive and increasing in V_g") {
    double prev = 0.0;
    for (double vg = -1.0; vg <= 1.5; vg += 0.05) {
      const double ns = uccm_density(p, vg, 0.0);
      CHECK(ns > 0.0);
      CHECK(ns > prev);
      prev = ns;
    }
  }
}

TEST_CASE("channel current: identities and linear region") {
  const DeviceParams p = default_params();
  const double seg = p.channel_length;
  const double vg = 0.45;

  SUBCASE("zero drive gives zero current") {
    CHECK(channel_current(p, vg, 0.02, 0.02, seg) == 0.0);
  }
  SUBCASE("antisymmetric under terminal swap") {
    const double a = channel_current(p, vg, 0.01, 0.09, seg);
    const double b = channel_current(p, vg, 0.09, 0.01, seg);
    CHECK(a == -b);
    CHECK(a > 0.0);
  }
  SUBCASE("monotone in V_d at fixed V_s") {
    double prev = -1e9;
    for (double vd = -0.1; vd <= 0.3001; vd += 0.02) {
      const double i = channel_current(p, vg, 0.0, vd, seg);
      CHECK(i > prev);
      prev = i;
    }
  }
  SUBCASE("linear region matches mu*c_ox*V_gt*V_ds within 1%") {
    const double vgt = vg - p.v_t0;
    for (double vds : {0.0005, 0.001, 0.0015}) {
      const double i = channel_current(p, vg, 0.0, vds, seg);
      const double expect = p.width / seg * p.mobility * p.c_ox * vgt * vds;
      CHECK(i == doctest::Approx(expect).epsilon(0.01));
    }
  }
  SUBCASE("closed form validated against 32+ point Gauss-Legendre") {
    for (double vd : {-0.2, -0.01, 0.004, 0.08, 0.25}) {
      for (double vgx : {0.1, 0.35, 0.45, 0.7}) {
        const double a = channel_current(p, vgx, -0.03, vd, seg);
        const double b = channel_current_quadrature(p, vgx, -0.03, vd, seg, 40);
        CHECK(a == doctest::Approx(b).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("segment conductance: derivative oracle and composition") {
  const DeviceParams p = default_params();
  const double seg = p.channel_length / p.n_segments;
  const double vg = 0.45;

  SUBCASE("matches finite differences to 1e-6 relative") {
    const double h = 1e-7;
    for (double vd : {-0.05, 0.0, 0.01, 0.1, 0.3}) {
      const double fd = (channel_current(p, vg, 0.0, vd + h, seg) -
                         channel_current(p, vg, 0.0, vd - h, seg)) /
                        (2.0 * h);
      CHECK(segment_conductance(p, vg, 0.0, vd, seg) ==
            doctest::Approx(fd).epsilon(1e-6));
    }
  }
  SUBCASE("strong inversion limit at zero V_ds") {
    const double vs = 0.01;
    const double g = segment_conductance(p, vg, vs, vs, seg);
    const double expect = p.width / seg * p.mobility * p.c_ox * (vg - p.v_t0 - vs);
    CHECK(g == doctest::Approx(expect).epsilon(0.01));
  }
  SUBCASE("always positive, even deep subthreshold") {
    CHECK(segment_conductance(p, -0.5, 0.0, 0.0, seg) > 0.0);
  }
  SUBCASE("series composition of N equal segments is exact") {
    const int n = p.n_segments;
    const double g_seg = segment_conductance(p, vg, 0.0, 0.0, p.channel_length / n);
    const double g_whole = segment_conductance(p, vg, 0.0, 0.0, p.channel_length);
    CHECK(g_seg / n == doctest::Approx(g_whole).epsilon(1e-12));
  }
}

TEST_CASE("drude inductance: ratio and clamp") {
  const double tau = 4.5485e-13;
  SUBCASE("direct ratio") {
    const auto r = drude_inductance(1e-3, tau);
    CHECK(r.value == doctest::Approx(4.5485e-10).epsilon(1e-12));
    CHECK_FALSE(r.clamped);
  }
  SUBCASE("reciprocal scaling") {
    CHECK(drude_inductance(2e-3, tau).value ==
          doctest::Approx(0.5 * drude_inductance(1e-3, tau).value).epsilon(1e-15));
  }
  SUBCASE("L*g = tau exactly when unclamped") {
    for (double g : {1e-9, 3.7e-6, 0.2}) {
      const auto r = drude_inductance(g, tau);
      CHECK_FALSE(r.clamped);
      CHECK(r.value * g == doctest::Approx(tau).epsilon(1e-15));
    }
  }
  SUBCASE("degenerate conductance clamps at tau/g_floor") {
    const auto r = drude_inductance(0.0, tau);
    CHECK(r.clamped);
    CHECK(r.value == doctest::Approx(tau / g_floor).epsilon(1e-15));
  }
  SUBCASE("delta against reference") {
    CHECK(delta_drude(3e-10, 3e-10) == 0.0);
    CHECK(delta_drude(5e-10, 3e-10) == doctest::Approx(2e-10));
  }
}

TEST_CASE("segment charge and capacitance") {
  const DeviceParams p = default_params();
  const double seg = p.channel_length / p.n_segments;

  SUBCASE("oxide-capacitance asymptote in strong inversion") {
    const double c = segment_capacitance(p, p.v_t0 + 0.4, 0.0, seg);
    CHECK(c == doctest::Approx(p.c_ox * p.width * seg).epsilon(0.01));
  }
  SUBCASE("dQ/dV matches finite differences to 1e-6") {
    const double h = 1e-7;
    for (double vg : {0.1, 0.3, 0.45, 0.8}) {
      const double fd =
          (segment_charge(p, vg + h, 0.0, seg) - segment_charge(p, vg - h, 0.0, seg)) /
          (2.0 * h);
      CHECK(segment_capacitance(p, vg, 0.0, seg) ==
            doctest::Approx(fd).epsilon(1e-6));
    }
  }
  SUBCASE("depleted channel holds no charge") {
    CHECK(segment_charge(p, -5.0, 0.0, seg) < 1e-60);
  }
}
