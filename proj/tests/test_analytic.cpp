#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "terafet/analytic.hpp"
#include "terafet/constants.hpp"

using namespace terafet;
using terafet::constants::pi;

namespace {

DeviceParams params_90nm(double mobility = 0.4) {
  DeviceParams p;
  p.channel_length = 90e-9;
  p.mobility = mobility;
  return p;
}

const BiasPoint bias{0.45, 0.0}; // V_gt = 0.15 V

} // namespace

TEST_CASE("ds_f limits") {
  const DeviceParams p = params_90nm();
  SUBCASE("zero frequency gives zero response") {
    CHECK(ds_f(0.0, p, bias) == doctest::Approx(0.0).epsilon(1e-30));
  }
  SUBCASE("broadband non-resonant limit: f -> 1 + beta -> 1") {
    // long overdamped channel: k''L >> 1 at omega*tau = 0.1
    DeviceParams lp = p;
    lp.mobility = 0.02; // tau = 2.27e-14 s
    lp.channel_length = 2e-6;
    const Transport tr = derive_transport(lp, bias);
    const double omega = 0.1 / tr.tau;
    // check the regime really is deep-decay
    const double kpp = std::sqrt(omega / (2.0 * tr.s_plasma * tr.s_plasma * tr.tau));
    REQUIRE(kpp * lp.channel_length > 10.0);
    const double wt = omega * tr.tau;
    const double beta = 2.0 * wt / std::sqrt(1.0 + wt * wt);
    CHECK(ds_f(omega, lp, bias) == doctest::Approx(1.0 + beta).epsilon(1e-6));
    // and the limit is 1 as omega*tau -> 0
    const double omega_small = 1e-3 / tr.tau;
    CHECK(ds_f(omega_small, lp, bias) == doctest::Approx(1.0).epsilon(3e-3));
  }
  SUBCASE("first peak near s/4L") {
    const Transport tr = derive_transport(p, bias);
    const double f0 = tr.s_plasma / (4.0 * p.channel_length);
    // numerical peak-finding on a fine grid around the fundamental
    double best_f = 0.0, best = -1e30;
    for (double f = 0.3e12; f <= 1.8e12; f += 1e9) {
      const double v = ds_f(2.0 * pi * f, p, bias);
      if (v > best) {
        best = v;
        best_f = f;
      }
    }
    CHECK(std::fabs(best_f - f0) / f0 < 0.10);
    CHECK(best > 10.0); // strongly resonant
  }
  SUBCASE("second peak near 3 f_0 when omega*tau > 2") {
    const Transport tr = derive_transport(p, bias);
    const double f0 = tr.s_plasma / (4.0 * p.channel_length);
    CHECK(2.0 * pi * f0 * tr.tau > 2.0);
    double best_f = 0.0, best = -1e30;
    for (double f = 2.2e12; f <= 3.9e12; f += 1e9) {
      const double v = ds_f(2.0 * pi * f, p, bias);
      if (v > best) {
        best = v;
        best_f = f;
      }
    }
    CHECK(std::fabs(best_f - 3.0 * f0) / (3.0 * f0) < 0.10);
  }
  SUBCASE("continuity on the default sweep grid") {
    for (double f = 0.2e12; f <= 3.0e12; f += 0.1e12) {
      const double w = 2.0 * pi * f;
      const double dw = 1e-4 * w;
      CHECK(std::fabs(ds_f(w + dw, p, bias) - ds_f(w, p, bias)) <= 0.05);
    }
  }
}

TEST_CASE("ds_response scaling identities") {
  const DeviceParams p = params_90nm();
  // deterministic pseudo-random probe points
  unsigned state = 12345;
  auto next = [&state]() {
    state = state * 1103515245u + 12345u;
    return (state >> 16) / 65536.0;
  };
  for (int k = 0; k < 50; ++k) {
    const double omega = 2.0 * pi * (0.1e12 + 3.0e12 * next());
    const double va = 1e-4 + 5e-3 * next();
    const double vgt = 0.05 + 0.4 * next();
    BiasPoint b{p.v_t0 + vgt, 0.0};
    const double base = ds_response(omega, p, b, va);
    CHECK(ds_response(omega, p, b, 2.0 * va) ==
          doctest::Approx(4.0 * base).epsilon(1e-14));
    BiasPoint b2{p.v_t0 + 2.0 * vgt, 0.0};
    // doubling V_gt at fixed f-value halves the prefactor
    const double f_val = ds_f(omega, p, b2);
    CHECK(ds_response(omega, p, b2, va) ==
          doctest::Approx(va * va * f_val / (8.0 * vgt)).epsilon(1e-14));
  }
  CHECK(ds_response(1e12, p, bias, 0.0) == 0.0);
  CHECK_THROWS_AS(ds_response(1e12, p, BiasPoint{0.0, 0.0}, 1e-3),
                  std::domain_error);
}

TEST_CASE("critical length hand values") {
  const DeviceParams p4 = params_90nm(0.4);
  const DeviceParams p1 = params_90nm(0.1);
  const double omega = 2.0 * pi * 1.01e12;

  const double lcr4 = critical_length(omega, p4, bias);
  CHECK(lcr4 == doctest::Approx(1.917e-7).epsilon(2e-3));
  CHECK(p4.channel_length / lcr4 == doctest::Approx(0.469).epsilon(5e-3));

  const double lcr1 = critical_length(omega, p1, bias);
  CHECK(lcr1 == doctest::Approx(6.38e-8).epsilon(2e-3));
  CHECK(p1.channel_length / lcr1 == doctest::Approx(1.41).epsilon(5e-3));

  SUBCASE("high-frequency limit is s*tau") {
    const Transport tr = derive_transport(p4, bias);
    CHECK(critical_length(1e17, p4, bias) ==
          doctest::Approx(tr.s_plasma * tr.tau).epsilon(1e-4));
  }
  SUBCASE("rejects omega = 0") {
    CHECK_THROWS_AS(critical_length(0.0, p4, bias), std::domain_error);
  }
}

TEST_CASE("regime classifier") {
  const DeviceParams p4 = params_90nm(0.4);
  const DeviceParams p1 = params_90nm(0.1);
  const double omega0 = 2.0 * pi * 1.01e12;

  CHECK(classify_regime(p4, bias, omega0).regime == Regime::strong_resonant);
  CHECK(classify_regime(p1, bias, omega0).regime == Regime::non_resonant);

  SUBCASE("omega*tau < 1 is never strong resonant") {
    const Transport tr = derive_transport(p4, bias);
    const double omega = 0.5 / tr.tau;
    for (double len : {20e-9, 90e-9, 400e-9}) {
      DeviceParams p = p4;
      p.channel_length = len;
      CHECK(classify_regime(p, bias, omega).regime != Regime::strong_resonant);
    }
  }
  SUBCASE("omega = 0 reports non-resonant instead of diverging") {
    const RegimeReport r = classify_regime(p4, bias, 0.0);
    CHECK(r.regime == Regime::non_resonant);
    CHECK(std::isinf(r.l_cr));
  }
  SUBCASE("marginal band between the thresholds") {
    // 45 nm, mu = 0.1 at its own fundamental sits between 0.5 and 1
    DeviceParams p = params_90nm(0.1);
    p.channel_length = 45e-9;
    const Transport tr = derive_transport(p, bias);
    const double f0 = tr.s_plasma / (4.0 * p.channel_length);
    const RegimeReport r = classify_regime(p, bias, 2.0 * pi * f0);
    CHECK(r.omega_tau > 1.0);
    CHECK(r.length_ratio > 0.5);
    CHECK(r.length_ratio < 1.0);
    CHECK(r.regime == Regime::marginal);
  }
}
