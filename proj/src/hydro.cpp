#include "terafet/hydro.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include "terafet/constants.hpp"

namespace terafet {

void HydroConfig::validate() const {
  if (grid_points < 51)
    throw std::invalid_argument("HydroConfig.grid_points: must be >= 51");
  if (!(cfl > 0.0 && cfl < 1.0))
    throw std::invalid_argument("HydroConfig.cfl: must be in (0, 1)");
  if (max_cycles < 8)
    throw std::invalid_argument("HydroConfig.max_cycles: must be >= 8");
  if (settle_rtol <= 0.0)
    throw std::invalid_argument("HydroConfig.settle_rtol: must be > 0");
  if (profile_time_samples < 2)
    throw std::invalid_argument("HydroConfig.profile_time_samples: must be >= 2");
}

double cfl_dt(const HydroState& s, const HydroConfig& cfg,
              const DeviceParams& p) {
  const double g = constants::q_e / p.m_eff;
  double speed = 0.0;
  const std::size_t m = s.u.size();
  for (std::size_t j = 0; j < m; ++j) {
    const double uj = s.u[j];
    const double vj = s.v[j];
    if (!std::isfinite(uj) || !std::isfinite(vj))
      throw CflViolation("cfl_dt: non-finite state");
    speed = std::max(speed, std::fabs(vj) + std::sqrt(std::max(g * uj, 0.0)));
  }
  if (speed <= 0.0) throw CflViolation("cfl_dt: zero characteristic speed");
  return cfg.cfl * s.dx / speed;
}

HydroSolver::HydroSolver(const DeviceParams& p, const BiasPoint& b,
                         const Excitation& e, const HydroConfig& cfg,
                         HydroBoundary bc, double domain_length)
    : params_(p), cfg_(cfg), bc_(bc), exc_(e) {
  p.validate();
  cfg.validate();
  v_gt_ = b.v_gt(p);
  if (v_gt_ <= 0.0)
    throw std::domain_error("HydroSolver: V_gt must be > 0");
  g_eff_ = constants::q_e / p.m_eff;
  tau_ = p.tau();
  const int m = cfg.grid_points;
  state_.dx = (bc == HydroBoundary::periodic) ? domain_length / m
                                              : domain_length / (m - 1);
  state_.time = 0.0;
  // Arrays carry one ghost cell on each side: physical range 1..m.
  state_.u.assign(m + 2, v_gt_);
  state_.v.assign(m + 2, 0.0);
  up_.assign(m + 2, 0.0);
  vp_.assign(m + 2, 0.0);
  f1_.assign(m + 2, 0.0);
  f2_.assign(m + 2, 0.0);
  apply_bc(state_.u, state_.v, 0.0);
}

void HydroSolver::apply_bc(std::vector<double>& u, std::vector<double>& v,
                           double t) const {
  const int m = cfg_.grid_points;
  switch (bc_) {
    case HydroBoundary::driven_open:
      u[1] = v_gt_ + exc_.amplitude * std::cos(exc_.omega() * t);
      v[1] = 2.0 * v[2] - v[3];
      v[m] = 0.0;
      u[m] = 2.0 * u[m - 1] - u[m - 2];
      u[0] = 2.0 * u[1] - u[2];
      v[0] = 2.0 * v[1] - v[2];
      u[m + 1] = 2.0 * u[m] - u[m - 1];
      v[m + 1] = 2.0 * v[m] - v[m - 1];
      break;
    case HydroBoundary::reflecting:
      // mirror ghosts about the walls at j=1 and j=m
      v[1] = 0.0;
      v[m] = 0.0;
      u[0] = u[2];
      v[0] = -v[2];
      u[m + 1] = u[m - 1];
      v[m + 1] = -v[m - 1];
      break;
    case HydroBoundary::periodic:
      u[0] = u[m];
      v[0] = v[m];
      u[m + 1] = u[1];
      v[m + 1] = v[1];
      break;
  }
}

void HydroSolver::hyperbolic(double dt) {
  const int m = cfg_.grid_points;
  const double lam = dt / state_.dx;
  const double t_new = state_.time + dt;
  std::vector<double>& u = state_.u;
  std::vector<double>& v = state_.v;

  auto fluxes = [&](const std::vector<double>& uu, const std::vector<double>& vv) {
    for (int j = 0; j <= m + 1; ++j) {
      f1_[j] = uu[j] * vv[j];
      f2_[j] = 0.5 * vv[j] * vv[j] + g_eff_ * uu[j];
    }
  };

  if (cfg_.scheme == HydroScheme::maccormack) {
    const bool fwd = (step_count_ % 2) == 0; // alternate sweep direction
    fluxes(u, v);
    const int o1 = fwd ? 1 : 0;  // predictor offset: F[j+1]-F[j] or F[j]-F[j-1]
    for (int j = 1; j <= m; ++j) {
      up_[j] = u[j] - lam * (f1_[j + o1] - f1_[j + o1 - 1]);
      vp_[j] = v[j] - lam * (f2_[j + o1] - f2_[j + o1 - 1]);
    }
    apply_bc(up_, vp_, t_new);
    fluxes(up_, vp_);
    const int o2 = 1 - o1;
    for (int j = 1; j <= m; ++j) {
      u[j] = 0.5 * (u[j] + up_[j] - lam * (f1_[j + o2] - f1_[j + o2 - 1]));
      v[j] = 0.5 * (v[j] + vp_[j] - lam * (f2_[j + o2] - f2_[j + o2 - 1]));
    }
    apply_bc(u, v, t_new);
  } else {
    // Richtmyer two-step Lax-Wendroff; up_/vp_ hold interface half-states
    // at j+1/2 stored in index j.
    fluxes(u, v);
    for (int j = 0; j <= m; ++j) {
      up_[j] = 0.5 * (u[j] + u[j + 1]) - 0.5 * lam * (f1_[j + 1] - f1_[j]);
      vp_[j] = 0.5 * (v[j] + v[j + 1]) - 0.5 * lam * (f2_[j + 1] - f2_[j]);
    }
    for (int j = 0; j <= m; ++j) {
      f1_[j] = up_[j] * vp_[j];
      f2_[j] = 0.5 * vp_[j] * vp_[j] + g_eff_ * up_[j];
    }
    for (int j = 1; j <= m; ++j) {
      u[j] -= lam * (f1_[j] - f1_[j - 1]);
      v[j] -= lam * (f2_[j] - f2_[j - 1]);
    }
    apply_bc(u, v, t_new);
  }
}

void HydroSolver::step(double dt) {
  const int m = cfg_.grid_points;
  // Strang split: exact exponential friction around the hyperbolic update.
  const double decay = std::exp(-0.5 * dt / tau_);
  for (int j = 1; j <= m; ++j) state_.v[j] *= decay;
  hyperbolic(dt);
  for (int j = 1; j <= m; ++j) state_.v[j] *= decay;
  state_.time += dt;
  ++step_count_;

  for (int j = 1; j <= m; ++j) {
    if (!(state_.u[j] > 0.0)) {
      std::ostringstream os;
      os << "hydro: channel voltage crossed threshold (U <= 0) at x index "
         << j << ", t = " << state_.time << " s";
      throw ThresholdCrossing(os.str());
    }
  }
}

HydroResult solve_hydro(const DeviceParams& p, const BiasPoint& b,
                        const Excitation& e, const HydroConfig& cfg,
                        bool want_profile) {
  p.validate();
  cfg.validate();
  e.validate();
  const double v_gt = b.v_gt(p);
  if (v_gt <= 0.0) throw std::domain_error("solve_hydro: V_gt must be > 0");
  if (e.amplitude > 0.2 * v_gt)
    throw std::invalid_argument(
        "solve_hydro: amplitude above 0.2*V_gt, fluid would cross threshold");

  HydroSolver solver(p, b, e, cfg, HydroBoundary::driven_open,
                     p.channel_length);
  const int m = cfg.grid_points;
  const double period = 1.0 / e.frequency;

  HydroResult res;
  int quiet = 0;
  for (int k = 0; k < cfg.max_cycles && !res.settled; ++k) {
    const double dtc = cfl_dt(solver.state(), cfg, p);
    const long steps = static_cast<long>(std::ceil(period / dtc));
    if (steps > 2000000L)
      throw CflViolation("solve_hydro: dt underflow (more than 2e6 steps per cycle)");
    const double dt = period / static_cast<double>(steps);
    double avg = 0.0;
    for (long j = 0; j < steps; ++j) {
      solver.step(dt);
      avg += solver.state().u[m] / static_cast<double>(steps);
    }
    res.cycle_averages.push_back(avg);
    res.cycles_run = k + 1;
    if (k >= 1) {
      const double drift = std::fabs(avg - res.cycle_averages[k - 1]);
      const double scale = std::fabs(avg - v_gt);
      if (drift <= std::max(cfg.settle_rtol * scale, 1e-15))
        ++quiet;
      else
        quiet = 0;
      if (quiet >= cfg.settle_quiet_cycles && res.cycles_run >= 8)
        res.settled = true;
    }
  }

  const std::size_t n = res.cycle_averages.size();
  double mean = 0.0;
  for (std::size_t k = n - std::min<std::size_t>(4, n); k < n; ++k)
    mean += res.cycle_averages[k] / std::min<double>(4.0, n);
  res.delta_u = mean - v_gt;

  if (want_profile) {
    const double dtc = cfl_dt(solver.state(), cfg, p);
    const long steps = static_cast<long>(std::ceil(period / dtc));
    const double dt = period / static_cast<double>(steps);
    const long stride = std::max(1L, steps / cfg.profile_time_samples);
    ChannelProfile& prof = res.profile;
    prof.positions.resize(m);
    for (int j = 0; j < m; ++j) prof.positions[j] = j * solver.state().dx;
    prof.velocity.assign(m, {});
    prof.density.assign(m, {});
    for (long j = 0; j < steps; ++j) {
      solver.step(dt);
      if (j % stride == 0 || j == steps - 1) {
        prof.times.push_back(solver.state().time);
        for (int i = 0; i < m; ++i) {
          prof.velocity[i].push_back(solver.state().v[i + 1]);
          prof.density[i].push_back(p.c_ox * solver.state().u[i + 1] /
                                    constants::q_e);
        }
      }
    }
  }
  return res;
}

ResponseCurve hydro_response_sweep(const DeviceParams& p, const BiasPoint& b,
                                   double v_a,
                                   const std::vector<double>& frequencies,
                                   const HydroConfig& cfg, int threads) {
  ResponseCurve curve;
  curve.method = Method::hydro;
  curve.points.resize(frequencies.size());
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, static_cast<int>(frequencies.size())));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= frequencies.size()) return;
      ResponsePoint& pt = curve.points[i];
      pt.frequency = frequencies[i];
      Excitation e;
      e.amplitude = v_a;
      e.frequency = frequencies[i];
      try {
        HydroResult r = solve_hydro(p, b, e, cfg);
        pt.delta_u = r.delta_u;
        pt.ok = true;
        pt.flag = r.settled ? "ok" : "no_settle";
      } catch (const std::exception& ex) {
        pt.ok = false;
        pt.delta_u = std::numeric_limits<double>::quiet_NaN();
        pt.flag = std::string("error: ") + ex.what();
      }
    }
  };
  std::vector<std::future<void>> futs;
  for (int t = 0; t < threads; ++t)
    futs.push_back(std::async(std::launch::async, worker));
  for (auto& f : futs) f.get();
  return curve;
}

} // namespace terafet
