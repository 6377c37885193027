#include "terafet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "terafet/constants.hpp"
#include "terafet/csv.hpp"

namespace terafet {

namespace fs = std::filesystem;

DeviceParams Scenario::effective_device() const {
  DeviceParams d = device;
  if (!parasitics) {
    d.r_source = 0.0;
    d.r_drain = 0.0;
    d.c_gs_ext = 0.0;
    d.c_gd_ext = 0.0;
  }
  return d;
}

void Scenario::validate() const {
  if (name.empty()) throw ConfigError("name", "must not be empty");
  try {
    device.validate();
  } catch (const std::exception& e) {
    throw ConfigError("device", e.what());
  }
  try {
    solver.validate();
  } catch (const std::exception& e) {
    throw ConfigError("solver", e.what());
  }
  try {
    hydro.validate();
  } catch (const std::exception& e) {
    throw ConfigError("hydro", e.what());
  }
  if (amplitude < 0.0)
    throw ConfigError("excitation.amplitude_v", "must be >= 0");
  if (frequencies.empty())
    throw ConfigError("excitation.frequencies_hz", "must not be empty");
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    if (frequencies[i] <= 0.0)
      throw ConfigError("excitation.frequencies_hz", "must be > 0");
    if (i > 0 && frequencies[i] <= frequencies[i - 1])
      throw ConfigError("excitation.frequencies_hz",
                        "must be strictly increasing");
  }
  if (boundary.mode == BoundaryMode::voltage_drive)
    throw ConfigError("boundary.mode", "voltage_drive is not a sweep boundary");
  if (boundary.mode == BoundaryMode::open_drain && boundary.r_load <= 1e6)
    throw ConfigError("boundary.r_load_ohm", "open drain requires > 1e6");
  if (methods.empty()) throw ConfigError("methods", "must not be empty");
  if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
}

namespace {

// Object reader that tracks visited keys and rejects unknown ones, so unit
// suffix typos in configs fail loudly with the offending key named.
class ObjReader {
 public:
  ObjReader(const nlohmann::json& j, std::string prefix)
      : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw ConfigError(label(""), "must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(label(key), "must be a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(label(key), "must be an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(label(key), "must be a boolean");
    return v.get<bool>();
  }

  std::string str(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(label(key), "must be a string");
    return v.get<std::string>();
  }

  const nlohmann::json* child(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) return nullptr;
    return &j_.at(key);
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key()))
        throw ConfigError(label(item.key()), "unknown key");
  }

  std::string label(const std::string& key) const {
    if (key.empty()) return prefix_.empty() ? "<root>" : prefix_;
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

 private:
  const nlohmann::json& j_;
  std::string prefix_;
  std::set<std::string> seen_;
};

Integrator integrator_from(const std::string& s, const std::string& key) {
  if (s == "trapezoidal") return Integrator::trapezoidal;
  if (s == "backward_euler") return Integrator::backward_euler;
  throw ConfigError(key, "must be trapezoidal or backward_euler");
}

InductorLaw law_from(const std::string& s, const std::string& key) {
  if (s == "flux") return InductorLaw::flux;
  if (s == "di_dt") return InductorLaw::di_dt;
  throw ConfigError(key, "must be flux or di_dt");
}

HydroScheme scheme_from(const std::string& s, const std::string& key) {
  if (s == "maccormack") return HydroScheme::maccormack;
  if (s == "lax_wendroff") return HydroScheme::lax_wendroff;
  throw ConfigError(key, "must be maccormack or lax_wendroff");
}

} // namespace

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  ObjReader root(j, "");
  s.name = root.str("name", s.name);

  if (const nlohmann::json* jd = root.child("device")) {
    ObjReader d(*jd, "device");
    s.device.channel_length = d.number("channel_length_m", s.device.channel_length);
    s.device.width = d.number("width_m", s.device.width);
    s.device.mobility = d.number("mobility_m2_per_vs", s.device.mobility);
    s.device.m_eff = d.number("effective_mass_kg", s.device.m_eff);
    s.device.c_ox = d.number("oxide_capacitance_f_per_m2", s.device.c_ox);
    s.device.v_t0 = d.number("threshold_voltage_v", s.device.v_t0);
    s.device.eta = d.number("ideality_eta", s.device.eta);
    s.device.temperature = d.number("temperature_k", s.device.temperature);
    s.device.n_segments = d.integer("segments", s.device.n_segments);
    s.device.r_source = d.number("r_source_ohm", s.device.r_source);
    s.device.r_drain = d.number("r_drain_ohm", s.device.r_drain);
    s.device.c_gs_ext = d.number("c_gs_ext_f", s.device.c_gs_ext);
    s.device.c_gd_ext = d.number("c_gd_ext_f", s.device.c_gd_ext);
    d.finish();
  }

  if (const nlohmann::json* jb = root.child("bias")) {
    ObjReader b(*jb, "bias");
    s.bias.v_gs = b.number("v_gs_v", s.bias.v_gs);
    s.bias.v_ds = b.number("v_ds_v", s.bias.v_ds);
    b.finish();
  }

  if (const nlohmann::json* je = root.child("excitation")) {
    ObjReader e(*je, "excitation");
    s.amplitude = e.number("amplitude_v", s.amplitude);
    if (const nlohmann::json* jf = e.child("frequencies_hz")) {
      if (!jf->is_array())
        throw ConfigError("excitation.frequencies_hz", "must be an array");
      s.frequencies.clear();
      for (const auto& v : *jf) {
        if (!v.is_number())
          throw ConfigError("excitation.frequencies_hz", "must hold numbers");
        s.frequencies.push_back(v.get<double>());
      }
    }
    if (const nlohmann::json* jg = e.child("grid")) {
      ObjReader g(*jg, "excitation.grid");
      const double start = g.number("start_hz", 0.0);
      const double stop = g.number("stop_hz", 0.0);
      const int points = g.integer("points", 0);
      g.finish();
      if (points < 2) throw ConfigError("excitation.grid.points", "must be >= 2");
      if (!(stop > start) || start <= 0.0)
        throw ConfigError("excitation.grid", "need 0 < start_hz < stop_hz");
      s.frequencies.resize(points);
      for (int i = 0; i < points; ++i)
        s.frequencies[i] = start + i * (stop - start) / (points - 1);
    }
    e.finish();
  }

  if (const nlohmann::json* jb = root.child("boundary")) {
    ObjReader b(*jb, "boundary");
    const std::string mode = b.str("mode", "open_drain");
    if (mode == "open_drain")
      s.boundary.mode = BoundaryMode::open_drain;
    else if (mode == "resistive_load")
      s.boundary.mode = BoundaryMode::resistive_load;
    else
      throw ConfigError("boundary.mode", "must be open_drain or resistive_load");
    s.boundary.r_load = b.number("r_load_ohm", s.boundary.r_load);
    b.finish();
  }

  if (const nlohmann::json* jm = root.child("methods")) {
    if (!jm->is_array()) throw ConfigError("methods", "must be an array");
    s.methods.clear();
    for (const auto& v : *jm) {
      if (!v.is_string()) throw ConfigError("methods", "must hold strings");
      try {
        s.methods.push_back(method_from_name(v.get<std::string>()));
      } catch (const std::exception&) {
        throw ConfigError("methods", "unknown method '" + v.get<std::string>() + "'");
      }
    }
  } else if (s.methods.empty()) {
    s.methods = {Method::analytic, Method::hydro, Method::circuit_varying,
                 Method::circuit_uniform};
  }

  if (const nlohmann::json* js = root.child("solver")) {
    ObjReader c(*js, "solver");
    s.solver.steps_per_cycle = c.integer("steps_per_cycle", s.solver.steps_per_cycle);
    s.solver.max_cycles = c.integer("max_cycles", s.solver.max_cycles);
    s.solver.settle_tol = c.number("settle_tol", s.solver.settle_tol);
    s.solver.newton_tol_v = c.number("newton_tol_v", s.solver.newton_tol_v);
    s.solver.newton_tol_i = c.number("newton_tol_i", s.solver.newton_tol_i);
    s.solver.newton_max_iter = c.integer("newton_max_iter", s.solver.newton_max_iter);
    s.solver.integrator = integrator_from(
        c.str("integrator", s.solver.integrator == Integrator::trapezoidal
                                ? "trapezoidal"
                                : "backward_euler"),
        "solver.integrator");
    s.solver.inductor_law = law_from(
        c.str("inductor_law",
              s.solver.inductor_law == InductorLaw::flux ? "flux" : "di_dt"),
        "solver.inductor_law");
    c.finish();
  }

  if (const nlohmann::json* jh = root.child("hydro")) {
    ObjReader c(*jh, "hydro");
    s.hydro.grid_points = c.integer("grid_points", s.hydro.grid_points);
    s.hydro.cfl = c.number("cfl", s.hydro.cfl);
    s.hydro.max_cycles = c.integer("max_cycles", s.hydro.max_cycles);
    s.hydro.scheme = scheme_from(
        c.str("scheme", s.hydro.scheme == HydroScheme::maccormack
                            ? "maccormack"
                            : "lax_wendroff"),
        "hydro.scheme");
    c.finish();
  }

  s.parasitics = root.boolean("parasitics", s.parasitics);
  s.output_dir = root.str("output_dir", s.output_dir);
  root.finish();
  s.validate();
  return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["device"] = {{"channel_length_m", s.device.channel_length},
                 {"width_m", s.device.width},
                 {"mobility_m2_per_vs", s.device.mobility},
                 {"effective_mass_kg", s.device.m_eff},
                 {"oxide_capacitance_f_per_m2", s.device.c_ox},
                 {"threshold_voltage_v", s.device.v_t0},
                 {"ideality_eta", s.device.eta},
                 {"temperature_k", s.device.temperature},
                 {"segments", s.device.n_segments},
                 {"r_source_ohm", s.device.r_source},
                 {"r_drain_ohm", s.device.r_drain},
                 {"c_gs_ext_f", s.device.c_gs_ext},
                 {"c_gd_ext_f", s.device.c_gd_ext}};
  j["bias"] = {{"v_gs_v", s.bias.v_gs}, {"v_ds_v", s.bias.v_ds}};
  j["excitation"] = {{"amplitude_v", s.amplitude},
                     {"frequencies_hz", s.frequencies}};
  j["boundary"] = {
      {"mode", s.boundary.mode == BoundaryMode::open_drain ? "open_drain"
                                                           : "resistive_load"},
      {"r_load_ohm", s.boundary.r_load}};
  std::vector<std::string> methods;
  for (Method m : s.methods) methods.push_back(method_name(m));
  j["methods"] = methods;
  j["solver"] = {{"steps_per_cycle", s.solver.steps_per_cycle},
                 {"max_cycles", s.solver.max_cycles},
                 {"settle_tol", s.solver.settle_tol},
                 {"newton_tol_v", s.solver.newton_tol_v},
                 {"newton_tol_i", s.solver.newton_tol_i},
                 {"newton_max_iter", s.solver.newton_max_iter},
                 {"integrator", s.solver.integrator == Integrator::trapezoidal
                                    ? "trapezoidal"
                                    : "backward_euler"},
                 {"inductor_law", s.solver.inductor_law == InductorLaw::flux
                                      ? "flux"
                                      : "di_dt"}};
  j["hydro"] = {{"grid_points", s.hydro.grid_points},
                {"cfl", s.hydro.cfl},
                {"max_cycles", s.hydro.max_cycles},
                {"scheme", s.hydro.scheme == HydroScheme::maccormack
                               ? "maccormack"
                               : "lax_wendroff"}};
  j["parasitics"] = s.parasitics;
  j["output_dir"] = s.output_dir;
  return j;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("<file>", "cannot open " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw ConfigError("<file>", std::string("JSON parse error: ") + e.what());
  }
  return scenario_from_json(j);
}

std::string config_hash(const Scenario& s) {
  const std::string dump = scenario_to_json(s).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ResponsePoint circuit_response_point(const Scenario& s, InductanceMode mode,
                                     double frequency, double amplitude) {
  ResponsePoint pt;
  pt.frequency = frequency;
  try {
    const DeviceParams dev = s.effective_device();
    Excitation exc;
    exc.amplitude = amplitude;
    exc.frequency = frequency;
    const SegmentedCircuit ckt =
        build_segmented(dev, s.bias, exc, s.boundary, mode);
    const WaveformSet w = transient(ckt, s.solver);
    const DcResponse r =
        extract_dc_response(w, w.baseline_observe, s.solver.settle_tol);
    // Source-to-drain response convention shared with the analytic and hydro
    // methods: the rectified signal pulls the open drain below the source.
    pt.delta_u = -r.delta_u;
    pt.ok = true;
    pt.flag = !w.settled ? "no_settle" : (r.flagged ? "avg_spread" : "ok");
  } catch (const std::exception& ex) {
    pt.ok = false;
    pt.delta_u = std::numeric_limits<double>::quiet_NaN();
    pt.flag = std::string("error: ") + ex.what();
  }
  return pt;
}

namespace {

ResponseCurve circuit_sweep(const Scenario& s, InductanceMode mode,
                            int threads) {
  ResponseCurve curve;
  curve.method = mode == InductanceMode::varying ? Method::circuit_varying
                                                 : Method::circuit_uniform;
  curve.scenario = s.name;
  curve.points.resize(s.frequencies.size());
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, static_cast<int>(s.frequencies.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= s.frequencies.size()) return;
      curve.points[i] =
          circuit_response_point(s, mode, s.frequencies[i], s.amplitude);
    }
  };
  std::vector<std::future<void>> futs;
  for (int t = 0; t < threads; ++t)
    futs.push_back(std::async(std::launch::async, worker));
  for (auto& f : futs) f.get();
  return curve;
}

} // namespace

ResponseCurve frequency_sweep(const Scenario& s, Method method, int threads) {
  switch (method) {
    case Method::analytic: {
      ResponseCurve c = analytic_response_sweep(s.effective_device(), s.bias,
                                                s.amplitude, s.frequencies);
      c.scenario = s.name;
      return c;
    }
    case Method::hydro: {
      ResponseCurve c = hydro_response_sweep(s.effective_device(), s.bias,
                                             s.amplitude, s.frequencies,
                                             s.hydro, threads);
      c.scenario = s.name;
      return c;
    }
    case Method::circuit_varying:
      return circuit_sweep(s, InductanceMode::varying, threads);
    case Method::circuit_uniform:
      return circuit_sweep(s, InductanceMode::uniform, threads);
  }
  throw std::logic_error("frequency_sweep: unreachable");
}

PeakInfo first_peak(const ResponseCurve& c) {
  std::vector<double> f, y;
  for (const ResponsePoint& pt : c.points)
    if (pt.ok && std::isfinite(pt.delta_u)) {
      f.push_back(pt.frequency);
      y.push_back(pt.delta_u);
    }
  PeakInfo out;
  if (f.empty()) return out;
  std::size_t idx = 0;
  bool interior = false;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (y[i] >= y[i - 1] && y[i] > y[i + 1]) {
      idx = i;
      interior = true;
      break;
    }
  }
  if (!interior) {
    idx = std::max_element(y.begin(), y.end()) - y.begin();
    out.frequency = f[idx];
    out.delta_u = y[idx];
    return out;
  }
  out.interior = true;
  // Quadratic through the three bracketing points.
  const double x0 = f[idx - 1], x1 = f[idx], x2 = f[idx + 1];
  const double y0 = y[idx - 1], y1 = y[idx], y2 = y[idx + 1];
  const double d = (x0 - x1) * (x0 - x2) * (x1 - x2);
  const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / d;
  const double b =
      (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / d;
  if (a < 0.0) {
    double xv = -b / (2.0 * a);
    xv = std::clamp(xv, x0, x2);
    const double cc = y1 - a * x1 * x1 - b * x1;
    out.frequency = xv;
    out.delta_u = a * xv * xv + b * xv + cc;
  } else {
    out.frequency = x1;
    out.delta_u = y1;
  }
  return out;
}

double rms_log10_error(const ResponseCurve& a, const ResponseCurve& b) {
  if (a.points.size() != b.points.size())
    throw std::invalid_argument("rms_log10_error: grid size mismatch");
  double acc = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const ResponsePoint& pa = a.points[i];
    const ResponsePoint& pb = b.points[i];
    if (std::fabs(pa.frequency - pb.frequency) >
        1e-9 * std::max(pa.frequency, pb.frequency))
      throw std::invalid_argument("rms_log10_error: frequency grid mismatch");
    if (!pa.ok || !pb.ok) continue;
    if (!(pa.delta_u > 0.0) || !(pb.delta_u > 0.0)) continue;
    const double d = std::log10(pa.delta_u / pb.delta_u);
    acc += d * d;
    ++n;
  }
  if (n < 2)
    throw std::invalid_argument("rms_log10_error: fewer than 2 common valid points");
  return std::sqrt(acc / n);
}

ComparisonReport compare_methods(const std::vector<ResponseCurve>& curves,
                                 const Scenario& s) {
  if (curves.size() < 2)
    throw std::invalid_argument("compare_methods: need at least 2 curves");
  for (std::size_t c = 1; c < curves.size(); ++c) {
    if (curves[c].points.size() != curves[0].points.size())
      throw std::invalid_argument("compare_methods: grid size mismatch");
    for (std::size_t i = 0; i < curves[0].points.size(); ++i)
      if (std::fabs(curves[c].points[i].frequency -
                    curves[0].points[i].frequency) >
          1e-9 * curves[0].points[i].frequency)
        throw std::invalid_argument("compare_methods: frequency grid mismatch");
  }

  ComparisonReport rep;
  rep.scenario = s.name;
  rep.hash = config_hash(s);
  for (const ResponseCurve& c : curves)
    rep.peaks[method_name(c.method)] = first_peak(c);

  for (std::size_t i = 0; i < curves.size(); ++i)
    for (std::size_t j = i + 1; j < curves.size(); ++j) {
      const std::string key =
          method_name(curves[i].method) + "|" + method_name(curves[j].method);
      try {
        rep.rms_log10[key] = rms_log10_error(curves[i], curves[j]);
      } catch (const std::invalid_argument&) {
        // insufficient common valid points; leave the pair out
      }
    }

  const DeviceParams dev = s.effective_device();
  rep.regime_per_frequency.reserve(curves[0].points.size());
  for (const ResponsePoint& pt : curves[0].points)
    rep.regime_per_frequency.push_back(
        classify_regime(dev, s.bias, 2.0 * constants::pi * pt.frequency).regime);

  double peak_freq = 0.0;
  auto it = rep.peaks.find("analytic");
  if (it != rep.peaks.end())
    peak_freq = it->second.frequency;
  else
    peak_freq = rep.peaks.begin()->second.frequency;
  rep.regime_at_peak =
      classify_regime(dev, s.bias, 2.0 * constants::pi * peak_freq).regime;
  rep.gate_exempt = rep.regime_at_peak != Regime::strong_resonant;

  const bool have_all = rep.peaks.count("analytic") &&
                        rep.peaks.count("circuit_varying") &&
                        rep.peaks.count("circuit_uniform");
  if (have_all) {
    const auto rv = rep.rms_log10.find("analytic|circuit_varying");
    const auto ru = rep.rms_log10.find("analytic|circuit_uniform");
    if (rv != rep.rms_log10.end() && ru != rep.rms_log10.end())
      rep.varying_beats_uniform = rv->second < ru->second;
  }
  return rep;
}

nlohmann::json report_to_json(const ComparisonReport& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["config_hash"] = r.hash;
  for (const auto& [name, peak] : r.peaks)
    j["peaks"][name] = {{"frequency_hz", peak.frequency},
                        {"delta_u_v", peak.delta_u},
                        {"interior", peak.interior}};
  for (const auto& [key, val] : r.rms_log10) j["rms_log10"][key] = val;
  std::vector<std::string> regimes;
  for (Regime rg : r.regime_per_frequency) regimes.push_back(regime_name(rg));
  j["regime_per_frequency"] = regimes;
  j["regime_at_peak"] = regime_name(r.regime_at_peak);
  j["gate_exempt"] = r.gate_exempt;
  if (r.varying_beats_uniform.has_value())
    j["varying_beats_uniform"] = *r.varying_beats_uniform;
  else
    j["varying_beats_uniform"] = nullptr;
  return j;
}

std::vector<DrudeProfileRow> drude_profile_at(const Scenario& s,
                                              double frequency,
                                              double amplitude) {
  const DeviceParams dev = s.effective_device();
  Excitation exc;
  exc.amplitude = amplitude;
  exc.frequency = frequency;
  const SegmentedCircuit ckt =
      build_segmented(dev, s.bias, exc, s.boundary, InductanceMode::varying);
  const SolverConfig& cfg = s.solver;
  const Eigen::VectorXd x_dc = dc_operating_point(ckt, cfg);
  const WaveformSet w = transient(ckt, cfg);
  const double tau = dev.tau();

  auto inductance = [&](const Element& e, auto&& volt_of) {
    const double g = segment_conductance(dev, volt_of(e.gate), volt_of(e.ctrl_s),
                                         volt_of(e.ctrl_d), e.ctrl_len);
    return drude_inductance(g, tau).value / e.divide;
  };

  const int n = dev.n_segments;
  const int samples = static_cast<int>(w.time.size());
  const int first = samples - (w.steps_per_cycle + 1);
  std::vector<DrudeProfileRow> rows(n);
  for (int i = 0; i < n; ++i) {
    const Element& e = ckt.elements[ckt.seg_inductor_elem[i]];
    const double l0 = inductance(
        e, [&](int node) { return node_voltage(ckt, x_dc, node); });
    double dmax = 0.0;
    for (int c = first; c < samples; ++c) {
      const double l = inductance(e, [&](int node) { return w.voltages(node, c); });
      dmax = std::max(dmax, std::fabs(delta_drude(l, l0)));
    }
    rows[i] = {(i + 0.5) * ckt.segment_length(), l0, dmax};
  }
  return rows;
}

namespace {

void write_drude_csv(const std::vector<DrudeProfileRow>& rows,
                     const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "x_m,l_drude0_h,delta_l_max_h\n";
  for (const DrudeProfileRow& r : rows)
    os << format_g9(r.position) << "," << format_g9(r.l_drude0) << ","
       << format_g9(r.delta_max) << "\n";
}

} // namespace

int run_scenario(const Scenario& s, const RunOptions& opt) {
  s.validate();
  fs::create_directories(s.output_dir);
  const std::string hash = config_hash(s);

  bool any_hard_failure = false;
  std::vector<ResponseCurve> curves;
  for (Method m : s.methods) {
    ResponseCurve c = frequency_sweep(s, m, opt.threads);
    for (const ResponsePoint& pt : c.points)
      if (!pt.ok) any_hard_failure = true;
    const std::string path =
        s.output_dir + "/" + s.name + "_" + method_name(m) + ".csv";
    emit_csv(c, path);
    write_sidecar(path, s.name, method_name(m), hash);
    curves.push_back(std::move(c));
  }

  if (curves.size() >= 2) {
    const ComparisonReport rep = compare_methods(curves, s);
    const std::string path = s.output_dir + "/" + s.name + "_report.json";
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << report_to_json(rep).dump(2) << "\n";
    write_sidecar(path, s.name, "comparison", hash);
  }

  if (opt.want_profiles) {
    double freq = opt.profile_frequency;
    if (freq <= 0.0) {
      const ResponseCurve an = analytic_response_sweep(
          s.effective_device(), s.bias, s.amplitude, s.frequencies);
      freq = first_peak(an).frequency;
    }
    for (Method m : s.methods) {
      if (m == Method::analytic) continue;
      ChannelProfile prof;
      if (m == Method::hydro) {
        Excitation exc;
        exc.amplitude = s.amplitude;
        exc.frequency = freq;
        prof = solve_hydro(s.effective_device(), s.bias, exc, s.hydro, true)
                   .profile;
      } else {
        const InductanceMode mode = m == Method::circuit_varying
                                        ? InductanceMode::varying
                                        : InductanceMode::uniform;
        Excitation exc;
        exc.amplitude = s.amplitude;
        exc.frequency = freq;
        const SegmentedCircuit ckt = build_segmented(s.effective_device(), s.bias,
                                                     exc, s.boundary, mode);
        const WaveformSet w = transient(ckt, s.solver);
        prof = extract_profiles(w, ckt);
      }
      const std::string path = s.output_dir + "/" + s.name + "_" +
                               method_name(m) + "_profile.csv";
      emit_csv(prof, path);
      write_sidecar(path, s.name, method_name(m) + "_profile", hash);
      if (m == Method::circuit_varying) {
        const auto rows = drude_profile_at(s, freq, s.amplitude);
        const std::string dpath =
            s.output_dir + "/" + s.name + "_drude_profile.csv";
        write_drude_csv(rows, dpath);
        write_sidecar(dpath, s.name, "drude_profile", hash);
      }
    }
  }
  return any_hard_failure ? 3 : 0;
}

} // namespace terafet
