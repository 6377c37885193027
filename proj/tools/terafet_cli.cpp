#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "terafet/csv.hpp"
#include "terafet/harness.hpp"

using namespace terafet;

namespace {

Scenario resolve_scenario(const std::string& preset_name,
                          const std::string& config_path) {
  if (!preset_name.empty() && !config_path.empty())
    throw ConfigError("<args>", "use either --preset or --config, not both");
  if (!preset_name.empty()) return preset(preset_name);
  if (!config_path.empty()) return load_scenario(config_path);
  throw ConfigError("<args>", "one of --preset or --config is required");
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a + i * (b - a) / (n - 1);
  return g;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"TeraFET nonlinear transmission-line simulation lab"};
  app.require_subcommand(1);

  std::string preset_name, config_path, out_dir = "out", method_name_arg;
  int threads = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--preset", preset_name,
                    "bundled scenario: fig5a|fig5b|fig5c|fig5d|fig8a|fig8b|fig2");
    cmd->add_option("--config", config_path, "scenario config file (JSON)");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
  };

  // iv
  auto* iv = app.add_subcommand("iv", "DC I-V sweep of the segmented circuit");
  add_common(iv);
  double vgs_min = 0.3, vgs_max = 0.6, vds_min = 0.0, vds_max = 0.2;
  int vgs_n = 5, vds_n = 6;
  iv->add_option("--vgs-min", vgs_min);
  iv->add_option("--vgs-max", vgs_max);
  iv->add_option("--vgs-points", vgs_n);
  iv->add_option("--vds-min", vds_min);
  iv->add_option("--vds-max", vds_max);
  iv->add_option("--vds-points", vds_n);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "frequency sweep for one method");
  add_common(sweep);
  sweep->add_option("--method", method_name_arg,
                    "analytic|hydro|circuit_varying|circuit_uniform");

  // profile
  auto* profile =
      app.add_subcommand("profile", "channel profiles over one steady cycle");
  add_common(profile);
  double prof_freq = 0.0;
  profile->add_option("--method", method_name_arg,
                      "hydro|circuit_varying|circuit_uniform");
  profile->add_option("--frequency", prof_freq,
                      "excitation frequency, Hz (default: analytic peak)");

  // compare
  auto* compare = app.add_subcommand(
      "compare", "run every configured method and write a comparison report");
  add_common(compare);

  // check
  auto* check = app.add_subcommand("check", "acceptance gate (CI mode)");
  check->add_option("--out", out_dir, "artifact directory for gate curves");
  check->add_option("--threads", threads, "worker threads (0 = hardware)");

  // dump-config
  auto* dump = app.add_subcommand("dump-config", "print a preset as JSON");
  dump->add_option("--preset", preset_name, "preset name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (iv->parsed()) {
      Scenario s = resolve_scenario(preset_name, config_path);
      SolverConfig cfg = s.solver;
      const auto table = iv_sweep(s.device, linspace(vgs_min, vgs_max, vgs_n),
                                  linspace(vds_min, vds_max, vds_n), cfg);
      std::filesystem::create_directories(out_dir);
      const std::string path = out_dir + "/" + s.name + "_iv.csv";
      emit_csv(table, path);
      write_sidecar(path, s.name, "iv", config_hash(s));
      std::cout << "wrote " << path << "\n";
      return 0;
    }

    if (sweep->parsed()) {
      Scenario s = resolve_scenario(preset_name, config_path);
      s.output_dir = out_dir;
      if (!method_name_arg.empty())
        s.methods = {method_from_name(method_name_arg)};
      RunOptions opt;
      opt.threads = threads;
      const int rc = run_scenario(s, opt);
      std::cout << "artifacts in " << s.output_dir << "\n";
      return rc;
    }

    if (profile->parsed()) {
      Scenario s = resolve_scenario(preset_name, config_path);
      s.output_dir = out_dir;
      if (!method_name_arg.empty())
        s.methods = {method_from_name(method_name_arg)};
      RunOptions opt;
      opt.threads = threads;
      opt.want_profiles = true;
      opt.profile_frequency = prof_freq;
      // profiles only; skip the full sweep by collapsing the grid
      if (s.name == "fig2") {
        // delta-L profile per grid frequency, one combined artifact
        std::filesystem::create_directories(out_dir);
        const std::string path = out_dir + "/fig2_drude_profiles.csv";
        std::ofstream os(path, std::ios::binary);
        os << "frequency_hz,x_m,l_drude0_h,delta_l_max_h\n";
        for (double f : s.frequencies) {
          const auto rows = drude_profile_at(s, f, s.amplitude);
          for (const auto& r : rows)
            os << format_g9(f) << "," << format_g9(r.position) << ","
               << format_g9(r.l_drude0) << "," << format_g9(r.delta_max)
               << "\n";
        }
        write_sidecar(path, s.name, "drude_profile_vs_frequency",
                      config_hash(s));
        std::cout << "wrote " << path << "\n";
        return 0;
      }
      s.methods.erase(std::remove(s.methods.begin(), s.methods.end(),
                                  Method::analytic),
                      s.methods.end());
      if (s.methods.empty())
        throw ConfigError("methods", "profile needs a non-analytic method");
      // run_scenario with a single-point grid at the profile frequency
      double f = prof_freq;
      if (f <= 0.0) {
        const ResponseCurve an = analytic_response_sweep(
            s.effective_device(), s.bias, s.amplitude, s.frequencies);
        f = first_peak(an).frequency;
      }
      s.frequencies = {f};
      opt.profile_frequency = f;
      const int rc = run_scenario(s, opt);
      std::cout << "artifacts in " << s.output_dir << "\n";
      return rc;
    }

    if (compare->parsed()) {
      Scenario s = resolve_scenario(preset_name, config_path);
      s.output_dir = out_dir;
      RunOptions opt;
      opt.threads = threads;
      const int rc = run_scenario(s, opt);
      std::cout << "artifacts in " << s.output_dir << "\n";
      return rc;
    }

    if (check->parsed()) {
      const auto results = run_acceptance(std::cout, threads, out_dir);
      bool all = true;
      for (const auto& r : results) all &= r.pass;
      std::cout << (all ? "ALL CRITERIA PASSED" : "GATE FAILED") << "\n";
      return all ? 0 : 4;
    }

    if (dump->parsed()) {
      std::cout << scenario_to_json(preset(preset_name)).dump(2) << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NonConvergence& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
