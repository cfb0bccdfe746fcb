#pragma once

#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oem/config.hpp"
#include "oem/harness.hpp"
#include "oem/output.hpp"

#ifndef OEM_SCENARIO_DIR
#define OEM_SCENARIO_DIR "scenarios"
#endif

namespace oem {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2 };

/// Bundled scenario files reproducing the dynamics panels.
inline const std::vector<std::string>& fig2_scenarios() {
  static const std::vector<std::string> names = {
      "fig2_baseline", "fig2_laser", "fig2_laser_spring", "fig2_laser_voltage",
      "fig2_full"};
  return names;
}

/// Bundled sweep files, one per sweep panel.
inline const std::vector<std::string>& fig3_sweeps() {
  static const std::vector<std::string> names = {"fig3_g1", "fig3_theta0",
                                                 "fig3_theta_grid", "fig3_ratio"};
  return names;
}

namespace cli_detail {

inline void print_warnings(const Scenario& s, std::ostream& err) {
  for (const auto& w : check(s).warnings)
    err << "warning: " << s.name << ": " << w << '\n';
}

inline void report_sweep(const SweepResult& r, std::ostream& out) {
  std::size_t bad = 0;
  for (const auto& c : r.cells) bad += c.stable ? 0 : 1;
  out << r.cells.size() << " cells, " << bad << " unstable\n";
}

struct Options {
  std::string file;
  std::string out_dir = "out";
  unsigned jobs = 1;
  bool full = false;
  std::string which;
  std::string scenario_dir = OEM_SCENARIO_DIR;
};

inline int do_validate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto s = load_scenario(o.file);
  const auto report = check(s);
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  if (!report.ok()) throw InvalidParameter(report.violations);
  out << s.name << ": valid\n";
  return kExitOk;
}

inline int do_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto s = load_scenario(o.file);
  print_warnings(s, err);
  const auto result = run_scenario(s);
  const auto path = emit_trajectory(result, s, std::filesystem::path(o.out_dir) / s.name);
  out << s.name << ": min var_q0 = " << format_number(result.extrema.min_variance)
      << ", max e_n = " << format_number(result.extrema.max_log_negativity) << " -> "
      << path.string() << '\n';
  return kExitOk;
}

inline SweepSpec load_sweep_with(const std::filesystem::path& path, bool full) {
  if (!full) return load_sweep(path);
  auto j = config_detail::parse(config_detail::read_text(path), path.string());
  j["full_resolution"] = true;
  auto spec = sweep_from_json(j, path.parent_path());
  if (spec.name.empty()) spec.name = path.stem().string();
  return spec;
}

inline int do_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const auto spec = load_sweep_with(o.file, o.full);
  print_warnings(spec.base, err);
  const auto result = run_sweep(spec, o.jobs);
  const auto path = emit_sweep(result, spec, std::filesystem::path(o.out_dir) / spec.name);
  out << spec.name << ": ";
  report_sweep(result, out);
  out << "  -> " << path.string() << '\n';
  return kExitOk;
}

inline int do_figures(const Options& o, std::ostream& out, std::ostream& err) {
  const std::filesystem::path dir = o.scenario_dir;
  const bool fig2 = o.which.empty() || o.which == "fig2";
  const bool fig3 = o.which.empty() || o.which == "fig3";

  if (fig2) {
    std::vector<Scenario> scenarios;
    for (const auto& name : fig2_scenarios())
      scenarios.push_back(load_scenario(dir / (name + ".json")));
    std::vector<ScenarioResult> results(scenarios.size());
    std::vector<std::string> errors(scenarios.size());
    parallel_for(scenarios.size(), o.jobs, [&](std::size_t k) {
      try {
        results[k] = run_scenario(scenarios[k]);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    });
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
      if (!errors[k].empty()) throw DivergenceError(0.0, errors[k]);
      const auto path = emit_trajectory(
          results[k], scenarios[k], std::filesystem::path(o.out_dir) / "fig2" / scenarios[k].name);
      out << scenarios[k].name << ": min var_q0 = "
          << format_number(results[k].extrema.min_variance)
          << ", max e_n = " << format_number(results[k].extrema.max_log_negativity)
          << " -> " << path.string() << '\n';
    }
  }
  if (fig3) {
    for (const auto& name : fig3_sweeps()) {
      const auto spec = load_sweep_with(dir / (name + ".json"), o.full);
      print_warnings(spec.base, err);
      const auto result = run_sweep(spec, o.jobs);
      const auto path =
          emit_sweep(result, spec, std::filesystem::path(o.out_dir) / "fig3" / spec.name);
      out << spec.name << ": ";
      report_sweep(result, out);
      out << "  -> " << path.string() << '\n';
    }
  }
  return kExitOk;
}

}  // namespace cli_detail

/// Entry point of the `oem` command-line tool. Returns the process exit code.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  using namespace cli_detail;
  CLI::App app{"Optoelectromechanical squeezing and entanglement simulator"};
  app.set_version_flag("--version", OEM_VERSION);
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("scenario-file", o.file)->required();

  auto* simulate = app.add_subcommand("simulate", "Integrate one scenario");
  simulate->add_option("scenario-file", o.file)->required();
  simulate->add_option("--out", o.out_dir, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("sweep-file", o.file)->required();
  sweep->add_option("--out", o.out_dir, "Output directory");
  sweep->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_flag("--full", o.full, "Use full-resolution axes");

  auto* figures = app.add_subcommand("figures", "Run the bundled reproduction set");
  figures->add_option("which", o.which, "fig2 or fig3 (default: both)")
      ->check(CLI::IsMember({"fig2", "fig3"}));
  figures->add_option("--out", o.out_dir, "Output directory");
  figures->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  figures->add_option("--scenarios", o.scenario_dir, "Directory of bundled scenario files");
  figures->add_flag("--full", o.full, "Use full-resolution sweep axes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << OEM_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitConfig;
  }

  try {
    if (*validate) return do_validate(o, out, err);
    if (*simulate) return do_simulate(o, out, err);
    if (*sweep) return do_sweep(o, out, err);
    if (*figures) return do_figures(o, out, err);
  } catch (const InvalidParameter& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace oem
