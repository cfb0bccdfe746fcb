#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <system_error>

#include <json.hpp>

#include "oem/config.hpp"
#include "oem/harness.hpp"

#ifndef OEM_VERSION
#define OEM_VERSION "0.1.0"
#endif

namespace oem {

class OutputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kTrajectoryHeader =
    "t,alpha_re,alpha_im,beta0_re,beta0_im,beta1_re,beta1_im,var_q0,e_n,var_q0_db";

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw OutputError("number formatting failed");
  return std::string(buf, end);
}

/// Measurement conventions written into every metadata sidecar.
inline nlohmann::json conventions() {
  return {{"quadrature_order", {"X", "Y", "Q0", "P0", "Q1", "P1"}},
          {"vacuum_variance", kVacuumVariance},
          {"squeezing", "var_q0 = V[Q0][Q0]; var_q0_db = -10*log10(var_q0/0.5)"},
          {"log_negativity_base", "e"},
          {"entanglement_partition", "optical (X,Y) | circuit (Q1,P1)"},
          {"units", "frequencies in omega_0, time in 1/omega_0"},
          {"integrator", "fixed-step RK4, covariance re-symmetrized every step"}};
}

namespace output_detail {

inline std::ofstream open(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec)
      throw OutputError("cannot create directory " + path.parent_path().string() +
                        ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot open " + path.string() + " for writing");
  return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw OutputError("write failed for " + path.string());
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

}  // namespace output_detail

/// Writes `<stem>.csv` and the `<stem>.json` metadata sidecar.
/// Returns the CSV path.
inline std::filesystem::path emit_trajectory(const ScenarioResult& result,
                                             const Scenario& scenario,
                                             const std::filesystem::path& stem) {
  if (result.record.empty()) throw OutputError("cannot emit an empty trajectory");
  std::filesystem::path csv = stem;
  csv += ".csv";
  std::filesystem::path meta = stem;
  meta += ".json";

  auto out = output_detail::open(csv);
  out << kTrajectoryHeader << '\n';
  for (const auto& s : result.record) {
    const auto& c = s.classical;
    out << format_number(s.t) << ',' << format_number(c.alpha.real()) << ','
        << format_number(c.alpha.imag()) << ',' << format_number(c.beta_0.real())
        << ',' << format_number(c.beta_0.imag()) << ','
        << format_number(c.beta_1.real()) << ',' << format_number(c.beta_1.imag())
        << ',' << format_number(s.mech_variance) << ','
        << format_number(s.log_negativity) << ','
        << format_number(squeezing_db(s.mech_variance)) << '\n';
  }
  output_detail::finish(out, csv);

  nlohmann::json j;
  j["kind"] = "trajectory";
  j["version"] = OEM_VERSION;
  j["scenario"] = to_json(scenario);
  j["dt"] = result.dt;
  j["samples"] = result.record.size();
  j["window_extrema"] = {{"min_variance", result.extrema.min_variance},
                         {"max_log_negativity", result.extrema.max_log_negativity}};
  j["conventions"] = conventions();
  output_detail::write_json(meta, j);
  return csv;
}

/// Writes `<stem>.csv` (one row per grid cell, unstable cells with empty
/// measure columns) and a `<stem>.json` sidecar holding the sweep spec.
inline std::filesystem::path emit_sweep(const SweepResult& result,
                                        const SweepSpec& spec,
                                        const std::filesystem::path& stem) {
  std::filesystem::path csv = stem;
  csv += ".csv";
  std::filesystem::path meta = stem;
  meta += ".json";

  auto out = output_detail::open(csv);
  for (const auto& name : result.axis_names) out << name << ',';
  out << "min_var_q0,max_e_n,min_var_q0_db,stable\n";
  std::size_t unstable = 0;
  for (const auto& cell : result.cells) {
    for (double x : cell.coords) out << format_number(x) << ',';
    if (cell.stable) {
      out << format_number(cell.min_variance) << ','
          << format_number(cell.max_log_negativity) << ','
          << format_number(squeezing_db(cell.min_variance)) << ",1\n";
    } else {
      ++unstable;
      out << ",,,0\n";
    }
  }
  output_detail::finish(out, csv);

  nlohmann::json j;
  j["kind"] = "sweep";
  j["version"] = OEM_VERSION;
  j["sweep"] = to_json(spec);
  j["dt"] = spec.base.integration.dt;
  j["cells"] = result.cells.size();
  j["unstable_cells"] = unstable;
  j["errors"] = nlohmann::json::array();
  for (const auto& cell : result.cells)
    if (!cell.stable) j["errors"].push_back({{"coords", cell.coords}, {"error", cell.error}});
  j["reduction"] = "window_extrema: min var_q0 and max e_n over the analysis window";
  j["conventions"] = conventions();
  output_detail::write_json(meta, j);
  return csv;
}

}  // namespace oem
