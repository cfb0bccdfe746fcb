#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "oem/integrator.hpp"
#include "oem/measures.hpp"
#include "oem/model.hpp"

namespace oem {

/// Length of the default analysis window, in mechanical periods.
inline constexpr double kDefaultWindowPeriods = 10.0;

enum class InitialCondition {
  /// Steady state of the unmodulated (carrier-only) system.
  carrier_steady,
  /// Zero mean fields, uncorrelated vacuum/thermal covariance.
  vacuum,
};

inline TimeWindow last_periods_window(const IntegrationConfig& cfg, double periods) {
  return {std::max(0.0, cfg.t_end - periods * kTwoPi), cfg.t_end};
}

struct Scenario {
  std::string name = "scenario";
  System system;
  IntegrationConfig integration;
  TimeWindow window = last_periods_window(IntegrationConfig{}, kDefaultWindowPeriods);
  InitialCondition initial = InitialCondition::carrier_steady;
};

/// Checks every invariant of the scenario, collecting all violations.
inline ValidationReport check(const Scenario& s) {
  ValidationReport r = check(s.system);
  const auto& c = s.integration;
  if (!(c.dt > 0.0)) r.violations.push_back("dt must be > 0");
  if (!(c.t_end > 0.0)) r.violations.push_back("t_end must be > 0");
  if (c.record_stride < 1) r.violations.push_back("record_stride must be >= 1");
  if (!(c.divergence_threshold > 0.0))
    r.violations.push_back("divergence_threshold must be > 0");
  if (!(s.window.begin <= s.window.end) || s.window.begin < 0.0 ||
      s.window.end > c.t_end * (1.0 + 1e-12))
    r.violations.push_back("window must satisfy 0 <= begin <= end <= t_end");
  return r;
}

inline JointState initial_state(const Scenario& s) {
  return s.initial == InitialCondition::carrier_steady
             ? carrier_steady_state(s.system)
             : initial_state(s.system.params);
}

struct ScenarioResult {
  TrajectoryRecord record;
  WindowExtrema extrema;
  /// Effective step actually used (t_end divided by the step count).
  double dt = 0.0;
};

/// Integrates the scenario and reduces its analysis window.
/// Divergence errors are rethrown with the scenario name attached.
inline ScenarioResult run_scenario(const Scenario& s,
                                   const Observer& observer = {}) {
  auto report = check(s);
  if (!report.ok()) throw InvalidParameter(std::move(report.violations));
  ScenarioResult out;
  try {
    out.record = integrate(initial_state(s), s.integration, s.system, observer);
  } catch (const DivergenceError& e) {
    throw DivergenceError(e.time(), "scenario '" + s.name + "': " + e.what());
  }
  out.extrema = window_extrema(out.record, s.window);
  const auto n = s.integration.steps();
  out.dt = n > 0 ? s.integration.t_end / static_cast<double>(n) : s.integration.dt;
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

/// How the voltage sideband ratio A_v(+1)/A_v(-1) maps onto amplitudes.
enum class RatioConvention {
  /// Keep A_v(-1) fixed, set A_v(+1) = ratio * A_v(-1).
  fixed_minus,
  /// Keep A_v(+1) + A_v(-1) fixed.
  constant_sum,
};

struct SweepAxis {
  std::string parameter;
  std::vector<double> values;
};

struct SweepSpec {
  std::string name = "sweep";
  Scenario base;
  std::vector<SweepAxis> axes;  // one or two
  RatioConvention ratio_convention = RatioConvention::fixed_minus;
};

struct SweepCell {
  std::vector<double> coords;
  double min_variance = std::nan("");
  double max_log_negativity = std::nan("");
  bool stable = false;
  std::string error;
};

struct SweepResult {
  std::vector<std::string> axis_names;
  std::vector<SweepCell> cells;  // row-major, first axis outermost
};

inline std::vector<double> linspace(double start, double stop, std::int64_t count) {
  if (count < 1) throw InvalidParameter({"axis count must be >= 1"});
  std::vector<double> v(static_cast<std::size_t>(count));
  if (count == 1) {
    v[0] = start;
    return v;
  }
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::int64_t k = 0; k < count; ++k)
    v[static_cast<std::size_t>(k)] = start + static_cast<double>(k) * step;
  v.back() = stop;
  return v;
}

/// Names accepted as sweep parameters: every numeric field of SystemParams,
/// DriveSchedule and SpringSchedule, plus the voltage sideband ratio.
inline const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names = {
      "omega_1", "kappa",   "gamma_0",     "gamma_1", "g_0",    "g_1",
      "delta_0", "n_th_0",  "n_th_1",      "a_l_0",   "a_l_p1", "a_l_m1",
      "omega_l_mod", "a_v_0", "a_v_p1",   "a_v_m1",  "omega_v_mod",
      "theta_0", "theta_1", "a_v_ratio"};
  return names;
}

inline void apply_parameter(Scenario& s, const std::string& name, double value,
                            RatioConvention rc = RatioConvention::fixed_minus) {
  auto& p = s.system.params;
  auto& d = s.system.drives;
  auto& sp = s.system.spring;
  if (name == "omega_1") p.omega_1 = value;
  else if (name == "kappa") p.kappa = value;
  else if (name == "gamma_0") p.gamma_0 = value;
  else if (name == "gamma_1") p.gamma_1 = value;
  else if (name == "g_0") p.g_0 = value;
  else if (name == "g_1") p.g_1 = value;
  else if (name == "delta_0") p.delta_0 = value;
  else if (name == "n_th_0") p.n_th_0 = value;
  else if (name == "n_th_1") p.n_th_1 = value;
  else if (name == "a_l_0") d.a_l_0 = value;
  else if (name == "a_l_p1") d.a_l_p1 = value;
  else if (name == "a_l_m1") d.a_l_m1 = value;
  else if (name == "omega_l_mod") d.omega_l_mod = value;
  else if (name == "a_v_0") d.a_v_0 = value;
  else if (name == "a_v_p1") d.a_v_p1 = value;
  else if (name == "a_v_m1") d.a_v_m1 = value;
  else if (name == "omega_v_mod") d.omega_v_mod = value;
  else if (name == "theta_0") sp.theta_0 = value;
  else if (name == "theta_1") sp.theta_1 = value;
  else if (name == "a_v_ratio") {
    if (rc == RatioConvention::fixed_minus) {
      d.a_v_p1 = value * d.a_v_m1;
    } else {
      const double sum = d.a_v_p1 + d.a_v_m1;
      d.a_v_m1 = sum / (1.0 + value);
      d.a_v_p1 = sum - d.a_v_m1;
    }
  } else {
    throw InvalidParameter({"unknown sweep parameter '" + name + "'"});
  }
}

inline void check(const SweepSpec& spec) {
  std::vector<std::string> bad;
  if (spec.axes.empty() || spec.axes.size() > 2)
    bad.push_back("a sweep needs one or two axes");
  const auto& known = sweep_parameters();
  for (const auto& a : spec.axes) {
    if (std::find(known.begin(), known.end(), a.parameter) == known.end())
      bad.push_back("unknown sweep parameter '" + a.parameter + "'");
    if (a.values.empty()) bad.push_back("axis '" + a.parameter + "' has no values");
    bool finite = true, monotonic = true;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
      finite = finite && std::isfinite(a.values[k]);
      if (k > 0) {
        const bool up = a.values[1] > a.values[0];
        monotonic = monotonic && (up ? a.values[k] > a.values[k - 1]
                                     : a.values[k] < a.values[k - 1]);
      }
    }
    if (!finite) bad.push_back("axis '" + a.parameter + "' has non-finite values");
    if (!monotonic)
      bad.push_back("axis '" + a.parameter + "' values must be strictly monotonic");
  }
  if (spec.axes.size() == 2 && spec.axes[0].parameter == spec.axes[1].parameter)
    bad.push_back("sweep axes must differ");
  if (!bad.empty()) throw InvalidParameter(std::move(bad));
}

/// Scenario for one grid cell.
inline Scenario cell_scenario(const SweepSpec& spec, const std::vector<double>& coords) {
  Scenario s = spec.base;
  for (std::size_t a = 0; a < spec.axes.size(); ++a)
    apply_parameter(s, spec.axes[a].parameter, coords[a], spec.ratio_convention);
  return s;
}

inline SweepCell evaluate_cell(const SweepSpec& spec, std::vector<double> coords) {
  SweepCell cell;
  cell.coords = std::move(coords);
  try {
    Scenario s = cell_scenario(spec, cell.coords);
    const auto result = run_scenario(s);
    cell.min_variance = result.extrema.min_variance;
    cell.max_log_negativity = result.extrema.max_log_negativity;
    cell.stable = true;
  } catch (const std::exception& e) {
    cell.stable = false;
    cell.error = e.what();
  }
  return cell;
}

/// Calls fn(k) for k in [0, count) on up to `jobs` threads. Each index is
/// handled by exactly one thread; fn must not throw.
template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, const Fn& fn) {
  if (count == 0) return;
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) fn(k);
  };
  if (jobs == 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(jobs);
  for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker);
}

/// Evaluates every grid point on a pool of `jobs` worker threads. Cells are
/// independent, so the result does not depend on the worker count. Failing
/// cells are flagged unstable and keep their error message.
inline SweepResult run_sweep(const SweepSpec& spec, unsigned jobs = 1) {
  check(spec);
  SweepResult result;
  std::vector<std::vector<double>> grid;
  const auto& first = spec.axes[0].values;
  if (spec.axes.size() == 1) {
    for (double x : first) grid.push_back({x});
  } else {
    for (double x : first)
      for (double y : spec.axes[1].values) grid.push_back({x, y});
  }
  for (const auto& a : spec.axes) result.axis_names.push_back(a.parameter);
  result.cells.resize(grid.size());

  parallel_for(grid.size(), jobs, [&](std::size_t k) {
    result.cells[k] = evaluate_cell(spec, grid[k]);
  });
  return result;
}

}  // namespace oem
