#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

// Parameter types for the modulated optoelectromechanical system.
//
// Every dynamical quantity is normalized to the mechanical frequency:
// frequencies and rates in units of omega_0, time in units of 1/omega_0.
// PhysicalParams and derive_couplings are the only places where SI values
// (or any caller-chosen unit system) appear.

namespace oem {

/// Raised when one or more parameter invariants are violated.
class InvalidParameter : public std::invalid_argument {
public:
  explicit InvalidParameter(std::vector<std::string> violations)
      : std::invalid_argument(join(violations)),
        violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept {
    return violations_;
  }

private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid parameters:";
    for (const auto& item : items) out += "\n  - " + item;
    return out;
  }

  std::vector<std::string> violations_;
};

struct SystemParams {
  double omega_0 = 1.0;  // the unit
  double omega_1 = 1.0;
  double kappa = 0.1;
  double gamma_0 = 1e-6;
  double gamma_1 = 1e-2;
  double g_0 = 1e-3;
  double g_1 = 1e-4;
  double delta_0 = 1.0;
  double n_th_0 = 0.0;
  double n_th_1 = 0.0;
};

/// Laser and voltage drive amplitudes with their first-order sidebands.
struct DriveSchedule {
  double a_l_0 = 100.0;
  double a_l_p1 = 10.0;
  double a_l_m1 = 10.0;
  double omega_l_mod = 2.0;
  double a_v_0 = 0.0;
  double a_v_p1 = 50.0;
  double a_v_m1 = 50.0;
  double omega_v_mod = 2.0;
};

/// Where the modulated mechanical frequency enters the equations of motion.
enum class SpringScope { both, fluctuations_only };

struct SpringSchedule {
  double theta_0 = 0.5;
  double theta_1 = 2.0;
  SpringScope scope = SpringScope::both;
};

/// Complete normalized parameter set consumed by the dynamics.
struct System {
  SystemParams params;
  DriveSchedule drives;
  SpringSchedule spring;
};

/// Physical (unnormalized) circuit and cavity quantities.
struct PhysicalParams {
  double cavity_length = 1.0;
  double mirror_gap = 1.0;
  double frequency_pull = 1.0;
  double base_capacitance = 1.0;
  double parasitic_capacitance = 0.0;
  double inductance = 1.0;
  double mass = 1.0;
  double q0_zp = 1.0;
  double q1_zp = 1.0;
  double drive_voltage = 1.0;
  double omega_laser = 1.0;
};

struct Couplings {
  double g_0 = 0.0;
  double g_1 = 0.0;
};

inline double participation_ratio(const PhysicalParams& p) {
  return p.base_capacitance / (p.parasitic_capacitance + p.base_capacitance);
}

/// Optomechanical and electromechanical single-quantum couplings.
///
/// Results are in the caller's unit system; `hbar` defaults to 1 so that
/// synthetic inputs can be checked by hand. Divide by omega_0 to normalize.
/// The frequency pull may be zero (no optomechanical coupling); every other
/// quantity must be strictly positive, except the parasitic capacitance
/// which may vanish.
inline Couplings derive_couplings(const PhysicalParams& p, double hbar = 1.0) {
  std::vector<std::string> bad;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      bad.push_back(std::string(name) + " must be positive");
  };
  positive(p.cavity_length, "cavity_length");
  positive(p.mirror_gap, "mirror_gap");
  positive(p.base_capacitance, "base_capacitance");
  positive(p.inductance, "inductance");
  positive(p.mass, "mass");
  positive(p.q0_zp, "q0_zp");
  positive(p.q1_zp, "q1_zp");
  positive(p.drive_voltage, "drive_voltage");
  positive(p.omega_laser, "omega_laser");
  positive(hbar, "hbar");
  if (!(p.frequency_pull >= 0.0) || !std::isfinite(p.frequency_pull))
    bad.push_back("frequency_pull must be non-negative");
  if (!(p.parasitic_capacitance >= 0.0) ||
      !std::isfinite(p.parasitic_capacitance))
    bad.push_back("parasitic_capacitance must be non-negative");
  if (!bad.empty()) throw InvalidParameter(std::move(bad));

  const double r = participation_ratio(p);
  Couplings c;
  c.g_0 = p.frequency_pull * p.q0_zp / std::sqrt(2.0);
  c.g_1 = r * r * p.q0_zp * p.q1_zp * p.q1_zp /
          (4.0 * std::sqrt(2.0) * hbar * p.base_capacitance * p.mirror_gap);
  return c;
}

/// Bose-Einstein occupancy 1/(exp(x) - 1) for x = hbar*omega/(k_B*T).
/// Zero temperature (x -> inf) yields 0.
inline double thermal_occupancy_from_ratio(double x) {
  if (std::isinf(x)) return 0.0;
  return 1.0 / std::expm1(x);
}

inline constexpr double kHbar = 1.054571817e-34;      // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J / K

/// Mean thermal occupancy of a mode at angular frequency `omega` (rad/s)
/// and temperature `temperature` (K).
inline double thermal_occupancy(double omega, double temperature) {
  if (temperature <= 0.0) return 0.0;
  return thermal_occupancy_from_ratio(kHbar * omega /
                                      (kBoltzmann * temperature));
}

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const noexcept { return violations.empty(); }
};

inline ValidationReport check(const System& s) {
  ValidationReport r;
  auto require = [&](bool cond, std::string msg) {
    if (!cond) r.violations.push_back(std::move(msg));
  };
  const auto& p = s.params;
  const auto& d = s.drives;
  const auto& sp = s.spring;

  auto finite = [](double v) { return std::isfinite(v); };
  for (double v : {p.omega_0, p.omega_1, p.kappa, p.gamma_0, p.gamma_1, p.g_0,
                   p.g_1, p.delta_0, p.n_th_0, p.n_th_1, d.a_l_0, d.a_l_p1,
                   d.a_l_m1, d.omega_l_mod, d.a_v_0, d.a_v_p1, d.a_v_m1,
                   d.omega_v_mod, sp.theta_0, sp.theta_1}) {
    if (!finite(v)) {
      r.violations.push_back("all parameters must be finite");
      break;
    }
  }

  require(p.omega_0 == 1.0, "omega_0 must be 1 (frequencies are in units of omega_0)");
  require(p.omega_1 > 0.0, "omega_1 must be > 0");
  require(p.kappa > 0.0, "kappa must be > 0");
  require(p.gamma_0 > 0.0, "gamma_0 must be > 0");
  require(p.gamma_1 > 0.0, "gamma_1 must be > 0");
  require(p.n_th_0 >= 0.0, "n_th_0 must be >= 0");
  require(p.n_th_1 >= 0.0, "n_th_1 must be >= 0");

  require(d.a_l_0 >= 0.0, "a_l_0 must be >= 0");
  require(d.a_l_p1 >= 0.0, "a_l_p1 must be >= 0");
  require(d.a_l_m1 >= 0.0, "a_l_m1 must be >= 0");
  require(d.a_v_0 >= 0.0, "a_v_0 must be >= 0");
  require(d.a_v_p1 >= 0.0, "a_v_p1 must be >= 0");
  require(d.a_v_m1 >= 0.0, "a_v_m1 must be >= 0");
  if (d.a_l_p1 != 0.0 || d.a_l_m1 != 0.0)
    require(d.omega_l_mod > 0.0,
            "omega_l_mod must be > 0 when laser sidebands are nonzero");
  if (d.a_v_p1 != 0.0 || d.a_v_m1 != 0.0)
    require(d.omega_v_mod > 0.0,
            "omega_v_mod must be > 0 when voltage sidebands are nonzero");

  require(std::abs(sp.theta_0) < 1.0, "|theta_0| must be < 1");

  // Feasible circuits keep g_1 within a tenth of g_0.
  if (p.g_1 > 0.1 * p.g_0 * (1.0 + 1e-12))
    r.warnings.push_back("g_1 exceeds g_0/10 (beyond the feasible coupling ratio)");
  return r;
}

/// Returns the configuration unchanged if valid; throws InvalidParameter
/// listing every violated invariant otherwise. Warnings are appended to
/// `warnings` when provided.
inline const System& validate(const System& s,
                              std::vector<std::string>* warnings = nullptr) {
  auto report = check(s);
  if (!report.ok()) throw InvalidParameter(std::move(report.violations));
  if (warnings)
    warnings->insert(warnings->end(), report.warnings.begin(),
                     report.warnings.end());
  return s;
}

}  // namespace oem
