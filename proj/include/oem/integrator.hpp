#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include "oem/dynamics.hpp"
#include "oem/measures.hpp"

namespace oem {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Thrown when the state leaves the finite/bounded region, typically a
/// parametric instability of the linearized dynamics.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(double t, const std::string& what)
      : std::runtime_error(what), time_(t) {}
  explicit DivergenceError(double t)
      : DivergenceError(t, "state diverged at t = " + std::to_string(t)) {}

  double time() const noexcept { return time_; }

private:
  double time_;
};

struct JointState {
  double t = 0.0;
  ClassicalState classical;
  Matrix6 covariance = Matrix6::Identity() * kVacuumVariance;
};

/// Derivative of (classical, covariance) with respect to time.
struct JointDerivative {
  ClassicalState classical;
  Matrix6 covariance = Matrix6::Zero();
};

struct IntegrationConfig {
  double dt = 1e-3 * kTwoPi;
  double t_end = 1000.0 * kTwoPi;
  std::int64_t record_stride = 10;
  double divergence_threshold = 1e12;

  std::int64_t steps() const {
    if (t_end <= 0.0) return 0;
    return static_cast<std::int64_t>(std::ceil(t_end / dt - 1e-9));
  }
};

inline void check_config(const IntegrationConfig& cfg) {
  std::vector<std::string> bad;
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) bad.push_back("dt must be > 0");
  if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end))
    bad.push_back("t_end must be >= 0");
  if (cfg.record_stride < 1) bad.push_back("record_stride must be >= 1");
  if (!(cfg.divergence_threshold > 0.0))
    bad.push_back("divergence_threshold must be > 0");
  if (!bad.empty()) throw InvalidParameter(std::move(bad));
}

/// Uncorrelated vacuum/thermal start with zero mean fields.
inline JointState initial_state(const SystemParams& p) {
  JointState s;
  s.covariance = Matrix6::Zero();
  s.covariance.diagonal() << 0.5, 0.5, p.n_th_0 + 0.5, p.n_th_0 + 0.5,
      p.n_th_1 + 0.5, p.n_th_1 + 0.5;
  return s;
}

/// Mean fields and covariance of the unmodulated system: laser and voltage
/// sidebands off, spring unmodulated. Solves the classical fixed point by
/// Newton iteration from the weak-coupling estimate, then the algebraic
/// Lyapunov equation A V + V A^T + D = 0. Throws if the carrier-only fixed
/// point is missing or unstable.
inline JointState carrier_steady_state(const System& sys) {
  System carrier = sys;
  carrier.drives.a_l_p1 = carrier.drives.a_l_m1 = 0.0;
  carrier.drives.a_v_p1 = carrier.drives.a_v_m1 = 0.0;
  carrier.spring.theta_0 = 0.0;
  const auto& p = carrier.params;
  constexpr cplx i{0.0, 1.0};

  using Vec6 = Eigen::Matrix<double, 6, 1>;
  auto pack = [](const ClassicalState& c) {
    Vec6 x;
    x << c.alpha.real(), c.alpha.imag(), c.beta_0.real(), c.beta_0.imag(),
        c.beta_1.real(), c.beta_1.imag();
    return x;
  };
  auto unpack = [](const Vec6& x) {
    return ClassicalState{{x(0), x(1)}, {x(2), x(3)}, {x(4), x(5)}};
  };
  auto residual = [&](const Vec6& x) {
    return pack(classical_rhs(0.0, unpack(x), carrier));
  };

  ClassicalState guess;
  guess.alpha = carrier.drives.a_l_0 / (p.kappa + i * p.delta_0);
  guess.beta_1 = i * carrier.drives.a_v_0 / (p.gamma_1 + i * p.omega_1);
  guess.beta_0 = (i * p.g_0 * std::norm(guess.alpha) +
                  i * p.g_1 * 4.0 * guess.beta_1.real() * guess.beta_1.real()) /
                 (p.gamma_0 + i * p.omega_0);

  Vec6 x = pack(guess);
  bool converged = false;
  for (int iter = 0; iter < 100 && !converged; ++iter) {
    const Vec6 f = residual(x);
    Eigen::Matrix<double, 6, 6> jac;
    for (int k = 0; k < 6; ++k) {
      const double h = 1e-7 * std::max(1.0, std::abs(x(k)));
      Vec6 xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      jac.col(k) = (residual(xp) - residual(xm)) / (2.0 * h);
    }
    const Vec6 dx = jac.fullPivLu().solve(-f);
    x += dx;
    converged = dx.norm() <= 1e-13 * std::max(1.0, x.norm());
  }
  if (!converged || !x.allFinite())
    throw DivergenceError(0.0, "carrier-only steady state did not converge");

  JointState s;
  s.classical = unpack(x);
  const Matrix6 a = drift_matrix(0.0, s.classical, carrier);
  if ((a.eigenvalues().real().array() >= 0.0).any())
    throw DivergenceError(0.0, "carrier-only steady state is unstable");

  // vec(A V + V A^T) = (I (x) A + A (x) I) vec(V)
  Eigen::Matrix<double, 36, 36> lyap = Eigen::Matrix<double, 36, 36>::Zero();
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c)
      for (int k = 0; k < 6; ++k) {
        lyap(c * 6 + r, c * 6 + k) += a(r, k);
        lyap(c * 6 + r, k * 6 + r) += a(c, k);
      }
  const Matrix6 d = noise_matrix(p);
  Eigen::Matrix<double, 36, 1> rhs = -Eigen::Map<const Eigen::Matrix<double, 36, 1>>(d.data());
  Eigen::Matrix<double, 36, 1> vec = lyap.fullPivLu().solve(rhs);
  Matrix6 v = Eigen::Map<Matrix6>(vec.data());
  s.covariance = 0.5 * (v + v.transpose());
  return s;
}

/// Joint vector field: mean-field equations plus the Lyapunov equation with
/// the drift evaluated at the (stage) classical state and time.
class OemVectorField {
public:
  explicit OemVectorField(const System& sys)
      : sys_(sys), noise_(noise_matrix(sys.params)) {}

  JointDerivative operator()(double t, const ClassicalState& c,
                             const Matrix6& v) const {
    JointDerivative d;
    d.classical = classical_rhs(t, c, sys_);
    d.covariance = covariance_rhs(drift_matrix(t, c, sys_), v, noise_);
    return d;
  }

  const System& system() const noexcept { return sys_; }

private:
  System sys_;
  Matrix6 noise_;
};

/// One classical fourth-order Runge-Kutta step for any state type supporting
/// `y + h * f(t, y)`.
template <class State, class Rhs>
State rk4_advance(double t, const State& y, double h, const Rhs& f) {
  const auto k1 = f(t, y);
  const auto k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
  const auto k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
  const auto k4 = f(t + h, State(y + h * k3));
  return State(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

template <class State, class Rhs>
State euler_advance(double t, const State& y, double h, const Rhs& f) {
  return State(y + h * f(t, y));
}

namespace detail {

inline bool within(const JointState& s, double bound) {
  auto ok = [bound](double x) { return std::isfinite(x) && std::abs(x) <= bound; };
  const auto& c = s.classical;
  for (double x : {c.alpha.real(), c.alpha.imag(), c.beta_0.real(),
                   c.beta_0.imag(), c.beta_1.real(), c.beta_1.imag()})
    if (!ok(x)) return false;
  for (int k = 0; k < 36; ++k)
    if (!ok(s.covariance.data()[k])) return false;
  return true;
}

// Flat vector view of the joint state used by the generic steppers.
struct Flat {
  ClassicalState c;
  Matrix6 v;

  friend Flat operator+(const Flat& a, const Flat& b) {
    return {a.c + b.c, a.v + b.v};
  }
  friend Flat operator*(double s, const Flat& a) { return {s * a.c, s * a.v}; }
};

enum class Scheme { rk4, euler };

template <Scheme S, class Field>
JointState step(const JointState& state, double dt, const Field& field,
                double threshold) {
  auto f = [&field](double t, const Flat& y) {
    auto d = field(t, y.c, y.v);
    return Flat{d.classical, d.covariance};
  };
  const Flat y0{state.classical, state.covariance};
  const Flat y1 = S == Scheme::rk4 ? rk4_advance(state.t, y0, dt, f)
                                   : euler_advance(state.t, y0, dt, f);
  JointState next;
  next.t = state.t + dt;
  next.classical = y1.c;
  next.covariance = 0.5 * (y1.v + y1.v.transpose());
  if (!within(next, threshold)) throw DivergenceError(next.t);
  return next;
}

}  // namespace detail

/// Advances the joint state by one RK4 step of size dt and re-symmetrizes
/// the covariance. `field(t, classical, covariance)` returns a JointDerivative.
template <class Field>
JointState rk4_step(const JointState& state, double dt, const Field& field,
                    double divergence_threshold = 1e12) {
  return detail::step<detail::Scheme::rk4>(state, dt, field, divergence_threshold);
}

template <class Field>
JointState euler_step(const JointState& state, double dt, const Field& field,
                      double divergence_threshold = 1e12) {
  return detail::step<detail::Scheme::euler>(state, dt, field, divergence_threshold);
}

/// Called at every recorded sample with the sample and the full state.
using Observer = std::function<void(const MeasureSample&, const JointState&)>;

namespace detail {

template <Scheme S>
TrajectoryRecord run(const JointState& initial, const IntegrationConfig& cfg,
                     const System& sys, const Observer& observer) {
  check_config(cfg);
  const OemVectorField field(sys);
  const std::int64_t n = cfg.steps();
  const double h = n > 0 ? cfg.t_end / static_cast<double>(n) : cfg.dt;

  TrajectoryRecord record;
  record.reserve(static_cast<std::size_t>(n / cfg.record_stride + 2));
  auto emit = [&](const JointState& s) {
    MeasureSample m = measure(s.t, s.classical, s.covariance);
    record.push_back(m);
    if (observer) observer(m, s);
  };

  JointState state = initial;
  emit(state);
  for (std::int64_t k = 1; k <= n; ++k) {
    state = step<S>(state, h, field, cfg.divergence_threshold);
    // Time from the step index keeps records free of accumulated drift.
    state.t = initial.t + static_cast<double>(k) * h;
    if (k % cfg.record_stride == 0 || k == n) emit(state);
  }
  return record;
}

}  // namespace detail

/// Fixed-step RK4 integration from `initial` to initial.t + cfg.t_end. The
/// step is shrunk slightly if needed so the final step lands on t_end.
inline TrajectoryRecord integrate(const JointState& initial,
                                  const IntegrationConfig& cfg,
                                  const System& sys,
                                  const Observer& observer = {}) {
  return detail::run<detail::Scheme::rk4>(initial, cfg, sys, observer);
}

/// First-order explicit Euler with the same contract as integrate(). Only
/// meant for cross-checking the RK4 path.
inline TrajectoryRecord euler_oracle(const JointState& initial,
                                     const IntegrationConfig& cfg,
                                     const System& sys,
                                     const Observer& observer = {}) {
  return detail::run<detail::Scheme::euler>(initial, cfg, sys, observer);
}

}  // namespace oem
