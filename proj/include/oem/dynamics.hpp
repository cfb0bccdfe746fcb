#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "oem/model.hpp"

namespace oem {

using cplx = std::complex<double>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Matrix4 = Eigen::Matrix<double, 4, 4>;

/// Quadrature ordering of the fluctuation vector u = (X, Y, Q0, P0, Q1, P1).
namespace quad {
inline constexpr int X = 0;
inline constexpr int Y = 1;
inline constexpr int Q0 = 2;
inline constexpr int P0 = 3;
inline constexpr int Q1 = 4;
inline constexpr int P1 = 5;
}  // namespace quad

/// Mean-field amplitudes <a>, <b0>, <b1>. Also used for their time
/// derivatives, hence the vector-space operators.
struct ClassicalState {
  cplx alpha{};
  cplx beta_0{};
  cplx beta_1{};

  ClassicalState& operator+=(const ClassicalState& o) {
    alpha += o.alpha;
    beta_0 += o.beta_0;
    beta_1 += o.beta_1;
    return *this;
  }
  ClassicalState& operator*=(double s) {
    alpha *= s;
    beta_0 *= s;
    beta_1 *= s;
    return *this;
  }
  friend ClassicalState operator+(ClassicalState a, const ClassicalState& b) {
    return a += b;
  }
  friend ClassicalState operator*(double s, ClassicalState a) { return a *= s; }
  friend bool operator==(const ClassicalState&, const ClassicalState&) = default;

  bool finite() const {
    return std::isfinite(alpha.real()) && std::isfinite(alpha.imag()) &&
           std::isfinite(beta_0.real()) && std::isfinite(beta_0.imag()) &&
           std::isfinite(beta_1.real()) && std::isfinite(beta_1.imag());
  }
};

struct EffectiveParams {
  double delta = 0.0;
  cplx g0_eff{};
  double g10 = 0.0;
  double g11 = 0.0;
  double omega_0_eff = 1.0;
};

namespace detail {
inline cplx sideband_sum(double t, double carrier, double plus, double minus,
                         double omega) {
  const double phase = omega * t;
  const cplx e_minus = std::polar(1.0, -phase);
  return carrier + plus * e_minus + minus * std::conj(e_minus);
}
}  // namespace detail

/// A_l(t) = A_l^(0) + A_l^(+1) e^{-i Omega_l t} + A_l^(-1) e^{+i Omega_l t}
inline cplx laser_amplitude(double t, const DriveSchedule& d) {
  return detail::sideband_sum(t, d.a_l_0, d.a_l_p1, d.a_l_m1, d.omega_l_mod);
}

/// A_v(t), same sideband structure as the laser drive.
inline cplx voltage_amplitude(double t, const DriveSchedule& d) {
  return detail::sideband_sum(t, d.a_v_0, d.a_v_p1, d.a_v_m1, d.omega_v_mod);
}

/// omega_0' = omega_0 sqrt(1 + theta_0 cos(theta_1 t)); needs |theta_0| < 1.
inline double effective_mech_frequency(double t, const SpringSchedule& s,
                                       double omega_0) {
  return omega_0 * std::sqrt(1.0 + s.theta_0 * std::cos(s.theta_1 * t));
}

inline EffectiveParams effective_params(double t, const ClassicalState& c,
                                        const System& sys) {
  const auto& p = sys.params;
  const double x0 = 2.0 * c.beta_0.real();  // beta_0* + beta_0
  const double x1 = 2.0 * c.beta_1.real();
  EffectiveParams e;
  e.delta = p.delta_0 - p.g_0 * x0;
  e.g0_eff = p.g_0 * c.alpha;
  e.g10 = p.g_1 * x0;
  e.g11 = p.g_1 * x1;
  e.omega_0_eff = effective_mech_frequency(t, sys.spring, p.omega_0);
  return e;
}

/// Mean-field equations of motion.
inline ClassicalState classical_rhs(double t, const ClassicalState& c,
                                    const System& sys) {
  constexpr cplx i{0.0, 1.0};
  const auto& p = sys.params;
  const double x0 = 2.0 * c.beta_0.real();
  const double x1 = 2.0 * c.beta_1.real();
  const double delta = p.delta_0 - p.g_0 * x0;
  const double omega_0 = sys.spring.scope == SpringScope::both
                             ? effective_mech_frequency(t, sys.spring, p.omega_0)
                             : p.omega_0;

  ClassicalState d;
  d.alpha = -(p.kappa + i * delta) * c.alpha + laser_amplitude(t, sys.drives);
  d.beta_0 = -(p.gamma_0 + i * omega_0) * c.beta_0 +
             i * p.g_0 * std::norm(c.alpha) + i * p.g_1 * x1 * x1;
  d.beta_1 = -(p.gamma_1 + i * p.omega_1) * c.beta_1 +
             2.0 * i * p.g_1 * x0 * x1 + i * voltage_amplitude(t, sys.drives);
  return d;
}

/// Drift matrix of the linearized quadrature fluctuations at time t.
inline Matrix6 drift_matrix(const EffectiveParams& e, const SystemParams& p) {
  using namespace quad;
  const double gr = e.g0_eff.real();
  const double gi = e.g0_eff.imag();
  const double w0 = e.omega_0_eff;
  Matrix6 a = Matrix6::Zero();
  a(X, X) = -p.kappa;
  a(X, Y) = e.delta;
  a(X, Q0) = -2.0 * gi;
  a(Y, X) = -e.delta;
  a(Y, Y) = -p.kappa;
  a(Y, Q0) = 2.0 * gr;
  a(Q0, Q0) = -p.gamma_0;
  a(Q0, P0) = w0;
  a(P0, X) = 2.0 * gr;
  a(P0, Y) = 2.0 * gi;
  a(P0, Q0) = -w0;
  a(P0, P0) = -p.gamma_0;
  a(P0, Q1) = 4.0 * e.g11;
  a(Q1, Q1) = -p.gamma_1;
  a(Q1, P1) = p.omega_1;
  a(P1, Q0) = 4.0 * e.g11;
  a(P1, Q1) = -p.omega_1 + 4.0 * e.g10;
  a(P1, P1) = -p.gamma_1;
  return a;
}

inline Matrix6 drift_matrix(double t, const ClassicalState& c,
                            const System& sys) {
  // The spring modulation always enters the fluctuation dynamics.
  return drift_matrix(effective_params(t, c, sys), sys.params);
}

/// Diagonal diffusion matrix of the input noises.
inline Matrix6 noise_matrix(const SystemParams& p) {
  Matrix6 d = Matrix6::Zero();
  const double mech = p.gamma_0 * (2.0 * p.n_th_0 + 1.0);
  const double circ = p.gamma_1 * (2.0 * p.n_th_1 + 1.0);
  d.diagonal() << p.kappa, p.kappa, mech, mech, circ, circ;
  return d;
}

/// Lyapunov right-hand side A V + V A^T + D.
inline Matrix6 covariance_rhs(const Matrix6& a, const Matrix6& v,
                              const Matrix6& d) {
  Matrix6 av = (a * v).eval();
  return av + av.transpose() + d;
}

}  // namespace oem
