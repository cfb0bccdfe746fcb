#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "oem/dynamics.hpp"

namespace oem {

/// Vacuum quadrature variance; the standard quantum limit for <Q0^2>.
inline constexpr double kVacuumVariance = 0.5;

/// Lower bound accepted for symplectic eigenvalues (1/2 minus tolerance).
inline constexpr double kPhysicalityTolerance = 1e-6;

class NonPhysicalCovariance : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// <Q0^2>, the mechanical position variance.
inline double mechanical_variance(const Matrix6& v) {
  return v(quad::Q0, quad::Q0);
}

/// Squeezing in dB relative to the vacuum: positive below the SQL.
inline double squeezing_db(double variance) {
  return -10.0 * std::log10(variance / kVacuumVariance);
}

/// Reduced covariance of the optical and circuit modes, ordered (X, Y, Q1, P1).
inline Matrix4 optical_circuit_block(const Matrix6& v) {
  constexpr int idx[4] = {quad::X, quad::Y, quad::Q1, quad::P1};
  Matrix4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = v(idx[i], idx[j]);
  return r;
}

/// Smallest symplectic eigenvalue of the partial transpose of a two-mode
/// covariance matrix [[A, C], [C^T, B]].
inline double partial_transpose_min_eigenvalue(const Matrix4& v4) {
  const double det_a = v4.topLeftCorner<2, 2>().determinant();
  const double det_b = v4.bottomRightCorner<2, 2>().determinant();
  const double det_c = v4.topRightCorner<2, 2>().determinant();
  const double det_v = v4.determinant();
  if (!(det_v > 0.0))
    throw NonPhysicalCovariance("reduced covariance has non-positive determinant");

  const double sigma = det_a + det_b - 2.0 * det_c;
  double disc = sigma * sigma - 4.0 * det_v;
  if (disc < 0.0) {
    // Round-off can push a degenerate spectrum slightly negative.
    if (disc < -kPhysicalityTolerance * std::max(1.0, sigma * sigma))
      throw NonPhysicalCovariance("reduced covariance violates sigma^2 >= 4 det V");
    disc = 0.0;
  }
  return std::sqrt(0.5 * (sigma - std::sqrt(disc)));
}

/// Gaussian logarithmic negativity (natural log) between two modes, for the
/// vacuum-variance-1/2 convention.
inline double log_negativity(const Matrix4& v4) {
  const double nu = partial_transpose_min_eigenvalue(v4);
  return std::max(0.0, -std::log(2.0 * nu));
}

/// Optical-circuit logarithmic negativity of the full covariance matrix.
inline double log_negativity(const Matrix6& v) {
  return log_negativity(optical_circuit_block(v));
}

/// Symplectic spectrum of an n-mode covariance in (q1, p1, q2, p2, ...)
/// ordering, ascending. Computed as moduli of the eigenvalues of Omega V.
template <int N>
std::vector<double> symplectic_eigenvalues(const Eigen::Matrix<double, N, N>& v) {
  static_assert(N % 2 == 0, "covariance dimension must be even");
  Eigen::Matrix<double, N, N> omega = Eigen::Matrix<double, N, N>::Zero();
  for (int k = 0; k < N; k += 2) {
    omega(k, k + 1) = 1.0;
    omega(k + 1, k) = -1.0;
  }
  Eigen::EigenSolver<Eigen::Matrix<double, N, N>> es(omega * v, false);
  std::vector<double> mods;
  mods.reserve(N);
  for (int k = 0; k < N; ++k) mods.push_back(std::abs(es.eigenvalues()(k).imag()));
  std::sort(mods.begin(), mods.end());
  // Each symplectic eigenvalue appears as a +/- pair.
  std::vector<double> nu;
  for (int k = 0; k < N; k += 2) nu.push_back(0.5 * (mods[k] + mods[k + 1]));
  return nu;
}

inline bool is_physical(const Matrix6& v,
                        double tol = kPhysicalityTolerance) {
  if ((v - v.transpose()).cwiseAbs().maxCoeff() > 0.0) return false;
  if ((v.diagonal().array() <= 0.0).any()) return false;
  const auto nu = symplectic_eigenvalues<6>(v);
  return nu.front() >= kVacuumVariance - tol;
}

struct MeasureSample {
  double t = 0.0;
  ClassicalState classical;
  double mech_variance = kVacuumVariance;
  double log_negativity = 0.0;
};

using TrajectoryRecord = std::vector<MeasureSample>;

inline MeasureSample measure(double t, const ClassicalState& c,
                             const Matrix6& v) {
  return {t, c, mechanical_variance(v), log_negativity(v)};
}

struct WindowExtrema {
  double min_variance = 0.0;
  double max_log_negativity = 0.0;
};

struct TimeWindow {
  double begin = 0.0;
  double end = 0.0;
};

/// Minimum <Q0^2> and maximum E_N over samples with begin <= t <= end.
inline WindowExtrema window_extrema(const TrajectoryRecord& record,
                                    TimeWindow window) {
  WindowExtrema out{std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity()};
  // Sample times are computed as k*dt, so allow a little slack at the edges.
  const double slack = 1e-9 * std::max(1.0, std::abs(window.end));
  bool any = false;
  for (const auto& s : record) {
    if (s.t < window.begin - slack || s.t > window.end + slack) continue;
    any = true;
    out.min_variance = std::min(out.min_variance, s.mech_variance);
    out.max_log_negativity = std::max(out.max_log_negativity, s.log_negativity);
  }
  if (!any)
    throw std::out_of_range("analysis window [" + std::to_string(window.begin) +
                            ", " + std::to_string(window.end) +
                            "] contains no samples");
  return out;
}

}  // namespace oem
