#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oem/integrator.hpp"

namespace {

using oem::JointState;
using oem::Matrix6;
using oem::kTwoPi;

struct ZeroField {
  oem::JointDerivative operator()(double, const oem::ClassicalState&,
                                  const Matrix6&) const {
    return {};
  }
};

oem::System decoupled_constant_drive() {
  oem::System s;
  s.params.g_0 = s.params.g_1 = 0.0;
  s.drives.a_l_p1 = s.drives.a_l_m1 = 0.0;
  s.drives.a_v_p1 = s.drives.a_v_m1 = 0.0;
  s.spring.theta_0 = 0.0;
  return s;
}

std::vector<Matrix6> covariances(const JointState& init, const oem::IntegrationConfig& cfg,
                                 const oem::System& sys, bool euler = false) {
  std::vector<Matrix6> out;
  auto obs = [&](const oem::MeasureSample&, const JointState& s) {
    out.push_back(s.covariance);
  };
  if (euler) oem::euler_oracle(init, cfg, sys, obs);
  else oem::integrate(init, cfg, sys, obs);
  return out;
}

TEST(Rk4Step, ZeroFieldLeavesStateUnchanged) {
  JointState s;
  s.classical = {{1.0, 2.0}, {3.0, -4.0}, {0.5, 0.25}};
  s.covariance(0, 1) = s.covariance(1, 0) = 0.1;
  const auto next = oem::rk4_step(s, 0.1, ZeroField{});
  EXPECT_EQ(next.classical, s.classical);
  EXPECT_EQ(next.covariance, s.covariance);
  EXPECT_DOUBLE_EQ(next.t, 0.1);
}

TEST(Rk4Step, ExponentialDecayOneStep) {
  const double y = oem::rk4_advance(0.0, 1.0, 0.1, [](double, double v) { return -v; });
  EXPECT_NEAR(y, 0.9048375, 1e-15);
}

TEST(EulerStep, ExponentialDecayOneStep) {
  const double y = oem::euler_advance(0.0, 1.0, 0.1, [](double, double v) { return -v; });
  EXPECT_NEAR(y, 0.9, 1e-16);
  JointState s;
  s.classical.alpha = {2.0, 0.0};
  const auto next = oem::euler_step(s, 0.1, ZeroField{});
  EXPECT_EQ(next.classical, s.classical);
}

TEST(Rk4Step, DecoupledCavityVacuumIsPreserved) {
  const auto sys = decoupled_constant_drive();
  JointState s = oem::initial_state(sys.params);
  s.classical.alpha = sys.drives.a_l_0 / oem::cplx(sys.params.kappa, sys.params.delta_0);
  const oem::OemVectorField field(sys);
  for (int k = 0; k < 100; ++k) s = oem::rk4_step(s, 0.01, field);
  EXPECT_NEAR(s.covariance(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(s.covariance(1, 1), 0.5, 1e-14);
  EXPECT_NEAR(s.covariance(0, 1), 0.0, 1e-14);
}

TEST(Rk4Step, ReportsDivergence) {
  JointState s;
  s.classical.alpha = {1.0, 0.0};
  auto blowup = [](double, const oem::ClassicalState& c, const Matrix6&) {
    oem::JointDerivative d;
    d.classical.alpha = 1e3 * c.alpha;
    return d;
  };
  try {
    oem::rk4_step(s, 1.0, blowup, 1e6);
    FAIL() << "expected DivergenceError";
  } catch (const oem::DivergenceError& e) {
    EXPECT_DOUBLE_EQ(e.time(), 1.0);
  }
}

TEST(InitialState, VacuumAndThermal) {
  oem::SystemParams p;
  p.n_th_0 = 1.0;
  p.n_th_1 = 2.0;
  const auto s = oem::initial_state(p);
  Eigen::Matrix<double, 6, 1> diag;
  diag << 0.5, 0.5, 1.5, 1.5, 2.5, 2.5;
  EXPECT_EQ(s.covariance.diagonal(), diag);
  EXPECT_TRUE(s.covariance.isDiagonal(0.0));
  EXPECT_EQ(s.classical, oem::ClassicalState{});
}

TEST(CarrierSteadyState, IsAFixedPointOfTheUnmodulatedSystem) {
  const oem::System full;
  oem::System carrier = full;
  carrier.drives.a_l_p1 = carrier.drives.a_l_m1 = 0.0;
  carrier.drives.a_v_p1 = carrier.drives.a_v_m1 = 0.0;
  carrier.spring.theta_0 = 0.0;

  const auto s = oem::carrier_steady_state(full);
  const auto dc = oem::classical_rhs(0.0, s.classical, carrier);
  EXPECT_LT(std::abs(dc.alpha) + std::abs(dc.beta_0) + std::abs(dc.beta_1), 1e-10);
  const Matrix6 dv = oem::covariance_rhs(oem::drift_matrix(0.0, s.classical, carrier),
                                         s.covariance, oem::noise_matrix(carrier.params));
  EXPECT_LT(dv.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(oem::is_physical(s.covariance));
  // Strong red-detuned drive: |alpha| ~ A/|kappa + i Delta|.
  EXPECT_NEAR(std::abs(s.classical.alpha), 100.0 / std::abs(oem::cplx(0.1, 0.979)), 2.0);
}

TEST(CarrierSteadyState, UndrivenSystemRestsInVacuum) {
  oem::System s;
  s.drives = {0, 0, 0, 0, 0, 0, 0, 0};
  const auto st = oem::carrier_steady_state(s);
  EXPECT_EQ(st.classical, oem::ClassicalState{});
  EXPECT_LT((st.covariance - 0.5 * Matrix6::Identity()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Integrate, ZeroHorizonRecordsOnlyInitialPoint) {
  oem::IntegrationConfig cfg;
  cfg.t_end = 0.0;
  const oem::System sys;
  const auto rec = oem::integrate(oem::initial_state(sys.params), cfg, sys);
  ASSERT_EQ(rec.size(), 1u);
  EXPECT_EQ(rec[0].t, 0.0);
  EXPECT_EQ(rec[0].mech_variance, 0.5);
}

TEST(Integrate, UnmodulatedDecoupledVacuumIsStationary) {
  auto sys = decoupled_constant_drive();
  sys.drives = {0, 0, 0, 0, 0, 0, 0, 0};
  oem::IntegrationConfig cfg;
  cfg.t_end = 5.0 * kTwoPi;
  const auto vs = covariances(oem::initial_state(sys.params), cfg, sys);
  ASSERT_GT(vs.size(), 10u);
  for (const auto& v : vs)
    EXPECT_LT((v - 0.5 * Matrix6::Identity()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Integrate, RecordsAtStrideAndFinalTime) {
  oem::IntegrationConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 1.0;
  cfg.record_stride = 30;
  const oem::System sys;
  const auto rec = oem::integrate(oem::initial_state(sys.params), cfg, sys);
  ASSERT_EQ(rec.size(), 5u);  // steps 0, 30, 60, 90, 100
  EXPECT_NEAR(rec[1].t, 0.3, 1e-15);
  EXPECT_DOUBLE_EQ(rec.back().t, 1.0);
}

TEST(Integrate, ShrinksStepToLandOnHorizon) {
  oem::IntegrationConfig cfg;
  cfg.dt = 0.3;
  cfg.t_end = 1.0;
  EXPECT_EQ(cfg.steps(), 4);
  const oem::System sys;
  const auto rec = oem::integrate(oem::initial_state(sys.params), cfg, sys);
  EXPECT_DOUBLE_EQ(rec.back().t, 1.0);
}

TEST(Integrate, RejectsInvalidConfig) {
  oem::IntegrationConfig cfg;
  cfg.dt = 0.0;
  cfg.record_stride = 0;
  const oem::System sys;
  try {
    oem::integrate(oem::initial_state(sys.params), cfg, sys);
    FAIL();
  } catch (const oem::InvalidParameter& e) {
    EXPECT_EQ(e.violations().size(), 2u);
  }
}

TEST(Integrate, DivergenceCarriesTime) {
  oem::IntegrationConfig cfg;
  cfg.t_end = kTwoPi;
  cfg.divergence_threshold = 50.0;  // |alpha| grows towards ~100
  const oem::System sys;
  try {
    oem::integrate(oem::initial_state(sys.params), cfg, sys);
    FAIL() << "expected DivergenceError";
  } catch (const oem::DivergenceError& e) {
    EXPECT_GT(e.time(), 0.0);
    EXPECT_LT(e.time(), cfg.t_end);
  }
}

TEST(Integrate, Deterministic) {
  oem::IntegrationConfig cfg;
  cfg.t_end = 3.0 * kTwoPi;
  const oem::System sys;
  const auto init = oem::carrier_steady_state(sys);
  const auto a = covariances(init, cfg, sys);
  const auto b = covariances(init, cfg, sys);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
}

TEST(Integrate, CovarianceStaysSymmetricAndPhysical) {
  oem::IntegrationConfig cfg;
  cfg.t_end = 20.0 * kTwoPi;
  cfg.record_stride = 50;
  const oem::System sys;
  double worst = 1.0;
  oem::integrate(oem::initial_state(sys.params), cfg, sys,
                 [&](const oem::MeasureSample&, const JointState& s) {
                   EXPECT_EQ(s.covariance, s.covariance.transpose());
                   worst = std::min(worst, oem::symplectic_eigenvalues<6>(s.covariance)[0]);
                 });
  EXPECT_GE(worst, 0.5 - 1e-6);
}

// Euler error ratio between dt and dt/2 approaches 2.
TEST(EulerOracle, FirstOrderConvergence) {
  const oem::System sys;
  const auto init = oem::carrier_steady_state(sys);
  oem::IntegrationConfig ref;
  ref.t_end = kTwoPi;
  ref.dt = kTwoPi / 20000.0;
  ref.record_stride = 1 << 30;
  const Matrix6 truth = covariances(init, ref, sys).back();

  std::vector<double> errors;
  for (double n : {2000.0, 4000.0, 8000.0}) {
    oem::IntegrationConfig cfg = ref;
    cfg.dt = kTwoPi / n;
    errors.push_back((covariances(init, cfg, sys, true).back() - truth).cwiseAbs().maxCoeff());
  }
  EXPECT_NEAR(errors[0] / errors[1], 2.0, 0.2);
  EXPECT_NEAR(errors[1] / errors[2], 2.0, 0.2);
}

// Quartering the step cuts the RK4 error by ~256 against a dt/64 reference.
TEST(Rk4, FourthOrderConvergence) {
  const oem::System sys;
  const auto init = oem::carrier_steady_state(sys);
  const double coarse = kTwoPi / 100.0;
  auto final_cov = [&](double dt) {
    oem::IntegrationConfig cfg;
    cfg.t_end = 2.0 * kTwoPi;
    cfg.dt = dt;
    cfg.record_stride = 1 << 30;
    return covariances(init, cfg, sys).back();
  };
  const Matrix6 ref = final_cov(coarse / 64.0);
  const double e1 = (final_cov(coarse) - ref).cwiseAbs().maxCoeff();
  const double e4 = (final_cov(coarse / 4.0) - ref).cwiseAbs().maxCoeff();
  const double ratio = e1 / e4;
  EXPECT_GT(ratio, 256.0 / 4.0) << "e1=" << e1 << " e4=" << e4;
  EXPECT_LT(ratio, 256.0 * 4.0) << "e1=" << e1 << " e4=" << e4;
}

// Richardson-extrapolated Euler (second order) against RK4: an independent
// route that is accurate enough to pin the RK4 trajectory tightly.
TEST(Rk4, AgreesWithExtrapolatedEuler) {
  const oem::System sys;
  const auto init = oem::carrier_steady_state(sys);
  oem::IntegrationConfig cfg;
  cfg.t_end = 5.0 * kTwoPi;
  cfg.record_stride = 1000;
  oem::IntegrationConfig e1 = cfg, e2 = cfg;
  e1.dt = cfg.dt / 100.0;
  e1.record_stride = cfg.record_stride * 100;
  e2.dt = cfg.dt / 200.0;
  e2.record_stride = cfg.record_stride * 200;
  const auto rk = covariances(init, cfg, sys);
  const auto a = covariances(init, e1, sys, true);
  const auto b = covariances(init, e2, sys, true);
  ASSERT_EQ(rk.size(), a.size());
  ASSERT_EQ(rk.size(), b.size());
  for (std::size_t k = 0; k < rk.size(); ++k) {
    const Matrix6 extrapolated = 2.0 * b[k] - a[k];
    const double scale = rk[k].cwiseAbs().maxCoeff();
    EXPECT_LT((extrapolated - rk[k]).cwiseAbs().maxCoeff() / scale, 1e-6) << "sample " << k;
    // Plain Euler at dt/100 is only first-order close.
    EXPECT_LT((a[k] - rk[k]).cwiseAbs().maxCoeff() / scale, 1e-3) << "sample " << k;
  }
}

}  // namespace
