#include <gtest/gtest.h>

#include <cmath>

#include "mzqfi/circuit.hpp"
#include "mzqfi/fock.hpp"
#include "mzqfi/sld.hpp"

namespace mzqfi {
namespace {

// |psi> = (cos b, e^{ix} sin b): Q_bb = 4, Q_xx = sin^2(2b), Q_bx = 0 and
// incompatibility 2 |sin 2b|.
BlockDiagonal pure_qubit(double b, double x) {
  Vector psi(2);
  psi << std::cos(b), std::polar(std::sin(b), x);
  return BlockDiagonal({psi * psi.adjoint()});
}

TEST(Sld, PureQubitClosedForms) {
  const double b = 0.6, x = 0.3;
  const auto s = sld_pair(pure_qubit, b, x);
  const auto q = qfim_numeric(s);
  EXPECT_NEAR(q.bb, 4.0, 1e-7);
  EXPECT_NEAR(q.xx, std::pow(std::sin(2 * b), 2), 1e-7);
  EXPECT_NEAR(q.bx, 0.0, 1e-7);
  EXPECT_NEAR(incompatibility(s), 2 * std::abs(std::sin(2 * b)), 1e-7);
  EXPECT_LT(sld_residual(s), 1e-6);
  EXPECT_LT(s.l_beta.hermiticity_defect(), 1e-9);
  // On the support, L = 2 d rho for a pure state.
  const Matrix& v = s.support[0];
  EXPECT_EQ(v.cols(), 1);
  EXPECT_NEAR((v.adjoint() * (s.l_x.blocks[0] - 2.0 * s.d_x.blocks[0]) * v).norm(), 0.0, 1e-9);
}

TEST(Sld, CircuitReadoutSaturates) {
  const DensityFamily f = [](double b, double x) { return readout_state(b, x); };
  for (double b : {-3.0, -0.5, 0.8, 3.9}) {
    for (double x : {-1.3, -0.2, 0.5, 1.1}) {
      const auto r = qfim_with_guard(f, b, x);
      const auto a = fim_analytic({b, 1.0, x, 1});
      EXPECT_NEAR(r.q.bb, a.bb, 1e-6);
      EXPECT_NEAR(r.q.xx, a.xx, 1e-6);
      EXPECT_NEAR(r.q.bx, a.bx, 1e-6);
      EXPECT_LT(r.incompatibility, 1e-8);
    }
  }
}

TEST(Sld, StepHalvingDrift) {
  const DensityFamily f = [](double b, double x) { return readout_state(b, x); };
  SldOptions a, b;
  b.step = 5e-5;
  EXPECT_LT(qfim_drift(qfim_numeric(sld_pair(f, 0.3, 0.4, a)), qfim_numeric(sld_pair(f, 0.3, 0.4, b))), 1e-5);
}

TEST(Sld, FrozenBetaHasNoIncompatibility) {
  const DensityFamily f = [](double, double x) { return pure_qubit(0.6, x); };
  const auto s = sld_pair(f, 0.0, 0.2);
  EXPECT_LT(s.l_beta.frobenius_norm(), 1e-12);
  EXPECT_LT(incompatibility(s), 1e-12);
}

TEST(Sld, NoonCeilingInTwoNxConvention) {
  for (int n : {1, 2, 4}) {
    const auto rho = to_density(make_noon(n));
    const DensityFamily f = [&](double b, double x) { return thermal_phase_encode(rho, b, 1.0, x, 2.0).rho; };
    EXPECT_NEAR(qfim_with_guard(f, -50.0, 0.3).q.xx, 4.0 * n * n, 1e-4) << n;
  }
}

TEST(Sld, LossReducesNoonPhaseInformation) {
  const auto rho = to_density(make_noon(3));
  auto qxx = [&](double eta) {
    const auto sigma = amplitude_damp(rho, eta);
    const DensityFamily f = [&](double b, double x) { return thermal_phase_encode(sigma, b, 1.0, x).rho; };
    return qfim_with_guard(f, 0.5, M_PI / 4).q.xx;
  };
  double prev = qxx(1.0);
  for (double eta : {0.99, 0.95, 0.9, 0.8, 0.6}) {
    const double q = qxx(eta);
    EXPECT_LT(q, prev) << eta;
    prev = q;
  }
}

TEST(Sld, QuantumBoundsPhotonCounting) {
  // With the 2Nx encoding the photon-counting statistics of a NOON probe are
  // the closed-form model, so Q - F must be positive semidefinite.
  const int n = 2;
  const auto rho = to_density(make_noon(n));
  const DensityFamily f = [&](double b, double x) { return thermal_phase_encode(rho, b, 1.0, x, 2.0).rho; };
  for (double b : {-2.0, 0.0, 1.5})
    for (double x : {-0.6, 0.2, 0.7}) {
      const auto q = qfim_with_guard(f, b, x).q;
      const auto c = fim_analytic({b, 1.0, x, n});
      const double dbb = q.bb - c.bb, dxx = q.xx - c.xx, dbx = q.bx - c.bx;
      EXPECT_GE(dbb, -1e-8);
      EXPECT_GE(dxx, -1e-8);
      EXPECT_GE(dbb * dxx - dbx * dbx, -1e-8 * std::max(1.0, dbb + dxx));
    }
}

TEST(Sld, DegenerateSupportAndOptions) {
  SldOptions bad;
  bad.step = 0.0;
  EXPECT_THROW(sld_pair(pure_qubit, 0.1, 0.1, bad), InvalidArgument);
  // Retaining less than the full trace is rejected.
  SldOptions strict;
  strict.eigen_floor_rel = 0.5;
  const DensityFamily mixed = [](double, double) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 0.9;
    m(1, 1) = 0.1;
    return BlockDiagonal({m});
  };
  EXPECT_THROW(sld_pair(mixed, 0.0, 0.0, strict), DegenerateError);
}

}  // namespace
}  // namespace mzqfi
