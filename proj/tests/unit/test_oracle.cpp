#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "nessresp/error.hpp"
#include "nessresp/oracle.hpp"

using namespace nessresp;
using namespace nessresp::oracle;

namespace {

TwoOscillatorParams fig2() {
  TwoOscillatorParams p;
  p.omega1 = 2.4;
  p.delta = 10.1;
  p.gamma = 0.7;
  p.lambda = 5.0;
  p.beta1 = 0.092;
  p.beta2 = 0.0008;
  p.eps = 0.11;
  return p;
}

TwoOscillatorParams fig3() {
  TwoOscillatorParams p = fig2();
  p.lambda = 2.3;
  p.beta1 = 0.164;
  p.beta2 = 0.416;
  return p;
}

using Mat10 = Eigen::Matrix<cplx, 10, 10>;
using Vec10 = Eigen::Matrix<cplx, 10, 1>;

// e₁ᵀ M⁻¹(e^{Mt} − I) w
cplx inhomogeneity(const MomentSystem& ms, double t) {
  const Mat10 e = (ms.M * cplx(t)).exp();
  const Vec10 v = ms.M.partialPivLu().solve((e - Mat10::Identity()) * ms.w);
  return v(0);
}

}  // namespace

TEST(Occupations, FigureTwoValues) {
  const Occupations o = occupations(fig2());
  EXPECT_NEAR(o.n1, 4.04737, 1e-5);
  EXPECT_NEAR(o.n2, 99.5008, 1e-4);
  EXPECT_DOUBLE_EQ(o.delta_n, o.n2 - o.n1);
}

TEST(Occupations, EqualBathsAtResonance) {
  TwoOscillatorParams p = fig2();
  p.delta = 0.0;
  p.beta2 = p.beta1;
  const Occupations o = occupations(p);
  EXPECT_EQ(o.n1, o.n2);
  EXPECT_EQ(o.delta_n, 0.0);
}

TEST(Occupations, DeepQuantumLimit) {
  TwoOscillatorParams p = fig2();
  p.beta1 = 20.0 / p.omega1;
  EXPECT_NEAR(occupations(p).n1 / std::exp(-20.0), 1.0, 1e-8);
}

TEST(Occupations, RejectsNonpositiveBeta) {
  TwoOscillatorParams p = fig2();
  p.beta1 = 0.0;
  EXPECT_THROW(occupations(p), DomainError);
}

TEST(SteadyCovariance, UncoupledIsThermal) {
  TwoOscillatorParams p = fig3();
  p.lambda = 0.0;
  const CovarianceSolution c = steady_covariance(p);
  const Occupations o = occupations(p);
  EXPECT_EQ(c.zeta, 1.0);
  EXPECT_EQ(c.D, 0.0);
  EXPECT_EQ(c.C, 0.0);
  Eigen::Vector4d diag(o.n1 + 0.5, o.n1 + 0.5, o.n2 + 0.5, o.n2 + 0.5);
  EXPECT_LT((c.sigma - Eigen::Matrix4d(diag.asDiagonal())).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SteadyCovariance, EqualOccupationsDecouple) {
  TwoOscillatorParams p = fig3();
  p.delta = 0.0;
  p.beta2 = p.beta1;
  const CovarianceSolution c = steady_covariance(p);
  EXPECT_EQ(c.C, 0.0);
  EXPECT_EQ(c.sigma.block(0, 2, 2, 2).cwiseAbs().maxCoeff(), 0.0);
}

TEST(SteadyCovariance, StructureAndUncertainty) {
  for (const auto& p : {fig2(), fig3()}) {
    const CovarianceSolution c = steady_covariance(p);
    EXPECT_EQ((c.sigma - c.sigma.transpose()).norm(), 0.0);
    Eigen::Matrix4cd m = c.sigma.cast<cplx>();
    const cplx half_i(0.0, 0.5);
    for (int k = 0; k < 2; ++k) {  // Ω = ⊕ [[0, 1], [−1, 0]]
      m(2 * k, 2 * k + 1) += half_i;
      m(2 * k + 1, 2 * k) -= half_i;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
    EXPECT_DOUBLE_EQ(c.mean_n1, c.zeta * (c.D + occupations(p).n1 + 0.5) - 0.5);
  }
}

TEST(SteadyCovariance, NoSteadyStateWithoutDamping) {
  TwoOscillatorParams p = fig3();
  p.gamma = 0.0;
  EXPECT_THROW(steady_covariance(p), DomainError);
}

TEST(MomentSystem, EigenvaluesDecayAtGamma) {
  for (const auto& p : {fig2(), fig3()}) {
    const MomentSystem ms = moment_system(p);
    Eigen::ComplexEigenSolver<Mat10> es(ms.M);
    EXPECT_LE((es.eigenvalues().real().array() + p.gamma).abs().maxCoeff(), 1e-12);
  }
}

TEST(MomentSystem, UncoupledIsBlockDiagonal) {
  TwoOscillatorParams p = fig3();
  p.lambda = 0.0;
  const MomentSystem ms = moment_system(p);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      if (i != j) EXPECT_EQ(ms.M(i, j), cplx(0.0)) << i << "," << j;
}

TEST(MomentSystem, StationaryMomentsMatchCovariance) {
  for (const auto& p : {fig2(), fig3()}) {
    const MomentSystem ms = moment_system(p);
    const Vec10 v = -ms.M.partialPivLu().solve(ms.w);
    const CovarianceSolution c = steady_covariance(p);
    const double scale = std::max(1.0, c.mean_n2);
    EXPECT_LT(std::abs(v(0) - c.mean_n1), 1e-12 * scale);
    EXPECT_LT(std::abs(v(3) - c.mean_n2), 1e-12 * scale);
    EXPECT_LT(std::abs(v(7) - c.a1_a2dag), 1e-12 * scale);
    EXPECT_LT(std::abs(v(8) - std::conj(c.a1_a2dag)), 1e-12 * scale);
    for (int k : {1, 2, 4, 5, 6, 9}) EXPECT_LT(std::abs(v(k)), 1e-12 * scale);
  }
}

TEST(AdjointCoefficients, InitialValues) {
  const AdjointCoefficients ac = adjoint_coefficients(fig3(), 0.0);
  EXPECT_NEAR(ac.f, 1.0, 1e-15);
  EXPECT_EQ(ac.j, 0.0);
  EXPECT_EQ(ac.p, cplx(0.0));
  EXPECT_EQ(ac.q, cplx(0.0));
  EXPECT_NEAR(ac.s, 0.0, 1e-14);
}

TEST(AdjointCoefficients, ThermalOscillatorLimit) {
  TwoOscillatorParams p = fig3();
  p.lambda = 0.0;
  const double n1 = occupations(p).n1;
  for (double t : {0.1, 0.7, 3.0, 12.0}) {
    const AdjointCoefficients ac = adjoint_coefficients(p, t);
    EXPECT_NEAR(ac.f, std::exp(-p.gamma * t), 1e-15);
    EXPECT_EQ(ac.j, 0.0);
    EXPECT_EQ(std::abs(ac.p) + std::abs(ac.q), 0.0);
    EXPECT_NEAR(ac.s, (1.0 - std::exp(-p.gamma * t)) * n1, 1e-14);
  }
}

TEST(AdjointCoefficients, TotalExcitationDecay) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> tdist(0.0, 20.0);
  for (const auto& p : {fig2(), fig3()}) {
    for (int k = 0; k < 100; ++k) {
      const double t = tdist(rng);
      const AdjointCoefficients ac = adjoint_coefficients(p, t);
      EXPECT_NEAR(ac.f + ac.j, std::exp(-p.gamma * t), 1e-14);
    }
  }
}

TEST(AdjointCoefficients, MatchMatrixExponential) {
  for (const auto& p : {fig2(), fig3()}) {
    const MomentSystem ms = moment_system(p);
    for (double t : {0.05, 0.3, 1.0, 2.7, 6.0}) {
      const Mat10 e = (ms.M * cplx(t)).exp();
      const auto row = adjoint_coefficients(p, t).row();
      for (int j = 0; j < 10; ++j) EXPECT_LT(std::abs(e(0, j) - row[j]), 1e-10) << t << " " << j;
      const double s = adjoint_coefficients(p, t).s;
      EXPECT_LT(std::abs(inhomogeneity(ms, t) - s), 1e-10 * std::max(1.0, std::abs(s)));
    }
  }
}

TEST(AdjointCoefficients, DegenerateModelThrows) {
  TwoOscillatorParams p = fig3();
  p.delta = 0.0;
  p.lambda = 0.0;
  EXPECT_THROW(adjoint_coefficients(p, 1.0), DomainError);
}

TEST(ResponseClosedForm, VanishesWithoutCouplingOrBias) {
  TwoOscillatorParams p = fig2();
  p.lambda = 0.0;
  EXPECT_EQ(response_closed_form(p, 0.3), 0.0);
  p = fig2();
  p.delta = 0.0;
  p.beta2 = p.beta1;
  for (double t : {0.0, 0.5, 2.0}) EXPECT_EQ(response_closed_form(p, t), 0.0);
}

TEST(ResponseClosedForm, FigureTwoInitialValue) {
  const TwoOscillatorParams p = fig2();
  const Occupations o = occupations(p);
  const double z2 = p.delta * p.delta + 4.0 * p.lambda * p.lambda;
  EXPECT_NEAR(z2, 202.01, 1e-12);
  const double expected = 2.0 * p.gamma * p.lambda * o.delta_n * p.beta1 * p.omega1 / (p.gamma * p.gamma + z2);
  EXPECT_NEAR(response_closed_form(p, 0.0), expected, 1e-14);
  EXPECT_NEAR(response_closed_form(p, 0.0), 0.7286, 1e-4);
}

TEST(ResponseClosedForm, MatchesMomentAssembly) {
  for (const auto& p : {fig2(), fig3()}) {
    for (double t = 0.0; t < 12.0; t += 0.37) {
      EXPECT_NEAR(response_from_moments(p, t), response_closed_form(p, t), 1e-10) << t;
    }
  }
}

TEST(ResponseClosedForm, DecaysWithinEnvelope) {
  const TwoOscillatorParams p = fig2();
  const double bound = std::abs(response_closed_form(p, 0.0)) * 40.0;
  for (double t = 0.0; t < 60.0; t += 0.13) {
    EXPECT_LE(std::abs(response_closed_form(p, t)), bound * std::exp(-p.gamma * t));
  }
  EXPECT_LT(std::abs(response_closed_form(p, 60.0)), 1e-15);
}

TEST(ResponseClosedForm, IntegralMatchesLaplaceTransform) {
  const TwoOscillatorParams p = fig2();
  const double g = p.gamma, d = p.delta, l = p.lambda;
  const double z2 = d * d + 4.0 * l * l;
  const double k = 2.0 * l * occupations(p).delta_n * p.beta1 * p.omega1 / (z2 * (g * g + z2));
  const double exact = k * (d * d * (g * g + z2) + 4.0 * l * l * g * g + (g * g + d * d) * z2) / (g * g + z2);
  const double numeric = integrate([&](double t) { return response_closed_form(p, t); }, 0.0, 60.0);
  EXPECT_NEAR(numeric, exact, 1e-7 * std::abs(exact));
}

TEST(ResponseUnitary, ZeroCases) {
  TwoOscillatorParams p = fig2();
  EXPECT_EQ(response_unitary(p, 0.0), 0.0);
  p.delta = 0.0;
  EXPECT_EQ(response_unitary(p, 1.3), 0.0);
}

TEST(ResponseUnitary, IsWeakDampingLimit) {
  TwoOscillatorParams p = fig2();
  p.gamma = 1e-6;
  const double z = coupling_frequency(p);
  double worst = 0.0, scale = 0.0;
  for (int k = 0; k <= 2000; ++k) {
    const double t = 4.0 * std::numbers::pi / z * k / 2000.0;
    worst = std::max(worst, std::abs(response_closed_form(p, t) - response_unitary(p, t)));
    scale = std::max(scale, std::abs(response_unitary(p, t)));
  }
  EXPECT_LE(worst / scale, 1e-4);
}

TEST(ResponseClassical, EqualScaledEnergiesGiveZero) {
  TwoOscillatorParams p = fig3();
  p.beta2 = p.beta1 * p.omega1 / p.omega2();
  for (double t : {0.0, 0.4, 1.1}) EXPECT_EQ(response_classical(p, t), 0.0);
}

TEST(ResponseClassical, ProportionalToQuantum) {
  const TwoOscillatorParams p = fig3();
  const double ratio0 = response_classical(p, 0.0) / response_closed_form(p, 0.0);
  for (double t = 0.05; t < 10.0; t += 0.31) {
    const double r = response_closed_form(p, t);
    if (std::abs(r) < 1e-12) continue;
    EXPECT_NEAR(response_classical(p, t) / r, ratio0, 1e-10 * std::abs(ratio0));
  }
}

TEST(ResponseClassical, EquilibriumIsExactZero) {
  TwoOscillatorParams p = fig3();
  p.delta = 0.0;
  p.beta2 = p.beta1;
  EXPECT_EQ(response_classical(p, 0.5), 0.0);
  p.beta2 = -1.0;
  EXPECT_THROW(response_classical(p, 0.5), DomainError);
}

TEST(ResponseClassical, BoseToBoltzmannAgreement) {
  TwoOscillatorParams p = fig3();
  p.beta1 = 1e-3 / p.omega1;
  p.beta2 = 2e-3 / p.omega2();
  double worst = 0.0, scale = 0.0;
  for (double t = 0.0; t < 8.0 / p.gamma; t += 0.01) {
    worst = std::max(worst, std::abs(response_classical(p, t) - response_closed_form(p, t)));
    scale = std::max(scale, std::abs(response_closed_form(p, t)));
  }
  EXPECT_LE(worst / scale, 2e-3);
}

TEST(ResponseDelta0, MatchesClosedForm) {
  TwoOscillatorParams p = fig3();
  p.delta = 0.0;
  std::mt19937_64 rng(72);
  std::uniform_real_distribution<double> tdist(0.0, 15.0);
  for (int k = 0; k < 100; ++k) {
    const double t = tdist(rng);
    EXPECT_NEAR(response_delta0(p, t), response_closed_form(p, t), 1e-12);
  }
  const Occupations o = occupations(p);
  EXPECT_NEAR(response_delta0(p, 0.0),
              2.0 * o.delta_n * p.gamma * p.lambda * p.beta1 * p.omega1 /
                  (p.gamma * p.gamma + 4.0 * p.lambda * p.lambda),
              1e-15);
}

TEST(ResponseDelta0, ThermalLimitVanishes) {
  TwoOscillatorParams p = fig3();
  p.delta = 0.0;
  p.lambda = 1e-9;
  for (double t : {0.0, 1.0, 5.0}) EXPECT_NEAR(response_delta0(p, t), 0.0, 1e-8);
  p.lambda = 0.0;
  for (double t : {0.0, 1.0, 5.0}) EXPECT_EQ(response_delta0(p, t), 0.0);
}

TEST(ResponseDelta0, RejectsDetuning) {
  EXPECT_THROW(response_delta0(fig3(), 0.5), DomainError);
}

TEST(Integrate, TrapezoidRefinement) {
  EXPECT_NEAR(integrate([](double t) { return std::sin(t); }, 0.0, std::numbers::pi), 2.0, 1e-8);
  EXPECT_EQ(integrate([](double) { return 1.0; }, 2.0, 2.0), 0.0);
}

TEST(UnitaryTrajectory, IsPeriodic) {
  const TwoOscillatorParams p = fig2();
  const double period = 2.0 * std::numbers::pi / coupling_frequency(p);
  for (double t : {0.1, 0.37, 1.2}) {
    EXPECT_NEAR(unitary_trajectory(p, 0.11, t), unitary_trajectory(p, 0.11, t + 5 * period), 1e-12);
  }
  EXPECT_EQ(unitary_trajectory(p, 0.11, 0.0), 0.0);
  const double numeric = integrate([&](double t) { return response_unitary(p, t); }, 0.0, 0.8);
  EXPECT_NEAR(unitary_trajectory(p, 1.0, 0.8), numeric, 1e-8);
}

TEST(AnalyticCurve, SamplesClosedForm) {
  const std::vector<double> grid = {0.0, 0.5, 1.0};
  const ResponseCurve c = analytic_curve(fig3(), grid);
  EXPECT_EQ(c.form, ResponseForm::Analytic);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_EQ(c.values[k], response_closed_form(fig3(), grid[k]));
}
