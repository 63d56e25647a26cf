#pragma once

#include <array>
#include <functional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "nessresp/lindblad.hpp"
#include "nessresp/response.hpp"

/// Exact results for the two-oscillator model, valid at any bath temperature.
/// The observable throughout is A = β₁ħω₁a₁†a₁ and the perturbation ε·ħ(a₁a₂† + a₁†a₂).
namespace nessresp::oracle {

struct Occupations {
  double n1;
  double n2;
  double delta_n;  // n₂ − n₁
};

Occupations occupations(const TwoOscillatorParams& params);

/// z = √(δ² + 4λ²)
double coupling_frequency(const TwoOscillatorParams& params);

struct CovarianceSolution {
  /// Symmetrized covariance over (x₁, p₁, x₂, p₂), a = (x + ip)/√2.
  Eigen::Matrix4d sigma;
  double zeta;
  double D;
  double C;
  double mean_n1;  // ⟨a₁†a₁⟩
  double mean_n2;
  cplx a1_a2dag;   // ⟨a₁a₂†⟩
};

/// Throws DomainError for γ ≤ 0 (no steady state).
CovarianceSolution steady_covariance(const TwoOscillatorParams& params);

/// d/dt v = M·v + w for the Heisenberg second moments.
struct MomentSystem {
  Eigen::Matrix<cplx, 10, 10> M;
  Eigen::Matrix<cplx, 10, 1> w;

  static constexpr std::array<std::string_view, 10> labels = {
      "a1+a1", "a1a1", "a1+a1+", "a2+a2", "a2a2", "a2+a2+", "a1a2", "a1a2+", "a1+a2", "a1+a2+"};
};

MomentSystem moment_system(const TwoOscillatorParams& params);

/// a₁†a₁(t) = f·a₁†a₁ + g·a₁² + h·a₁†² + j·a₂†a₂ + l·a₂² + m·a₂†² + n·a₁a₂
///            + p·a₁a₂† + q·a₁†a₂ + r·a₁†a₂† + s·I
struct AdjointCoefficients {
  double f, g, h, j, l, m, n;
  cplx p, q;
  double r, s;

  /// Coefficients in MomentSystem::labels order.
  std::array<cplx, 10> row() const;
};

/// Throws DomainError when δ = λ = 0.
AdjointCoefficients adjoint_coefficients(const TwoOscillatorParams& params, double t);

/// Steady-state response of A to the coupling perturbation.
double response_closed_form(const TwoOscillatorParams& params, double tau);
/// γ = 0 limit, with the bath occupations kept.
double response_unitary(const TwoOscillatorParams& params, double tau);
/// Boltzmann-bath counterpart; exactly zero when β₁ω₁ = β₂ω₂.
double response_classical(const TwoOscillatorParams& params, double tau);
/// δ = 0 special case. Throws DomainError when δ ≠ 0.
double response_delta0(const TwoOscillatorParams& params, double tau);

/// iβ₁ħω₁⟨[a₁a₂† + a₁†a₂, a₁†a₁(τ)]⟩ assembled from adjoint_coefficients and steady_covariance.
double response_from_moments(const TwoOscillatorParams& params, double tau);

/// Population of level N−1 for a thermal (geometric) distribution with the given mean.
/// Each mode of the steady state is such a distribution since ⟨a⟩ = ⟨a²⟩ = 0.
double geometric_leakage(double mean, int levels);

struct Truncation {
  int n1;
  int n2;
};

/// Smallest Fock truncations whose top-level steady-state population is below max_leakage.
Truncation suggested_truncation(const TwoOscillatorParams& params, double max_leakage);

/// ε·∫₀^t of the unitary response, using its antiderivative (1 − cos zt)/z.
double unitary_trajectory(const TwoOscillatorParams& params, double eps, double t);

/// ⟨A⟩ in the steady state.
double stationary_observable(const TwoOscillatorParams& params);

/// Trapezoid rule on [a, b], doubling the panel count until two successive
/// estimates differ by at most tol·max(1, |I|). Throws SolverError after 2^26 panels.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-8);

/// response_closed_form sampled on a grid, labelled analytic.
ResponseCurve analytic_curve(const TwoOscillatorParams& params, std::span<const double> grid);

}  // namespace nessresp::oracle
