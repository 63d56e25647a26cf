#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "nessresp/dynamics.hpp"
#include "nessresp/lindblad.hpp"
#include "nessresp/steady_state.hpp"

namespace nessresp {

enum class ResponseForm { R1, R2, R2alt, R3, K1, K2, Analytic };

/// Declaration order; also the column order of response tables.
inline constexpr ResponseForm kAllForms[] = {ResponseForm::R1,    ResponseForm::R2,
                                             ResponseForm::R2alt, ResponseForm::R3,
                                             ResponseForm::K1,    ResponseForm::K2,
                                             ResponseForm::Analytic};

std::string_view to_string(ResponseForm form);
/// Accepts the labels produced by to_string; throws DomainError otherwise.
ResponseForm parse_response_form(std::string_view label);

struct ResponseCurve {
  std::vector<double> tau;
  std::vector<double> values;
  ResponseForm form;
};

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> values;
};

/// Parameter schedule ε(t).
class PerturbationProtocol {
 public:
  /// ε(t) = ε·Θ(t)
  static PerturbationProtocol step(double eps);
  /// Linear interpolation between samples, constant outside them.
  static PerturbationProtocol sampled(std::vector<double> t, std::vector<double> eps);

  bool is_step() const { return times_.empty(); }
  /// Step height, or the largest |ε| of a sampled schedule.
  double amplitude() const;
  double operator()(double t) const;
  PerturbationProtocol scaled(double factor) const;

 private:
  PerturbationProtocol() = default;

  double step_ = 0.0;
  std::vector<double> times_;
  std::vector<double> values_;
};

/// Largest tolerated imaginary part, relative to max(1, max |Re|).
inline constexpr double kImaginaryTolerance = 1e-8;

/// Real parts of Tr{A(τ_k)Y}; throws DomainError with diagnostics when an
/// imaginary part exceeds kImaginaryTolerance.
std::vector<double> real_response(const std::vector<cplx>& values, std::span<const double> tau,
                                  ResponseForm form);

/// Sector spanned by the diagonal under L₀ and L₁; every response input lives on it.
LiouvilleSector response_sector(const Superoperator& l0, const Superoperator& l1);

// Each form comes in two flavours: one that reuses a precomputed trajectory
// A(τ) (its sector must cover the inputs) and one that builds its own.

/// R₁(τ) = Tr{A(τ)·B₁π₀}, B₁ = (L₁π₀)π₀⁻¹. Throws RankError for singular π₀.
ResponseCurve response_agarwal(const HeisenbergTrajectory& a_tau, const Superoperator& l1,
                               const DensityOperator& pi0);
ResponseCurve response_agarwal(const Operator& a, const Superoperator& l0, const Superoperator& l1,
                               const DensityOperator& pi0, std::span<const double> grid,
                               const PropagationOptions& options = {});

/// R₂(τ) = −Tr{A(τ)·L₀π₁}.
ResponseCurve response_entropy(const HeisenbergTrajectory& a_tau, const Superoperator& l0,
                               const Operator& pi1);
ResponseCurve response_entropy(const Operator& a, const Superoperator& l0, const Operator& pi1,
                               std::span<const double> grid,
                               const PropagationOptions& options = {});

/// R₂,alt(τ) = −d_τ ∂_ε Tr{A(τ)π_ε}, from steady states of L₀ ± ε_fd·L₁.
ResponseCurve response_susceptibility(const HeisenbergTrajectory& a_tau,
                                      const LindbladModel& model, const Operator& h_i,
                                      double eps_fd = 1e-4,
                                      const SteadyStateOptions& solver = {});
ResponseCurve response_susceptibility(const Operator& a, const LindbladModel& model,
                                      const Operator& h_i, std::span<const double> grid,
                                      double eps_fd = 1e-4,
                                      const SteadyStateOptions& solver = {},
                                      const PropagationOptions& options = {});

/// R₃(τ) = (i/ħ)Tr{π₀[H_I, A(τ)]}.
ResponseCurve response_commutator(const HeisenbergTrajectory& a_tau, const Operator& h_i,
                                  const DensityOperator& pi0, double hbar = 1.0);
ResponseCurve response_commutator(const Operator& a, const Operator& h_i, const Superoperator& l0,
                                  const DensityOperator& pi0, std::span<const double> grid,
                                  double hbar = 1.0, const PropagationOptions& options = {});

/// Closed-system Kubo forms: A(τ) evolves unitarily under H₀, expectations in Gibbs(H₀, β).
/// K1 = β·Tr{ρ·Ȧ(τ)·H̃_I} with Ȧ = (i/ħ)[H₀, A(τ)]; K2 = (i/ħ)Tr{ρ[H_I, A(τ)]}.
ResponseCurve response_kubo_k1(const Operator& a, const Operator& h0, const Operator& h_i,
                               double beta, std::span<const double> grid, double hbar = 1.0);
ResponseCurve response_kubo_k2(const Operator& a, const Operator& h0, const Operator& h_i,
                               double beta, std::span<const double> grid, double hbar = 1.0);

/// ∫₀^t ε(s)R(t−s)ds on the curve grid (trapezoid rule; R linearly interpolated
/// between grid points for non-step protocols).
TimeSeries convolve(const ResponseCurve& curve, const PerturbationProtocol& protocol);

/// Tr{Aρ(t)} − Tr{Aπ₀} with ρ(0) = π₀ propagated under L₀ + ε(t)L₁.
/// ε is held at its interval-midpoint value between consecutive grid points.
TimeSeries nonlinear_reference(const LindbladModel& model, const Operator& h_i,
                               const PerturbationProtocol& protocol, const Operator& a,
                               std::span<const double> grid,
                               const SteadyStateOptions& solver = {},
                               const PropagationOptions& options = {});
/// Same, for a known steady state π₀ of L₀.
TimeSeries nonlinear_reference(const Superoperator& l0, const Superoperator& l1,
                               const DensityOperator& pi0, const PerturbationProtocol& protocol,
                               const Operator& a, std::span<const double> grid,
                               const PropagationOptions& options = {});

}  // namespace nessresp
