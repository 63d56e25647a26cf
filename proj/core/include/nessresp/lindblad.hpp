#pragma once

#include <vector>

#include "nessresp/operator.hpp"
#include "nessresp/superoperator.hpp"

namespace nessresp {

struct JumpOperator {
  Operator op;
  double rate;  // 1/time
};

/// Hamiltonian plus weighted jump operators.
class LindbladModel {
 public:
  LindbladModel(Operator h0, std::vector<JumpOperator> jumps, double hbar = 1.0);

  const HilbertSpace& space() const { return h0_.space(); }
  const Operator& hamiltonian() const { return h0_; }
  const std::vector<JumpOperator>& jumps() const { return jumps_; }
  double hbar() const { return hbar_; }

  /// Same jumps, Hamiltonian H0 + eps·H_I.
  LindbladModel perturbed(const Operator& h_i, double eps) const;

 private:
  Operator h0_;
  std::vector<JumpOperator> jumps_;
  double hbar_;
};

/// L·ρ = −(i/ħ)[H0, ρ] + Σ_k rate_k (L_k ρ L_k† − ½{L_k†L_k, ρ}).
Superoperator build_lindblad_generator(const LindbladModel& model);

/// X ↦ −(i/ħ)[H_I, X]. Throws DomainError when H_I is not Hermitian.
Superoperator build_commutator_generator(const Operator& h_i, double hbar = 1.0);

/// Parameter set of two detuned, coupled oscillators with separate baths.
struct TwoOscillatorParams {
  double omega1 = 1.0;
  double delta = 0.0;  // ω₂ = ω₁ + δ
  double gamma = 0.0;
  double lambda = 0.0;
  double beta1 = 1.0;
  double beta2 = 1.0;
  double hbar = 1.0;
  double eps = 0.0;  // step amplitude, reporting only

  double omega2() const { return omega1 + delta; }
};

/// Bose occupation 1/(e^x − 1) for x = βħω > 0.
double bose_occupation(double x);

/// The two-oscillator model plus the operators needed to probe it.
struct TwoOscillatorSystem {
  LindbladModel model;
  Operator a1;
  Operator a2;
  /// ħ(a₁a₂† + a₁†a₂), the coupling perturbation.
  Operator coupling;
  /// β₁ħω₁·a₁†a₁
  Operator energy1;
  double n1;
  double n2;
};

/// H0 = ħω₁a₁†a₁ + ħω₂a₂†a₂ + ħλ(a₁a₂† + a₁†a₂); jumps a_j at γ(n_j+1), a_j† at γn_j.
TwoOscillatorSystem build_two_oscillator_model(const TwoOscillatorParams& params, int n1_levels,
                                               int n2_levels);

}  // namespace nessresp
