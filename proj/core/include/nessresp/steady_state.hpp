#pragma once

#include <cstddef>

#include "nessresp/operator.hpp"
#include "nessresp/superoperator.hpp"

namespace nessresp {

struct SteadyStateOptions {
  /// Accept π₀ when ‖L₀π₀‖_F ≤ residual_tolerance·‖L₀‖_F.
  double residual_tolerance = 1e-10;
  /// Eigenvalues with |Re λ| ≤ degeneracy_tolerance·scale count as stationary,
  /// scale = ‖L₀‖_F/√n on the diagonal sector.
  double degeneracy_tolerance = 1e-9;
  /// Sector sizes up to this get the full spectrum; larger ones an Arnoldi estimate.
  Eigen::Index dense_spectrum_limit = 300;
  int inverse_iterations = 3;
  /// Relative residual accepted for the first-order correction.
  double correction_tolerance = 1e-9;
};

struct SteadyStateSolution {
  DensityOperator pi0;
  double residual_norm;
  /// Smallest |Re λ| over the nonzero eigenvalues of L₀ on the diagonal sector.
  double spectral_gap;
  bool gap_is_estimate;
};

/// Unique stationary state of a Lindblad generator.
///
/// Shifted inverse iteration on the sector holding the diagonal, with a
/// bordered direct solve (one balance row replaced by the trace row) as fallback.
/// Throws AmbiguityError when a second non-decaying mode exists and
/// SolverError when neither route reaches the residual tolerance.
SteadyStateSolution steady_state(const Superoperator& l0, const SteadyStateOptions& options = {});

/// Traceless Hermitian π₁ with L₀π₁ = −L₁π₀.
Operator first_order_correction(const Superoperator& l0, const Superoperator& l1,
                                const DensityOperator& pi0,
                                const SteadyStateOptions& options = {});

/// Population of the highest level of subsystem `slot`.
double truncation_leakage(const DensityOperator& rho, std::size_t slot);

}  // namespace nessresp
