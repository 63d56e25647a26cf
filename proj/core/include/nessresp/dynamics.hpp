#pragma once

#include <span>
#include <vector>

#include "nessresp/operator.hpp"
#include "nessresp/propagation.hpp"
#include "nessresp/sector.hpp"

namespace nessresp {

/// Observable A(τ) = e^{L₀†τ}A on a time grid, stored on a Liouville sector.
///
/// Internally holds the dual vectors a(τ) = e^{L₀†τ} vec(A†) so that
/// Tr{A(τ)·X} = a(τ)†·vec(X) for every X supported on the sector.
class HeisenbergTrajectory {
 public:
  HeisenbergTrajectory(const Superoperator& l0, const Operator& a, std::span<const double> grid,
                       LiouvilleSector sector, const PropagationOptions& options = {});

  /// Trajectory on the full Liouville space.
  HeisenbergTrajectory(const Superoperator& l0, const Operator& a, std::span<const double> grid,
                       const PropagationOptions& options = {});

  const std::vector<double>& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }
  const LiouvilleSector& sector() const { return sector_; }

  /// Sector coordinates of X; throws InvalidDimensionError when X has weight outside.
  Vector sector_vector(const Operator& x) const;

  /// Tr{A(τ_k)·X}
  cplx contract(std::size_t k, const Vector& x_sector) const;
  cplx contract(std::size_t k, const Operator& x) const;

  /// Tr{(L₀†A(τ_k))·X} = d/dτ Tr{A(τ)·X} at τ_k.
  cplx contract_derivative(std::size_t k, const Vector& x_sector) const;

  /// A(τ_k); entries outside the sector are zero.
  Operator operator_at(std::size_t k) const;

 private:
  std::vector<double> grid_;
  LiouvilleSector sector_;
  SparseMatrix heisenberg_;  // restricted L₀^H
  std::vector<Vector> duals_;
};

/// A(τ_k) = e^{L₀†τ_k}A on the full space, with A(0) = A exactly.
std::vector<Operator> evolve_heisenberg(const Superoperator& l0, const Operator& a,
                                        std::span<const double> grid,
                                        const PropagationOptions& options = {});

/// ⟨A(τ)B(0)⟩ = Tr{A·e^{L₀τ}(B·π₀)} by quantum regression.
std::vector<cplx> two_time_correlation(const Operator& a, const Operator& b,
                                       std::span<const double> grid, const DensityOperator& pi0,
                                       const Superoperator& l0,
                                       const PropagationOptions& options = {});

}  // namespace nessresp
