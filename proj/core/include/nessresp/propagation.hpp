#pragma once

#include <span>
#include <vector>

#include "nessresp/superoperator.hpp"

namespace nessresp {

struct PropagationOptions {
  /// Generators up to this size are exponentiated densely (scaling and
  /// squaring); larger ones use a shifted truncated-Taylor action.
  Eigen::Index dense_limit = 400;
  /// Relative truncation tolerance of the Taylor series.
  double tolerance = 1e-15;
};

/// Throws InvalidDimensionError unless grid is nonempty, starts at 0 and is nondecreasing.
void validate_time_grid(std::span<const double> grid);

/// Action of exp(G·t) on vectors for a fixed generator G.
class Propagator {
 public:
  explicit Propagator(SparseMatrix generator, PropagationOptions options = {});

  Eigen::Index size() const { return g_.rows(); }
  bool uses_dense_exponential() const { return dense_; }

  /// exp(G·t)·v
  Vector apply(const Vector& v, double t) const;

  /// exp(G·τ_k)·v for every grid point, stepping between consecutive points.
  std::vector<Vector> trajectory(const Vector& v0, std::span<const double> grid) const;

 private:
  Vector taylor_action(const Vector& v, double t) const;

  SparseMatrix g_;
  PropagationOptions options_;
  bool dense_ = false;
  Matrix g_dense_;
  cplx shift_{0.0};
  double shifted_norm1_ = 0.0;
};

}  // namespace nessresp
