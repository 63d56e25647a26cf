#pragma once

#include <string_view>

#include <Eigen/SparseCore>

#include "nessresp/operator.hpp"

namespace nessresp {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

/// Operators are flattened column by column: vec(X)[i + d·j] = X(i, j),
/// so vec(A·X·B) = (Bᵀ ⊗ A)·vec(X).
enum class Vectorization { ColumnStacking };

std::string_view to_string(Vectorization v);

Vector vectorize(const Operator& op);
Operator unvectorize(const Vector& v, const HilbertSpace& space);

/// Linear map on vectorized operators, stored as a sparse d²×d² matrix.
class Superoperator {
 public:
  Superoperator(HilbertSpace space, SparseMatrix matrix);

  static Superoperator zero(const HilbertSpace& space);
  /// X ↦ A·X
  static Superoperator left(const Operator& a);
  /// X ↦ X·B
  static Superoperator right(const Operator& b);

  const HilbertSpace& space() const { return space_; }
  int dim() const { return space_.dim(); }
  Eigen::Index liouville_dim() const { return matrix_.rows(); }
  const SparseMatrix& matrix() const { return matrix_; }
  Vectorization convention() const { return Vectorization::ColumnStacking; }

  Operator apply(const Operator& x) const;
  Vector apply(const Vector& x) const { return matrix_ * x; }

  /// Hilbert–Schmidt adjoint: Tr{X†·L(Y)} = Tr{L†(X)†·Y}.
  Superoperator adjoint() const;

  double norm() const { return matrix_.norm(); }

  Superoperator& operator+=(const Superoperator& rhs);
  Superoperator& operator*=(cplx s);
  friend Superoperator operator+(Superoperator a, const Superoperator& b) { return a += b; }
  friend Superoperator operator*(cplx s, Superoperator a) { return a *= s; }

 private:
  HilbertSpace space_;
  SparseMatrix matrix_;
};

/// Sparse copy of an operator with exact zeros dropped.
SparseMatrix to_sparse(const Operator& op);

}  // namespace nessresp
