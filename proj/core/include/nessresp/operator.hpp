#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace nessresp {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTolerance = 1e-10;

/// Tensor-product Hilbert space with a fixed left-to-right slot order.
class HilbertSpace {
 public:
  explicit HilbertSpace(std::vector<int> subsystem_dims);

  static HilbertSpace single(int dim) { return HilbertSpace({dim}); }

  const std::vector<int>& subsystem_dims() const { return dims_; }
  int dim() const { return total_; }
  std::size_t num_subsystems() const { return dims_.size(); }

  bool operator==(const HilbertSpace& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  int total_ = 1;
};

/// Dense complex operator on a HilbertSpace.
class Operator {
 public:
  Operator(HilbertSpace space, Matrix entries);

  static Operator identity(const HilbertSpace& space);
  static Operator zero(const HilbertSpace& space);

  const HilbertSpace& space() const { return space_; }
  const Matrix& matrix() const { return m_; }
  int dim() const { return space_.dim(); }

  Operator adjoint() const;
  cplx trace() const { return m_.trace(); }
  double norm() const { return m_.norm(); }

  /// ‖X − X†‖_F ≤ tol·‖X‖_F.
  bool is_hermitian(double tol = kHermitianTolerance) const;
  /// Hermitian and every eigenvalue ≥ −tol·max(1, ‖X‖_F).
  bool is_positive_semidefinite(double tol = kHermitianTolerance) const;

  Operator& operator+=(const Operator& rhs);
  Operator& operator-=(const Operator& rhs);
  Operator& operator*=(cplx s);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Operator lhs, cplx s) { return lhs *= s; }
  friend Operator operator*(cplx s, Operator rhs) { return rhs *= s; }
  friend Operator operator*(const Operator& lhs, const Operator& rhs);

 private:
  HilbertSpace space_;
  Matrix m_;
};

Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);

/// Tr{a·b} without forming the product.
cplx trace_product(const Operator& a, const Operator& b);

/// Eigenpairs of a Hermitian operator, eigenvalues ascending.
struct Eigensystem {
  Eigen::VectorXd values;
  Matrix vectors;
};

/// Throws DomainError when `op` is not Hermitian within tolerance.
Eigensystem hermitian_eigensystem(const Operator& op, double tol = kHermitianTolerance);

/// V·diag(f(e))·V† for op = V·diag(e)·V†.
///
/// Throws DomainError naming the eigenvalue when f returns a non-finite value.
Operator operator_function(const Operator& op, const std::function<double(double)>& f,
                           double tol = kHermitianTolerance);
Operator operator_function(const Operator& op, const std::function<cplx(double)>& f,
                           double tol = kHermitianTolerance);

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityOperator {
 public:
  explicit DensityOperator(Operator op, double tol = 1e-10);

  const Operator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  const HilbertSpace& space() const { return op_.space(); }
  int dim() const { return op_.dim(); }

  double min_eigenvalue() const;
  /// Tr{A·ρ}.
  cplx expectation(const Operator& a) const { return trace_product(a, op_); }

 private:
  Operator op_;
};

struct Ladder {
  Operator annihilation;
  Operator creation;
};

/// Fock-truncated ladder operators: a[n, n+1] = √(n+1).
Ladder make_ladder(int truncation);

/// op ⊗ identities, with `op` placed in `slot`.
Operator embed(const Operator& op, std::size_t slot, const HilbertSpace& space);

/// exp(−βH)/Tr exp(−βH), evaluated with the ground energy shifted to zero.
DensityOperator thermal_state(const Operator& hamiltonian, double beta);

}  // namespace nessresp
