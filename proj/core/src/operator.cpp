#include "nessresp/operator.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "nessresp/error.hpp"

namespace nessresp {

HilbertSpace::HilbertSpace(std::vector<int> subsystem_dims) : dims_(std::move(subsystem_dims)) {
  if (dims_.empty()) throw InvalidDimensionError("Hilbert space needs at least one subsystem");
  for (int d : dims_) {
    if (d < 2) {
      throw InvalidDimensionError("subsystem dimension " + std::to_string(d) + " is below 2");
    }
    total_ *= d;
  }
}

Operator::Operator(HilbertSpace space, Matrix entries)
    : space_(std::move(space)), m_(std::move(entries)) {
  if (m_.rows() != space_.dim() || m_.cols() != space_.dim()) {
    std::ostringstream msg;
    msg << "operator shape " << m_.rows() << "x" << m_.cols() << " does not match space dimension "
        << space_.dim();
    throw InvalidDimensionError(msg.str());
  }
}

Operator Operator::identity(const HilbertSpace& space) {
  return Operator(space, Matrix::Identity(space.dim(), space.dim()));
}

Operator Operator::zero(const HilbertSpace& space) {
  return Operator(space, Matrix::Zero(space.dim(), space.dim()));
}

Operator Operator::adjoint() const { return Operator(space_, m_.adjoint()); }

bool Operator::is_hermitian(double tol) const {
  const double n = m_.norm();
  if (n == 0.0) return true;
  return (m_ - m_.adjoint()).norm() <= tol * n;
}

bool Operator::is_positive_semidefinite(double tol) const {
  if (!is_hermitian(tol)) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol * std::max(1.0, m_.norm());
}

static void require_same_space(const HilbertSpace& a, const HilbertSpace& b) {
  if (!(a == b)) throw InvalidDimensionError("operators live on different Hilbert spaces");
}

Operator& Operator::operator+=(const Operator& rhs) {
  require_same_space(space_, rhs.space_);
  m_ += rhs.m_;
  return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
  require_same_space(space_, rhs.space_);
  m_ -= rhs.m_;
  return *this;
}

Operator& Operator::operator*=(cplx s) {
  m_ *= s;
  return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  require_same_space(lhs.space(), rhs.space());
  return Operator(lhs.space(), lhs.matrix() * rhs.matrix());
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Operator anticommutator(const Operator& a, const Operator& b) { return a * b + b * a; }

cplx trace_product(const Operator& a, const Operator& b) {
  require_same_space(a.space(), b.space());
  // Tr{AB} = Σ_ij A_ij B_ji
  return (a.matrix().transpose().cwiseProduct(b.matrix())).sum();
}

Eigensystem hermitian_eigensystem(const Operator& op, double tol) {
  if (!op.is_hermitian(tol)) throw DomainError("operator is not Hermitian");
  const Matrix sym = 0.5 * (op.matrix() + op.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw SolverError("Hermitian eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace {

template <class F>
Operator apply_spectral(const Operator& op, F&& f, double tol) {
  const Eigensystem es = hermitian_eigensystem(op, tol);
  Vector fe(es.values.size());
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    const cplx v = f(es.values[i]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "function undefined at eigenvalue " << es.values[i];
      throw DomainError(msg.str());
    }
    fe[i] = v;
  }
  return Operator(op.space(), es.vectors * fe.asDiagonal() * es.vectors.adjoint());
}

}  // namespace

Operator operator_function(const Operator& op, const std::function<double(double)>& f,
                           double tol) {
  Operator out = apply_spectral(op, [&](double x) { return cplx(f(x), 0.0); }, tol);
  // exact Hermiticity for real f
  return Operator(op.space(), 0.5 * (out.matrix() + out.matrix().adjoint()));
}

Operator operator_function(const Operator& op, const std::function<cplx(double)>& f, double tol) {
  return apply_spectral(op, f, tol);
}

DensityOperator::DensityOperator(Operator op, double tol) : op_(std::move(op)) {
  if (!op_.is_hermitian(tol)) throw DomainError("density operator is not Hermitian");
  const cplx tr = op_.trace();
  if (std::abs(tr - 1.0) > tol * std::max(1.0, static_cast<double>(op_.dim()))) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "density operator trace " << tr.real() << " differs from 1";
    throw DomainError(msg.str());
  }
  if (min_eigenvalue() < -tol) throw DomainError("density operator has a negative eigenvalue");
}

double DensityOperator::min_eigenvalue() const {
  const Matrix sym = 0.5 * (op_.matrix() + op_.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Ladder make_ladder(int truncation) {
  if (truncation < 2) {
    throw InvalidDimensionError("ladder truncation " + std::to_string(truncation) +
                                " is below 2");
  }
  const HilbertSpace space = HilbertSpace::single(truncation);
  Matrix a = Matrix::Zero(truncation, truncation);
  for (int n = 0; n + 1 < truncation; ++n) a(n, n + 1) = std::sqrt(static_cast<double>(n + 1));
  Operator annihilation(space, a);
  Operator creation = annihilation.adjoint();
  return {std::move(annihilation), std::move(creation)};
}

Operator embed(const Operator& op, std::size_t slot, const HilbertSpace& space) {
  const auto& dims = space.subsystem_dims();
  if (slot >= dims.size()) {
    throw InvalidDimensionError("slot " + std::to_string(slot) + " out of range");
  }
  if (op.dim() != dims[slot]) {
    throw InvalidDimensionError("operator dimension " + std::to_string(op.dim()) +
                                " does not match subsystem " + std::to_string(slot) +
                                " of dimension " + std::to_string(dims[slot]));
  }
  int left = 1;
  int right = 1;
  for (std::size_t k = 0; k < slot; ++k) left *= dims[k];
  for (std::size_t k = slot + 1; k < dims.size(); ++k) right *= dims[k];

  // I_left ⊗ op ⊗ I_right, slot 0 is the most significant index.
  const int d = op.dim();
  Matrix out = Matrix::Zero(space.dim(), space.dim());
  for (int l = 0; l < left; ++l) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const cplx v = op.matrix()(i, j);
        if (v == cplx(0.0)) continue;
        for (int r = 0; r < right; ++r) {
          out((l * d + i) * right + r, (l * d + j) * right + r) = v;
        }
      }
    }
  }
  return Operator(space, std::move(out));
}

DensityOperator thermal_state(const Operator& hamiltonian, double beta) {
  if (!(beta > 0.0)) throw DomainError("inverse temperature must be positive");
  const Eigensystem es = hermitian_eigensystem(hamiltonian);
  const double e0 = es.values.minCoeff();
  Eigen::VectorXd w = (-(beta * (es.values.array() - e0))).exp();
  w /= w.sum();
  Matrix rho = es.vectors * w.cast<cplx>().asDiagonal() * es.vectors.adjoint();
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace().real();
  return DensityOperator(Operator(hamiltonian.space(), std::move(rho)));
}

}  // namespace nessresp
