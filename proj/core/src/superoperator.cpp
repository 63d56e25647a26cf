#include "nessresp/superoperator.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include "nessresp/error.hpp"

namespace nessresp {

std::string_view to_string(Vectorization v) {
  switch (v) {
    case Vectorization::ColumnStacking:
      return "column-stacking";
  }
  return "unknown";
}

Vector vectorize(const Operator& op) {
  return Eigen::Map<const Vector>(op.matrix().data(), op.matrix().size());
}

Operator unvectorize(const Vector& v, const HilbertSpace& space) {
  const int d = space.dim();
  if (v.size() != static_cast<Eigen::Index>(d) * d) {
    throw InvalidDimensionError("vector length does not match Liouville dimension");
  }
  return Operator(space, Eigen::Map<const Matrix>(v.data(), d, d));
}

SparseMatrix to_sparse(const Operator& op) {
  SparseMatrix s = op.matrix().sparseView(cplx(0.0), 0.0);
  s.makeCompressed();
  return s;
}

static SparseMatrix sparse_identity(int d) {
  SparseMatrix id(d, d);
  id.setIdentity();
  return id;
}

Superoperator::Superoperator(HilbertSpace space, SparseMatrix matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  const Eigen::Index n = static_cast<Eigen::Index>(space_.dim()) * space_.dim();
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw InvalidDimensionError("superoperator shape does not match Liouville dimension");
  }
  matrix_.makeCompressed();
}

Superoperator Superoperator::zero(const HilbertSpace& space) {
  const Eigen::Index n = static_cast<Eigen::Index>(space.dim()) * space.dim();
  return Superoperator(space, SparseMatrix(n, n));
}

Superoperator Superoperator::left(const Operator& a) {
  SparseMatrix m = Eigen::kroneckerProduct(sparse_identity(a.dim()), to_sparse(a));
  return Superoperator(a.space(), std::move(m));
}

Superoperator Superoperator::right(const Operator& b) {
  SparseMatrix bt = to_sparse(b).transpose();
  SparseMatrix m = Eigen::kroneckerProduct(bt, sparse_identity(b.dim()));
  return Superoperator(b.space(), std::move(m));
}

Operator Superoperator::apply(const Operator& x) const {
  if (!(x.space() == space_)) throw InvalidDimensionError("operator space mismatch");
  return unvectorize(matrix_ * vectorize(x), space_);
}

Superoperator Superoperator::adjoint() const {
  SparseMatrix adj = matrix_.adjoint();
  return Superoperator(space_, std::move(adj));
}

Superoperator& Superoperator::operator+=(const Superoperator& rhs) {
  if (!(rhs.space_ == space_)) throw InvalidDimensionError("superoperator space mismatch");
  matrix_ += rhs.matrix_;
  matrix_.makeCompressed();
  return *this;
}

Superoperator& Superoperator::operator*=(cplx s) {
  matrix_ *= s;
  return *this;
}

}  // namespace nessresp
