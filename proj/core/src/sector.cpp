#include "nessresp/sector.hpp"

#include <numeric>

#include "nessresp/error.hpp"

namespace nessresp {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(Eigen::Index n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), Eigen::Index{0});
  }

  Eigen::Index find(Eigen::Index x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(Eigen::Index a, Eigen::Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<Eigen::Index> parent_;
};

}  // namespace

LiouvilleSector::LiouvilleSector(HilbertSpace space, std::vector<Eigen::Index> indices)
    : space_(std::move(space)), indices_(std::move(indices)) {
  const Eigen::Index n = static_cast<Eigen::Index>(space_.dim()) * space_.dim();
  position_.assign(static_cast<std::size_t>(n), -1);
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    position_[indices_[k]] = static_cast<Eigen::Index>(k);
  }
}

LiouvilleSector LiouvilleSector::full(const HilbertSpace& space) {
  const Eigen::Index n = static_cast<Eigen::Index>(space.dim()) * space.dim();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  return LiouvilleSector(space, std::move(idx));
}

LiouvilleSector LiouvilleSector::covering(const HilbertSpace& space,
                                          std::span<const Superoperator* const> generators,
                                          std::span<const Eigen::Index> seeds) {
  const Eigen::Index n = static_cast<Eigen::Index>(space.dim()) * space.dim();
  DisjointSets sets(n);
  for (const Superoperator* g : generators) {
    if (!(g->space() == space)) throw InvalidDimensionError("generator space mismatch");
    const SparseMatrix& m = g->matrix();
    for (Eigen::Index col = 0; col < m.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
        if (it.value() != cplx(0.0)) sets.unite(it.row(), col);
      }
    }
  }
  std::vector<char> marked(static_cast<std::size_t>(n), 0);
  for (Eigen::Index s : seeds) {
    if (s < 0 || s >= n) throw InvalidDimensionError("sector seed out of range");
    marked[sets.find(s)] = 1;
  }
  std::vector<Eigen::Index> idx;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (marked[sets.find(k)]) idx.push_back(k);
  }
  return LiouvilleSector(space, std::move(idx));
}

LiouvilleSector LiouvilleSector::containing_diagonal(
    const HilbertSpace& space, std::span<const Superoperator* const> generators) {
  const Eigen::Index d = space.dim();
  std::vector<Eigen::Index> seeds(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) seeds[i] = i + d * i;
  return covering(space, generators, seeds);
}

bool LiouvilleSector::is_full() const {
  return size() == static_cast<Eigen::Index>(space_.dim()) * space_.dim();
}

SparseMatrix LiouvilleSector::restrict(const SparseMatrix& full) const {
  if (is_full()) return full;
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(full.nonZeros()));
  for (Eigen::Index col = 0; col < full.outerSize(); ++col) {
    const Eigen::Index c = position_[col];
    if (c < 0) continue;
    for (SparseMatrix::InnerIterator it(full, col); it; ++it) {
      const Eigen::Index r = position_[it.row()];
      if (r >= 0) trips.emplace_back(r, c, it.value());
    }
  }
  SparseMatrix out(size(), size());
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

Vector LiouvilleSector::restrict(const Vector& full) const {
  Vector out(size());
  for (std::size_t k = 0; k < indices_.size(); ++k) out[k] = full[indices_[k]];
  return out;
}

Vector LiouvilleSector::restrict(const Operator& op) const {
  if (!(op.space() == space_)) throw InvalidDimensionError("operator space mismatch");
  const cplx* data = op.matrix().data();
  Vector out(size());
  for (std::size_t k = 0; k < indices_.size(); ++k) out[k] = data[indices_[k]];
  return out;
}

Operator LiouvilleSector::to_operator(const Vector& v) const {
  if (v.size() != size()) throw InvalidDimensionError("sector vector length mismatch");
  Matrix m = Matrix::Zero(space_.dim(), space_.dim());
  cplx* data = m.data();
  for (std::size_t k = 0; k < indices_.size(); ++k) data[indices_[k]] = v[k];
  return Operator(space_, std::move(m));
}

double LiouvilleSector::outside_norm(const Operator& op) const {
  const cplx* data = op.matrix().data();
  double acc = 0.0;
  for (std::size_t k = 0; k < position_.size(); ++k) {
    if (position_[k] < 0) acc += std::norm(data[k]);
  }
  return std::sqrt(acc);
}

Eigen::VectorXd LiouvilleSector::trace_row() const {
  const Eigen::Index d = space_.dim();
  Eigen::VectorXd row = Eigen::VectorXd::Zero(size());
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::Index p = position_[i + d * i];
    if (p >= 0) row[p] = 1.0;
  }
  return row;
}

std::vector<Eigen::Index> support(const Operator& op) {
  std::vector<Eigen::Index> out;
  const cplx* data = op.matrix().data();
  for (Eigen::Index k = 0; k < op.matrix().size(); ++k) {
    if (data[k] != cplx(0.0)) out.push_back(k);
  }
  return out;
}

}  // namespace nessresp
