#pragma once

#include <span>
#include <vector>

#include "nessresp/superoperator.hpp"

namespace nessresp {

/// Subset of Liouville-space indices that is invariant under a set of
/// generators (and their adjoints).
///
/// The subset is the union of connected components of the generators'
/// sparsity graph that contain at least one seed index. Number-conserving
/// oscillator models split into coherence sectors this way, and the
/// steady state lives entirely in the sector holding the diagonal.
class LiouvilleSector {
 public:
  static LiouvilleSector full(const HilbertSpace& space);

  static LiouvilleSector covering(const HilbertSpace& space,
                                  std::span<const Superoperator* const> generators,
                                  std::span<const Eigen::Index> seeds);

  /// Seeds are the diagonal entries i + d·i.
  static LiouvilleSector containing_diagonal(const HilbertSpace& space,
                                             std::span<const Superoperator* const> generators);

  const HilbertSpace& space() const { return space_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(indices_.size()); }
  bool is_full() const;
  const std::vector<Eigen::Index>& indices() const { return indices_; }

  SparseMatrix restrict(const SparseMatrix& full) const;
  Vector restrict(const Vector& full) const;
  Vector restrict(const Operator& op) const;
  /// Operator with the sector entries of `v` and zeros elsewhere.
  Operator to_operator(const Vector& v) const;
  /// Frobenius norm of the entries of `op` outside the sector.
  double outside_norm(const Operator& op) const;
  /// Sector coordinates of vec(I); Tr{X} = trace_row·x.
  Eigen::VectorXd trace_row() const;

 private:
  LiouvilleSector(HilbertSpace space, std::vector<Eigen::Index> indices);

  HilbertSpace space_;
  std::vector<Eigen::Index> indices_;
  std::vector<Eigen::Index> position_;  // full index -> sector index, -1 if absent
};

/// Liouville indices holding a nonzero entry of `op`.
std::vector<Eigen::Index> support(const Operator& op);

}  // namespace nessresp
