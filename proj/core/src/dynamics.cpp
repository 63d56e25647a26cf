#include "nessresp/dynamics.hpp"

#include "nessresp/error.hpp"

namespace nessresp {

HeisenbergTrajectory::HeisenbergTrajectory(const Superoperator& l0, const Operator& a,
                                           std::span<const double> grid, LiouvilleSector sector,
                                           const PropagationOptions& options)
    : grid_(grid.begin(), grid.end()), sector_(std::move(sector)) {
  validate_time_grid(grid);
  if (!(a.space() == l0.space()) || !(sector_.space() == l0.space())) {
    throw InvalidDimensionError("observable, generator and sector spaces differ");
  }
  heisenberg_ = sector_.restrict(SparseMatrix(l0.matrix().adjoint()));
  const Propagator prop(heisenberg_, options);
  duals_ = prop.trajectory(sector_.restrict(a.adjoint()), grid_);
}

HeisenbergTrajectory::HeisenbergTrajectory(const Superoperator& l0, const Operator& a,
                                           std::span<const double> grid,
                                           const PropagationOptions& options)
    : HeisenbergTrajectory(l0, a, grid, LiouvilleSector::full(l0.space()), options) {}

Vector HeisenbergTrajectory::sector_vector(const Operator& x) const {
  const double outside = sector_.outside_norm(x);
  if (outside > 1e-12 * std::max(x.norm(), 1e-300)) {
    throw InvalidDimensionError("operator has weight outside the trajectory sector");
  }
  return sector_.restrict(x);
}

cplx HeisenbergTrajectory::contract(std::size_t k, const Vector& x_sector) const {
  return duals_.at(k).dot(x_sector);
}

cplx HeisenbergTrajectory::contract(std::size_t k, const Operator& x) const {
  return contract(k, sector_vector(x));
}

cplx HeisenbergTrajectory::contract_derivative(std::size_t k, const Vector& x_sector) const {
  const Vector d = heisenberg_ * duals_.at(k);
  return d.dot(x_sector);
}

Operator HeisenbergTrajectory::operator_at(std::size_t k) const {
  return sector_.to_operator(duals_.at(k)).adjoint();
}

std::vector<Operator> evolve_heisenberg(const Superoperator& l0, const Operator& a,
                                        std::span<const double> grid,
                                        const PropagationOptions& options) {
  const HeisenbergTrajectory traj(l0, a, grid, options);
  std::vector<Operator> out;
  out.reserve(traj.size());
  out.push_back(a);
  for (std::size_t k = 1; k < traj.size(); ++k) out.push_back(traj.operator_at(k));
  return out;
}

std::vector<cplx> two_time_correlation(const Operator& a, const Operator& b,
                                       std::span<const double> grid, const DensityOperator& pi0,
                                       const Superoperator& l0,
                                       const PropagationOptions& options) {
  const Operator source = b * pi0.op();
  const Superoperator* gens[] = {&l0};
  const auto seeds = support(source);
  LiouvilleSector sector = LiouvilleSector::covering(l0.space(), gens, seeds);
  std::vector<cplx> out;
  if (sector.size() == 0) {
    validate_time_grid(grid);
    out.assign(grid.size(), cplx(0.0));
    return out;
  }
  const HeisenbergTrajectory traj(l0, a, grid, std::move(sector), options);
  const Vector x = traj.sector_vector(source);
  out.reserve(traj.size());
  out.push_back(trace_product(a, source));
  for (std::size_t k = 1; k < traj.size(); ++k) out.push_back(traj.contract(k, x));
  return out;
}

}  // namespace nessresp
