#include "nessresp/propagation.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "nessresp/error.hpp"

namespace nessresp {

namespace {

// Largest ‖G·h‖₁ per Taylor substep; terms peak near θ^θ/θ! ≈ 11 so
// cancellation costs about one digit.
constexpr double kTaylorTheta = 4.0;
constexpr int kMaxTaylorTerms = 120;

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

void validate_time_grid(std::span<const double> grid) {
  if (grid.empty()) throw InvalidDimensionError("time grid is empty");
  if (grid.front() != 0.0) throw InvalidDimensionError("time grid must start at 0");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] >= grid[k - 1])) throw InvalidDimensionError("time grid must be nondecreasing");
  }
}

Propagator::Propagator(SparseMatrix generator, PropagationOptions options)
    : g_(std::move(generator)), options_(options) {
  if (g_.rows() != g_.cols()) throw InvalidDimensionError("generator must be square");
  g_.makeCompressed();
  dense_ = g_.rows() <= options_.dense_limit;
  if (dense_) {
    g_dense_ = Matrix(g_);
    return;
  }
  const Eigen::Index n = g_.rows();
  shift_ = n > 0 ? g_.diagonal().sum() / static_cast<double>(n) : cplx(0.0);
  Eigen::VectorXd colsum = Eigen::VectorXd::Zero(n);
  for (Eigen::Index col = 0; col < n; ++col) {
    bool has_diag = false;
    for (SparseMatrix::InnerIterator it(g_, col); it; ++it) {
      cplx v = it.value();
      if (it.row() == col) {
        v -= shift_;
        has_diag = true;
      }
      colsum[col] += std::abs(v);
    }
    if (!has_diag) colsum[col] += std::abs(shift_);
  }
  shifted_norm1_ = n > 0 ? colsum.maxCoeff() : 0.0;
}

Vector Propagator::taylor_action(const Vector& v, double t) const {
  if (t == 0.0) return v;
  const int steps = std::max(1, static_cast<int>(std::ceil(shifted_norm1_ * std::abs(t) / kTaylorTheta)));
  const double h = t / steps;
  const cplx growth = std::exp(shift_ * h);
  Vector x = v;
  Vector term(v.size());
  for (int s = 0; s < steps; ++s) {
    Vector sum = x;
    term = x;
    double prev = inf_norm(term);
    bool converged = false;
    for (int k = 1; k <= kMaxTaylorTerms; ++k) {
      term = (g_ * term - shift_ * term) * (h / k);
      sum += term;
      const double cur = inf_norm(term);
      if (cur + prev <= options_.tolerance * inf_norm(sum)) {
        converged = true;
        break;
      }
      prev = cur;
    }
    if (!converged) throw SolverError("Taylor propagation did not converge");
    x = growth * sum;
    if (!x.allFinite()) throw SolverError("propagation produced non-finite values");
  }
  return x;
}

Vector Propagator::apply(const Vector& v, double t) const {
  if (v.size() != size()) throw InvalidDimensionError("vector length does not match generator");
  if (t == 0.0) return v;
  if (!dense_) return taylor_action(v, t);
  const Matrix gt = g_dense_ * cplx(t);
  const Matrix e = gt.exp();
  if (!e.allFinite()) throw SolverError("matrix exponential produced non-finite values");
  return e * v;
}

std::vector<Vector> Propagator::trajectory(const Vector& v0, std::span<const double> grid) const {
  validate_time_grid(grid);
  if (v0.size() != size()) throw InvalidDimensionError("vector length does not match generator");
  std::vector<Vector> out;
  out.reserve(grid.size());
  out.push_back(v0);

  // exp(G·h) per distinct spacing; uniform grids differ only in the last ulps.
  std::vector<std::pair<double, Matrix>> cache;
  auto step_matrix = [&](double h) -> const Matrix& {
    for (const auto& [hc, m] : cache) {
      if (std::abs(hc - h) <= 1e-13 * std::max(std::abs(h), std::abs(hc))) return m;
    }
    Matrix e = (g_dense_ * cplx(h)).exp();
    if (!e.allFinite()) throw SolverError("matrix exponential produced non-finite values");
    cache.emplace_back(h, std::move(e));
    return cache.back().second;
  };

  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double h = grid[k] - grid[k - 1];
    if (h == 0.0) {
      out.push_back(out.back());
    } else if (dense_) {
      out.push_back(step_matrix(h) * out.back());
    } else {
      out.push_back(taylor_action(out.back(), h));
    }
  }
  return out;
}

}  // namespace nessresp
