#include "nessresp/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "nessresp/error.hpp"
#include "nessresp/sector.hpp"

namespace nessresp {

namespace {

using SparseLU = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

// Row of the first diagonal entry is replaced by the trace functional.
SparseMatrix bordered(const SparseMatrix& g, const Eigen::VectorXd& trace_row, Eigen::Index row) {
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(g.nonZeros() + trace_row.size()));
  for (Eigen::Index col = 0; col < g.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(g, col); it; ++it) {
      if (it.row() != row) trips.emplace_back(it.row(), col, it.value());
    }
  }
  for (Eigen::Index k = 0; k < trace_row.size(); ++k) {
    if (trace_row[k] != 0.0) trips.emplace_back(row, k, cplx(trace_row[k]));
  }
  SparseMatrix b(g.rows(), g.cols());
  b.setFromTriplets(trips.begin(), trips.end());
  b.makeCompressed();
  return b;
}

Eigen::Index first_diagonal(const Eigen::VectorXd& trace_row) {
  for (Eigen::Index k = 0; k < trace_row.size(); ++k) {
    if (trace_row[k] != 0.0) return k;
  }
  throw SolverError("sector holds no diagonal entry");
}

Operator hermitized(const Operator& x) {
  return Operator(x.space(), 0.5 * (x.matrix() + x.matrix().adjoint()));
}

struct GapResult {
  double gap;
  int stationary_modes;
};

GapResult dense_gap(const SparseMatrix& g, double threshold) {
  Eigen::ComplexEigenSolver<Matrix> es(Matrix(g), false);
  if (es.info() != Eigen::Success) throw SolverError("generator eigensolver failed");
  std::vector<double> re;
  re.reserve(static_cast<std::size_t>(es.eigenvalues().size()));
  for (const cplx& l : es.eigenvalues()) re.push_back(std::abs(l.real()));
  std::sort(re.begin(), re.end());
  const int stationary =
      static_cast<int>(std::count_if(re.begin(), re.end(), [&](double x) { return x <= threshold; }));
  const double gap = re.size() > 1 ? re[1] : std::numeric_limits<double>::infinity();
  return {gap, stationary};
}

// Shift-invert Arnoldi on L₀ with the stationary mode deflated (Brauer shift
// of 0 to −c, applied through Sherman–Morrison on the LU of L₀ − σ).
double arnoldi_gap(const SparseLU& lu, double sigma, const Vector& p0, const Eigen::VectorXd& tr,
                   double c) {
  const Eigen::Index n = p0.size();
  const Vector trc = tr.cast<cplx>();
  const Vector binv_p = lu.solve(p0);
  const cplx denom = 1.0 - c * trc.dot(binv_p);
  auto apply = [&](const Vector& x) -> Vector {
    Vector y = lu.solve(x);
    return y + binv_p * (c * trc.dot(y) / denom);
  };
  const int m = static_cast<int>(std::min<Eigen::Index>(40, n - 1));
  if (m < 1) return std::numeric_limits<double>::infinity();
  Matrix v = Matrix::Zero(n, m + 1);
  Matrix h = Matrix::Zero(m + 1, m);
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  Vector start(n);
  for (Eigen::Index k = 0; k < n; ++k) start[k] = cplx(nd(rng), nd(rng));
  v.col(0) = start.normalized();
  int used = m;
  for (int j = 0; j < m; ++j) {
    Vector w = apply(v.col(j));
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        const cplx hij = v.col(i).dot(w);
        h(i, j) += hij;
        w -= hij * v.col(i);
      }
    }
    h(j + 1, j) = w.norm();
    if (std::abs(h(j + 1, j)) < 1e-14) {
      used = j + 1;
      break;
    }
    v.col(j + 1) = w / h(j + 1, j);
  }
  Eigen::ComplexEigenSolver<Matrix> es(h.topLeftCorner(used, used), false);
  std::vector<cplx> theta(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(theta.begin(), theta.end(),
            [](const cplx& a, const cplx& b) { return std::abs(a) > std::abs(b); });
  double gap = std::numeric_limits<double>::infinity();
  const std::size_t keep = std::min<std::size_t>(theta.size(), 10);
  for (std::size_t k = 0; k < keep; ++k) {
    if (theta[k] == cplx(0.0)) continue;
    const cplx lambda = sigma + 1.0 / theta[k];
    gap = std::min(gap, std::abs(lambda.real()));
  }
  return gap;
}

}  // namespace

SteadyStateSolution steady_state(const Superoperator& l0, const SteadyStateOptions& options) {
  const Superoperator* gens[] = {&l0};
  const LiouvilleSector sector = LiouvilleSector::containing_diagonal(l0.space(), gens);
  const SparseMatrix g = sector.restrict(l0.matrix());
  const Eigen::Index n = g.rows();
  const Eigen::VectorXd tr = sector.trace_row();
  const double gnorm = l0.norm();
  const double scale = std::max(gnorm / std::sqrt(static_cast<double>(n)), 1e-300);

  if (gnorm == 0.0) {
    if (l0.dim() > 1) throw AmbiguityError("zero generator: every state is stationary");
  }

  auto to_density = [&](const Vector& x) -> std::pair<Operator, double> {
    const cplx t = tr.cast<cplx>().dot(x);
    if (std::abs(t) == 0.0 || !x.allFinite()) return {Operator::zero(l0.space()), INFINITY};
    Operator rho = hermitized(sector.to_operator(x / t));
    rho *= cplx(1.0 / rho.trace().real());
    const double res = (g * sector.restrict(rho)).norm();
    return {std::move(rho), res};
  };

  const double sigma = 1e-9 * scale;
  SparseMatrix shifted = g;
  {
    SparseMatrix id(n, n);
    id.setIdentity();
    shifted -= cplx(sigma) * id;
  }
  SparseLU lu;
  lu.analyzePattern(shifted);
  lu.factorize(shifted);
  const bool lu_ok = lu.info() == Eigen::Success;

  std::pair<Operator, double> best{Operator::zero(l0.space()), INFINITY};
  if (lu_ok) {
    Vector x = tr.cast<cplx>() / static_cast<double>(l0.dim());
    for (int it = 0; it < options.inverse_iterations; ++it) {
      x = lu.solve(x);
      const double nx = x.norm();
      if (!(nx > 0.0) || !x.allFinite()) break;
      x /= nx;
    }
    best = to_density(x);
  }
  const double tol = options.residual_tolerance * std::max(gnorm, 1e-300);
  if (!(best.second <= tol)) {
    const Eigen::Index row = first_diagonal(tr);
    SparseMatrix b = bordered(g, tr, row);
    SparseLU blu;
    blu.analyzePattern(b);
    blu.factorize(b);
    if (blu.info() != Eigen::Success) {
      throw AmbiguityError("bordered steady-state system is singular: the generator has a "
                           "degenerate null space");
    }
    Vector rhs = Vector::Zero(n);
    rhs[row] = 1.0;
    auto alt = to_density(blu.solve(rhs));
    if (alt.second < best.second) best = std::move(alt);
  }

  const double threshold = options.degeneracy_tolerance * scale;
  double gap = std::numeric_limits<double>::quiet_NaN();
  bool estimate = false;
  if (n <= options.dense_spectrum_limit) {
    const GapResult gr = dense_gap(g, threshold);
    if (gr.stationary_modes > 1) {
      std::ostringstream msg;
      msg << "generator has " << gr.stationary_modes
          << " non-decaying modes; the steady state is not unique";
      throw AmbiguityError(msg.str());
    }
    gap = gr.gap;
  } else if (lu_ok && std::isfinite(best.second)) {
    gap = arnoldi_gap(lu, sigma, sector.restrict(best.first), tr, gnorm);
    estimate = true;
    if (gap <= threshold) {
      throw AmbiguityError("estimated spectral gap vanishes; the steady state is not unique");
    }
  }

  if (!(best.second <= tol)) {
    std::ostringstream msg;
    msg << "steady-state residual " << best.second << " exceeds tolerance " << tol;
    throw SolverError(msg.str());
  }
  return SteadyStateSolution{DensityOperator(std::move(best.first), 1e-8), best.second, gap,
                             estimate};
}

Operator first_order_correction(const Superoperator& l0, const Superoperator& l1,
                                const DensityOperator& pi0, const SteadyStateOptions& options) {
  const Operator source = l1.apply(pi0.op());
  if (source.norm() == 0.0) return Operator::zero(l0.space());

  const Superoperator* gens[] = {&l0, &l1};
  const LiouvilleSector sector = LiouvilleSector::containing_diagonal(l0.space(), gens);
  const SparseMatrix g = sector.restrict(l0.matrix());
  const Eigen::VectorXd tr = sector.trace_row();
  const Eigen::Index row = first_diagonal(tr);
  const SparseMatrix b = bordered(g, tr, row);

  SparseLU lu;
  lu.analyzePattern(b);
  lu.factorize(b);
  auto singular = [&](const std::string& what) {
    std::ostringstream msg;
    msg << what << "; L0 restricted to trace-zero operators is singular";
    if (g.rows() <= options.dense_spectrum_limit) {
      msg << " (spectral gap " << dense_gap(g, 0.0).gap << ")";
    }
    return SolverError(msg.str());
  };
  if (lu.info() != Eigen::Success) throw singular("factorization failed");

  Vector rhs = -sector.restrict(source);
  rhs[row] = 0.0;
  const Vector x = lu.solve(rhs);
  if (!x.allFinite()) throw singular("solution is not finite");

  Operator pi1 = hermitized(sector.to_operator(x));
  pi1 -= pi1.trace() * pi0.op();  // exact trace zero; π₀ is in the kernel of L₀
  const double res = (l0.apply(pi1) + source).norm();
  if (res > options.correction_tolerance * source.norm()) {
    std::ostringstream msg;
    msg << "first-order correction residual " << res / source.norm() << " (relative)";
    throw singular(msg.str());
  }
  return pi1;
}

double truncation_leakage(const DensityOperator& rho, std::size_t slot) {
  const auto& dims = rho.space().subsystem_dims();
  if (slot >= dims.size()) throw InvalidDimensionError("slot out of range");
  int right = 1;
  for (std::size_t k = slot + 1; k < dims.size(); ++k) right *= dims[k];
  const int d = dims[slot];
  double pop = 0.0;
  for (int i = 0; i < rho.dim(); ++i) {
    if ((i / right) % d == d - 1) pop += rho.matrix()(i, i).real();
  }
  return pop;
}

}  // namespace nessresp
