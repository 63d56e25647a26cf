#include "nessresp/response.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <sstream>

#include "nessresp/error.hpp"
#include "nessresp/kubo.hpp"

namespace nessresp {

namespace {

constexpr std::array<std::string_view, 7> kFormLabels = {"R1", "R2", "R2alt", "R3",
                                                         "K1", "K2", "analytic"};

// Linear interpolation on a nondecreasing grid, constant beyond the ends.
double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at) {
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  const auto hi = std::upper_bound(x.begin(), x.end(), at);
  const std::size_t k = static_cast<std::size_t>(hi - x.begin());
  const double x0 = x[k - 1];
  const double x1 = x[k];
  if (x1 == x0) return y[k];
  const double w = (at - x0) / (x1 - x0);
  return (1.0 - w) * y[k - 1] + w * y[k];
}

ResponseCurve contract_curve(const HeisenbergTrajectory& a_tau, const Operator& y,
                             ResponseForm form) {
  const Vector x = a_tau.sector_vector(y);
  std::vector<cplx> raw(a_tau.size());
  for (std::size_t k = 0; k < a_tau.size(); ++k) raw[k] = a_tau.contract(k, x);
  return {a_tau.grid(), real_response(raw, a_tau.grid(), form), form};
}

HeisenbergTrajectory own_trajectory(const Operator& a, const Superoperator& l0, const Operator& y,
                                    std::span<const double> grid,
                                    const PropagationOptions& options) {
  const Superoperator* gens[] = {&l0};
  const auto seeds = support(y);
  return HeisenbergTrajectory(l0, a, grid, LiouvilleSector::covering(l0.space(), gens, seeds),
                              options);
}

Operator agarwal_source(const Superoperator& l1, const DensityOperator& pi0) {
  const Eigensystem es = hermitian_eigensystem(pi0.op(), 1e-8);
  const double pmin = es.values.minCoeff();
  if (!(pmin > 1e-12)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Agarwal form needs a positive definite steady state, min eigenvalue " << pmin
        << "; use the commutator form instead";
    throw RankError(msg.str());
  }
  const Matrix inv =
      es.vectors * es.values.cwiseInverse().cast<cplx>().asDiagonal() * es.vectors.adjoint();
  const Operator l1pi0 = l1.apply(pi0.op());
  const Operator b1(pi0.space(), l1pi0.matrix() * inv);
  return b1 * pi0.op();
}

Operator commutator_source(const Operator& h_i, const DensityOperator& pi0, double hbar) {
  if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
  return commutator(pi0.op(), h_i) * cplx(0.0, 1.0 / hbar);
}

Operator difference_quotient(const LindbladModel& model, const Operator& h_i, double eps_fd,
                             const SteadyStateOptions& solver) {
  if (!(eps_fd > 0.0)) throw DomainError("finite-difference step must be positive");
  auto solve = [&](double e) {
    try {
      return steady_state(build_lindblad_generator(model.perturbed(h_i, e)), solver).pi0;
    } catch (const SolverError& err) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "perturbed steady state at eps = " << e << ": " << err.what();
      throw SolverError(msg.str());
    }
  };
  const DensityOperator plus = solve(eps_fd);
  const DensityOperator minus = solve(-eps_fd);
  return (plus.op() - minus.op()) * cplx(1.0 / (2.0 * eps_fd));
}

// Eigenbasis data for closed thermal dynamics.
struct ClosedSystem {
  Eigensystem h0;
  Eigen::VectorXd p;
  Matrix a;
  Matrix h_i;
};

ClosedSystem closed_system(const Operator& a, const Operator& h0, const Operator& h_i,
                           double beta) {
  if (!(beta > 0.0)) throw DomainError("inverse temperature must be positive");
  if (!(a.space() == h0.space()) || !(h_i.space() == h0.space())) {
    throw InvalidDimensionError("operator space mismatch");
  }
  ClosedSystem cs{hermitian_eigensystem(h0), {}, {}, {}};
  const Eigen::VectorXd& e = cs.h0.values;
  cs.p = (-(beta * (e.array() - e.minCoeff()))).exp();
  cs.p /= cs.p.sum();
  cs.a = cs.h0.vectors.adjoint() * a.matrix() * cs.h0.vectors;
  cs.h_i = cs.h0.vectors.adjoint() * h_i.matrix() * cs.h0.vectors;
  return cs;
}

// A(τ) in the H₀ eigenbasis: A_ij·e^{i(E_i−E_j)τ/ħ}.
Matrix heisenberg_unitary(const ClosedSystem& cs, double tau, double hbar) {
  const Eigen::VectorXd& e = cs.h0.values;
  Matrix out(cs.a.rows(), cs.a.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      out(i, j) = cs.a(i, j) * std::exp(cplx(0.0, (e[i] - e[j]) * tau / hbar));
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(ResponseForm form) {
  return kFormLabels.at(static_cast<std::size_t>(form));
}

ResponseForm parse_response_form(std::string_view label) {
  for (ResponseForm f : kAllForms) {
    if (to_string(f) == label) return f;
  }
  throw DomainError("unknown response form '" + std::string(label) + "'");
}

PerturbationProtocol PerturbationProtocol::step(double eps) {
  if (!std::isfinite(eps)) throw DomainError("step amplitude must be finite");
  PerturbationProtocol p;
  p.step_ = eps;
  return p;
}

PerturbationProtocol PerturbationProtocol::sampled(std::vector<double> t, std::vector<double> eps) {
  if (t.empty() || t.size() != eps.size()) {
    throw InvalidDimensionError("sampled protocol needs matching, nonempty time and value lists");
  }
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (!(t[k] > t[k - 1])) throw InvalidDimensionError("protocol times must increase");
  }
  PerturbationProtocol p;
  p.times_ = std::move(t);
  p.values_ = std::move(eps);
  return p;
}

double PerturbationProtocol::amplitude() const {
  if (is_step()) return step_;
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double PerturbationProtocol::operator()(double t) const {
  if (is_step()) return t > 0.0 ? step_ : 0.0;  // Θ(0) = 0, irrelevant under integrals
  return interpolate(times_, values_, t);
}

PerturbationProtocol PerturbationProtocol::scaled(double factor) const {
  PerturbationProtocol p = *this;
  p.step_ *= factor;
  for (double& v : p.values_) v *= factor;
  return p;
}

std::vector<double> real_response(const std::vector<cplx>& values, std::span<const double> tau,
                                  ResponseForm form) {
  double scale = 1.0;
  for (const cplx& v : values) scale = std::max(scale, std::abs(v.real()));
  std::vector<double> out(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (std::abs(values[k].imag()) > kImaginaryTolerance * scale) {
      std::ostringstream msg;
      msg.precision(17);
      msg << to_string(form) << " response has imaginary part " << values[k].imag() << " at tau["
          << k << "] = " << (k < tau.size() ? tau[k] : std::nan("")) << " (real part "
          << values[k].real() << ", scale " << scale
          << "); observable or perturbation is probably not Hermitian";
      throw DomainError(msg.str());
    }
    out[k] = values[k].real();
  }
  return out;
}

LiouvilleSector response_sector(const Superoperator& l0, const Superoperator& l1) {
  const Superoperator* gens[] = {&l0, &l1};
  return LiouvilleSector::containing_diagonal(l0.space(), gens);
}

ResponseCurve response_agarwal(const HeisenbergTrajectory& a_tau, const Superoperator& l1,
                               const DensityOperator& pi0) {
  return contract_curve(a_tau, agarwal_source(l1, pi0), ResponseForm::R1);
}

ResponseCurve response_agarwal(const Operator& a, const Superoperator& l0, const Superoperator& l1,
                               const DensityOperator& pi0, std::span<const double> grid,
                               const PropagationOptions& options) {
  const Operator y = agarwal_source(l1, pi0);
  return contract_curve(own_trajectory(a, l0, y, grid, options), y, ResponseForm::R1);
}

ResponseCurve response_entropy(const HeisenbergTrajectory& a_tau, const Superoperator& l0,
                               const Operator& pi1) {
  return contract_curve(a_tau, l0.apply(pi1) * cplx(-1.0), ResponseForm::R2);
}

ResponseCurve response_entropy(const Operator& a, const Superoperator& l0, const Operator& pi1,
                               std::span<const double> grid, const PropagationOptions& options) {
  const Operator y = l0.apply(pi1) * cplx(-1.0);
  return contract_curve(own_trajectory(a, l0, y, grid, options), y, ResponseForm::R2);
}

ResponseCurve response_susceptibility(const HeisenbergTrajectory& a_tau,
                                      const LindbladModel& model, const Operator& h_i,
                                      double eps_fd, const SteadyStateOptions& solver) {
  const Vector x = a_tau.sector_vector(difference_quotient(model, h_i, eps_fd, solver));
  std::vector<cplx> raw(a_tau.size());
  for (std::size_t k = 0; k < a_tau.size(); ++k) raw[k] = -a_tau.contract_derivative(k, x);
  return {a_tau.grid(), real_response(raw, a_tau.grid(), ResponseForm::R2alt),
          ResponseForm::R2alt};
}

ResponseCurve response_susceptibility(const Operator& a, const LindbladModel& model,
                                      const Operator& h_i, std::span<const double> grid,
                                      double eps_fd, const SteadyStateOptions& solver,
                                      const PropagationOptions& options) {
  const Superoperator l0 = build_lindblad_generator(model);
  const Superoperator l1 = build_commutator_generator(h_i, model.hbar());
  const HeisenbergTrajectory a_tau(l0, a, grid, response_sector(l0, l1), options);
  return response_susceptibility(a_tau, model, h_i, eps_fd, solver);
}

ResponseCurve response_commutator(const HeisenbergTrajectory& a_tau, const Operator& h_i,
                                  const DensityOperator& pi0, double hbar) {
  return contract_curve(a_tau, commutator_source(h_i, pi0, hbar), ResponseForm::R3);
}

ResponseCurve response_commutator(const Operator& a, const Operator& h_i, const Superoperator& l0,
                                  const DensityOperator& pi0, std::span<const double> grid,
                                  double hbar, const PropagationOptions& options) {
  const Operator y = commutator_source(h_i, pi0, hbar);
  return contract_curve(own_trajectory(a, l0, y, grid, options), y, ResponseForm::R3);
}

ResponseCurve response_kubo_k1(const Operator& a, const Operator& h0, const Operator& h_i,
                               double beta, std::span<const double> grid, double hbar) {
  validate_time_grid(grid);
  const ClosedSystem cs = closed_system(a, h0, h_i, beta);
  const Operator tilde = kubo_transform_thermal(h0, h_i, beta);
  const Matrix tilde_eig = cs.h0.vectors.adjoint() * tilde.matrix() * cs.h0.vectors;
  const Eigen::VectorXd& e = cs.h0.values;
  std::vector<cplx> raw(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    Matrix adot = heisenberg_unitary(cs, grid[k], hbar);
    for (Eigen::Index i = 0; i < adot.rows(); ++i) {
      for (Eigen::Index j = 0; j < adot.cols(); ++j) {
        adot(i, j) *= cplx(0.0, (e[i] - e[j]) / hbar);
      }
    }
    raw[k] = beta * (cs.p.cast<cplx>().asDiagonal() * adot * tilde_eig).trace();
  }
  return {{grid.begin(), grid.end()}, real_response(raw, grid, ResponseForm::K1),
          ResponseForm::K1};
}

ResponseCurve response_kubo_k2(const Operator& a, const Operator& h0, const Operator& h_i,
                               double beta, std::span<const double> grid, double hbar) {
  validate_time_grid(grid);
  const ClosedSystem cs = closed_system(a, h0, h_i, beta);
  std::vector<cplx> raw(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Matrix at = heisenberg_unitary(cs, grid[k], hbar);
    const Matrix comm = cs.h_i * at - at * cs.h_i;
    raw[k] = cplx(0.0, 1.0 / hbar) * (cs.p.cast<cplx>().asDiagonal() * comm).trace();
  }
  return {{grid.begin(), grid.end()}, real_response(raw, grid, ResponseForm::K2),
          ResponseForm::K2};
}

TimeSeries convolve(const ResponseCurve& curve, const PerturbationProtocol& protocol) {
  const auto& t = curve.tau;
  const auto& r = curve.values;
  validate_time_grid(t);
  if (r.size() != t.size()) throw InvalidDimensionError("curve values do not match its grid");
  TimeSeries out{t, std::vector<double>(t.size(), 0.0)};
  if (protocol.is_step()) {
    const double eps = protocol.amplitude();
    double acc = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) {
      acc += 0.5 * (t[k] - t[k - 1]) * (r[k] + r[k - 1]);
      out.values[k] = eps * acc;
    }
    return out;
  }
  for (std::size_t k = 1; k < t.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      const double f0 = protocol(t[j - 1]) * interpolate(t, r, t[k] - t[j - 1]);
      const double f1 = protocol(t[j]) * interpolate(t, r, t[k] - t[j]);
      acc += 0.5 * (t[j] - t[j - 1]) * (f0 + f1);
    }
    out.values[k] = acc;
  }
  return out;
}

TimeSeries nonlinear_reference(const Superoperator& l0, const Superoperator& l1,
                               const DensityOperator& pi0, const PerturbationProtocol& protocol,
                               const Operator& a, std::span<const double> grid,
                               const PropagationOptions& options) {
  validate_time_grid(grid);
  const LiouvilleSector sector = response_sector(l0, l1);
  const SparseMatrix g0 = sector.restrict(l0.matrix());
  const SparseMatrix g1 = sector.restrict(l1.matrix());
  const Vector x0 = sector.restrict(pi0.op());
  const Vector dual = sector.restrict(a.adjoint());
  const cplx base = dual.dot(x0);

  TimeSeries out{{grid.begin(), grid.end()}, std::vector<double>(grid.size(), 0.0)};
  if (protocol.is_step()) {
    const Propagator prop(SparseMatrix(g0 + cplx(protocol.amplitude()) * g1), options);
    const auto xs = prop.trajectory(x0, grid);
    for (std::size_t k = 0; k < xs.size(); ++k) out.values[k] = (dual.dot(xs[k]) - base).real();
    return out;
  }
  Vector x = x0;
  double eps_prev = std::nan("");
  std::unique_ptr<Propagator> prop;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double h = grid[k] - grid[k - 1];
    if (h > 0.0) {
      const double eps = protocol(0.5 * (grid[k] + grid[k - 1]));
      if (!prop || eps != eps_prev) {
        prop = std::make_unique<Propagator>(SparseMatrix(g0 + cplx(eps) * g1), options);
        eps_prev = eps;
      }
      x = prop->apply(x, h);
    }
    out.values[k] = (dual.dot(x) - base).real();
  }
  return out;
}

TimeSeries nonlinear_reference(const LindbladModel& model, const Operator& h_i,
                               const PerturbationProtocol& protocol, const Operator& a,
                               std::span<const double> grid, const SteadyStateOptions& solver,
                               const PropagationOptions& options) {
  const Superoperator l0 = build_lindblad_generator(model);
  const Superoperator l1 = build_commutator_generator(h_i, model.hbar());
  const SteadyStateSolution ss = steady_state(l0, solver);
  return nonlinear_reference(l0, l1, ss.pi0, protocol, a, grid, options);
}

}  // namespace nessresp
