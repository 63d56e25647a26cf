#include "nessresp/kubo.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "nessresp/error.hpp"

namespace nessresp {

namespace {

Eigensystem positive_spectrum(const DensityOperator& pi, const char* what) {
  Eigensystem es = hermitian_eigensystem(pi.op(), 1e-8);
  if (!(es.values.minCoeff() > 0.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " requires a positive definite state (min eigenvalue " << es.values.minCoeff()
        << ")";
    throw RankError(msg.str());
  }
  return es;
}

// (r − 1)/ln r for r = p/q, continued by its limit 1 at p = q.
double kubo_kernel(double p, double q, double pmax) {
  const double diff = p - q;
  if (std::abs(diff) < kDegenerateGap * pmax) {
    const double u = diff / q;  // second-order series in u = r − 1
    return 1.0 + u / 2.0 - u * u / 12.0;
  }
  return (p / q - 1.0) / std::log(p / q);
}

// ln(p/q)/(p − q), continued by 1/q at p = q.
double log_kernel(double p, double q, double pmax) {
  const double diff = p - q;
  if (std::abs(diff) < kDegenerateGap * pmax) {
    const double u = diff / q;
    return (1.0 - u / 2.0 + u * u / 3.0) / q;
  }
  return std::log(p / q) / diff;
}

template <class Kernel>
Operator eigenbasis_transform(const Operator& x, const Eigensystem& es, Kernel kernel) {
  const Matrix xt = es.vectors.adjoint() * x.matrix() * es.vectors;
  const double pmax = es.values.maxCoeff();
  Matrix out(xt.rows(), xt.cols());
  for (Eigen::Index i = 0; i < xt.rows(); ++i) {
    for (Eigen::Index j = 0; j < xt.cols(); ++j) {
      out(i, j) = xt(i, j) * kernel(es.values[i], es.values[j], pmax);
    }
  }
  return Operator(x.space(), es.vectors * out * es.vectors.adjoint());
}

}  // namespace

Operator generalized_kubo(const Operator& x, const DensityOperator& pi0) {
  if (!(x.space() == pi0.space())) throw InvalidDimensionError("operator space mismatch");
  const Eigensystem es = positive_spectrum(pi0, "generalized Kubo transform");
  return eigenbasis_transform(x, es, kubo_kernel);
}

Operator log_derivative(const Operator& pi1, const DensityOperator& pi0) {
  if (!(pi1.space() == pi0.space())) throw InvalidDimensionError("operator space mismatch");
  const Eigensystem es = positive_spectrum(pi0, "log derivative");
  return eigenbasis_transform(pi1, es, log_kernel);
}

Operator entropy_operator(const DensityOperator& pi) {
  const std::function<double(double)> neg_log = [](double p) {
    return p > 0.0 ? -std::log(p) : std::numeric_limits<double>::quiet_NaN();
  };
  return operator_function(pi.op(), neg_log, 1e-8);
}

Operator kubo_transform_thermal(const Operator& h0, const Operator& h_i, double beta) {
  if (!(beta > 0.0)) throw DomainError("inverse temperature must be positive");
  const Eigensystem es = hermitian_eigensystem(h0);
  const Matrix hi = es.vectors.adjoint() * h_i.matrix() * es.vectors;
  Matrix out(hi.rows(), hi.cols());
  for (Eigen::Index i = 0; i < hi.rows(); ++i) {
    for (Eigen::Index j = 0; j < hi.cols(); ++j) {
      // (1/β)∫₀^β e^{−λ(E_i − E_j)} dλ
      const double x = beta * (es.values[i] - es.values[j]);
      const double avg = std::abs(x) < 1e-8 ? 1.0 - x / 2.0 + x * x / 6.0 : -std::expm1(-x) / x;
      out(i, j) = hi(i, j) * avg;
    }
  }
  return Operator(h0.space(), es.vectors * out * es.vectors.adjoint());
}

}  // namespace nessresp
