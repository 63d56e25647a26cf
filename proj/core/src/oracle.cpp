#include "nessresp/oracle.hpp"

#include <cmath>
#include <sstream>

#include "nessresp/error.hpp"

namespace nessresp::oracle {

namespace {

constexpr cplx kI{0.0, 1.0};

double scaled_energy1(const TwoOscillatorParams& p) { return p.beta1 * p.hbar * p.omega1; }

void require_positive_beta(const TwoOscillatorParams& p) {
  if (!(p.beta1 > 0.0) || !(p.beta2 > 0.0)) {
    throw DomainError("inverse temperatures must be positive");
  }
}

}  // namespace

Occupations occupations(const TwoOscillatorParams& params) {
  require_positive_beta(params);
  const double n1 = bose_occupation(params.beta1 * params.hbar * params.omega1);
  const double n2 = bose_occupation(params.beta2 * params.hbar * params.omega2());
  return {n1, n2, n2 - n1};
}

double coupling_frequency(const TwoOscillatorParams& params) {
  return std::sqrt(params.delta * params.delta + 4.0 * params.lambda * params.lambda);
}

CovarianceSolution steady_covariance(const TwoOscillatorParams& params) {
  if (!(params.gamma > 0.0)) throw DomainError("no steady state without damping (gamma <= 0)");
  const auto [n1, n2, dn] = occupations(params);
  const double g = params.gamma;
  const double d = params.delta;
  const double l = params.lambda;
  const double gd = g * g + d * d;

  CovarianceSolution cs{};
  cs.zeta = gd / (4.0 * l * l + gd);
  cs.D = 2.0 * l * l * (n1 + n2 + 1.0) / gd;
  cs.C = l * (n1 - n2) / gd;

  const double s1 = cs.zeta * (cs.D + n1 + 0.5);
  const double s2 = cs.zeta * (cs.D + n2 + 0.5);
  const double zc = cs.zeta * cs.C;
  cs.sigma << s1, 0.0, -d * zc, -g * zc,
              0.0, s1, g * zc, -d * zc,
              -d * zc, g * zc, s2, 0.0,
              -g * zc, -d * zc, 0.0, s2;
  cs.mean_n1 = s1 - 0.5;
  cs.mean_n2 = s2 - 0.5;
  cs.a1_a2dag = zc * cplx(-d, g);
  return cs;
}

MomentSystem moment_system(const TwoOscillatorParams& params) {
  const auto occ = occupations(params);
  const double g = params.gamma;
  const double w1 = params.omega1;
  const double w2 = params.omega2();
  const double w12 = w1 + w2;
  const double dw = w1 - w2;
  const cplx il = kI * params.lambda;

  MomentSystem ms;
  auto& M = ms.M;
  M.setZero();
  M(0, 0) = -g;              M(0, 7) = il;       M(0, 8) = -il;
  M(1, 1) = -2.0 * kI * w1 - g;                  M(1, 6) = -2.0 * il;
  M(2, 2) = 2.0 * kI * w1 - g;                   M(2, 9) = 2.0 * il;
  M(3, 3) = -g;              M(3, 7) = -il;      M(3, 8) = il;
  M(4, 4) = -2.0 * kI * w2 - g;                  M(4, 6) = -2.0 * il;
  M(5, 5) = 2.0 * kI * w2 - g;                   M(5, 9) = 2.0 * il;
  M(6, 1) = -il;             M(6, 4) = -il;      M(6, 6) = -kI * w12 - g;
  M(7, 0) = il;              M(7, 3) = -il;      M(7, 7) = -kI * dw - g;
  M(8, 0) = -il;             M(8, 3) = il;       M(8, 8) = kI * dw - g;
  M(9, 2) = il;              M(9, 5) = il;       M(9, 9) = kI * w12 - g;

  ms.w.setZero();
  ms.w(0) = occ.n1 * g;
  ms.w(3) = occ.n2 * g;
  return ms;
}

std::array<cplx, 10> AdjointCoefficients::row() const {
  return {f, g, h, j, l, m, n, p, q, r};
}

AdjointCoefficients adjoint_coefficients(const TwoOscillatorParams& params, double t) {
  const double z = coupling_frequency(params);
  if (!(z > 0.0)) throw DomainError("degenerate model: delta = lambda = 0 gives z = 0");
  const auto [n1, n2, dn] = occupations(params);
  const double g = params.gamma;
  const double d = params.delta;
  const double lam = params.lambda;
  const double z2 = z * z;
  const double decay = std::exp(-g * t);
  const double c = std::cos(z * t);
  const double sn = std::sin(z * t);

  AdjointCoefficients ac{};
  ac.f = decay * (d * d + 2.0 * lam * lam + 2.0 * lam * lam * c) / z2;
  ac.j = -2.0 * lam * lam * decay * (c - 1.0) / z2;
  ac.p = lam * decay * cplx(-d + d * c, z * sn) / z2;
  ac.q = lam * decay * cplx(-d + d * c, -z * sn) / z2;

  // Stationary part; sign chosen so that s → (1 − e^{−γt})n₁ at λ = 0.
  const double x = d * d * n1 + 2.0 * lam * lam * (n1 + n2);
  const double y = n1 * (g * g + d * d) + 2.0 * lam * lam * (n1 + n2);
  // e^{−γt}·e^{γt} is kept as 1 to avoid overflow at large t.
  const double bracket = z * ((g * g + z2) * x * decay - z2 * y) +
                         2.0 * g * lam * lam * (n1 - n2) * (g * z * c - z2 * sn) * decay;
  ac.s = -bracket / (z2 * z * (g * g + z2));
  return ac;
}

namespace {

// Eq.-(11)-type closed form divided by Δn (the response is linear in Δn).
double closed_form_per_bias(const TwoOscillatorParams& params, double tau) {
  if (params.lambda == 0.0) return 0.0;
  const double z = coupling_frequency(params);
  const double g = params.gamma;
  const double d = params.delta;
  const double l = params.lambda;
  const double pref = 2.0 * l * scaled_energy1(params) / (z * z * (g * g + z * z));
  return std::exp(-g * tau) *
         (g * (d * d + 4.0 * l * l * std::cos(z * tau)) + (g * g + d * d) * z * std::sin(z * tau)) *
         pref;
}

}  // namespace

double response_closed_form(const TwoOscillatorParams& params, double tau) {
  return occupations(params).delta_n * closed_form_per_bias(params, tau);
}

double response_unitary(const TwoOscillatorParams& params, double tau) {
  if (params.lambda == 0.0 || params.delta == 0.0) return 0.0;
  const auto occ = occupations(params);
  const double z = coupling_frequency(params);
  return 2.0 * params.lambda * occ.delta_n * scaled_energy1(params) * params.delta *
         params.delta / (z * z * z) * std::sin(z * tau);
}

double response_classical(const TwoOscillatorParams& params, double tau) {
  require_positive_beta(params);
  const double x1 = scaled_energy1(params);
  const double x2 = params.beta2 * params.hbar * params.omega2();
  if (!(x2 > 0.0)) throw DomainError("beta2*hbar*omega2 must be positive");
  // R₃/Δn is finite, so equal scaled energies give an exact zero.
  return (x1 - x2) / x2 * closed_form_per_bias(params, tau) / x1;
}

double response_delta0(const TwoOscillatorParams& params, double tau) {
  if (params.delta != 0.0) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "delta = 0 response requested with delta = " << params.delta;
    throw DomainError(msg.str());
  }
  const auto occ = occupations(params);
  const double g = params.gamma;
  const double l = params.lambda;
  return std::exp(-g * tau) * occ.delta_n * g *
         (2.0 * l * std::cos(2.0 * l * tau) + g * std::sin(2.0 * l * tau)) *
         scaled_energy1(params) / (g * g + 4.0 * l * l);
}

double response_from_moments(const TwoOscillatorParams& params, double tau) {
  const CovarianceSolution cov = steady_covariance(params);
  const AdjointCoefficients ac = adjoint_coefficients(params, tau);
  // [K, N₁] = a₁a₂† − a₁†a₂, [K, N₂] = −[K, N₁], [K, a₁a₂†] = N₁ − N₂, [K, a₁†a₂] = N₂ − N₁
  const cplx x_minus_xdag = cov.a1_a2dag - std::conj(cov.a1_a2dag);
  const cplx expect = (ac.f - ac.j) * x_minus_xdag + (ac.p - ac.q) * (cov.mean_n1 - cov.mean_n2);
  return (kI * scaled_energy1(params) * expect).real();
}

double unitary_trajectory(const TwoOscillatorParams& params, double eps, double t) {
  if (params.lambda == 0.0 || params.delta == 0.0) return 0.0;
  const auto occ = occupations(params);
  const double z = coupling_frequency(params);
  return eps * 2.0 * params.lambda * occ.delta_n * scaled_energy1(params) * params.delta *
         params.delta / (z * z * z) * (1.0 - std::cos(z * t)) / z;
}

double stationary_observable(const TwoOscillatorParams& params) {
  return scaled_energy1(params) * steady_covariance(params).mean_n1;
}

double geometric_leakage(double mean, int levels) {
  if (levels < 1) throw DomainError("truncation must be positive");
  if (!(mean >= 0.0)) throw DomainError("mean occupation must be nonnegative");
  const double q = mean / (mean + 1.0);
  return (1.0 - q) * std::pow(q, levels - 1);
}

Truncation suggested_truncation(const TwoOscillatorParams& params, double max_leakage) {
  if (!(max_leakage > 0.0 && max_leakage < 1.0)) throw DomainError("leakage target must lie in (0, 1)");
  const CovarianceSolution cov = steady_covariance(params);
  auto levels = [&](double mean) {
    int n = 2;
    while (geometric_leakage(mean, n) >= max_leakage) {
      if (++n > 100000) throw DomainError("occupation too large for a Fock truncation");
    }
    return n;
  };
  return {levels(cov.mean_n1), levels(cov.mean_n2)};
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double width = b - a;
  long panels = 1;
  double estimate = 0.5 * width * (f(a) + f(b));
  for (int level = 1; level <= 26; ++level) {
    // Halving the step: new estimate reuses the old one plus the midpoints.
    const double h = width / static_cast<double>(panels);
    double mid = 0.0;
    for (long k = 0; k < panels; ++k) mid += f(a + (static_cast<double>(k) + 0.5) * h);
    const double refined = 0.5 * estimate + 0.5 * h * mid;
    panels *= 2;
    if (level >= 4 && std::abs(refined - estimate) <= tol * std::max(1.0, std::abs(refined))) {
      return refined;
    }
    estimate = refined;
  }
  throw SolverError("trapezoid refinement did not converge");
}

ResponseCurve analytic_curve(const TwoOscillatorParams& params, std::span<const double> grid) {
  ResponseCurve curve{{grid.begin(), grid.end()}, {}, ResponseForm::Analytic};
  curve.values.reserve(grid.size());
  for (double t : grid) curve.values.push_back(response_closed_form(params, t));
  return curve;
}

}  // namespace nessresp::oracle
