#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>

#include "nessresp/error.hpp"
#include "scenario/scenario.hpp"

namespace nessresp::scenario {

namespace {

constexpr int kFigurePoints = 2001;
constexpr double kRefineTolerance = 1e-10;

// Cumulative ∫₀^t f_i on the grid. Every interval is split into 2^k panels,
// k shared by all integrands, raised until the whole set settles.
// Sharing the panels keeps ratios of proportional integrands exact.
std::vector<std::vector<double>> cumulative(const std::vector<std::function<double(double)>>& fs,
                                            const std::vector<double>& grid) {
  auto pass = [&](int level) {
    const int panels = 1 << level;
    std::vector<std::vector<double>> out(fs.size(), std::vector<double>(grid.size(), 0.0));
    for (std::size_t i = 0; i < fs.size(); ++i) {
      double acc = 0.0;
      for (std::size_t k = 1; k < grid.size(); ++k) {
        const double a = grid[k - 1], h = (grid[k] - a) / panels;
        double s = 0.5 * (fs[i](a) + fs[i](grid[k]));
        for (int m = 1; m < panels; ++m) s += fs[i](a + m * h);
        acc += s * h;
        out[i][k] = acc;
      }
    }
    return out;
  };
  // Richardson step on consecutive trapezoid levels (Simpson); still linear in f.
  auto richardson = [](const std::vector<std::vector<double>>& fine, const std::vector<std::vector<double>>& coarse) {
    auto out = fine;
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t k = 0; k < out[i].size(); ++k) out[i][k] = (4.0 * fine[i][k] - coarse[i][k]) / 3.0;
    return out;
  };
  auto trap = pass(0);
  auto prev = richardson(pass(1), trap);
  trap = pass(1);
  for (int level = 2; level <= 12; ++level) {
    auto next_trap = pass(level);
    auto cur = richardson(next_trap, trap);
    trap = std::move(next_trap);
    double change = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < fs.size(); ++i)
      for (std::size_t k = 0; k < grid.size(); ++k) {
        change = std::max(change, std::abs(cur[i][k] - prev[i][k]));
        scale = std::max(scale, std::abs(cur[i][k]));
      }
    if (change <= kRefineTolerance * scale) return cur;
    prev = std::move(cur);
  }
  throw SolverError("figure quadrature did not settle");
}

std::vector<double> figure_grid(const TwoOscillatorParams& p) {
  std::vector<double> g(kFigurePoints);
  const double t_max = 8.0 / p.gamma;
  for (int k = 0; k < kFigurePoints; ++k) g[k] = t_max * k / (kFigurePoints - 1);
  return g;
}

// ε∫₀^∞R, truncated where e^{−γt} is negligible.
double linear_asymptote(const TwoOscillatorParams& p, const std::function<double(double)>& r) {
  return p.eps * oracle::integrate(r, 0.0, 40.0 / p.gamma);
}

// ⟨A⟩ at coupling λ + ε minus ⟨A⟩ at λ.
double perturbed_value(const TwoOscillatorParams& p) {
  TwoOscillatorParams q = p;
  q.lambda += p.eps;
  return oracle::stationary_observable(q) - oracle::stationary_observable(p);
}

}  // namespace

TwoOscillatorParams figure_params(Figure which) {
  TwoOscillatorParams p;
  p.omega1 = 2.4;
  p.delta = 10.1;
  p.gamma = 0.7;
  p.eps = 0.11;
  if (which == Figure::Fig2) {
    p.lambda = 5.0;
    p.beta1 = 0.092;
    p.beta2 = 0.0008;
  } else {
    p.lambda = 2.3;
    p.beta1 = 0.164;
    p.beta2 = 0.416;
  }
  return p;
}

fs::path figure_data(Figure which, const fs::path& out) {
  const TwoOscillatorParams p = figure_params(which);
  const std::vector<double> grid = figure_grid(p);
  fs::create_directories(out);
  const auto quantum = [&](double t) { return oracle::response_closed_form(p, t); };
  const double asymptote = linear_asymptote(p, quantum);
  const double perturbed = perturbed_value(p);

  if (which == Figure::Fig2) {
    const auto traj = cumulative({quantum}, grid);
    const fs::path file = out / "fig2.csv";
    std::ofstream os(file);
    os << "t,steady_state,equilibrium,unitary,asymptote,perturbed_value\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
      // λ = 0 has Δ-independent zero response; written as an exact zero
      os << format_number(grid[k]) << ',' << format_number(p.eps * traj[0][k]) << ",0,"
         << format_number(oracle::unitary_trajectory(p, p.eps, grid[k])) << ',' << format_number(asymptote) << ','
         << format_number(perturbed) << '\n';
    }
    return file;
  }

  const auto classical = [&](double t) { return oracle::response_classical(p, t); };
  const auto traj = cumulative({quantum, classical}, grid);
  // At t = 0 both trajectories vanish; the ratio is then the ratio of the responses.
  const double ratio0 = classical(0.0) / quantum(0.0);
  const fs::path file = out / "fig3.csv";
  std::ofstream os(file);
  os << "t,quantum,classical,ratio,asymptote,perturbed_value\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double q = p.eps * traj[0][k], c = p.eps * traj[1][k];
    os << format_number(grid[k]) << ',' << format_number(q) << ',' << format_number(c) << ','
       << format_number(k == 0 ? ratio0 : c / q) << ',' << format_number(asymptote) << ','
       << format_number(perturbed) << '\n';
  }
  return file;
}

}  // namespace nessresp::scenario
