#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "nessresp/kubo.hpp"
#include "nessresp/oracle.hpp"
#include "nessresp/response.hpp"

using namespace nessresp;

namespace {

TwoOscillatorParams cool() {
  TwoOscillatorParams p;
  p.omega1 = 2.4;
  p.delta = 10.1;
  p.gamma = 0.7;
  p.lambda = 2.3;
  p.beta1 = 0.164;
  p.beta2 = 0.416;
  return p;
}

std::vector<double> grid(double t_max, int n) {
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = t_max * k / (n - 1);
  return g;
}

// levels per oscillator: state(0) x state(0)/4
void BM_SteadyState(benchmark::State& state) {
  const int n1 = static_cast<int>(state.range(0));
  const auto sys = build_two_oscillator_model(cool(), n1, std::max(4, n1 / 4));
  const Superoperator l0 = build_lindblad_generator(sys.model);
  for (auto _ : state) benchmark::DoNotOptimize(steady_state(l0).residual_norm);
}
BENCHMARK(BM_SteadyState)->Arg(12)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_CommutatorResponse(benchmark::State& state) {
  const int n1 = static_cast<int>(state.range(0));
  const auto sys = build_two_oscillator_model(cool(), n1, std::max(4, n1 / 4));
  const Superoperator l0 = build_lindblad_generator(sys.model);
  const Superoperator l1 = build_commutator_generator(sys.coupling);
  const auto pi0 = steady_state(l0).pi0;
  const auto g = grid(8.0 / 0.7, 400);
  for (auto _ : state) {
    const HeisenbergTrajectory traj(l0, sys.energy1, g, response_sector(l0, l1));
    benchmark::DoNotOptimize(response_commutator(traj, sys.coupling, pi0).values.back());
  }
}
BENCHMARK(BM_CommutatorResponse)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_GeneralizedKubo(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  Matrix g(d, d), x(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      g(i, j) = cplx(n(rng), n(rng));
      x(i, j) = cplx(n(rng), n(rng));
    }
  Matrix rho = g * g.adjoint() + 0.1 * Matrix::Identity(d, d);
  rho /= rho.trace();
  const HilbertSpace s = HilbertSpace::single(d);
  const DensityOperator pi(Operator(s, rho));
  const Operator op(s, x);
  for (auto _ : state) benchmark::DoNotOptimize(generalized_kubo(op, pi).norm());
}
BENCHMARK(BM_GeneralizedKubo)->Arg(8)->Arg(32)->Arg(128);

void BM_ClosedForm(benchmark::State& state) {
  const TwoOscillatorParams p = cool();
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::response_closed_form(p, t));
    t += 1e-3;
  }
}
BENCHMARK(BM_ClosedForm);

}  // namespace
BENCHMARK_MAIN();
