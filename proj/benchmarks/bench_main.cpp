#include "pulseforge/dynamics.hpp"
#include "pulseforge/problems.hpp"
#include "pulseforge/scp.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace pulseforge;

namespace {

ControlProblem problem_for(ModelKind kind) {
  return problem_builder(kind, 0.3)(resolve_drive(kind, SystemParams{}));
}

Pulse random_pulse(int quadratures, int n_pixels, double total_time) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> amp(-0.2, 0.2);
  Pulse p(total_time, quadratures, n_pixels);
  for (int q = 0; q < quadratures; ++q) {
    for (int k = 0; k < n_pixels; ++k) {
      p.amps(q, k) = amp(rng);
    }
  }
  return p;
}

void BM_Propagator(benchmark::State& state) {
  const ControlProblem cp = problem_for(ModelKind::MultiLevel);
  const Operator h = cp.h_drift + kTwoPi * 0.1 * cp.h_controls[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(numkit::propagator(h, 2.0));
  }
}
BENCHMARK(BM_Propagator)->Unit(benchmark::kMicrosecond);

void BM_TwoLevelGradient(benchmark::State& state) {
  const ControlProblem cp = problem_for(ModelKind::TwoLevel);
  const Pulse p = random_pulse(1, static_cast<int>(state.range(0)), 200.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fidelity_and_gradient(cp, p));
  }
}
BENCHMARK(BM_TwoLevelGradient)->Arg(16)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_MultiLevelGradient(benchmark::State& state) {
  const ControlProblem cp = problem_for(ModelKind::MultiLevel);
  const Pulse p = random_pulse(2, static_cast<int>(state.range(0)), 2.0 * state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fidelity_and_gradient(cp, p));
  }
}
BENCHMARK(BM_MultiLevelGradient)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_MaximinStep(benchmark::State& state) {
  const int samples = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> f(static_cast<std::size_t>(samples));
  std::vector<RealVector> g(static_cast<std::size_t>(samples), RealVector(n));
  for (int i = 0; i < samples; ++i) {
    f[static_cast<std::size_t>(i)] = 0.5 + 0.1 * u(rng);
    for (int k = 0; k < n; ++k) {
      g[static_cast<std::size_t>(i)](k) = u(rng);
    }
  }
  const RealVector current = RealVector::Zero(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(maximin_step(f, g, current, 0.3, 0.03));
  }
}
BENCHMARK(BM_MaximinStep)->Args({1, 16})->Args({11, 16})->Args({25, 80})->Args({11, 200})
    ->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
