#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "cslab/csl_dynamics.hpp"
#include "cslab/heating.hpp"
#include "cslab/mott.hpp"
#include "cslab/noise.hpp"
#include "cslab/rng.hpp"

using namespace cslab;

namespace {

// One Euler-Maruyama step on a diagonal collapse operator of the given size.
void BM_IntegratorStep(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  std::vector<double> ev(dim);
  for (std::size_t i = 0; i < dim; ++i) ev[i] = static_cast<double>(i) / static_cast<double>(dim);
  dynamics::CSLConfig c;
  c.hamiltonian = DenseOperator::zero(dim);
  c.collapse_ops = {DenseOperator::diagonal(ev)};
  c.dt = 1e-4;
  dynamics::Integrator integ(c);
  std::vector<Complex> psi(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim))));
  CounterRng rng(1);
  for (auto _ : state) {
    const double dB[] = {rng.gaussian() * 1e-2};
    benchmark::DoNotOptimize(integ.advance(psi, dB));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_IntegratorStep)->Arg(2)->Arg(8)->Arg(64);

// Full two-level trajectory to collapse, white noise.
void BM_Trajectory(benchmark::State& state) {
  dynamics::CSLConfig c;
  c.hamiltonian = DenseOperator::zero(2);
  c.collapse_ops = {DenseOperator::diagonal({1, -1})};
  c.dt = 2.5e-4;
  const ComplexStateVector psi{std::sqrt(0.3), std::sqrt(0.7)};
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(dynamics::run_trajectory(c, psi, dynamics::NoiseModel::white(), seed++, {.record_trace = false}));
}
BENCHMARK(BM_Trajectory)->Unit(benchmark::kMicrosecond);

void BM_SampleColored(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto spec = noise::NoiseSpectrum::gaussian_cutoff(1.0, 1.0);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(noise::sample_colored(spec, 1, n, 0.1, seed++));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_SampleColored)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 18)->Unit(benchmark::kMillisecond);

void BM_LambdaEff(benchmark::State& state) {
  const auto spec = noise::NoiseSpectrum::gaussian_cutoff(2e-9, 5e-11, 1e-7);
  for (auto _ : state) benchmark::DoNotOptimize(heating::lambda_eff(spec, {}));
}
BENCHMARK(BM_LambdaEff);

void BM_MottAmplitude(benchmark::State& state) {
  mott::MottConfig c;
  const auto k_hat = mott::direction(c, 0.999, 0.3);
  const auto form = state.range(0) ? mott::PhaseForm::Exact : mott::PhaseForm::FarField;
  for (auto _ : state) benchmark::DoNotOptimize(mott::integrate_amplitude(c, k_hat, form));
}
BENCHMARK(BM_MottAmplitude)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
