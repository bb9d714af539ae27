#include <benchmark/benchmark.h>

#include <random>

#include "cpbtls/eigensolver.hpp"
#include "cpbtls/fitting.hpp"
#include "cpbtls/hamiltonian.hpp"
#include "cpbtls/spectra.hpp"

namespace {

using namespace cpbtls;

SymMatrix random_symmetric(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SymMatrix h(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) h.set(i, j, u(rng));
  }
  return h;
}

ModelConfig set_four() {
  ModelConfig m;
  m.cpb = {4.5, 6.33, 4, 0};
  m.tls = {TlsParams{0.62, 0.06, 0.35, 2.02}};
  return m;
}

void BM_Eigendecompose(benchmark::State& state) {
  const SymMatrix h = random_symmetric(static_cast<std::size_t>(state.range(0)), 42);
  for (auto _ : state) benchmark::DoNotOptimize(eigendecompose(h));
}
BENCHMARK(BM_Eigendecompose)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_CpbTlsHamiltonian(benchmark::State& state) {
  ModelConfig m = set_four();
  if (state.range(0) == 2) {
    m.cpb.e_j_max = 2.79;
    m.tls = {TlsParams{0.62, 0.0, -0.40, 1.36}, TlsParams{-0.82, 0.04, 0.13, -1.00}};
    m.t_12 = 0.04;
  }
  for (auto _ : state) benchmark::DoNotOptimize(eigendecompose(build_hamiltonian(m, 1.02)));
}
BENCHMARK(BM_CpbTlsHamiltonian)->Arg(1)->Arg(2);

void BM_Spectrum(benchmark::State& state) {
  const ModelConfig m = set_four();
  const auto grid = make_grid(0.5, 1.5, 0.005);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(m, grid, 4));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_Spectrum);

void BM_Objective(benchmark::State& state) {
  const ModelConfig m = set_four();
  const auto data = synthesize_ridge(m, make_grid(0.85, 1.15, 0.005), "4", {0.01, 1, kBrightFloor, 2});
  const FitProblem problem({data}, 1, 4, AssignmentPolicy::hinted);
  const auto params = problem.pack(m);
  for (auto _ : state) benchmark::DoNotOptimize(objective(problem, params));
}
BENCHMARK(BM_Objective);

}  // namespace

BENCHMARK_MAIN();
