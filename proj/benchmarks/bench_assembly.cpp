#include <benchmark/benchmark.h>

#include "fraclap/assembly.hpp"
#include "fraclap/mesh.hpp"
#include "fraclap/quadrature.hpp"

namespace {

// p = n = L on the geometric mesh with sigma = 0.25.
void assemble(benchmark::State& state, fraclap::AssemblyMode mode) {
  const int layers = static_cast<int>(state.range(0));
  const auto space = fraclap::build_space(fraclap::geometric_mesh(layers, 0.25), layers);
  for (auto _ : state) {
    auto a = fraclap::assemble_stiffness(space, fraclap::FracParams(0.5), layers, nullptr, {mode, 1});
    benchmark::DoNotOptimize(a.data().data());
  }
  state.counters["N"] = space.dimension();
}

void BM_AssembleBlockwise(benchmark::State& state) {
  assemble(state, fraclap::AssemblyMode::Blockwise);
}
void BM_AssembleNaive(benchmark::State& state) { assemble(state, fraclap::AssemblyMode::Naive); }

void BM_GaussJacobiRule(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto rule = fraclap::gauss_jacobi(n, 0.0, 1.0);
    benchmark::DoNotOptimize(rule);
  }
}

}  // namespace

BENCHMARK(BM_AssembleBlockwise)->DenseRange(4, 12, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleNaive)->DenseRange(4, 12, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaussJacobiRule)->RangeMultiplier(2)->Range(4, 64);
BENCHMARK_MAIN();
