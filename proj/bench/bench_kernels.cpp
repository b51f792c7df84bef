// Serial reference vs OpenMP kernels: cross-kernel assembly, kernel-matrix
// assembly and batch certificate evaluation.

#include "ipca/data.hpp"
#include "ipca/ipca.hpp"
#include "ipca/kernel.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace ipca;

const KernelParams kParams{2, 1.0, 3};

Matrix points(Index n, std::uint64_t seed) {
  Rng rng(seed);
  return standard_normal(n, kParams.dim, rng);
}

void BM_CrossKernelSerial(benchmark::State& state) {
  const Matrix X = points(state.range(0), 1);
  const Matrix Z = points(12, 2);
  for (auto _ : state) benchmark::DoNotOptimize(serial::cross_kernel_matrix(X, Z, kParams));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 12);
}

void BM_CrossKernelParallel(benchmark::State& state) {
  const Matrix X = points(state.range(0), 1);
  const Matrix Z = points(12, 2);
  for (auto _ : state) benchmark::DoNotOptimize(cross_kernel_matrix(X, Z, kParams));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 12);
}

void BM_KernelMatrixSerial(benchmark::State& state) {
  const Matrix X = points(state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(serial::kernel_matrix(X, kParams));
}

void BM_KernelMatrixParallel(benchmark::State& state) {
  const Matrix X = points(state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_matrix(X, kParams));
}

IpcaModel bench_model() {
  const Dataset d = gen_two_circles_on_sphere(200, 5.0, 0.1, 4);
  return ipca_fit(d.points, points(12, 5), kParams, Truncation::top(6));
}

void BM_CertifySerial(benchmark::State& state) {
  const IpcaModel model = bench_model();
  const Matrix grid = points(state.range(0), 6);
  for (auto _ : state) benchmark::DoNotOptimize(serial::certify_norms(model, grid));
}

void BM_CertifyParallel(benchmark::State& state) {
  const IpcaModel model = bench_model();
  const Matrix grid = points(state.range(0), 6);
  for (auto _ : state) benchmark::DoNotOptimize(certify_norms(model, grid));
}

}  // namespace

BENCHMARK(BM_CrossKernelSerial)->RangeMultiplier(10)->Range(1000, 100000);
BENCHMARK(BM_CrossKernelParallel)->RangeMultiplier(10)->Range(1000, 100000);
BENCHMARK(BM_KernelMatrixSerial)->Arg(250)->Arg(1000);
BENCHMARK(BM_KernelMatrixParallel)->Arg(250)->Arg(1000);
BENCHMARK(BM_CertifySerial)->Arg(10000)->Arg(100000);
BENCHMARK(BM_CertifyParallel)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
