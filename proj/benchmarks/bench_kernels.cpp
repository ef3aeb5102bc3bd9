#include <benchmark/benchmark.h>

#include "frameforge/kernels.hpp"

using namespace frameforge;

namespace {

void BM_kernel_coeff_batch(benchmark::State& state) {
  KernelSpec s{KernelKind::Trapezoid, Rational(1, 256), Rational(0)};
  long count = state.range(0);
  for (auto _ : state)
    for (long n = 1; n <= count; ++n)
      benchmark::DoNotOptimize(kernel_coeff(s, BigInt(n)));
  state.SetItemsProcessed(state.iterations() * count);
}
BENCHMARK(BM_kernel_coeff_batch)->Arg(64)->Arg(1024);

void BM_kernel_coeff_huge_index(benchmark::State& state) {
  KernelSpec s{KernelKind::Triangle, Rational(1, 8), Rational(0)};
  BigInt n("1000000000000000000000001");
  for (auto _ : state) benchmark::DoNotOptimize(kernel_coeff(s, n));
}
BENCHMARK(BM_kernel_coeff_huge_index);

void BM_norm_bound_check(benchmark::State& state) {
  KernelSpec s{KernelKind::Triangle, Rational(1, 64), Rational(0)};
  for (auto _ : state)
    benchmark::DoNotOptimize(norm_bound_check(s, 2.0, BigInt(state.range(0))));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_norm_bound_check)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_nonneg_check(benchmark::State& state) {
  KernelSpec s{KernelKind::NonnegPhi, Rational(1, 32), Rational(1, 4)};
  for (auto _ : state)
    benchmark::DoNotOptimize(nonneg_check(s, BigInt(state.range(0))));
}
BENCHMARK(BM_nonneg_check)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
