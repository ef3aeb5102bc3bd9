#include <benchmark/benchmark.h>

#include <random>

#include "frameforge/trigpoly.hpp"

using namespace frameforge;

namespace {

TrigPoly dense_poly(int degree, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  TrigPoly p;
  for (int n = -degree; n <= degree; ++n)
    p.set_term(Freq(n), Cplx::of(amp(rng), amp(rng)));
  return p;
}

void BM_mul_direct(benchmark::State& state) {
  int d = static_cast<int>(state.range(0));
  TrigPoly a = dense_poly(d, 1), b = dense_poly(d, 2);
  for (auto _ : state) benchmark::DoNotOptimize(mul_direct(a, b));
  state.SetComplexityN(d);
}
BENCHMARK(BM_mul_direct)->Arg(64)->Arg(256)->Arg(1024)->Complexity();

void BM_mul_fft(benchmark::State& state) {
  int d = static_cast<int>(state.range(0));
  TrigPoly a = dense_poly(d, 1), b = dense_poly(d, 2);
  for (auto _ : state) benchmark::DoNotOptimize(mul_fft(a, b));
  state.SetComplexityN(d);
}
BENCHMARK(BM_mul_fft)->Arg(64)->Arg(256)->Arg(1024)->Arg(4096)->Complexity();

void BM_coeff_norm(benchmark::State& state) {
  TrigPoly a = dense_poly(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(coeff_norm(a, 1.8));
}
BENCHMARK(BM_coeff_norm)->Arg(256)->Arg(4096);

void BM_factored_norm(benchmark::State& state) {
  TrigPoly f = dense_poly(8, 4);
  FactoredProduct fp{BigInt(17), {{f, BigInt(1) << 200}}};
  for (auto _ : state) benchmark::DoNotOptimize(factored_norm(fp, 2.0));
}
BENCHMARK(BM_factored_norm);

void BM_expand_product(benchmark::State& state) {
  TrigPoly f = dense_poly(4, 5);
  FactoredProduct fp{BigInt(9), {{f, BigInt(4)}}};
  for (auto _ : state) benchmark::DoNotOptimize(expand(fp));
}
BENCHMARK(BM_expand_product)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
