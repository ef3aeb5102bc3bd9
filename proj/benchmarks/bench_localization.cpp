#include <benchmark/benchmark.h>

#include "frameforge/localization.hpp"

using namespace frameforge;

namespace {

void BM_solve_params(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_params(2.0, 0.5));
}
BENCHMARK(BM_solve_params)->Unit(benchmark::kMillisecond);

void BM_certify(benchmark::State& state) {
  LocalizationParams s = solve_params(2.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(certify_report(s));
}
BENCHMARK(BM_certify)->Unit(benchmark::kMillisecond);

void BM_certify_astronomical(benchmark::State& state) {
  // N = 10^25 exercises the log-domain chain; cost must stay flat.
  LocalizationParams s;
  s.p = 2.0;
  s.eps = 0.5;
  s.delta = Real::from_rational(Rational(1, 64));
  s.h = Real::from_rational(Rational(1, BigInt(1) << 93));
  s.N = BigInt("10000000000000000000000000");
  s.deg_f = s.deg_g = BigInt(1) << 193;
  s.nu = BigInt(4) * s.deg_f + 1;
  for (auto _ : state) benchmark::DoNotOptimize(certify_report(s));
}
BENCHMARK(BM_certify_astronomical)->Unit(benchmark::kMillisecond);

void BM_scan_point(benchmark::State& state) {
  std::vector<double> grid = {2.0};
  for (auto _ : state) benchmark::DoNotOptimize(scan_threshold(0.5, grid));
}
BENCHMARK(BM_scan_point)->Unit(benchmark::kMillisecond);

void BM_brute_check(benchmark::State& state) {
  LocalizationParams s;
  s.p = 1.8;
  s.eps = 0.5;
  s.delta = Real(0L);
  s.h = Real::from_rational(Rational(1, 64));
  s.N = BigInt(2);
  s.deg_f = s.deg_g = BigInt(8);
  s.nu = BigInt(2) * (s.deg_f + s.deg_g) + 1;
  MaterializedInstance inst = materialize(s);
  for (auto _ : state) benchmark::DoNotOptimize(brute_check(inst));
}
BENCHMARK(BM_brute_check)->Unit(benchmark::kMillisecond);

}  // namespace
