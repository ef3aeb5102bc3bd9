#include <benchmark/benchmark.h>

#include <cmath>

#include "frameforge/apspace.hpp"

using namespace frameforge;

namespace {

SampledSpectrum gaussian(const Grid& g) {
  SampledSpectrum u;
  u.grid = g;
  u.decay_exponent = 6.0;
  u.samples.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = g.node_d(i);
    u.samples[i] = std::exp(-M_PI * x * x);
  }
  return u;
}

TrigPoly low_pass() {
  TrigPoly f;
  for (int n = -8; n <= 8; ++n) f.set_term(Freq(n), Cplx::of(1.0 / (1 + n * n)));
  return f;
}

void BM_norm_ap(benchmark::State& state) {
  SampledSpectrum u = gaussian(Grid::standard());
  for (auto _ : state) benchmark::DoNotOptimize(norm_ap(u, 1.8));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(u.samples.size()));
}
BENCHMARK(BM_norm_ap);

void BM_mul_periodic(benchmark::State& state) {
  SampledSpectrum u = gaussian(Grid::standard());
  TrigPoly f = low_pass();
  for (auto _ : state) benchmark::DoNotOptimize(mul_periodic(u, f));
}
BENCHMARK(BM_mul_periodic);

void BM_mul_poly_offgrid(benchmark::State& state) {
  SampledSpectrum u = gaussian(Grid::standard());
  TrigPoly f;
  for (int n = -8; n <= 8; ++n)
    f.set_term(Freq(Rational(128 * n + 1, 128)), Cplx::of(1.0 / (1 + n * n)));
  for (auto _ : state) benchmark::DoNotOptimize(mul_poly(u, f));
}
BENCHMARK(BM_mul_poly_offgrid);

void BM_haar_phi(benchmark::State& state) {
  Grid g = Grid::standard();
  for (auto _ : state) benchmark::DoNotOptimize(haar_phi(6, g, 1.8));
}
BENCHMARK(BM_haar_phi);

}  // namespace
