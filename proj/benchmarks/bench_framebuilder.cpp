#include <benchmark/benchmark.h>

#include "frameforge/framebuilder.hpp"

using namespace frameforge;

namespace {

const FramePlan& shared_plan() {
  static FramePlan plan = build_frame(FrameBuildOptions{});
  return plan;
}

void BM_build_frame(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_frame(FrameBuildOptions{}));
}
BENCHMARK(BM_build_frame)->Unit(benchmark::kMillisecond);

void BM_expand_frame(benchmark::State& state) {
  const FramePlan& plan = shared_plan();
  SampledSpectrum f = haar_phi(1, plan.grid, plan.p);
  long terms = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(expand_frame(plan, f, terms));
  state.SetItemsProcessed(state.iterations() * terms);
}
BENCHMARK(BM_expand_frame)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_frame_element(benchmark::State& state) {
  const FramePlan& plan = shared_plan();
  for (auto _ : state) benchmark::DoNotOptimize(frame_element(plan, 2));
}
BENCHMARK(BM_frame_element)->Unit(benchmark::kMillisecond);

void BM_psi_values(benchmark::State& state) {
  const FramePlan& plan = shared_plan();
  SampledSpectrum f = haar_phi(2, plan.grid, plan.p);
  for (auto _ : state) benchmark::DoNotOptimize(psi_values(plan, f));
}
BENCHMARK(BM_psi_values);

}  // namespace
