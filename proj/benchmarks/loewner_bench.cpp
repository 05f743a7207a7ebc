#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "loewner/driving.hpp"
#include "loewner/flow.hpp"
#include "loewner/minimizers.hpp"
#include "loewner/restriction.hpp"
#include "loewner/sle_mc.hpp"
#include "loewner/zipper.hpp"

using namespace loewner;
using std::numbers::pi;

namespace {

void BM_energy(benchmark::State& state) {
  auto lam = sample_sle_driver(2.0, 1.0, 1e-4, 3);
  for (auto _ : state) benchmark::DoNotOptimize(energy(lam, 1.0).total);
}
BENCHMARK(BM_energy);

void BM_flow_points(benchmark::State& state) {
  auto lam = DrivingFunction::linear(1.0, 1.0);
  std::vector<cplx> pts;
  for (int k = 0; k < 16; ++k) pts.emplace_back(-2.0 + 0.25 * k, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(flow_points(lam, pts, 1.0));
}
BENCHMARK(BM_flow_points);

void BM_trace(benchmark::State& state) {
  const double res = 1.0 / double(state.range(0));
  auto lam = DrivingFunction::linear(1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(trace(lam, 1.0, res));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_trace)->Arg(100)->Arg(400)->Arg(1000);

void BM_inverse_transform(benchmark::State& state) {
  auto curve = trace(DrivingFunction::linear(1.0, 1.0), 1.0,
                     1.0 / double(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(inverse_transform(curve));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_inverse_transform)->Arg(100)->Arg(400)->Arg(1000);

void BM_one_point_minimizer(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(one_point_minimizer(pi / 3));
}
BENCHMARK(BM_one_point_minimizer);

void BM_estimate_passage(benchmark::State& state) {
  ConstraintSet cs;
  cs.points.push_back({std::polar(1.0, pi / 3), -1});
  for (auto _ : state)
    benchmark::DoNotOptimize(
        estimate_passage(2.0, cs, 2.0, 1e-4, std::size_t(state.range(0)), 5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_estimate_passage)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_schramm_h(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(schramm_h(2.0, 1.0));
}
BENCHMARK(BM_schramm_h);

void BM_psi_derivatives(benchmark::State& state) {
  SlitHull K{HullKind::vertical_slit, 5.0, 1.0};
  auto lam = DrivingFunction::zero(2.0);
  for (auto _ : state) benchmark::DoNotOptimize(psi_derivatives(K, lam, 2.0));
  state.SetLabel("flow + re-zip of the hull boundary");
}
BENCHMARK(BM_psi_derivatives)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
