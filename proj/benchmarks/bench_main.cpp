#include <benchmark/benchmark.h>

#include <memory>

#include "mcqmc/ballwalk.hpp"
#include "mcqmc/chain.hpp"
#include "mcqmc/discrepancy.hpp"
#include "mcqmc/lowdisc.hpp"

using namespace mcqmc;

namespace {

TargetPtr ball(std::size_t d, double alpha) {
  return std::make_shared<const TargetMeasure>(
      Domain::unit_ball(d), density_preset(alpha == 0.0 ? "uniform" : "exp-linear", alpha, d));
}

void BM_ExactScan1d(benchmark::State& state) {
  const auto pi = ball(1, 1.0);
  Rng rng(1);
  std::vector<Point> pts;
  for (int i = 0; i < state.range(0); ++i) pts.push_back(sample_uniform_ball(1, rng));
  for (auto _ : state) benchmark::DoNotOptimize(star_discrepancy_exact(pts, *pi));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExactScan1d)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_ExactScan2d(benchmark::State& state) {
  const auto pi = ball(2, 1.0);
  Rng rng(2);
  std::vector<Point> pts;
  for (int i = 0; i < state.range(0); ++i) pts.push_back(sample_uniform_ball(2, rng));
  for (auto _ : state) benchmark::DoNotOptimize(star_discrepancy_exact(pts, *pi));
}
BENCHMARK(BM_ExactScan2d)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_BoxMass2d(benchmark::State& state) {
  const auto pi = ball(2, 1.0);
  Rng rng(3);
  for (auto _ : state) {
    AnchoredBox box{{-1 + 2 * rng.uniform(), -1 + 2 * rng.uniform()}};
    benchmark::DoNotOptimize(pi->box_mass(box));
  }
}
BENCHMARK(BM_BoxMass2d);

void BM_QuantileCover(benchmark::State& state) {
  const auto pi = ball(static_cast<std::size_t>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(build_quantile_cover(*pi, 0.05));
}
BENCHMARK(BM_QuantileCover)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_RunChainBallWalk(benchmark::State& state) {
  const std::size_t d = static_cast<std::size_t>(state.range(0));
  const auto sys = make_metropolis_ballwalk(density_preset("exp-linear", 1.0, d), {0.5, d});
  Rng rng(4);
  const auto driver = uniform_driver(4096, d + 1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(run_chain(sys, driver));
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_RunChainBallWalk)->Arg(1)->Arg(2)->Arg(3);

void BM_PullbackExact(benchmark::State& state) {
  const auto sys = make_lazy_direct_kernel(ball(1, 1.0), 0.5, ball(1, 0.0));
  const auto cover = build_quantile_cover(*sys.target, 0.01);
  Rng rng(5);
  const auto driver = uniform_driver(256, sys.step_dimension(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(pullback_discrepancy_mc(sys, driver, 0, cover, 0, rng));
}
BENCHMARK(BM_PullbackExact)->Unit(benchmark::kMillisecond);

void BM_PullbackMonteCarlo(benchmark::State& state) {
  const auto sys = make_metropolis_ballwalk(density_preset("exp-linear", 1.0, 1), {0.7, 1});
  const auto cover = build_quantile_cover(*sys.target, 0.05);
  Rng rng(6);
  const auto driver = uniform_driver(256, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(pullback_discrepancy_mc(sys, driver, 0, cover, 100, rng));
}
BENCHMARK(BM_PullbackMonteCarlo)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
