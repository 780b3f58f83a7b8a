// Serial reference against the OpenMP kernels.

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>
#include <json.hpp>

#include "flr/config.hpp"
#include "flr/curve.hpp"
#include "flr/harness.hpp"
#include "flr/parallel.hpp"
#include "flr/synthetic.hpp"

namespace {

using namespace flr;

std::vector<Curve> inputs(std::size_t n, std::size_t d) {
  return sample_kl(KLSpec{Decay::exponential, 0.5, d, 11}, n);
}

par::Exec exec_of(const benchmark::State& state) {
  return state.range(2) == 0 ? par::Exec::serial : par::Exec::parallel;
}

void BM_WeightedGram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto zs = inputs(n, static_cast<std::size_t>(state.range(1)));
  const std::vector<double> w(n, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(par::weighted_gram(zs, w, 1.0, exec_of(state)));
}

void BM_WeightedSecondMoment(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto zs = inputs(n, static_cast<std::size_t>(state.range(1)));
  const std::vector<double> w(n, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(par::weighted_second_moment(zs, w, 1.0 / static_cast<double>(n), exec_of(state)));
}

void BM_Distances(benchmark::State& state) {
  const auto zs = inputs(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  const Curve x0(static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(par::distances(zs, x0, exec_of(state)));
}

void BM_RunMse(benchmark::State& state) {
  const auto cfg = ExperimentConfig::from_json(nlohmann::json{
      {"kl", {{"decay", "exponential"}, {"rate", 0.5}, {"dim", state.range(1)}, {"seed", 3}}},
      {"regression", {{"a0", 1.0}, {"theta", {1.0}}, {"quad_diag", {1.0}}, {"noise_sigma", 0.3}}},
      {"x0", {{"rule", "smooth_decay"}, {"scale", 5.0}}},
      {"n_grid", {state.range(0)}},
      {"h_grid", {{"relative", {1.0, 1.5}}, {"min_active", 30}}},
      {"schemes", {"penalization:1e-3", "nw"}},
      {"replicates", 16},
      {"held_out", 5000},
      {"seed", 5}});
  for (auto _ : state) benchmark::DoNotOptimize(run_mse(cfg, exec_of(state)));
}

// Arguments: n, d, exec (0 serial, 1 parallel).
BENCHMARK(BM_WeightedGram)->ArgsProduct({{100, 400}, {50}, {0, 1}});
BENCHMARK(BM_WeightedSecondMoment)->ArgsProduct({{2000, 20000}, {50}, {0, 1}});
BENCHMARK(BM_Distances)->ArgsProduct({{20000, 100000}, {50}, {0, 1}});
BENCHMARK(BM_RunMse)->ArgsProduct({{500}, {20}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
