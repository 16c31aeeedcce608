#include <benchmark/benchmark.h>

#include "bodt/baselines.hpp"
#include "bodt/generator.hpp"
#include "bodt/planner.hpp"
#include "bodt/simulator.hpp"

namespace {

const bodt::Scenario& desk_scenario() {
  static const bodt::Scenario scenario = bodt::gen_scenario(bodt::GenParams{});
  return scenario;
}

void BM_FindPlan(benchmark::State& state) {
  const auto& scenario = desk_scenario();
  const bodt::Budget budget(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bodt::find_plan(scenario, budget));
  }
}
BENCHMARK(BM_FindPlan)->DenseRange(4, 20, 4)->Unit(benchmark::kMicrosecond);

void BM_RoundRobin(benchmark::State& state) {
  const auto& scenario = desk_scenario();
  for (auto _ : state) {
    benchmark::DoNotOptimize(bodt::round_robin_plan(scenario, state.range(0)));
  }
}
BENCHMARK(BM_RoundRobin)->Arg(4)->Arg(12)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_Simulate(benchmark::State& state) {
  const auto& scenario = desk_scenario();
  const auto outcome = bodt::find_plan(scenario, bodt::Budget(12));
  if (!outcome.feasible()) {
    state.SkipWithError("plan infeasible");
    return;
  }
  bodt::SimConfig config;
  config.perturbation.kind = bodt::PerturbationKind::kLognormal;
  config.perturbation.sigma = 0.2;
  config.reassignment_enabled = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bodt::simulate(*outcome.plan, scenario, config));
  }
}
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
