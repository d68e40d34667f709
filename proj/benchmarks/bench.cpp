#include <aggsamp/experiments.hpp>

#include <benchmark/benchmark.h>

using namespace aggsamp;

namespace {

GraphInstance graph(Index n) { return make_instance(erdos_renyi(n, 0.2, 7), ShiftKind::Adjacency); }

Support leading(Index k) {
  Support s;
  for (Index i = 0; i < k; ++i) s.push_back(i);
  return s;
}

void BM_Decompose(benchmark::State& state) {
  const auto inst = graph(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(decompose(inst.shift));
}
BENCHMARK(BM_Decompose)->Arg(20)->Arg(64)->Arg(128);

void BM_DecomposeDirected(benchmark::State& state) {
  const ShiftOperator s = shift_from_graph(erdos_renyi(state.range(0), 0.2, 7, true, false), ShiftKind::Adjacency);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(s));
}
BENCHMARK(BM_DecomposeDirected)->Arg(20)->Arg(64);

void BM_Aggregate(benchmark::State& state) {
  const Index n = state.range(0);
  const auto inst = graph(n);
  Rng rng(1);
  const CVector x = synthesize_bandlimited(inst.decomp, leading(5), rng);
  for (auto _ : state) benchmark::DoNotOptimize(aggregate(inst.shift, x, 0, n));
}
BENCHMARK(BM_Aggregate)->Arg(20)->Arg(64)->Arg(128);

void BM_Interpolate(benchmark::State& state) {
  const Index k = state.range(0);
  const auto inst = graph(30);
  Rng rng(2);
  const Support s = leading(k);
  const CVector x = synthesize_bandlimited(inst.decomp, s, rng);
  const auto plan = SelectionPlan::leading(30, k);
  const CVector y = aggregation_sample(aggregate(inst.shift, x, 0, 30), plan);
  for (auto _ : state) benchmark::DoNotOptimize(aggregation_interpolate(inst.decomp, s, 0, plan, y));
}
BENCHMARK(BM_Interpolate)->Arg(3)->Arg(5)->Arg(8);

void BM_Blue(benchmark::State& state) {
  const auto inst = graph(30);
  const Support s = leading(4);
  const auto plan = SelectionPlan::leading(30, state.range(0));
  const auto model = NoiseModel::observation_white(0.01);
  const CVector z = CVector::Ones(plan.size());
  for (auto _ : state) benchmark::DoNotOptimize(estimate(inst.decomp, s, 0, plan, model, z));
}
BENCHMARK(BM_Blue)->Arg(4)->Arg(8)->Arg(16);

SensingSystem planted(Index n, Index k, Index m) {
  const auto inst = graph(n);
  Rng rng(3);
  CVector freq = CVector::Zero(n);
  for (Index i = 0; i < k; ++i) freq(2 * i + 1) = rng.gaussian();
  const auto plan = SelectionPlan::leading(n, m);
  return sensing_system(inst.decomp, 0, plan, aggregation_sample(aggregate_spectral(inst.decomp, freq, 0, n), plan));
}

void BM_BruteForceL0(benchmark::State& state) {
  const Index k = state.range(0);
  const auto sys = planted(20, k, 2 * k);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_l0(sys, k));
}
BENCHMARK(BM_BruteForceL0)->Arg(1)->Arg(2)->Arg(3);

void BM_L1Equality(benchmark::State& state) {
  const auto sys = planted(20, 3, state.range(0));
  L1Options opt;
  opt.normalize_columns = true;
  for (auto _ : state) benchmark::DoNotOptimize(l1_recover(sys, l1::EqualityConstrained{3}, opt));
}
BENCHMARK(BM_L1Equality)->Arg(6)->Arg(10);

void BM_StackedBlue(benchmark::State& state) {
  const auto inst = graph(30);
  const Support s = leading(4);
  Rng rng(4);
  const auto plan = strategy_plan(Strategy::Mixed, 30, 4, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(spaceshift_blue(inst.decomp, s, plan, NoiseModel::observation_white(1.0), nullptr));
}
BENCHMARK(BM_StackedBlue);

}  // namespace
BENCHMARK_MAIN();
