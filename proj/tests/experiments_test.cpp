#include "support.hpp"

#include <set>

using namespace aggsamp;
using namespace aggsamp::testing;

TEST(Factories, NoiseNames) {
  EXPECT_EQ(make_noise("none", 5.0).sigma2, 0.0);
  EXPECT_EQ(make_noise("signal", 0.5).kind, NoiseKind::SignalWhite);
  EXPECT_EQ(make_noise("frequency", 0.5).kind, NoiseKind::FrequencyWhite);
  EXPECT_THROW(make_noise("pink", 1.0), aggsamp::Error);
}

TEST(Factories, SupportModes) {
  ExperimentConfig c;
  c.bandwidth = 3;
  Rng rng(1);
  EXPECT_EQ(make_support(c, 10, rng), iota_support(3));
  c.support = "random";
  const Support r = make_support(c, 10, rng);
  EXPECT_EQ(r.size(), 3u);
  EXPECT_TRUE(std::is_sorted(r.begin(), r.end()));
  c.support = "list";
  c.support_list = {2, 7};
  EXPECT_EQ(make_support(c, 10, rng), (Support{2, 7}));
  c.support_list = {2, 12};
  EXPECT_THROW(make_support(c, 10, rng), aggsamp::Error);
}

TEST(Factories, GraphKinds) {
  GraphSpec spec;
  spec.kind = "cycle";
  spec.nodes = 5;
  EXPECT_EQ(make_graph(spec, 1).edges.size(), 5u);
  spec.kind = "erdos_renyi";
  EXPECT_EQ(make_graph(spec, 4).edges, make_graph(spec, 4).edges);
  spec.kind = "edges";
  spec.path = "/nonexistent/edges.csv";
  EXPECT_THROW(make_graph(spec, 1), aggsamp::Error);
  spec.kind = "lattice";
  EXPECT_THROW(make_graph(spec, 1), aggsamp::Error);
}

TEST(RecoverySweep, SmallSweepRecoversEverything) {
  RecoverySweepOptions opt;
  opt.graphs = 20;
  opt.seed = 3;
  const auto r = recovery_sweep(opt);
  EXPECT_GT(r.conditions_passed, 0);
  EXPECT_EQ(r.successes, r.conditions_passed);
  for (const auto& c : r.cases) {
    EXPECT_GE(c.nodes, 10);
    EXPECT_LE(c.nodes, 30);
    EXPECT_GE(c.bandwidth, 1);
    EXPECT_LE(c.bandwidth, 5);
  }
}

TEST(RecoverySweep, Deterministic) {
  RecoverySweepOptions opt;
  opt.graphs = 3;
  const auto a = recovery_sweep(opt);
  const auto b = recovery_sweep(opt);
  ASSERT_EQ(a.cases.size(), b.cases.size());
  for (std::size_t i = 0; i < a.cases.size(); ++i) EXPECT_EQ(a.cases[i].error, b.cases[i].error);
}

TEST(RecoverTrials, NoiselessAndNoisy) {
  const auto inst = er_instance(15, 0.25, 2);
  const Support k = iota_support(3);
  const auto plan = SelectionPlan::leading(15, 3);
  const auto clean = recover_trials(inst, k, 1, plan, make_noise("none", 0.0), 10, 7);
  EXPECT_EQ(clean.successes, 10);
  EXPECT_EQ(clean.theoretical_mse, 0.0);
  const auto noisy = recover_trials(inst, k, 1, SelectionPlan::leading(15, 6),
                                    NoiseModel::observation_white(1e-4), 200, 7);
  EXPECT_EQ(noisy.failures, 0);
  EXPECT_GT(noisy.theoretical_mse, 0.0);
  EXPECT_NEAR(noisy.mean_squared_error / noisy.theoretical_mse, 1.0, 0.3);
}

TEST(SupportId, RateGrowsWithObservations) {
  SupportIdOptions opt;
  opt.shifts = {ShiftKind::Adjacency};
  opt.probabilities = {0.2};
  opt.nodes = 12;
  opt.sparsity = 2;
  opt.graphs = 6;
  opt.max_observations = 6;
  opt.method = "l0";
  const auto pts = support_id_sweep(opt);
  ASSERT_EQ(pts.size(), 6u);
  EXPECT_EQ(pts.front().observations, 1);
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_GE(pts[i].rate(), pts[i - 1].rate());
  EXPECT_EQ(pts.front().rate(), 0.0);
  EXPECT_GT(pts.back().rate(), 0.5);
}

TEST(Strategies, PlansHaveBandwidthPicks) {
  Rng rng(4);
  for (Strategy s : all_strategies()) {
    const auto plan = strategy_plan(s, 12, 4, rng);
    EXPECT_EQ(plan.size(), 4) << to_string(s);
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  }
  const auto agg = strategy_plan(Strategy::Aggregation, 12, 3, rng);
  std::set<Index> nodes;
  for (const auto& o : agg.picks()) nodes.insert(o.node);
  EXPECT_EQ(nodes.size(), 1u);
  const auto sel = strategy_plan(Strategy::Shift2, 12, 3, rng);
  for (const auto& o : sel.picks()) EXPECT_EQ(o.shift, 2);
}

TEST(Strategies, BandlimitedSignalsAreExact) {
  const auto inst = make_instance(factor_graph(20, {64, 16, 4, 1}, 0.15, 0.05, 2), ShiftKind::Adjacency);
  SpaceShiftOptions opt;
  opt.trials = 5;
  opt.out_of_band = 0.0;
  for (const auto& r : spaceshift_strategies(inst, opt)) {
    ASSERT_FALSE(r.errors.empty()) << to_string(r.strategy);
    EXPECT_LT(r.median_error, 1e-12) << to_string(r.strategy);
  }
}

TEST(Median, EvenAndOdd) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
}
