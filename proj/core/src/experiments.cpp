#include "aggsamp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "aggsamp/errors.hpp"

namespace aggsamp {

namespace {

// k distinct draws from [0, n), in draw order.
std::vector<Index> distinct_draws(Index n, Index k, Rng& rng) {
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    const auto j = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(i),
                                                      static_cast<std::uint64_t>(n - 1)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

Index draw_index(Index lo, Index hi, Rng& rng) {
  return static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(lo), static_cast<std::uint64_t>(hi)));
}

CVector embed(const CVector& coeffs, std::span<const Index> support, Index n) {
  CVector full = CVector::Zero(n);
  for (std::size_t c = 0; c < support.size(); ++c) full(support[c]) = coeffs(static_cast<Index>(c));
  return full;
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(seed ^ mix64(a)) + b);
}

}  // namespace

EdgeListGraph make_graph(const GraphSpec& spec, std::uint64_t seed) {
  if (spec.kind == "erdos_renyi") return erdos_renyi(spec.nodes, spec.p, seed, true, spec.symmetric);
  if (spec.kind == "cycle") return directed_cycle(spec.nodes);
  if (spec.kind == "factor") return factor_graph(spec.nodes, spec.strengths, spec.p, spec.scale, seed);
  if (spec.kind == "edges") return read_edge_csv(read_text_file(spec.path), 0, !spec.symmetric);
  if (spec.kind == "table")
    return ingest_weighted_table(read_text_file(spec.path), spec.symmetric, spec.threshold).graph;
  throw Error(ErrorCode::InvalidArgument, "unknown graph kind '" + spec.kind + "'");
}

GraphInstance make_instance(EdgeListGraph graph, ShiftKind kind, bool analytic_cycle) {
  ShiftOperator shift = shift_from_graph(graph, kind);
  SpectralDecomposition decomp =
      analytic_cycle ? decompose(shift, mode::AnalyticCycle{}) : decompose(shift);
  return {std::move(graph), std::move(shift), std::move(decomp)};
}

NoiseModel make_noise(const std::string& kind, double sigma2) {
  if (kind == "none") return NoiseModel::observation_white(0.0);
  if (kind == "observation") return NoiseModel::observation_white(sigma2);
  if (kind == "signal") return NoiseModel::signal_white(sigma2);
  if (kind == "frequency") return NoiseModel::frequency_white(sigma2);
  throw Error(ErrorCode::InvalidArgument, "unknown noise kind '" + kind + "'");
}

Support make_support(const ExperimentConfig& config, Index nodes, Rng& rng) {
  if (config.support == "list") {
    validate_support(config.support_list, nodes);
    return config.support_list;
  }
  if (config.bandwidth < 1 || config.bandwidth > nodes)
    throw Error(ErrorCode::InvalidSupport, "bandwidth must be in [1, N]");
  if (config.support == "first") {
    Support s(static_cast<std::size_t>(config.bandwidth));
    std::iota(s.begin(), s.end(), Index{0});
    return s;
  }
  if (config.support == "random") {
    Support s = distinct_draws(nodes, config.bandwidth, rng);
    std::sort(s.begin(), s.end());
    return s;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown support spec '" + config.support + "'");
}

RecoverySweepResult recovery_sweep(const RecoverySweepOptions& options) {
  RecoverySweepResult out;
  for (Index g = 0; g < options.graphs; ++g) {
    Rng rng = Rng::stream(options.seed, static_cast<std::uint64_t>(g));
    const Index n = draw_index(options.min_nodes, options.max_nodes, rng);
    const Index k = draw_index(options.min_bandwidth, std::min(options.max_bandwidth, n), rng);
    const double p = rng.uniform(options.min_p, options.max_p);
    const GraphInstance inst = make_instance(erdos_renyi(n, p, rng.next_u64()), options.shift);
    Support support(static_cast<std::size_t>(k));
    std::iota(support.begin(), support.end(), Index{0});
    const SelectionPlan plan = SelectionPlan::leading(k, k);
    for (Index node = 0; node < n; ++node) {
      const CVector x = synthesize_bandlimited(inst.decomp, support, rng);
      RecoveryCase c{g, n, k, p, node, false, false, 0.0, 0.0};
      c.conditions = check_recovery_conditions(inst.decomp, support, node).ok();
      try {
        const CVector samples = aggregation_sample(aggregate(inst.shift, x, node, k), plan);
        const Interpolation interp =
            aggregation_interpolate(inst.decomp, support, node, plan, samples);
        c.condition = interp.condition;
        c.error = relative_error(interp.signal, x);
      } catch (const Error&) {
        c.condition = std::numeric_limits<double>::infinity();
        c.error = std::numeric_limits<double>::infinity();
      }
      c.success = c.error < options.tolerance;
      if (c.conditions) {
        ++out.conditions_passed;
        if (c.success) ++out.successes;
      }
      if (c.success) ++out.unconditional_successes;
      out.cases.push_back(c);
    }
  }
  return out;
}

RecoverRun recover_trials(const GraphInstance& instance, std::span<const Index> support,
                          Index node, const SelectionPlan& plan, const NoiseModel& model,
                          Index trials, std::uint64_t seed, double tolerance) {
  model.validate();
  const auto k = static_cast<Index>(support.size());
  const bool noiseless = model.sigma2 == 0.0 && model.kind != NoiseKind::Custom;
  RecoverRun run;
  if (!noiseless) {
    try {
      run.theoretical_mse = analyze(instance.decomp, support, node, plan, model).metrics.e1;
    } catch (const Error&) {
      run.theoretical_mse = std::numeric_limits<double>::quiet_NaN();
    }
  }
  double sse = 0.0;
  Index solved = 0;
  for (Index t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(t));
    TrialRecord rec{t, 0.0, false, {}};
    const CVector coeffs = random_coefficients(instance.decomp, k, rng);
    const CVector x = synthesize_bandlimited(instance.decomp, support, coeffs);
    try {
      CVector samples = aggregation_sample(aggregate(instance.shift, x, node, plan.total()), plan);
      CVector estimate;
      if (noiseless && plan.size() == k) {
        estimate = aggregation_interpolate(instance.decomp, support, node, plan, samples).signal;
      } else {
        if (!noiseless) samples += draw_noise(instance.decomp, support, node, plan, model, rng);
        estimate = aggsamp::estimate(instance.decomp, support, node, plan, model, samples).estimate_time;
      }
      rec.error = relative_error(estimate, x);
      sse += (estimate - x).squaredNorm();
      ++solved;
    } catch (const Error& e) {
      rec.failure = std::string(to_string(e.code()));
      rec.error = std::numeric_limits<double>::infinity();
      ++run.failures;
    }
    rec.success = rec.error < tolerance;
    if (rec.success) ++run.successes;
    run.trials.push_back(rec);
  }
  run.mean_squared_error = solved > 0 ? sse / static_cast<double>(solved) : 0.0;
  return run;
}

std::vector<SupportIdPoint> support_id_sweep(const SupportIdOptions& options) {
  const Index n = options.nodes;
  const Index k = options.sparsity;
  const Index lo = std::max<Index>(options.min_observations, 0);
  const Index hi = options.max_observations;
  if (hi < lo || hi < 1) throw Error(ErrorCode::InvalidArgument, "empty observation range");
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidSupport, "sparsity must be in [1, N]");
  if (options.method != "l0" && options.method != "l1")
    throw Error(ErrorCode::InvalidArgument, "method must be l0 or l1");
  const Index counts = hi - lo + 1;

  std::vector<SupportIdPoint> points;
  for (ShiftKind s : options.shifts)
    for (double p : options.probabilities)
      for (Index m = lo; m <= hi; ++m) points.push_back({s, p, m, 0, 0, 0.0});
  std::vector<double> coherence_sum(points.size(), 0.0);
  std::vector<Index> coherence_count(points.size(), 0);
  auto point_at = [&](std::size_t s_idx, std::size_t p_idx, Index m) {
    return (s_idx * options.probabilities.size() + p_idx) * static_cast<std::size_t>(counts) +
           static_cast<std::size_t>(m - lo);
  };

  for (std::size_t p_idx = 0; p_idx < options.probabilities.size(); ++p_idx) {
    for (Index g = 0; g < options.graphs; ++g) {
      Rng graph_rng = Rng::stream(options.seed, sub_seed(p_idx, static_cast<std::uint64_t>(g), 0));
      const EdgeListGraph graph = erdos_renyi(n, options.probabilities[p_idx], graph_rng.next_u64());
      for (std::size_t s_idx = 0; s_idx < options.shifts.size(); ++s_idx) {
        const GraphInstance inst = make_instance(graph, options.shifts[s_idx]);
        for (Index sig = 0; sig < options.signals; ++sig) {
          // Same draws for every shift kind.
          Rng rng = Rng::stream(graph_rng.state(), static_cast<std::uint64_t>(sig));
          Support support = distinct_draws(n, k, rng);
          std::sort(support.begin(), support.end());
          const CVector coeffs = random_coefficients(inst.decomp, k, rng);
          const CVector truth = embed(coeffs, support, n);
          const CVector x = synthesize_bandlimited(inst.decomp, support, coeffs);
          std::vector<Index> nodes;
          if (options.every_node) {
            nodes.resize(static_cast<std::size_t>(n));
            std::iota(nodes.begin(), nodes.end(), Index{0});
          } else {
            nodes.push_back(draw_index(0, n - 1, rng));
          }
          for (Index node : nodes) {
            const AggregationSequence seq = aggregate(inst.shift, x, node, hi);
            for (Index m = lo; m <= hi; ++m) {
              const std::size_t at = point_at(s_idx, p_idx, m);
              ++points[at].trials;
              if (m == 0) continue;
              const SelectionPlan plan = SelectionPlan::structured(hi, 0, 1, m);
              const SensingSystem system =
                  sensing_system(inst.decomp, node, plan, aggregation_sample(seq, plan));
              if (m >= 2) {
                try {
                  coherence_sum[at] += coherence(system.matrix).mu;
                  ++coherence_count[at];
                } catch (const Error&) {
                }
              }
              CVector recovered;
              try {
                if (options.method == "l0") {
                  recovered = brute_force_l0(system, k).coefficients;
                } else {
                  L1Options opt = options.l1;
                  opt.sparsity = k;
                  const L1Result r = l1_recover(system, l1::EqualityConstrained{k}, opt);
                  recovered = r.coefficients;
                }
              } catch (const Error&) {
                continue;
              }
              if ((recovered - truth).norm() <= options.tolerance * truth.norm()) ++points[at].successes;
            }
          }
        }
      }
    }
  }
  for (std::size_t i = 0; i < points.size(); ++i)
    points[i].mean_coherence =
        coherence_count[i] > 0 ? coherence_sum[i] / static_cast<double>(coherence_count[i]) : 0.0;
  return points;
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Aggregation: return "aggregation";
    case Strategy::Selection: return "selection";
    case Strategy::Shift1: return "shift1";
    case Strategy::Shift2: return "shift2";
    case Strategy::Shift3: return "shift3";
    case Strategy::Mixed: return "mixed";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& name) {
  for (Strategy s : all_strategies())
    if (to_string(s) == name) return s;
  throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + name + "'");
}

std::vector<Strategy> all_strategies() {
  return {Strategy::Aggregation, Strategy::Selection, Strategy::Shift1,
          Strategy::Shift2,      Strategy::Shift3,    Strategy::Mixed};
}

ObservationPlan strategy_plan(Strategy s, Index nodes, Index bandwidth, Rng& rng) {
  const Index shifts = std::max<Index>(bandwidth, 4);
  std::vector<Observation> picks;
  auto same_shift = [&](Index l) {
    if (bandwidth > nodes) throw Error(ErrorCode::InvalidArgument, "more picks than nodes");
    for (Index i : distinct_draws(nodes, bandwidth, rng)) picks.push_back({i, l});
  };
  switch (s) {
    case Strategy::Aggregation: {
      const Index i = draw_index(0, nodes - 1, rng);
      for (Index l = 0; l < bandwidth; ++l) picks.push_back({i, l});
      break;
    }
    case Strategy::Selection: same_shift(0); break;
    case Strategy::Shift1: same_shift(1); break;
    case Strategy::Shift2: same_shift(2); break;
    case Strategy::Shift3: same_shift(3); break;
    case Strategy::Mixed: {
      const Index pairs = (bandwidth + 1) / 2;
      if (pairs > nodes) throw Error(ErrorCode::InvalidArgument, "more picks than nodes");
      for (Index i : distinct_draws(nodes, pairs, rng))
        for (Index l = 0; l < 2 && static_cast<Index>(picks.size()) < bandwidth; ++l)
          picks.push_back({i, l});
      break;
    }
  }
  return {nodes, shifts, std::move(picks)};
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<StrategyResult> spaceshift_strategies(const GraphInstance& instance,
                                                  const SpaceShiftOptions& options) {
  const SpectralDecomposition& decomp = instance.decomp;
  const Index n = decomp.size();
  const Index k = options.bandwidth;
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidSupport, "bandwidth must be in [1, N]");
  Support support(static_cast<std::size_t>(k));
  std::iota(support.begin(), support.end(), Index{0});
  const Index top = std::min<Index>(2, k);
  if (!(options.out_of_band >= 0.0 && options.out_of_band < 1.0))
    throw Error(ErrorCode::InvalidArgument, "out-of-band share must be in [0, 1)");

  std::vector<StrategyResult> results;
  for (Strategy s : options.strategies) results.push_back(StrategyResult{s, {}, 0, 0.0, 0.0});
  for (Index t = 0; t < options.trials; ++t) {
    Rng rng = Rng::stream(options.seed, static_cast<std::uint64_t>(t));
    CVector coeffs = random_coefficients(decomp, k, rng);
    if (k > top) {
      const double head = coeffs.head(top).squaredNorm();
      const double tail = coeffs.tail(k - top).squaredNorm();
      if (head > 0.0) coeffs.head(top) *= std::sqrt(options.concentration / head);
      if (tail > 0.0) coeffs.tail(k - top) *= std::sqrt((1.0 - options.concentration) / tail);
    }
    CVector full = random_coefficients(decomp, n, rng);
    full.head(k).setZero();
    const double residual = full.squaredNorm();
    if (residual > 0.0 && options.out_of_band > 0.0) {
      const double in_band = coeffs.squaredNorm();
      full *= std::sqrt(options.out_of_band / (1.0 - options.out_of_band) * in_band / residual);
    } else {
      full.setZero();
    }
    full.head(k) = coeffs;
    const CVector x = decomp.eigenvectors() * full;
    const double sigma2 =
        options.snr > 0.0 ? x.squaredNorm() / static_cast<double>(n) / options.snr : 0.0;
    const NoiseModel noise = NoiseModel::observation_white(sigma2);
    for (std::size_t si = 0; si < results.size(); ++si) {
      StrategyResult& res = results[si];
      Rng srng = Rng::stream(sub_seed(options.seed, static_cast<std::uint64_t>(t), 1),
                             static_cast<std::uint64_t>(res.strategy));
      try {
        const ObservationPlan plan = strategy_plan(res.strategy, n, k, srng);
        CVector samples = observe(decomp, full, plan);
        if (sigma2 > 0.0) samples += draw_stacked_noise(decomp, support, plan, noise, srng);
        const EstimationReport rep = spaceshift_blue(decomp, support, plan, noise, &samples);
        res.errors.push_back((rep.estimate_time - x).squaredNorm() / x.squaredNorm());
      } catch (const Error&) {
        ++res.failures;
      }
    }
  }
  for (auto& res : results) {
    res.min_error = res.errors.empty() ? std::numeric_limits<double>::quiet_NaN()
                                       : *std::min_element(res.errors.begin(), res.errors.end());
    res.median_error = median(res.errors);
  }
  return results;
}

}  // namespace aggsamp
