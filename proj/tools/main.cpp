// aggsamp: batch experiments on aggregation sampling of graph signals.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 IO failure.

#include <aggsamp/errors.hpp>
#include <aggsamp/experiments.hpp>

#include <Eigen/Core>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

using namespace aggsamp;
using json = nlohmann::json;

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kIO = 3 };

// Flags that override fields of the experiment config. Values given on the
// command line win over the config file, which wins over the defaults.
class Overrides {
 public:
  template <class T, class F>
  CLI::Option* add(CLI::App* app, const std::string& name, const std::string& help, F apply) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(name, *value, help);
    items_.push_back([opt, value, apply](ExperimentConfig& c) {
      if (opt->count() > 0) apply(c, *value);
    });
    return opt;
  }

  CLI::Option* flag(CLI::App* app, const std::string& name, const std::string& help,
                    std::function<void(ExperimentConfig&)> apply) {
    CLI::Option* opt = app->add_flag(name, help);
    items_.push_back([opt, apply](ExperimentConfig& c) {
      if (opt->count() > 0) apply(c);
    });
    return opt;
  }

  void apply(ExperimentConfig& c) const {
    for (const auto& f : items_) f(c);
  }

 private:
  std::vector<std::function<void(ExperimentConfig&)>> items_;
};

struct Common {
  std::string config_path;
  std::string out;
  CLI::Option* seed = nullptr;
  std::uint64_t seed_value = 0;
  Overrides overrides;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "experiment config JSON")->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output path; writes <out>.json and <out>.csv (stdout JSON when unset)");
  c.seed = app->add_option("--seed", c.seed_value, "master seed (falls back to GSP_SEED, then 1)");
}

void add_graph(CLI::App* app, Overrides& o) {
  o.add<std::string>(app, "--graph", "erdos_renyi | cycle | factor | edges | table",
                     [](ExperimentConfig& c, const std::string& v) { c.graph.kind = v; });
  o.add<Index>(app, "--nodes", "node count for generated graphs",
               [](ExperimentConfig& c, Index v) { c.graph.nodes = v; });
  o.add<double>(app, "--p", "edge probability",
                [](ExperimentConfig& c, double v) { c.graph.p = v; });
  o.add<std::string>(app, "--graph-file", "edge-list or weighted-table CSV",
                     [](ExperimentConfig& c, const std::string& v) { c.graph.path = v; });
  o.add<double>(app, "--threshold", "table ingestion threshold",
                [](ExperimentConfig& c, double v) { c.graph.threshold = v; });
  o.add<std::vector<double>>(app, "--strengths", "factor-graph strengths",
                             [](ExperimentConfig& c, const std::vector<double>& v) {
                               c.graph.strengths = v;
                             })
      ->delimiter(',');
  o.add<double>(app, "--scale", "factor-graph background weight spread",
                [](ExperimentConfig& c, double v) { c.graph.scale = v; });
  o.flag(app, "--directed", "directed ER draws / edge lists",
         [](ExperimentConfig& c) { c.graph.symmetric = false; });
  o.add<std::string>(app, "--shift", "adjacency | identity_minus_adjacency | half_adjacency_squared | laplacian",
                     [](ExperimentConfig& c, const std::string& v) { c.shift = v; });
}

void add_signal(CLI::App* app, Overrides& o) {
  o.add<Index>(app, "--bandwidth", "K", [](ExperimentConfig& c, Index v) { c.bandwidth = v; });
  o.add<std::string>(app, "--support", "first | random | list",
                     [](ExperimentConfig& c, const std::string& v) { c.support = v; });
  o.add<std::vector<Index>>(app, "--support-list", "1-based frequency indices",
                            [](ExperimentConfig& c, const std::vector<Index>& v) {
                              c.support = "list";
                              c.support_list.clear();
                              for (Index k : v) c.support_list.push_back(k - 1);
                            })
      ->delimiter(',');
  o.add<std::string>(app, "--noise", "none | observation | signal | frequency",
                     [](ExperimentConfig& c, const std::string& v) { c.noise = v; });
  o.add<double>(app, "--sigma2", "noise power", [](ExperimentConfig& c, double v) { c.sigma2 = v; });
}

void add_plan(CLI::App* app, Overrides& o) {
  o.add<Index>(app, "--node", "sampling node (1-based)",
               [](ExperimentConfig& c, Index v) { c.node = v - 1; });
  o.add<Index>(app, "--plan-first", "first kept shift n0 (1-based)",
               [](ExperimentConfig& c, Index v) { c.plan_first = v - 1; });
  o.add<Index>(app, "--plan-stride", "stride N0",
               [](ExperimentConfig& c, Index v) { c.plan_stride = v; });
  o.add<Index>(app, "--plan-count", "kept rows (default K)",
               [](ExperimentConfig& c, Index v) { c.plan_count = v; });
  o.add<Index>(app, "--shifts", "aggregation length L (default N)",
               [](ExperimentConfig& c, Index v) { c.shifts = v; });
}

void add_trials(CLI::App* app, Overrides& o) {
  o.add<Index>(app, "--trials", "trial count", [](ExperimentConfig& c, Index v) { c.trials = v; });
}

// Defaults, then the config file merged over them, then the flags.
ExperimentConfig resolve(const ExperimentConfig& base, Common& common) {
  json merged = json::parse(config_to_json(base));
  bool file_seed = false;
  if (!common.config_path.empty()) {
    json file;
    try {
      file = json::parse(read_text_file(common.config_path));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::SchemaMismatch, std::string("config: ") + e.what());
    }
    if (!file.is_object()) throw Error(ErrorCode::SchemaMismatch, "config must be a JSON object");
    file_seed = file.contains("seed");
    merged.merge_patch(file);
  }
  ExperimentConfig c = config_from_json(merged.dump());
  if (common.seed->count() > 0) {
    c.seed = common.seed_value;
  } else if (!file_seed) {
    if (const char* env = std::getenv("GSP_SEED")) {
      c.seed = config_from_json(std::string("{\"seed\": \"") + env + "\"}").seed;
    }
  }
  common.overrides.apply(c);
  return c;
}

// Independent streams for the pieces of one run.
std::uint64_t part_seed(const ExperimentConfig& c, std::uint64_t part) {
  return Rng::stream(c.seed, part).next_u64();
}

ResultsDocument document(const ExperimentConfig& c) {
  ResultsDocument doc;
  doc.config = c;
  doc.seed = c.seed;
  doc.versions = {{"aggsamp", version()},
                  {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)}};
  return doc;
}

// Long format: one row per (record, metric).
std::string to_csv(const ResultsDocument& doc) {
  std::set<std::string> label_keys;
  for (const auto& r : doc.results)
    for (const auto& [k, v] : r.labels) label_keys.insert(k);
  std::ostringstream os;
  os << "record";
  for (const auto& k : label_keys) os << ',' << k;
  os << ",metric,value\n";
  for (const auto& r : doc.results) {
    for (const auto& [metric, value] : r.values) {
      os << r.name;
      for (const auto& k : label_keys) {
        const auto it = r.labels.find(k);
        os << ',' << (it == r.labels.end() ? "" : it->second);
      }
      os << ',' << metric << ',' << format_exact(value) << '\n';
    }
  }
  return os.str();
}

void emit(const ResultsDocument& doc, const std::string& out) {
  if (out.empty()) {
    std::cout << results_to_json(doc);
    return;
  }
  std::string stem = out;
  if (stem.size() > 5 && stem.compare(stem.size() - 5, 5, ".json") == 0) stem.resize(stem.size() - 5);
  save_results(stem + ".json", doc);
  write_text_file(stem + ".csv", to_csv(doc));
}

GraphInstance instance_for(const ExperimentConfig& c) {
  return make_instance(make_graph(c.graph, part_seed(c, 1)), parse_shift_kind(c.shift));
}

std::string label(Index one_based) { return std::to_string(one_based); }

// --- subcommands ----------------------------------------------------------

int run_decompose(const ExperimentConfig& c, const std::string& out) {
  const GraphInstance inst = instance_for(c);
  ResultsDocument doc = document(c);
  const CVector& lambda = inst.decomp.eigenvalues();
  for (Index k = 0; k < lambda.size(); ++k) {
    doc.results.push_back({"eigenvalue",
                           {{"re", lambda(k).real()},
                            {"im", lambda(k).imag()},
                            {"modulus", std::abs(lambda(k))},
                            {"phase", std::arg(lambda(k))}},
                           {{"index", label(k + 1)}}});
  }
  doc.results.push_back({"decomposition",
                         {{"nodes", static_cast<double>(inst.decomp.size())},
                          {"is_normal", inst.decomp.is_normal() ? 1.0 : 0.0},
                          {"is_real", inst.decomp.is_real() ? 1.0 : 0.0},
                          {"cond_v", inst.decomp.condition_number_v()}},
                         {}});
  emit(doc, out);
  return kOk;
}

struct RecoverExtra {
  bool sweep = false;
  bool full = false;
  Index graphs = 1000;
  double tolerance = 1e-8;
};

int run_recover(const ExperimentConfig& c, const RecoverExtra& x, const std::string& out) {
  ResultsDocument doc = document(c);
  if (x.sweep) {
    RecoverySweepOptions o;
    o.graphs = x.full ? 10000 : x.graphs;
    o.shift = parse_shift_kind(c.shift);
    o.seed = c.seed;
    o.tolerance = x.tolerance;
    const RecoverySweepResult r = recovery_sweep(o);
    for (Index k = o.min_bandwidth; k <= o.max_bandwidth; ++k) {
      double cases = 0, passed = 0, ok = 0;
      for (const auto& rc : r.cases) {
        if (rc.bandwidth != k) continue;
        ++cases;
        if (rc.conditions) {
          ++passed;
          if (rc.success) ++ok;
        }
      }
      doc.results.push_back({"sweep_bandwidth",
                             {{"cases", cases},
                              {"conditions_passed", passed},
                              {"successes", ok},
                              {"rate", passed > 0 ? ok / passed : 0.0}},
                             {{"bandwidth", std::to_string(k)}}});
    }
    doc.results.push_back({"sweep",
                           {{"graphs", static_cast<double>(o.graphs)},
                            {"cases", static_cast<double>(r.cases.size())},
                            {"conditions_passed", static_cast<double>(r.conditions_passed)},
                            {"successes", static_cast<double>(r.successes)},
                            {"unconditional_successes", static_cast<double>(r.unconditional_successes)},
                            {"rate", r.rate()}},
                           {}});
    emit(doc, out);
    return kOk;
  }

  const GraphInstance inst = instance_for(c);
  const Index n = inst.decomp.size();
  Rng support_rng = Rng::stream(c.seed, 0);
  const Support support = make_support(c, n, support_rng);
  const auto k = static_cast<Index>(support.size());
  if (c.node < 0 || c.node >= n) throw Error(ErrorCode::IndexOutOfRange, "node outside [1, N]");
  const Index total = c.shifts == 0 ? n : c.shifts;
  const Index count = c.plan_count == 0 ? k : c.plan_count;
  const SelectionPlan plan = SelectionPlan::structured(total, c.plan_first, c.plan_stride, count);
  const RecoverRun run = recover_trials(inst, support, c.node, plan, make_noise(c.noise, c.sigma2),
                                        c.trials, part_seed(c, 2), x.tolerance);
  for (const auto& t : run.trials) {
    ResultRecord r{"trial",
                   {{"error", t.error}, {"success", t.success ? 1.0 : 0.0}},
                   {{"trial", label(t.trial + 1)}}};
    if (!t.failure.empty()) r.labels["failure"] = t.failure;
    doc.results.push_back(std::move(r));
  }
  const double trials = static_cast<double>(run.trials.size());
  doc.results.push_back({"summary",
                         {{"trials", trials},
                          {"successes", static_cast<double>(run.successes)},
                          {"failures", static_cast<double>(run.failures)},
                          {"success_rate", trials > 0 ? run.successes / trials : 0.0},
                          {"mean_squared_error", run.mean_squared_error},
                          {"theoretical_mse", run.theoretical_mse}},
                         {}});
  emit(doc, out);
  // Every trial failing is systemic, not per-trial bad luck.
  if (c.trials > 0 && run.failures == c.trials) {
    std::cerr << "aggsamp: all " << c.trials << " trials failed\n";
    return kNumerical;
  }
  return kOk;
}

struct SupportIdExtra {
  std::string method = "l1";
  Index min_observations = 0;
  Index max_observations = 10;
  Index graphs = 50;
  Index signals = 1;
  bool every_node = false;
  std::vector<std::string> shift_kinds{"adjacency", "identity_minus_adjacency", "half_adjacency_squared"};
  std::vector<double> probabilities{0.15, 0.20, 0.25};
};

int run_support_id(const ExperimentConfig& c, const SupportIdExtra& x, const std::string& out) {
  SupportIdOptions o;
  o.shifts.clear();
  for (const auto& s : x.shift_kinds) o.shifts.push_back(parse_shift_kind(s));
  o.probabilities = x.probabilities;
  o.nodes = c.graph.nodes;
  o.sparsity = c.bandwidth;
  o.min_observations = x.min_observations;
  o.max_observations = x.max_observations;
  o.graphs = x.graphs;
  o.signals = x.signals;
  o.every_node = x.every_node;
  if (x.method != "l0" && x.method != "l1")
    throw Error(ErrorCode::InvalidArgument, "method must be l0 or l1");
  o.method = x.method;
  o.seed = c.seed;
  ResultsDocument doc = document(c);
  for (const auto& p : support_id_sweep(o)) {
    doc.results.push_back({"rate",
                           {{"p", p.p},
                            {"observations", static_cast<double>(p.observations)},
                            {"trials", static_cast<double>(p.trials)},
                            {"successes", static_cast<double>(p.successes)},
                            {"rate", p.rate()},
                            {"coherence", p.mean_coherence}},
                           {{"shift", to_string(p.shift)}, {"method", x.method}}});
  }
  emit(doc, out);
  return kOk;
}

Metric parse_metric(const std::string& s) {
  if (s == "e1") return Metric::E1;
  if (s == "e2") return Metric::E2;
  if (s == "e3") return Metric::E3;
  if (s == "e4") return Metric::E4;
  throw Error(ErrorCode::InvalidArgument, "metric must be e1, e2, e3 or e4");
}

std::map<std::string, double> metric_values(const ErrorMetrics& m) {
  return {{"e1", m.e1}, {"e2", m.e2}, {"e3", m.e3}, {"e4", m.e4}};
}

int run_design(const ExperimentConfig& c, const std::string& metric_name, const std::string& out) {
  const GraphInstance inst = instance_for(c);
  const Index n = inst.decomp.size();
  Rng support_rng = Rng::stream(c.seed, 0);
  const Support support = make_support(c, n, support_rng);
  const auto k = static_cast<Index>(support.size());
  const Index total = c.shifts == 0 ? n : c.shifts;
  const Index count = c.plan_count == 0 ? k : c.plan_count;
  // Rankings do not depend on the noise power; without noise use unit power.
  const NoiseModel model =
      c.noise == "none" ? NoiseModel::observation_white(1.0) : make_noise(c.noise, c.sigma2 > 0 ? c.sigma2 : 1.0);
  const Metric metric = parse_metric(metric_name);
  const SelectionPlan plan = SelectionPlan::structured(total, c.plan_first, c.plan_stride, count);

  ResultsDocument doc = document(c);
  const NodeRanking ranking = select_sampling_node(inst.decomp, support, plan, model,
                                                   RankingMethod::Exhaustive, metric);
  Index position = 0;
  for (const auto& s : ranking.ranked) {
    ResultRecord r{"node", metric_values(s.metrics), {{"node", label(s.node + 1)}}};
    r.values["rank"] = static_cast<double>(++position);
    r.values["feasible"] = s.feasible ? 1.0 : 0.0;
    if (model.kind == NoiseKind::ObservationWhite && plan.pattern())
      r.values["closed_form_score"] = closed_form_node_score(inst.decomp, support, s.node, *plan.pattern());
    doc.results.push_back(std::move(r));
  }
  doc.results.push_back({"node_ranking",
                         {{"all_tied", ranking.all_tied ? 1.0 : 0.0},
                          {"best_node", ranking.ranked.empty() ? 0.0 : ranking.ranked.front().node + 1.0}},
                         {{"metric", metric_name}}});

  // Admissible C_K(n0, N0) at the best node.
  if (!ranking.ranked.empty() && ranking.ranked.front().feasible) {
    const Index best = ranking.ranked.front().node;
    for (const auto& candidate : admissible_selections(total, k)) {
      const auto& pat = *candidate.pattern();
      ResultRecord r{"plan", {}, {{"node", label(best + 1)}}};
      r.values["n0"] = static_cast<double>(pat.first + 1);
      r.values["N0"] = static_cast<double>(pat.stride);
      try {
        r.values.merge(metric_values(analyze(inst.decomp, support, best, candidate, model).metrics));
        r.values["feasible"] = 1.0;
      } catch (const Error&) {
        r.values["feasible"] = 0.0;
      }
      doc.results.push_back(std::move(r));
    }
    if (model.kind == NoiseKind::ObservationWhite) {
      const OffsetChoice choice = select_offset(inst.decomp, support, c.plan_stride, total, model);
      doc.results.push_back({"offset_rule",
                             {{"n0", static_cast<double>(choice.first + 1)},
                              {"product", choice.product},
                              {"max_n0", static_cast<double>(choice.max_first + 1)}},
                             {{"node", label(best + 1)}}});
    }
  }
  emit(doc, out);
  return kOk;
}

struct SpaceShiftExtra {
  std::vector<std::string> strategies;
  double concentration = 0.95;
  double out_of_band = 0.05;
  double snr = 0.0;
};

int run_spaceshift(const ExperimentConfig& c, const SpaceShiftExtra& x, const std::string& out) {
  const GraphInstance inst = instance_for(c);
  SpaceShiftOptions o;
  if (!x.strategies.empty()) {
    o.strategies.clear();
    for (const auto& s : x.strategies) o.strategies.push_back(parse_strategy(s));
  }
  o.bandwidth = c.bandwidth;
  o.trials = c.trials;
  o.concentration = x.concentration;
  o.out_of_band = x.out_of_band;
  o.snr = x.snr;
  o.seed = part_seed(c, 2);
  ResultsDocument doc = document(c);
  for (const auto& r : spaceshift_strategies(inst, o)) {
    doc.results.push_back({"strategy",
                           {{"min_error", r.min_error},
                            {"median_error", r.median_error},
                            {"solved", static_cast<double>(r.errors.size())},
                            {"failures", static_cast<double>(r.failures)}},
                           {{"strategy", to_string(r.strategy)}}});
  }
  emit(doc, out);
  return kOk;
}

int exit_code(const aggsamp::Error& e) {
  if (e.code() == ErrorCode::IOFailure) return kIO;
  if (is_numerical(e.code())) return kNumerical;
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aggregation sampling of graph signals: experiments and reports"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  Common dec_c, rec_c, sid_c, des_c, ss_c;

  auto* dec = app.add_subcommand("decompose", "ordered eigenvalues, normality and cond(V)");
  add_common(dec, dec_c);
  add_graph(dec, dec_c.overrides);

  auto* rec = app.add_subcommand("recover", "planted bandlimited signals recovered at one node");
  add_common(rec, rec_c);
  add_graph(rec, rec_c.overrides);
  add_signal(rec, rec_c.overrides);
  add_plan(rec, rec_c.overrides);
  add_trials(rec, rec_c.overrides);
  RecoverExtra rec_x;
  rec->add_flag("--sweep", rec_x.sweep, "noiseless sweep over random ER graphs, sizes and bandwidths");
  rec->add_flag("--full", rec_x.full, "sweep with 10^4 graphs");
  rec->add_option("--graphs", rec_x.graphs, "sweep graph count")->capture_default_str();
  rec->add_option("--tolerance", rec_x.tolerance, "relative error counted as success")->capture_default_str();

  auto* sid = app.add_subcommand("support-id", "recovery rate with unknown frequency support");
  add_common(sid, sid_c);
  sid_c.overrides.add<Index>(sid, "--nodes", "graph size",
                             [](ExperimentConfig& c, Index v) { c.graph.nodes = v; });
  sid_c.overrides.add<Index>(sid, "--bandwidth", "K",
                             [](ExperimentConfig& c, Index v) { c.bandwidth = v; });
  SupportIdExtra sid_x;
  sid->add_option("--method", sid_x.method, "l0 | l1")->capture_default_str();
  sid->add_option("--observations", sid_x.max_observations, "largest observation count")->capture_default_str();
  sid->add_option("--min-observations", sid_x.min_observations, "smallest observation count")->capture_default_str();
  sid->add_option("--graphs", sid_x.graphs, "graphs per edge probability")->capture_default_str();
  sid->add_option("--signals", sid_x.signals, "signals per graph")->capture_default_str();
  sid->add_flag("--every-node", sid_x.every_node, "recover at every node instead of one random node");
  sid->add_option("--shift-kinds", sid_x.shift_kinds, "shift operators to compare")->delimiter(',');
  sid->add_option("--probabilities", sid_x.probabilities, "ER edge probabilities")->delimiter(',');

  auto* des = app.add_subcommand("design", "rank sampling nodes and shift offsets");
  add_common(des, des_c);
  add_graph(des, des_c.overrides);
  add_signal(des, des_c.overrides);
  add_plan(des, des_c.overrides);
  std::string metric = "e1";
  des->add_option("--metric", metric, "ranking metric e1 | e2 | e3 | e4")->capture_default_str();

  auto* ss = app.add_subcommand("spaceshift", "space-shift sampling strategies on approximately low-pass signals");
  add_common(ss, ss_c);
  add_graph(ss, ss_c.overrides);
  ss_c.overrides.add<Index>(ss, "--bandwidth", "K",
                            [](ExperimentConfig& c, Index v) { c.bandwidth = v; });
  add_trials(ss, ss_c.overrides);
  SpaceShiftExtra ss_x;
  ss->add_option("--strategies", ss_x.strategies,
                 "aggregation, selection, shift1, shift2, shift3, mixed (default all)")
      ->delimiter(',');
  ss->add_option("--concentration", ss_x.concentration, "in-band energy share of the top two frequencies")
      ->capture_default_str();
  ss->add_option("--out-of-band", ss_x.out_of_band, "energy share outside the band")->capture_default_str();
  ss->add_option("--snr", ss_x.snr, "observation SNR; 0 disables noise")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (dec->parsed()) {
      ExperimentConfig base;
      return run_decompose(resolve(base, dec_c), dec_c.out);
    }
    if (rec->parsed()) {
      ExperimentConfig base;
      base.trials = 20;
      return run_recover(resolve(base, rec_c), rec_x, rec_c.out);
    }
    if (sid->parsed()) {
      ExperimentConfig base;
      return run_support_id(resolve(base, sid_c), sid_x, sid_c.out);
    }
    if (des->parsed()) {
      ExperimentConfig base;
      return run_design(resolve(base, des_c), metric, des_c.out);
    }
    if (ss->parsed()) {
      ExperimentConfig base;
      base.graph.kind = "factor";
      base.bandwidth = 4;
      base.trials = 50;
      return run_spaceshift(resolve(base, ss_c), ss_x, ss_c.out);
    }
  } catch (const aggsamp::Error& e) {
    std::cerr << "aggsamp: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "aggsamp: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
