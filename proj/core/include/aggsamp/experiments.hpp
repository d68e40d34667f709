#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aggsamp/graph.hpp"
#include "aggsamp/noisy.hpp"
#include "aggsamp/results_io.hpp"
#include "aggsamp/sparse.hpp"
#include "aggsamp/spaceshift.hpp"

namespace aggsamp {

struct GraphInstance {
  EdgeListGraph graph;
  ShiftOperator shift;
  SpectralDecomposition decomp;
};

/// Graph from a spec: erdos_renyi (seeded), cycle, edges (edge CSV at path)
/// or table (weighted table CSV at path, symmetrized and thresholded).
EdgeListGraph make_graph(const GraphSpec& spec, std::uint64_t seed);

/// Directed cycles use the analytic DFT basis when `analytic_cycle` is set;
/// everything else goes through the automatic decomposition.
GraphInstance make_instance(EdgeListGraph graph, ShiftKind kind, bool analytic_cycle = false);

/// "none" and "observation" / "signal" / "frequency".
NoiseModel make_noise(const std::string& kind, double sigma2);

/// first: leading K canonical frequencies; random: K distinct draws (sorted);
/// list: the configured indices.
Support make_support(const ExperimentConfig& config, Index nodes, Rng& rng);

// --- noiseless recovery sweep -----------------------------------------------

struct RecoverySweepOptions {
  Index graphs = 1000;
  Index min_nodes = 10;
  Index max_nodes = 30;
  Index min_bandwidth = 1;
  Index max_bandwidth = 5;
  double min_p = 0.15;
  double max_p = 0.25;
  ShiftKind shift = ShiftKind::Adjacency;
  std::uint64_t seed = 1;
  double tolerance = 1e-8;
};

struct RecoveryCase {
  Index graph = 0;
  Index nodes = 0;
  Index bandwidth = 0;
  double p = 0.0;
  Index node = 0;
  bool conditions = false;  ///< both recovery clauses hold
  bool success = false;     ///< relative error below tolerance
  double error = 0.0;
  double condition = 0.0;
};

struct RecoverySweepResult {
  std::vector<RecoveryCase> cases;
  Index conditions_passed = 0;
  Index successes = 0;             ///< among cases whose conditions pass
  Index unconditional_successes = 0;

  /// Success fraction over the cases where the clauses hold.
  double rate() const noexcept {
    return conditions_passed == 0 ? 0.0
                                  : static_cast<double>(successes) / static_cast<double>(conditions_passed);
  }
};

/// Every node of every graph samples a fresh K-bandlimited signal on the
/// leading canonical frequencies with the first K shifts and interpolates.
RecoverySweepResult recovery_sweep(const RecoverySweepOptions& options);

// --- recovery at one node ---------------------------------------------------

struct TrialRecord {
  Index trial = 0;
  double error = 0.0;  ///< ||x - xhat|| / ||x||
  bool success = false;
  std::string failure;  ///< error code name when the solve failed
};

struct RecoverRun {
  std::vector<TrialRecord> trials;
  Index successes = 0;
  Index failures = 0;
  double mean_squared_error = 0.0;  ///< mean ||x - xhat||^2 over solved trials
  double theoretical_mse = 0.0;     ///< trace(R_e); zero when noiseless
};

/// Planted signals at `node`: aggregation by repeated shifting, optional
/// noise, interpolation (square noiseless plans) or BLUE. Per-trial failures
/// are recorded, not thrown. Trial t draws from Rng::stream(seed, t).
RecoverRun recover_trials(const GraphInstance& instance, std::span<const Index> support,
                          Index node, const SelectionPlan& plan, const NoiseModel& model,
                          Index trials, std::uint64_t seed, double tolerance = 1e-8);

// --- unknown support ----------------------------------------------------------

struct SupportIdOptions {
  std::vector<ShiftKind> shifts{ShiftKind::Adjacency, ShiftKind::IdentityMinusAdjacency,
                                ShiftKind::HalfAdjacencySquared};
  std::vector<double> probabilities{0.15, 0.20, 0.25};
  Index nodes = 20;
  Index sparsity = 3;
  Index min_observations = 1;
  Index max_observations = 10;
  Index graphs = 50;   ///< graph realizations per probability
  Index signals = 1;   ///< signal realizations per graph
  bool every_node = false;  ///< all nodes, or one random node per signal
  std::string method = "l1";  ///< l0 | l1
  double tolerance = 1e-6;    ///< relative coefficient error counted as recovered
  std::uint64_t seed = 1;
  L1Options l1 = default_l1();

  static L1Options default_l1() {
    L1Options o;
    o.normalize_columns = true;
    return o;
  }
};

struct SupportIdPoint {
  ShiftKind shift = ShiftKind::Adjacency;
  double p = 0.0;
  Index observations = 0;
  Index trials = 0;
  Index successes = 0;
  double mean_coherence = 0.0;  ///< over trials with at least two rows

  double rate() const noexcept {
    return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
  }
};

/// Recovery rate against observation count (leading shifts 0..m-1). The same
/// graphs, signals and nodes are reused for every count and shift kind.
std::vector<SupportIdPoint> support_id_sweep(const SupportIdOptions& options);

// --- space-shift strategies --------------------------------------------------

enum class Strategy { Aggregation, Selection, Shift1, Shift2, Shift3, Mixed };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& name);
std::vector<Strategy> all_strategies();

/// K picks: Aggregation = shifts 0..K-1 at one node; Selection / ShiftL = shift
/// L at K distinct nodes; Mixed = shifts 0 and 1 at ceil(K/2) nodes.
ObservationPlan strategy_plan(Strategy s, Index nodes, Index bandwidth, Rng& rng);

struct SpaceShiftOptions {
  std::vector<Strategy> strategies = all_strategies();
  Index bandwidth = 4;
  Index trials = 50;
  double concentration = 0.95;  ///< in-band energy share of the two largest-|lambda| frequencies
  double out_of_band = 0.05;    ///< energy share of x outside the support
  double snr = 0.0;             ///< mean |x_i|^2 / sigma^2 of white observation noise; 0 disables
  std::uint64_t seed = 1;
};

struct StrategyResult {
  Strategy strategy = Strategy::Aggregation;
  std::vector<double> errors;  ///< ||x - xhat||^2 / ||x||^2 of solved trials, by trial
  Index failures = 0;
  double min_error = 0.0;
  double median_error = 0.0;
};

/// Approximately low-pass signals: most energy on the K largest-|lambda|
/// frequencies (canonical order), the rest spread over the other ones.
/// Each strategy observes x (plus optional white observation noise) and the
/// stacked BLUE reconstructs it as if it were K-bandlimited; the error is
/// ||x - xhat||^2 / ||x||^2 against the full signal.
std::vector<StrategyResult> spaceshift_strategies(const GraphInstance& instance,
                                                  const SpaceShiftOptions& options);

double median(std::vector<double> values);

}  // namespace aggsamp
