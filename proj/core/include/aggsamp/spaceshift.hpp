#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "aggsamp/noisy.hpp"

namespace aggsamp {

/// One observed entry of the shift matrix Z: shift `shift` (0-based) of the
/// signal seen at `node`.
struct Observation {
  Index node = 0;
  Index shift = 0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Ordered distinct (node, shift) picks out of an N x L grid. The stacked
/// vector is node-major: pick (i, l) sits at flat index i * L + l.
class ObservationPlan {
 public:
  ObservationPlan(Index nodes, Index shifts, std::vector<Observation> picks);

  /// Every shift 0..shifts-1 at one node.
  static ObservationPlan single_node(Index nodes, Index shifts, Index node);
  /// Shift 0 at each listed node.
  static ObservationPlan selection(Index nodes, Index shifts, const std::vector<Index>& picked);

  Index nodes() const noexcept { return nodes_; }
  Index shifts() const noexcept { return shifts_; }
  Index size() const noexcept { return static_cast<Index>(picks_.size()); }
  const std::vector<Observation>& picks() const noexcept { return picks_; }
  std::vector<Index> flat_indices() const;

 private:
  Index nodes_;
  Index shifts_;
  std::vector<Observation> picks_;
};

struct UpsilonBlocks {
  CMatrix full;     ///< N^2 x N, block i = diag(upsilon_i)
  CMatrix reduced;  ///< N K x K, block i = diag(upsilon_i on the support)
};

UpsilonBlocks build_upsilon(const SpectralDecomposition& decomp, std::span<const Index> support);

/// m x K: the row for pick (i, l) is row l of Psi_i.
CMatrix build_stacked_system(const SpectralDecomposition& decomp, std::span<const Index> support,
                             const ObservationPlan& plan);

/// Noise covariance of the picked stacked samples, R = scale * shape.
/// Custom models take an m x m covariance over the picks.
CMatrix stacked_noise_covariance(const SpectralDecomposition& decomp,
                                 std::span<const Index> support, const ObservationPlan& plan,
                                 const NoiseModel& model);

/// BLUE over the stacked system with the stacked noise covariance. `samples`
/// may be null for covariances only.
EstimationReport spaceshift_blue(const SpectralDecomposition& decomp,
                                 std::span<const Index> support, const ObservationPlan& plan,
                                 const NoiseModel& model, const CVector* samples);

/// Noise-free picked samples of x = V xhat.
CVector observe(const SpectralDecomposition& decomp, const CVector& frequency,
                const ObservationPlan& plan);

/// One noise draw on the picks through the model's generating mechanism.
CVector draw_stacked_noise(const SpectralDecomposition& decomp, std::span<const Index> support,
                           const ObservationPlan& plan, const NoiseModel& model, Rng& rng);

struct StructuredPlan {
  Index center = 0;
  Index depth = 0;           ///< L1
  Index neighbor_count = 0;  ///< N1

  Index row_count() const noexcept { return 1 + depth * (1 + neighbor_count); }
  Index rank_bound() const noexcept { return 1 + depth * neighbor_count; }
};

struct StructuredObservation {
  StructuredPlan structure;
  ObservationPlan plan;
  Index rank = 0;           ///< numerical rank of the induced system
  bool within_bound = true;
};

/// Shifts 0..L1 at the center and 0..L1-1 at each incoming neighbour. The
/// rank is taken on the full-support system (or `support` when given) with
/// threshold max(m, K) eps sigma_max. Throws IsolatedNode when the center
/// has no incoming neighbours and L1 > 0.
StructuredObservation structured_plan(const ShiftOperator& shift,
                                      const SpectralDecomposition& decomp, Index center,
                                      Index depth, std::span<const Index> support = {});

}  // namespace aggsamp
