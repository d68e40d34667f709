#pragma once

#include <optional>
#include <vector>

#include "aggsamp/spectral.hpp"

namespace aggsamp {

/// Arithmetic-progression rows first, first+stride, ..., first+(count-1)*stride
/// (0-based). This is the admissible family C_K(n0, N0) with n0 = first + 1.
struct ArithmeticPattern {
  Index first = 0;
  Index stride = 1;
  Index count = 0;

  friend bool operator==(const ArithmeticPattern&, const ArithmeticPattern&) = default;
};

/// Binary selection matrix stored as the ordered list of rows it keeps.
class SelectionPlan {
 public:
  /// Validates distinctness and range; records the arithmetic pattern when the
  /// picks form one.
  static SelectionPlan from_picks(Index total, std::vector<Index> picks);
  static SelectionPlan structured(Index total, Index first, Index stride, Index count);
  /// The first `count` rows (E_K^T).
  static SelectionPlan leading(Index total, Index count);
  static SelectionPlan all(Index total);

  Index total() const noexcept { return total_; }
  Index size() const noexcept { return static_cast<Index>(picks_.size()); }
  const std::vector<Index>& picks() const noexcept { return picks_; }
  const std::optional<ArithmeticPattern>& pattern() const noexcept { return pattern_; }

  friend bool operator==(const SelectionPlan&, const SelectionPlan&) = default;

 private:
  SelectionPlan(Index total, std::vector<Index> picks, std::optional<ArithmeticPattern> p)
      : total_(total), picks_(std::move(picks)), pattern_(p) {}

  Index total_ = 0;
  std::vector<Index> picks_;
  std::optional<ArithmeticPattern> pattern_;
};

/// y_i: entry l holds [S^l x]_i for l = 0..length-1.
struct AggregationSequence {
  Index node = 0;
  CVector values;

  Index length() const noexcept { return values.size(); }
};

/// L-1 successive products y <- S y, recording entry `node` each time.
AggregationSequence aggregate(const ShiftOperator& shift, const CVector& signal, Index node,
                              Index length);

/// Psi(length rows) * diag(upsilon_node) * xhat, with xhat the full length-N
/// frequency vector.
AggregationSequence aggregate_spectral(const SpectralDecomposition& decomp,
                                       const CVector& frequency, Index node, Index length);

/// Psi * diag(upsilon_node) * E_K: the L x K node-local sensing matrix.
CMatrix build_psi_i(const SpectralDecomposition& decomp, Index node,
                    std::span<const Index> support, Index rows);

struct RecoveryConditions {
  bool distinct_eigenvalues = true;
  bool nonzero_pattern = true;
  /// Support positions (not frequency indices) of coinciding eigenvalue pairs.
  std::vector<std::pair<Index, Index>> coincident_pairs;
  /// Frequency indices k in the support where |[upsilon_i]_k| is negligible.
  std::vector<Index> vanishing_entries;

  bool ok() const noexcept { return distinct_eigenvalues && nonzero_pattern; }
};

struct ConditionTolerances {
  double eigenvalue = 1e-8;  ///< relative to max |lambda|
  double pattern = 1e-10;    ///< relative to ||upsilon_i||
};

/// Checks the two recovery clauses for aggregation sampling at `node`:
/// distinct eigenvalues on the support, nonzero node participation.
RecoveryConditions check_recovery_conditions(const SpectralDecomposition& decomp,
                                             std::span<const Index> support, Index node,
                                             const ConditionTolerances& tol = {});

struct Interpolation {
  CVector signal;                   ///< x = V_K xhat_K
  CVector coefficients;             ///< xhat_K from the direct solve
  CVector coefficients_factorized;  ///< xhat_K via diag^-1 and Vandermonde^-1
  double condition = 1.0;           ///< cond of the K x K system
  RecoveryConditions conditions;
};

struct InterpolationOptions {
  /// Raise ConditionsViolated instead of proceeding when a clause fails.
  bool strict = false;
  ConditionTolerances tolerances{};
};

/// x = V_K (C V_K)^-1 xbar. Throws SingularSystem when cond(C V_K) > 1e12.
Interpolation selection_interpolate(const SpectralDecomposition& decomp,
                                    std::span<const Index> support, const SelectionPlan& plan,
                                    const CVector& samples);

/// Picks the plan's entries of y_i in order.
CVector aggregation_sample(const AggregationSequence& seq, const SelectionPlan& plan);

/// x = V_K (C Psi_i)^-1 ybar, solved directly and through the factorization
/// V_K (E_K^T diag(upsilon_i) E_K)^-1 (C Psi E_K)^-1. Structured plans use a
/// Bjorck-Pereyra Vandermonde solve for the last factor.
Interpolation aggregation_interpolate(const SpectralDecomposition& decomp,
                                      std::span<const Index> support, Index node,
                                      const SelectionPlan& plan, const CVector& samples,
                                      const InterpolationOptions& options = {});

/// Solves sum_k nodes_k^r z_k = rhs_r (r = 0..n-1) for distinct nodes in
/// O(n^2) without forming the matrix.
CVector solve_vandermonde(const CVector& nodes, CVector rhs);

/// Every C_K(n0, N0) over `total` rows with 1 <= N0 <= total/K and
/// n0 + (K-1) N0 <= total, ordered by (N0, n0). For K = 1 the stride is
/// irrelevant and only N0 = 1 is emitted.
std::vector<SelectionPlan> admissible_selections(Index total, Index count);

}  // namespace aggsamp
