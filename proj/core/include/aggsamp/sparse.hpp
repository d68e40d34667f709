#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "aggsamp/sampling.hpp"

namespace aggsamp {

/// b = M xhat with M = C Psi diag(upsilon_i): the sensing system seen by one
/// node when the frequency support is unknown.
struct SensingSystem {
  CMatrix matrix;  ///< m x N
  CVector samples;
  Index node = 0;
  SelectionPlan plan = SelectionPlan::all(1);
};

SensingSystem sensing_system(const SpectralDecomposition& decomp, Index node,
                             const SelectionPlan& plan, const CVector& samples);

struct SparseSolution {
  Support support;       ///< ascending frequency indices
  CVector coefficients;  ///< length N, zero off the support
  double residual = 0.0;
};

/// Exhaustive minimum-cardinality search: supports of size 1..K in
/// lexicographic order, least squares on each, accept when the residual is
/// at most 1e-8 ||b||. Requires N <= 30 and K <= 5 (BudgetExceeded) and
/// throws Infeasible when nothing within K fits.
SparseSolution brute_force_l0(const SensingSystem& system, Index max_sparsity);

struct IdentifiabilityTolerances {
  double eigenvalue = 1e-8;  ///< relative to max |lambda| (or its stride power)
  double pattern = 1e-10;    ///< relative to ||upsilon_i||
  double spark_condition = 1e12;
};

struct IdentifiabilityClauses {
  bool pattern_nonzero = true;
  bool eigenvalues_nonzero = true;
  bool powers_distinct = true;

  bool ok() const noexcept { return pattern_nonzero && eigenvalues_nonzero && powers_distinct; }
};

struct IdentifiabilityReport {
  /// Clauses over every frequency.
  IdentifiabilityClauses strict;
  /// Clauses restricted to a declared support (when one was given).
  std::optional<IdentifiabilityClauses> on_support;
  /// Every 2K-column subset of M nonsingular; only evaluated for N <= 12.
  std::optional<bool> full_spark;

  bool certified() const noexcept { return strict.ok() && full_spark.value_or(true); }
};

/// Analytic uniqueness clauses for a 2K-row arithmetic plan plus, for small
/// graphs, the exhaustive full-spark certificate.
IdentifiabilityReport check_identifiability(const SpectralDecomposition& decomp, Index node,
                                            const SelectionPlan& plan, Index sparsity,
                                            std::span<const Index> support = {},
                                            const IdentifiabilityTolerances& tol = {});

/// True when every `size`-column subset of `m` has condition number at most
/// `max_condition`.
bool has_full_spark(const CMatrix& m, Index size, double max_condition = 1e12);

namespace l1 {
/// min ||x||_1 s.t. M x = b by ADMM basis pursuit, polished on the K largest
/// entries as it goes; needs the sparsity bound for the success test.
struct EqualityConstrained {
  Index sparsity = 1;
};
/// min ||W (M x - b)||^2 + gamma ||x||_1 at one gamma.
struct Penalized {
  double gamma = 0.0;
};
/// The penalized problem along a caller grid (warm-started, in order).
struct PenalizedPath {
  std::vector<double> gammas;
};
}  // namespace l1

using L1Mode = std::variant<l1::EqualityConstrained, l1::Penalized, l1::PenalizedPath>;

struct L1Options {
  double tolerance = 1e-9;          ///< successive-iterate change
  Index max_iterations = 100000;    ///< per penalty value
  Index path_points = 30;           ///< default grid length
  double path_ratio = 1e-4;         ///< gamma_min / gamma_max
  std::optional<CMatrix> weight;    ///< W = Rbar_w^{-1/2}; identity when unset
  /// Solve in column-normalized coordinates (weighted 1-norm).
  bool normalize_columns = false;
  /// Success test sparsity for the penalized modes (0 disables it).
  Index sparsity = 0;
  double residual_tolerance = 1e-10;  ///< relative to ||b|| for the polish
};

struct L1PathPoint {
  double gamma = 0.0;
  Index iterations = 0;
  bool converged = false;
  Index nonzeros = 0;
};

struct L1Result {
  CVector coefficients;      ///< polished when success, raw final iterate otherwise
  CVector raw_iterate;
  Support support;           ///< support of the polished solution
  bool success = false;      ///< polished ||x||_0 <= K and residual <= tol ||b||
  bool converged = false;    ///< last solve met the iterate-change tolerance
  double residual = 0.0;
  double gamma = 0.0;        ///< penalty of the accepted (or last) point
  std::vector<L1PathPoint> path;
};

/// 1-norm recovery with modulus shrinkage for complex coefficients: basis
/// pursuit for the constrained mode, accelerated proximal gradient for the
/// penalized ones. Rows are scaled to unit norm unless a weight is given. Success is decided by the support-restricted
/// least-squares polish, never by raw iterate sparsity. A single penalized
/// solve that exhausts its iteration budget throws NoConvergence.
L1Result l1_recover(const SensingSystem& system, const L1Mode& mode, const L1Options& options = {});

/// ||M^H W^H W b||_inf.
double gamma_max(const CMatrix& m, const CVector& b, const std::optional<CMatrix>& weight);

struct CoherenceReport {
  double mu = 0.0;
  Index sparsity_bound = 0;  ///< floor((1 + 1/mu) / 2), capped at N
};

/// Largest normalized inner product between distinct columns. Throws
/// ZeroColumn listing every vanishing column.
CoherenceReport coherence(const CMatrix& m);

}  // namespace aggsamp
