#include "aggsamp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aggsamp/errors.hpp"

namespace aggsamp {

namespace {

std::optional<ArithmeticPattern> detect_pattern(const std::vector<Index>& picks) {
  if (picks.empty()) return std::nullopt;
  if (picks.size() == 1) return ArithmeticPattern{picks[0], 1, 1};
  const Index stride = picks[1] - picks[0];
  if (stride < 1) return std::nullopt;
  for (std::size_t r = 2; r < picks.size(); ++r)
    if (picks[r] - picks[r - 1] != stride) return std::nullopt;
  return ArithmeticPattern{picks[0], stride, static_cast<Index>(picks.size())};
}

cplx int_pow(cplx base, Index exponent) {
  cplx result(1.0);
  for (Index e = 0; e < exponent; ++e) result *= base;
  return result;
}

void check_node(Index node, Index n) {
  if (node < 0 || node >= n)
    throw Error(ErrorCode::IndexOutOfRange,
                "node " + std::to_string(node) + " outside [0, " + std::to_string(n) + ")");
}

}  // namespace

SelectionPlan SelectionPlan::from_picks(Index total, std::vector<Index> picks) {
  if (total < 1) throw Error(ErrorCode::InvalidArgument, "selection over an empty vector");
  std::vector<Index> sorted = picks;
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty() && (sorted.front() < 0 || sorted.back() >= total))
    throw Error(ErrorCode::IndexOutOfRange, "selection index outside [0, total)");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(ErrorCode::InvalidArgument, "selection repeats a row");
  auto pattern = detect_pattern(picks);
  return SelectionPlan(total, std::move(picks), pattern);
}

SelectionPlan SelectionPlan::structured(Index total, Index first, Index stride, Index count) {
  if (count < 1 || stride < 1 || first < 0)
    throw Error(ErrorCode::InvalidArgument, "structured plan needs count, stride >= 1");
  if (first + (count - 1) * stride >= total)
    throw Error(ErrorCode::IndexOutOfRange, "structured plan runs past the last row");
  std::vector<Index> picks(static_cast<std::size_t>(count));
  for (Index r = 0; r < count; ++r) picks[static_cast<std::size_t>(r)] = first + r * stride;
  return SelectionPlan(total, std::move(picks), ArithmeticPattern{first, count == 1 ? 1 : stride, count});
}

SelectionPlan SelectionPlan::leading(Index total, Index count) {
  return structured(total, 0, 1, count);
}

SelectionPlan SelectionPlan::all(Index total) { return structured(total, 0, 1, total); }

AggregationSequence aggregate(const ShiftOperator& shift, const CVector& signal, Index node,
                              Index length) {
  const Index n = shift.size();
  if (signal.size() != n) throw Error(ErrorCode::DimensionMismatch, "signal length mismatch");
  check_node(node, n);
  if (length < 1) throw Error(ErrorCode::InvalidArgument, "aggregation length must be >= 1");
  AggregationSequence seq{node, CVector(length)};
  CVector shifted = signal;
  seq.values(0) = shifted(node);
  for (Index l = 1; l < length; ++l) {
    shifted = shift.matrix() * shifted;
    seq.values(l) = shifted(node);
  }
  return seq;
}

AggregationSequence aggregate_spectral(const SpectralDecomposition& decomp,
                                       const CVector& frequency, Index node, Index length) {
  if (frequency.size() != decomp.size())
    throw Error(ErrorCode::DimensionMismatch, "frequency vector length mismatch");
  const CVector upsilon = node_pattern(decomp, node);
  const CMatrix psi = build_psi(decomp, length);
  return {node, psi * upsilon.cwiseProduct(frequency)};
}

CMatrix build_psi_i(const SpectralDecomposition& decomp, Index node,
                    std::span<const Index> support, Index rows) {
  validate_support(support, decomp.size());
  const CVector upsilon = node_pattern(decomp, node);
  CMatrix psi_i = vandermonde(gather(decomp.eigenvalues(), support), rows);
  for (std::size_t c = 0; c < support.size(); ++c)
    psi_i.col(static_cast<Index>(c)) *= upsilon(support[c]);
  return psi_i;
}

RecoveryConditions check_recovery_conditions(const SpectralDecomposition& decomp,
                                             std::span<const Index> support, Index node,
                                             const ConditionTolerances& tol) {
  validate_support(support, decomp.size());
  check_node(node, decomp.size());
  RecoveryConditions report;
  const CVector& lambda = decomp.eigenvalues();
  const double lambda_scale = lambda.cwiseAbs().maxCoeff();
  for (std::size_t a = 0; a < support.size(); ++a)
    for (std::size_t b = a + 1; b < support.size(); ++b)
      if (!(std::abs(lambda(support[a]) - lambda(support[b])) > tol.eigenvalue * lambda_scale)) {
        report.distinct_eigenvalues = false;
        report.coincident_pairs.emplace_back(static_cast<Index>(a), static_cast<Index>(b));
      }
  const CVector upsilon = node_pattern(decomp, node);
  const double pattern_scale = upsilon.norm();
  for (Index k : support)
    if (!(std::abs(upsilon(k)) > tol.pattern * pattern_scale)) {
      report.nonzero_pattern = false;
      report.vanishing_entries.push_back(k);
    }
  return report;
}

Interpolation selection_interpolate(const SpectralDecomposition& decomp,
                                    std::span<const Index> support, const SelectionPlan& plan,
                                    const CVector& samples) {
  validate_support(support, decomp.size());
  if (plan.total() != decomp.size())
    throw Error(ErrorCode::DimensionMismatch, "selection plan is not over the node set");
  if (plan.size() != static_cast<Index>(support.size()) || samples.size() != plan.size())
    throw Error(ErrorCode::DimensionMismatch, "need exactly K samples for K frequencies");
  const CMatrix v_k = decomp.basis(support);
  const CMatrix system = gather_rows(v_k, plan.picks());
  Interpolation out;
  out.condition = condition_number(system);
  if (!std::isfinite(out.condition) || out.condition > kConditionGate)
    throw Error(ErrorCode::SingularSystem,
                "cond(C V_K) = " + std::to_string(out.condition) +
                    ": this node subset cannot recover the support");
  out.coefficients = system.partialPivLu().solve(samples);
  out.coefficients_factorized = out.coefficients;
  out.signal = v_k * out.coefficients;
  return out;
}

CVector aggregation_sample(const AggregationSequence& seq, const SelectionPlan& plan) {
  if (plan.total() != seq.length())
    throw Error(ErrorCode::IndexOutOfRange, "plan length differs from the sequence length");
  return gather(seq.values, plan.picks());
}

CVector solve_vandermonde(const CVector& nodes, CVector rhs) {
  const Index n = nodes.size();
  if (rhs.size() != n) throw Error(ErrorCode::DimensionMismatch, "Vandermonde rhs size");
  if (n == 0) return rhs;
  const Index last = n - 1;
  for (Index k = 0; k < last; ++k)
    for (Index i = last; i > k; --i) rhs(i) -= nodes(k) * rhs(i - 1);
  for (Index k = last - 1; k >= 0; --k) {
    for (Index i = k + 1; i <= last; ++i) {
      const cplx gap = nodes(i) - nodes(i - k - 1);
      if (gap == cplx(0.0))
        throw Error(ErrorCode::SingularSystem, "Vandermonde nodes are not distinct");
      rhs(i) /= gap;
    }
    for (Index i = k; i < last; ++i) rhs(i) -= rhs(i + 1);
  }
  return rhs;
}

Interpolation aggregation_interpolate(const SpectralDecomposition& decomp,
                                      std::span<const Index> support, Index node,
                                      const SelectionPlan& plan, const CVector& samples,
                                      const InterpolationOptions& options) {
  validate_support(support, decomp.size());
  check_node(node, decomp.size());
  const auto k = static_cast<Index>(support.size());
  if (plan.size() != k || samples.size() != k)
    throw Error(ErrorCode::DimensionMismatch, "need exactly K samples for K frequencies");

  Interpolation out;
  out.conditions = check_recovery_conditions(decomp, support, node, options.tolerances);
  if (options.strict && !out.conditions.ok()) {
    throw Error(ErrorCode::ConditionsViolated,
                !out.conditions.distinct_eigenvalues
                    ? "clause i: support eigenvalues are not distinct"
                    : "clause ii: node does not participate in every support frequency");
  }

  const CMatrix system = gather_rows(build_psi_i(decomp, node, support, plan.total()), plan.picks());
  out.condition = condition_number(system);
  if (!std::isfinite(out.condition) || out.condition > kConditionGate)
    throw Error(ErrorCode::SingularSystem,
                "cond(C Psi_i) = " + std::to_string(out.condition) + " exceeds 1e12");
  out.coefficients = system.partialPivLu().solve(samples);

  // Factorized route: (C Psi E_K)^-1 first, then the diagonal of upsilon.
  // For an arithmetic plan, row r of C Psi E_K is lambda^(first + r*stride),
  // i.e. diag-scaled Vandermonde in the nodes lambda^stride.
  const CVector lambda_k = gather(decomp.eigenvalues(), support);
  const auto& pattern = plan.pattern();
  const bool nonzero = (lambda_k.array() != cplx(0.0)).all();
  CVector u;
  if (pattern && (pattern->first == 0 || nonzero)) {
    CVector nodes(k);
    for (Index c = 0; c < k; ++c) nodes(c) = int_pow(lambda_k(c), pattern->stride);
    u = solve_vandermonde(nodes, samples);
    for (Index c = 0; c < k; ++c) u(c) /= int_pow(lambda_k(c), pattern->first);
  } else {
    const CMatrix vander = gather_rows(vandermonde(lambda_k, plan.total()), plan.picks());
    u = vander.partialPivLu().solve(samples);
  }
  const CVector upsilon = node_pattern(decomp, node);
  out.coefficients_factorized.resize(k);
  for (Index c = 0; c < k; ++c)
    out.coefficients_factorized(c) = u(c) / upsilon(support[static_cast<std::size_t>(c)]);

  out.signal = decomp.basis(support) * out.coefficients;
  return out;
}

std::vector<SelectionPlan> admissible_selections(Index total, Index count) {
  if (count < 1 || count > total)
    throw Error(ErrorCode::InvalidArgument, "admissible selections need 1 <= K <= L");
  std::vector<SelectionPlan> plans;
  const Index max_stride = count == 1 ? 1 : total / count;
  for (Index stride = 1; stride <= max_stride; ++stride)
    for (Index first = 0; first + (count - 1) * stride < total; ++first)
      plans.push_back(SelectionPlan::structured(total, first, stride, count));
  return plans;
}

}  // namespace aggsamp
