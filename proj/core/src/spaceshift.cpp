#include "aggsamp/spaceshift.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aggsamp/errors.hpp"

namespace aggsamp {

namespace {

Support full_support(Index n) {
  Support all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  return all;
}

// Rows [lambda_k^l upsilon_i,k] over the columns `cols`, one per pick.
CMatrix pick_rows(const SpectralDecomposition& decomp, std::span<const Index> cols,
                  const ObservationPlan& plan) {
  if (plan.nodes() != decomp.size())
    throw Error(ErrorCode::DimensionMismatch, "observation plan is not over the node set");
  const CVector lambda = gather(decomp.eigenvalues(), cols);
  const CMatrix powers = vandermonde(lambda, plan.shifts());
  CMatrix out(plan.size(), static_cast<Index>(cols.size()));
  for (Index r = 0; r < plan.size(); ++r) {
    const Observation& o = plan.picks()[static_cast<std::size_t>(r)];
    for (std::size_t c = 0; c < cols.size(); ++c)
      out(r, static_cast<Index>(c)) =
          powers(o.shift, static_cast<Index>(c)) * decomp.eigenvectors()(o.node, cols[c]);
  }
  return out;
}

CVector standard_noise(Index n, bool real, Rng& rng) {
  CVector out(n);
  for (Index r = 0; r < n; ++r) out(r) = real ? cplx(rng.gaussian(), 0.0) : rng.complex_gaussian();
  return out;
}

}  // namespace

ObservationPlan::ObservationPlan(Index nodes, Index shifts, std::vector<Observation> picks)
    : nodes_(nodes), shifts_(shifts), picks_(std::move(picks)) {
  if (nodes < 1 || shifts < 1) throw Error(ErrorCode::InvalidArgument, "empty observation grid");
  if (picks_.empty()) throw Error(ErrorCode::InvalidArgument, "observation plan has no picks");
  for (const auto& o : picks_)
    if (o.node < 0 || o.node >= nodes || o.shift < 0 || o.shift >= shifts)
      throw Error(ErrorCode::IndexOutOfRange,
                  "pick (" + std::to_string(o.node) + ", " + std::to_string(o.shift) +
                      ") outside the grid");
  auto flat = flat_indices();
  std::sort(flat.begin(), flat.end());
  if (std::adjacent_find(flat.begin(), flat.end()) != flat.end())
    throw Error(ErrorCode::InvalidArgument, "observation plan repeats a pick");
}

ObservationPlan ObservationPlan::single_node(Index nodes, Index shifts, Index node) {
  std::vector<Observation> picks;
  for (Index l = 0; l < shifts; ++l) picks.push_back({node, l});
  return {nodes, shifts, std::move(picks)};
}

ObservationPlan ObservationPlan::selection(Index nodes, Index shifts,
                                           const std::vector<Index>& picked) {
  std::vector<Observation> picks;
  for (Index i : picked) picks.push_back({i, 0});
  return {nodes, shifts, std::move(picks)};
}

std::vector<Index> ObservationPlan::flat_indices() const {
  std::vector<Index> flat;
  flat.reserve(picks_.size());
  for (const auto& o : picks_) flat.push_back(o.node * shifts_ + o.shift);
  return flat;
}

UpsilonBlocks build_upsilon(const SpectralDecomposition& decomp, std::span<const Index> support) {
  const Index n = decomp.size();
  validate_support(support, n);
  const auto k = static_cast<Index>(support.size());
  UpsilonBlocks out{CMatrix::Zero(n * n, n), CMatrix::Zero(n * k, k)};
  for (Index i = 0; i < n; ++i) {
    const CVector upsilon = node_pattern(decomp, i);
    for (Index c = 0; c < n; ++c) out.full(i * n + c, c) = upsilon(c);
    for (Index c = 0; c < k; ++c) out.reduced(i * k + c, c) = upsilon(support[static_cast<std::size_t>(c)]);
  }
  return out;
}

CMatrix build_stacked_system(const SpectralDecomposition& decomp, std::span<const Index> support,
                             const ObservationPlan& plan) {
  validate_support(support, decomp.size());
  return pick_rows(decomp, support, plan);
}

CMatrix stacked_noise_covariance(const SpectralDecomposition& decomp,
                                 std::span<const Index> support, const ObservationPlan& plan,
                                 const NoiseModel& model) {
  model.validate();
  switch (model.kind) {
    case NoiseKind::ObservationWhite:
      return model.sigma2 * CMatrix::Identity(plan.size(), plan.size());
    case NoiseKind::SignalWhite: {
      const Support all = full_support(decomp.size());
      const CMatrix gain = pick_rows(decomp, all, plan) * decomp.inverse_eigenvectors();
      return hermitian_part(model.sigma2 * gain * gain.adjoint());
    }
    case NoiseKind::FrequencyWhite: {
      const CMatrix gain = build_stacked_system(decomp, support, plan);
      return hermitian_part(model.sigma2 * gain * gain.adjoint());
    }
    case NoiseKind::Custom:
      if (model.custom_covariance->rows() != plan.size())
        throw Error(ErrorCode::InvalidModel, "custom stacked covariance must be m x m");
      return *model.custom_covariance;
  }
  throw Error(ErrorCode::InvalidModel, "unknown noise kind");
}

EstimationReport spaceshift_blue(const SpectralDecomposition& decomp,
                                 std::span<const Index> support, const ObservationPlan& plan,
                                 const NoiseModel& model, const CVector* samples) {
  if (samples != nullptr && samples->size() != plan.size())
    throw Error(ErrorCode::DimensionMismatch, "one sample per pick expected");
  const CMatrix system = build_stacked_system(decomp, support, plan);
  model.validate();
  CMatrix shape;
  double scale = model.sigma2;
  if (model.kind == NoiseKind::Custom) {
    shape = stacked_noise_covariance(decomp, support, plan, model);
    scale = 1.0;
  } else {
    NoiseModel unit = model;
    unit.sigma2 = 1.0;
    shape = stacked_noise_covariance(decomp, support, plan, unit);
  }
  return estimate_from_system(system, shape, scale, decomp.basis(support), samples);
}

CVector observe(const SpectralDecomposition& decomp, const CVector& frequency,
                const ObservationPlan& plan) {
  if (frequency.size() != decomp.size())
    throw Error(ErrorCode::DimensionMismatch, "frequency vector length mismatch");
  return pick_rows(decomp, full_support(decomp.size()), plan) * frequency;
}

CVector draw_stacked_noise(const SpectralDecomposition& decomp, std::span<const Index> support,
                           const ObservationPlan& plan, const NoiseModel& model, Rng& rng) {
  model.validate();
  const bool real = decomp.is_real();
  const double sigma = std::sqrt(model.sigma2);
  switch (model.kind) {
    case NoiseKind::ObservationWhite:
      return sigma * standard_noise(plan.size(), real, rng);
    case NoiseKind::SignalWhite: {
      const CVector w = sigma * standard_noise(decomp.size(), real, rng);
      return observe(decomp, decomp.inverse_eigenvectors() * w, plan);
    }
    case NoiseKind::FrequencyWhite: {
      const CVector w_hat = sigma * standard_noise(static_cast<Index>(support.size()), real, rng);
      return build_stacked_system(decomp, support, plan) * w_hat;
    }
    case NoiseKind::Custom: {
      const CMatrix& cov = *model.custom_covariance;
      if (cov.rows() != plan.size())
        throw Error(ErrorCode::InvalidModel, "custom stacked covariance must be m x m");
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(cov));
      const RVector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
      const CMatrix factor = eig.eigenvectors() * root.cast<cplx>().asDiagonal();
      return factor * standard_noise(plan.size(), real && is_real(cov), rng);
    }
  }
  throw Error(ErrorCode::InvalidModel, "unknown noise kind");
}

StructuredObservation structured_plan(const ShiftOperator& shift,
                                      const SpectralDecomposition& decomp, Index center,
                                      Index depth, std::span<const Index> support) {
  const Index n = shift.size();
  if (decomp.size() != n) throw Error(ErrorCode::DimensionMismatch, "decomposition size mismatch");
  if (center < 0 || center >= n)
    throw Error(ErrorCode::IndexOutOfRange, "center " + std::to_string(center) + " outside the graph");
  if (depth < 0) throw Error(ErrorCode::InvalidArgument, "depth must be nonnegative");
  const std::vector<Index> neighbors = shift.incoming_neighbors(center);
  if (neighbors.empty() && depth > 0)
    throw Error(ErrorCode::IsolatedNode,
                "node " + std::to_string(center) + " has no incoming neighbours to shift through");

  std::vector<Observation> picks;
  for (Index l = 0; l <= depth; ++l) picks.push_back({center, l});
  for (Index j : neighbors)
    for (Index l = 0; l < depth; ++l) picks.push_back({j, l});

  StructuredObservation out{
      {center, depth, static_cast<Index>(neighbors.size())},
      ObservationPlan(n, std::max(depth + 1, n), std::move(picks)),
      0,
      true};
  const Support all = full_support(n);
  const std::span<const Index> cols = support.empty() ? std::span<const Index>(all) : support;
  out.rank = numerical_rank(build_stacked_system(decomp, cols, out.plan));
  out.within_bound = out.rank <= out.structure.rank_bound();
  return out;
}

}  // namespace aggsamp
