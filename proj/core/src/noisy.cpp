#include "aggsamp/noisy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "aggsamp/errors.hpp"

namespace aggsamp {

namespace {

constexpr double kTieTol = 1e-10;

// Factors the BLUE once so repeated samples reuse it. Square systems use LU
// on C Psi_i directly; taller ones whiten with the Cholesky factor of the
// noise shape and solve by QR. When the shape is known as F F^H, square
// systems propagate F instead: (C Psi_i)^-1 F stays accurate where
// inv * shape * inv^H loses cond^2 digits.
class BlueSolver {
 public:
  BlueSolver(const CMatrix& system, const CMatrix& shape, const CMatrix* factor = nullptr)
      : k_(system.cols()) {
    const Index m = system.rows();
    if (shape.rows() != m || shape.cols() != m)
      throw Error(ErrorCode::DimensionMismatch, "noise covariance does not match the samples");
    if (m < k_)
      throw Error(ErrorCode::DimensionMismatch,
                  "need at least K samples (" + std::to_string(m) + " < " + std::to_string(k_) + ")");
    Eigen::LLT<CMatrix> llt(hermitian_part(shape));
    if (llt.info() != Eigen::Success || (llt.matrixL().toDenseMatrix().diagonal().real().array() <= 0.0).any())
      throw Error(ErrorCode::SingularNoiseCovariance, "reduced noise covariance is not invertible");
    square_ = (m == k_);
    if (square_) {
      condition_ = condition_number(system);
      if (!std::isfinite(condition_) || condition_ > kConditionGate)
        throw Error(ErrorCode::SingularNormalEquations,
                    "cond(C Psi_i) = " + std::to_string(condition_) + " exceeds 1e12");
      lu_ = system.partialPivLu();
      if (factor != nullptr) {
        const CMatrix h = lu_.solve(*factor);
        covariance_ = hermitian_part(h * h.adjoint());
      } else {
        const CMatrix inv = lu_.inverse();
        covariance_ = hermitian_part(inv * shape * inv.adjoint());
      }
      return;
    }
    lower_ = llt.matrixL().toDenseMatrix();
    const double whitening_cond = condition_number(lower_);
    if (!std::isfinite(whitening_cond) || whitening_cond > kConditionGate)
      throw Error(ErrorCode::SingularNoiseCovariance,
                  "noise covariance factor condition " + std::to_string(whitening_cond));
    const CMatrix whitened = lower_.triangularView<Eigen::Lower>().solve(system);
    condition_ = condition_number(whitened);
    if (!std::isfinite(condition_) || condition_ > kConditionGate)
      throw Error(ErrorCode::SingularNormalEquations,
                  "whitened system condition " + std::to_string(condition_) + " exceeds 1e12");
    qr_ = whitened.householderQr();
    const CMatrix r = qr_.matrixQR().topRows(k_).triangularView<Eigen::Upper>();
    const CMatrix r_inv = r.triangularView<Eigen::Upper>().solve(CMatrix::Identity(k_, k_));
    covariance_ = hermitian_part(r_inv * r_inv.adjoint());
  }

  CVector solve(const CVector& samples) const {
    if (square_) return lu_.solve(samples);
    const CVector white = lower_.triangularView<Eigen::Lower>().solve(samples);
    const CVector qtb = qr_.householderQ().adjoint() * white;
    return qr_.matrixQR().topRows(k_).triangularView<Eigen::Upper>().solve(qtb.head(k_));
  }

  /// Rhat_e for unit noise scale.
  const CMatrix& covariance() const noexcept { return covariance_; }
  double condition() const noexcept { return condition_; }

 private:
  Index k_;
  bool square_ = false;
  double condition_ = 1.0;
  Eigen::PartialPivLU<CMatrix> lu_;
  CMatrix lower_;
  Eigen::HouseholderQR<CMatrix> qr_;
  CMatrix covariance_;
};

// Noise covariance with unit power, plus its scale: R = scale * shape. For
// the white models shape = factor * factor^H over all L rows.
struct ShapedCovariance {
  CMatrix shape;
  double scale = 1.0;
  std::optional<CMatrix> factor;

  CMatrix reduced_factor(const SelectionPlan& plan) const { return gather_rows(*factor, plan.picks()); }
};

CMatrix noise_factor(NoiseKind kind, const SpectralDecomposition& decomp, Index node,
                     std::span<const Index> support, Index rows) {
  switch (kind) {
    case NoiseKind::ObservationWhite:
      return CMatrix::Identity(rows, rows);
    case NoiseKind::SignalWhite:
      return build_psi(decomp, rows) * node_pattern(decomp, node).asDiagonal() * decomp.inverse_eigenvectors();
    case NoiseKind::FrequencyWhite:
      return build_psi_i(decomp, node, support, rows);
    case NoiseKind::Custom:
      break;
  }
  throw Error(ErrorCode::InvalidModel, "custom noise has no generating factor");
}

ShapedCovariance shaped_covariance(const NoiseModel& model, const SpectralDecomposition& decomp,
                                   Index node, std::span<const Index> support, Index rows) {
  model.validate();
  if (model.kind == NoiseKind::Custom) {
    if (model.custom_covariance->rows() != rows)
      throw Error(ErrorCode::InvalidModel, "custom covariance must be L x L");
    return {*model.custom_covariance, 1.0, std::nullopt};
  }
  CMatrix f = noise_factor(model.kind, decomp, node, support, rows);
  CMatrix shape = hermitian_part(f * f.adjoint());
  return {std::move(shape), model.sigma2, std::move(f)};
}

CVector standard_noise(Index n, bool real, Rng& rng) {
  CVector out(n);
  for (Index r = 0; r < n; ++r) out(r) = real ? cplx(rng.gaussian(), 0.0) : rng.complex_gaussian();
  return out;
}

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kTieTol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

void NoiseModel::validate() const {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
    throw Error(ErrorCode::InvalidModel, "noise power must be finite and nonnegative");
  if (kind != NoiseKind::Custom) return;
  if (!custom_covariance)
    throw Error(ErrorCode::InvalidModel, "custom noise model without a covariance");
  const CMatrix& c = *custom_covariance;
  if (c.rows() != c.cols() || c.rows() == 0)
    throw Error(ErrorCode::InvalidModel, "custom covariance must be square");
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if ((c - c.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(ErrorCode::InvalidModel, "custom covariance is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(c), Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10)
    throw Error(ErrorCode::InvalidModel, "custom covariance is not positive semidefinite");
}

CMatrix noise_covariance(const NoiseModel& model, const SpectralDecomposition& decomp, Index node,
                         std::span<const Index> support, Index rows) {
  model.validate();
  switch (model.kind) {
    case NoiseKind::ObservationWhite:
      return model.sigma2 * CMatrix::Identity(rows, rows);
    case NoiseKind::SignalWhite:
    case NoiseKind::FrequencyWhite: {
      const CMatrix f = noise_factor(model.kind, decomp, node, support, rows);
      return hermitian_part(model.sigma2 * f * f.adjoint());
    }
    case NoiseKind::Custom:
      if (model.custom_covariance->rows() != rows)
        throw Error(ErrorCode::InvalidModel, "custom covariance must be L x L");
      return *model.custom_covariance;
  }
  throw Error(ErrorCode::InvalidModel, "unknown noise kind");
}

CMatrix reduce_covariance(const CMatrix& full, const SelectionPlan& plan) {
  if (full.rows() != plan.total())
    throw Error(ErrorCode::DimensionMismatch, "covariance size differs from the plan length");
  return gather_cols(gather_rows(full, plan.picks()), plan.picks());
}

CVector blue_estimate(const CMatrix& psi_i, const SelectionPlan& plan, const CMatrix& reduced_cov,
                      const CVector& samples) {
  if (psi_i.rows() != plan.total() || samples.size() != plan.size())
    throw Error(ErrorCode::DimensionMismatch, "plan, samples and Psi_i disagree");
  const CMatrix system = gather_rows(psi_i, plan.picks());
  const Index m = system.rows();
  const Index k = system.cols();
  if (m < k) throw Error(ErrorCode::DimensionMismatch, "need at least K samples");
  Eigen::LLT<CMatrix> llt(hermitian_part(reduced_cov));
  if (reduced_cov.rows() != m || llt.info() != Eigen::Success)
    throw Error(ErrorCode::SingularNoiseCovariance, "reduced noise covariance is not invertible");
  const CMatrix lower = llt.matrixL();
  if (condition_number(lower) > kConditionGate || (lower.diagonal().real().array() <= 0.0).any())
    throw Error(ErrorCode::SingularNoiseCovariance, "reduced noise covariance is ill-conditioned");
  const CMatrix whitened = lower.triangularView<Eigen::Lower>().solve(system);
  const double cond = condition_number(whitened);
  if (!std::isfinite(cond) || cond > kConditionGate)
    throw Error(ErrorCode::SingularNormalEquations, "BLUE normal equations are singular");
  const CVector white = lower.triangularView<Eigen::Lower>().solve(samples);
  return whitened.householderQr().solve(white);
}

CVector square_estimate(const CMatrix& psi_i, const SelectionPlan& plan, const CVector& samples) {
  const CMatrix system = gather_rows(psi_i, plan.picks());
  if (system.rows() != system.cols() || samples.size() != system.rows())
    throw Error(ErrorCode::DimensionMismatch, "square estimate needs exactly K samples");
  const double cond = condition_number(system);
  if (!std::isfinite(cond) || cond > kConditionGate)
    throw Error(ErrorCode::SingularNormalEquations, "C Psi_i is singular");
  return system.partialPivLu().solve(samples);
}

ErrorCovariances error_covariances(const CMatrix& psi_i, const SelectionPlan& plan,
                                   const CMatrix& reduced_cov, const CMatrix& basis) {
  if (psi_i.rows() != plan.total())
    throw Error(ErrorCode::DimensionMismatch, "Psi_i rows differ from the plan length");
  if (basis.cols() != psi_i.cols())
    throw Error(ErrorCode::DimensionMismatch, "V_K columns differ from Psi_i columns");
  const BlueSolver solver(gather_rows(psi_i, plan.picks()), reduced_cov);
  ErrorCovariances out;
  out.frequency = solver.covariance();
  out.time = hermitian_part(basis * out.frequency * basis.adjoint());
  return out;
}

double metric_value(const ErrorMetrics& m, Metric which) noexcept {
  switch (which) {
    case Metric::E1: return m.e1;
    case Metric::E2: return m.e2;
    case Metric::E3: return m.e3;
    case Metric::E4: return m.e4;
  }
  return m.e1;
}

ErrorMetrics error_metrics(const CMatrix& freq_cov, const CMatrix& time_cov) {
  const CMatrix freq = hermitian_part(freq_cov);
  Eigen::LLT<CMatrix> llt(freq);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NotPositiveDefinite, "frequency error covariance is not positive definite");
  const CMatrix lower = llt.matrixL();
  const RVector diag = lower.diagonal().real();
  if ((diag.array() <= 0.0).any())
    throw Error(ErrorCode::NotPositiveDefinite, "frequency error covariance is singular");
  ErrorMetrics m;
  m.e1 = time_cov.trace().real();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(time_cov), Eigen::EigenvaluesOnly);
  m.e2 = std::max(0.0, eig.eigenvalues().maxCoeff());
  m.e3 = 2.0 * diag.array().log().sum();
  const CMatrix inv = llt.solve(CMatrix::Identity(freq.rows(), freq.cols()));
  m.e4 = 1.0 / inv.trace().real();
  return m;
}

namespace {

EstimationReport report_from(const BlueSolver& solver, double scale, const CMatrix& basis,
                             const CVector* samples) {
  EstimationReport report;
  report.condition = solver.condition();
  report.cov_frequency = scale * solver.covariance();
  report.cov_time = hermitian_part(basis * report.cov_frequency * basis.adjoint());
  if (scale > 0.0) {
    report.metrics = error_metrics(report.cov_frequency, report.cov_time);
  } else {
    report.metrics = {0.0, 0.0, -std::numeric_limits<double>::infinity(), 0.0};
  }
  if (samples != nullptr) {
    report.estimate_frequency = solver.solve(*samples);
    report.estimate_time = basis * report.estimate_frequency;
  }
  return report;
}

EstimationReport report_at_node(const SpectralDecomposition& decomp, std::span<const Index> support,
                                Index node, const SelectionPlan& plan, const NoiseModel& model,
                                const CVector* samples) {
  const CMatrix psi_i = build_psi_i(decomp, node, support, plan.total());
  const ShapedCovariance cov = shaped_covariance(model, decomp, node, support, plan.total());
  const CMatrix factor = cov.factor ? cov.reduced_factor(plan) : CMatrix();
  const BlueSolver solver(gather_rows(psi_i, plan.picks()), reduce_covariance(cov.shape, plan),
                          cov.factor ? &factor : nullptr);
  return report_from(solver, cov.scale, decomp.basis(support), samples);
}

}  // namespace

EstimationReport estimate_from_system(const CMatrix& system, const CMatrix& shape, double scale,
                                      const CMatrix& basis, const CVector* samples) {
  return report_from(BlueSolver(system, shape), scale, basis, samples);
}

EstimationReport estimate(const SpectralDecomposition& decomp, std::span<const Index> support,
                          Index node, const SelectionPlan& plan, const NoiseModel& model,
                          const CVector& samples) {
  if (samples.size() != plan.size())
    throw Error(ErrorCode::DimensionMismatch, "one sample per picked row expected");
  return report_at_node(decomp, support, node, plan, model, &samples);
}

EstimationReport analyze(const SpectralDecomposition& decomp, std::span<const Index> support,
                         Index node, const SelectionPlan& plan, const NoiseModel& model) {
  return report_at_node(decomp, support, node, plan, model, nullptr);
}

double closed_form_node_score(const SpectralDecomposition& decomp, std::span<const Index> support,
                              Index node, const ArithmeticPattern& pattern) {
  validate_support(support, decomp.size());
  const CVector upsilon = node_pattern(decomp, node);
  double score = 0.0;
  for (Index k : support) {
    const double ratio = std::norm(decomp.eigenvalues()(k));  // |lambda_k|^2
    const double step = std::pow(ratio, static_cast<double>(pattern.stride));
    double energy = 0.0;
    if (std::abs(1.0 - step) > 1e-12) {
      energy = (std::pow(ratio, static_cast<double>(pattern.first)) -
                std::pow(ratio, static_cast<double>(pattern.first + pattern.stride * pattern.count))) /
               (1.0 - step);
    } else {
      for (Index m = 0; m < pattern.count; ++m)
        energy += std::pow(ratio, static_cast<double>(pattern.first + m * pattern.stride));
    }
    score += std::norm(upsilon(k)) * energy;
  }
  return score;
}

NodeRanking select_sampling_node(const SpectralDecomposition& decomp,
                                 std::span<const Index> support, const SelectionPlan& plan,
                                 const NoiseModel& model, RankingMethod method, Metric metric) {
  validate_support(support, decomp.size());
  if (method == RankingMethod::ClosedForm) {
    if (model.kind != NoiseKind::ObservationWhite)
      throw Error(ErrorCode::InvalidModel, "closed-form ranking holds for white observation noise only");
    if (!plan.pattern())
      throw Error(ErrorCode::InvalidArgument, "closed-form ranking needs an arithmetic plan");
  }
  const bool higher_is_better = method == RankingMethod::ClosedForm;
  NodeRanking out;
  for (Index node = 0; node < decomp.size(); ++node) {
    NodeScore entry;
    entry.node = node;
    try {
      entry.metrics = analyze(decomp, support, node, plan, model).metrics;
    } catch (const Error& e) {
      if (!is_numerical(e.code())) throw;
      entry.feasible = false;
    }
    if (higher_is_better) {
      entry.score = closed_form_node_score(decomp, support, node, *plan.pattern());
    } else {
      entry.score = entry.feasible ? metric_value(entry.metrics, metric)
                                   : std::numeric_limits<double>::infinity();
    }
    out.ranked.push_back(entry);
  }
  std::stable_sort(out.ranked.begin(), out.ranked.end(), [&](const NodeScore& a, const NodeScore& b) {
    if (a.feasible != b.feasible) return a.feasible;
    return higher_is_better ? a.score > b.score : a.score < b.score;
  });
  out.all_tied = true;
  for (const auto& entry : out.ranked)
    if (entry.feasible && !nearly_equal(entry.score, out.ranked.front().score)) out.all_tied = false;
  return out;
}

OffsetChoice select_offset(const SpectralDecomposition& decomp, std::span<const Index> support,
                           Index stride, Index max_shifts, const NoiseModel& model) {
  validate_support(support, decomp.size());
  if (model.kind != NoiseKind::ObservationWhite)
    throw Error(ErrorCode::InvalidModel, "offset rule is derived for white observation noise only");
  if (stride < 1) throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");
  const auto k = static_cast<Index>(support.size());
  OffsetChoice out;
  out.max_first = max_shifts - 1 - (k - 1) * stride;
  if (out.max_first < 0)
    throw Error(ErrorCode::InvalidArgument, "max_shifts too small for K samples at this stride");
  for (Index idx : support) out.product *= std::norm(decomp.eigenvalues()(idx));
  out.first = out.product <= 1.0 ? 0 : out.max_first;
  return out;
}

CVector draw_noise(const SpectralDecomposition& decomp, std::span<const Index> support,
                   Index node, const SelectionPlan& plan, const NoiseModel& model, Rng& rng) {
  model.validate();
  const bool real = decomp.is_real();
  const double sigma = std::sqrt(model.sigma2);
  switch (model.kind) {
    case NoiseKind::ObservationWhite:
      return sigma * standard_noise(plan.size(), real, rng);
    case NoiseKind::SignalWhite: {
      // Noise enters the signal and is shifted along with it.
      const CVector w = sigma * standard_noise(decomp.size(), real, rng);
      const AggregationSequence seq =
          aggregate_spectral(decomp, decomp.inverse_eigenvectors() * w, node, plan.total());
      return aggregation_sample(seq, plan);
    }
    case NoiseKind::FrequencyWhite: {
      const CVector w_hat = sigma * standard_noise(static_cast<Index>(support.size()), real, rng);
      return gather_rows(build_psi_i(decomp, node, support, plan.total()), plan.picks()) * w_hat;
    }
    case NoiseKind::Custom: {
      const CMatrix reduced = reduce_covariance(*model.custom_covariance, plan);
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(reduced));
      const RVector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
      const CMatrix factor = eig.eigenvectors() * root.cast<cplx>().asDiagonal();
      return factor * standard_noise(plan.size(), real && is_real(reduced), rng);
    }
  }
  throw Error(ErrorCode::InvalidModel, "unknown noise kind");
}

SimulationSummary simulate_estimation(const SpectralDecomposition& decomp,
                                      std::span<const Index> support, Index node,
                                      const SelectionPlan& plan, const NoiseModel& model,
                                      const CVector& true_coefficients, Index trials,
                                      std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "need at least one trial");
  const auto k = static_cast<Index>(support.size());
  if (true_coefficients.size() != k)
    throw Error(ErrorCode::DimensionMismatch, "coefficient count differs from support size");
  const CMatrix system = gather_rows(build_psi_i(decomp, node, support, plan.total()), plan.picks());
  const ShapedCovariance cov = shaped_covariance(model, decomp, node, support, plan.total());
  const CMatrix reduced = reduce_covariance(cov.shape, plan);
  const CMatrix factor = cov.factor ? cov.reduced_factor(plan) : CMatrix();
  const BlueSolver solver(system, reduced, cov.factor ? &factor : nullptr);
  const CMatrix basis = decomp.basis(support);
  const CVector clean = system * true_coefficients;

  SimulationSummary out;
  out.trials = trials;
  out.theoretical_cov = cov.scale * solver.covariance();
  out.theoretical_mse = (basis * out.theoretical_cov * basis.adjoint()).trace().real();
  out.empirical_cov = CMatrix::Zero(k, k);
  out.mean_error = CVector::Zero(k);
  CVector sum_sq = CVector::Zero(k);
  double sse = 0.0;
  for (Index t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(t));
    const CVector noisy = clean + draw_noise(decomp, support, node, plan, model, rng);
    const CVector err = solver.solve(noisy) - true_coefficients;
    sse += (basis * err).squaredNorm();
    out.mean_error += err;
    out.empirical_cov += err * err.adjoint();
    sum_sq += err.cwiseAbs2().cast<cplx>();
  }
  const auto n = static_cast<double>(trials);
  out.empirical_mse = sse / n;
  out.mean_error /= n;
  out.empirical_cov /= n;
  out.error_std = (sum_sq.real() / n - out.mean_error.cwiseAbs2()).cwiseMax(0.0).cwiseSqrt().cast<cplx>();
  return out;
}

}  // namespace aggsamp
