#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "aggsamp/sampling.hpp"

namespace aggsamp {

enum class NoiseKind {
  ObservationWhite,  ///< white noise added to the observed shifts
  SignalWhite,       ///< white noise added to x before shifting
  FrequencyWhite,    ///< white noise on the active frequency coefficients
  Custom,            ///< caller-provided L x L covariance
};

struct NoiseModel {
  NoiseKind kind = NoiseKind::ObservationWhite;
  double sigma2 = 0.0;
  std::optional<CMatrix> custom_covariance;

  static NoiseModel observation_white(double sigma2) { return {NoiseKind::ObservationWhite, sigma2, {}}; }
  static NoiseModel signal_white(double sigma2) { return {NoiseKind::SignalWhite, sigma2, {}}; }
  static NoiseModel frequency_white(double sigma2) { return {NoiseKind::FrequencyWhite, sigma2, {}}; }
  static NoiseModel custom(CMatrix covariance) { return {NoiseKind::Custom, 1.0, std::move(covariance)}; }

  /// Throws InvalidModel: negative sigma2, or a custom covariance that is not
  /// Hermitian (1e-12) or not PSD (eigenvalues below -1e-10).
  void validate() const;
};

/// R_w^(i) over `rows` successive shifts at `node`.
CMatrix noise_covariance(const NoiseModel& model, const SpectralDecomposition& decomp, Index node,
                         std::span<const Index> support, Index rows);

/// C R C^H.
CMatrix reduce_covariance(const CMatrix& full, const SelectionPlan& plan);

/// BLUE weighting (Psi_i^H C^H R^-1 C Psi_i)^-1 Psi_i^H C^H R^-1 zbar, computed
/// by Cholesky whitening followed by a QR least-squares solve. Requires
/// |picks| >= K. Throws SingularNoiseCovariance or SingularNormalEquations.
CVector blue_estimate(const CMatrix& psi_i, const SelectionPlan& plan, const CMatrix& reduced_cov,
                      const CVector& samples);

/// (C Psi_i)^-1 zbar for a plan with exactly K rows.
CVector square_estimate(const CMatrix& psi_i, const SelectionPlan& plan, const CVector& samples);

struct ErrorCovariances {
  CMatrix frequency;  ///< Rhat_e, K x K
  CMatrix time;       ///< R_e = V_K Rhat_e V_K^H, N x N
};

/// Frequency and time error covariances of the BLUE. Square plans use the
/// equivalent form (C Psi_i)^-1 R (C Psi_i)^-H; taller plans whiten and use QR.
ErrorCovariances error_covariances(const CMatrix& psi_i, const SelectionPlan& plan,
                                   const CMatrix& reduced_cov, const CMatrix& basis);

struct ErrorMetrics {
  double e1 = 0.0;  ///< trace(R_e): mean squared error
  double e2 = 0.0;  ///< lambda_max(R_e)
  double e3 = 0.0;  ///< log det(Rhat_e)
  double e4 = 0.0;  ///< 1 / trace(Rhat_e^-1)
};

enum class Metric { E1, E2, E3, E4 };

double metric_value(const ErrorMetrics& m, Metric which) noexcept;

/// Throws NotPositiveDefinite when Rhat_e is not Hermitian positive definite.
ErrorMetrics error_metrics(const CMatrix& freq_cov, const CMatrix& time_cov);

struct EstimationReport {
  CVector estimate_frequency;
  CVector estimate_time;
  CMatrix cov_frequency;
  CMatrix cov_time;
  ErrorMetrics metrics;
  double condition = 1.0;  ///< cond of the whitened system
};

/// Full BLUE pipeline at one node: covariance, estimate, covariances, metrics.
/// A white model with sigma2 = 0 is weighted by its unit-power shape and
/// reports zero covariances.
EstimationReport estimate(const SpectralDecomposition& decomp, std::span<const Index> support,
                          Index node, const SelectionPlan& plan, const NoiseModel& model,
                          const CVector& samples);

/// Covariances and metrics without samples.
EstimationReport analyze(const SpectralDecomposition& decomp, std::span<const Index> support,
                         Index node, const SelectionPlan& plan, const NoiseModel& model);

/// Reports from a system matrix and the reduced noise covariance shape:
/// reduced_cov = scale * shape.
EstimationReport estimate_from_system(const CMatrix& system, const CMatrix& shape, double scale,
                                      const CMatrix& basis, const CVector* samples);

struct NodeScore {
  Index node = 0;
  double score = 0.0;  ///< closed-form score (higher better) or metric (lower better)
  ErrorMetrics metrics;
  bool feasible = true;
};

enum class RankingMethod {
  /// Geometric-sum score for white observation noise on an arithmetic plan.
  ClosedForm,
  /// Chosen metric from the error covariances at every node.
  Exhaustive,
};

struct NodeRanking {
  std::vector<NodeScore> ranked;  ///< best first
  bool all_tied = false;          ///< every feasible node within 1e-10 (relative)
};

/// sum_k |[upsilon_i]_k|^2 sum_m |lambda_k|^(2(first + m stride)): trace of the
/// Fisher information (sigma2 = 1) for white observation noise. Uses the
/// geometric closed form except where |lambda_k|^(2 stride) is within 1e-12 of
/// one, which is summed directly.
double closed_form_node_score(const SpectralDecomposition& decomp, std::span<const Index> support,
                              Index node, const ArithmeticPattern& pattern);

NodeRanking select_sampling_node(const SpectralDecomposition& decomp,
                                 std::span<const Index> support, const SelectionPlan& plan,
                                 const NoiseModel& model, RankingMethod method,
                                 Metric metric = Metric::E4);

struct OffsetChoice {
  Index first = 0;        ///< 0-based first kept shift (n0 - 1)
  double product = 1.0;   ///< prod_k |lambda_k|^2 over the support
  Index max_first = 0;    ///< largest admissible offset under max_shifts
};

/// Log-det optimal offset for white observation noise: 0 when the support's
/// prod |lambda_k|^2 <= 1, otherwise the largest offset that keeps
/// first + (K-1) stride < max_shifts.
OffsetChoice select_offset(const SpectralDecomposition& decomp, std::span<const Index> support,
                           Index stride, Index max_shifts, const NoiseModel& model);

struct SimulationSummary {
  double empirical_mse = 0.0;    ///< mean ||x - xhat||^2 (time domain)
  double theoretical_mse = 0.0;  ///< trace(R_e)
  CMatrix empirical_cov;         ///< sample covariance of the frequency error
  CMatrix theoretical_cov;       ///< Rhat_e
  CVector mean_error;            ///< mean frequency error (bias estimate)
  CVector error_std;             ///< per-coefficient standard deviation
  Index trials = 0;
};

/// Monte-Carlo check of the BLUE: noise drawn through its generating model
/// (not the covariance formula), per-trial streams Rng::stream(seed, t).
SimulationSummary simulate_estimation(const SpectralDecomposition& decomp,
                                      std::span<const Index> support, Index node,
                                      const SelectionPlan& plan, const NoiseModel& model,
                                      const CVector& true_coefficients, Index trials,
                                      std::uint64_t seed);

/// One noise draw for `model` on the plan's samples at `node`.
CVector draw_noise(const SpectralDecomposition& decomp, std::span<const Index> support,
                   Index node, const SelectionPlan& plan, const NoiseModel& model, Rng& rng);

}  // namespace aggsamp
