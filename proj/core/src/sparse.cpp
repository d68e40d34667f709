#include "aggsamp/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "aggsamp/errors.hpp"

namespace aggsamp {

namespace {

constexpr double kL0ResidualTol = 1e-8;

// Advances `combo` (ascending indices into [0, n)) to the next combination in
// lexicographic order; false after the last one.
bool next_combination(std::vector<Index>& combo, Index n) {
  const auto k = static_cast<Index>(combo.size());
  for (Index i = k - 1; i >= 0; --i) {
    auto& slot = combo[static_cast<std::size_t>(i)];
    if (slot < n - k + i) {
      ++slot;
      for (Index j = i + 1; j < k; ++j)
        combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

std::vector<Index> first_combination(Index k) {
  std::vector<Index> combo(static_cast<std::size_t>(k));
  std::iota(combo.begin(), combo.end(), Index{0});
  return combo;
}

CVector shrink(const CVector& v, double threshold) {
  CVector out(v.size());
  for (Index k = 0; k < v.size(); ++k) {
    const double mag = std::abs(v(k));
    out(k) = mag > threshold ? v(k) * ((mag - threshold) / mag) : cplx(0.0);
  }
  return out;
}

// Row scaling that gives every row of `m` unit norm. Zero rows keep weight 1.
RVector row_equilibration(const CMatrix& m) {
  RVector d = RVector::Ones(m.rows());
  for (Index r = 0; r < m.rows(); ++r) {
    const double norm = m.row(r).norm();
    if (norm > 0.0) d(r) = 1.0 / norm;
  }
  return d;
}

struct ProxOutcome {
  CVector x;
  Index iterations = 0;
  bool converged = false;
};

// Accelerated proximal gradient with gradient-based restart on
// ||A x - c||^2 + gamma ||x||_1.
ProxOutcome proximal_gradient(const CMatrix& a, const CVector& c, double gamma, double lipschitz,
                              CVector start, const L1Options& opt) {
  ProxOutcome out;
  CVector x = std::move(start);
  CVector y = x;
  double t = 1.0;
  const double step = 1.0 / lipschitz;
  for (Index it = 1; it <= opt.max_iterations; ++it) {
    const CVector grad = 2.0 * (a.adjoint() * (a * y - c));
    const CVector next = shrink(y - step * grad, gamma * step);
    const CVector delta = next - x;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if (grad.dot(delta).real() > 0.0) {
      t = 1.0;
      y = next;
    } else {
      y = next + ((t - 1.0) / t_next) * delta;
      t = t_next;
    }
    x = next;
    out.iterations = it;
    if (delta.norm() <= opt.tolerance * std::max(1.0, x.norm())) {
      out.converged = true;
      break;
    }
  }
  out.x = std::move(x);
  return out;
}

struct BasisPursuit {
  CVector z;
  Index iterations = 0;
  bool converged = false;
};

// ADMM on min ||z||_1 s.t. A z = c. `check` is consulted every few
// iterations and ends the run early when it returns true.
template <class Check>
BasisPursuit basis_pursuit(const CMatrix& a, const CVector& c, const L1Options& opt, Check check) {
  const Index n = a.cols();
  const Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(a);
  const CVector x0 = cod.solve(c);
  auto project = [&](const CVector& v) -> CVector { return v - cod.solve(a * v) + x0; };
  const double rho = 1.0;
  BasisPursuit out;
  CVector z = x0;
  CVector u = CVector::Zero(n);
  for (Index it = 1; it <= opt.max_iterations; ++it) {
    const CVector x = project(z - u);
    const CVector z_next = shrink(x + u, 1.0 / rho);
    u += x - z_next;
    const double primal = (x - z_next).norm();
    const double dual = rho * (z_next - z).norm();
    z = z_next;
    out.iterations = it;
    const double scale = std::max(1.0, z.norm());
    if (primal <= opt.tolerance * scale && dual <= opt.tolerance * scale) {
      out.converged = true;
      break;
    }
    if (it % 25 == 0 && check(z)) break;
  }
  out.z = std::move(z);
  return out;
}

struct Polish {
  bool success = false;
  Support support;
  CVector coefficients;
  double residual = 0.0;
};

// Least squares on the iterate's support, trimmed to its `sparsity` largest
// entries (ranked in solver coordinates) when it has more.
Polish polish(const CMatrix& m, const CVector& b, const CMatrix& weight, const CVector& ranking,
              Index sparsity, double residual_tol) {
  Polish out;
  for (Index k = 0; k < ranking.size(); ++k)
    if (ranking(k) != cplx(0.0)) out.support.push_back(k);
  out.coefficients = CVector::Zero(m.cols());
  const CVector wb = weight * b;
  const double b_norm = wb.norm();
  if (out.support.empty()) {
    out.residual = b_norm;
    out.success = b_norm == 0.0;
    return out;
  }
  if (sparsity > 0 && static_cast<Index>(out.support.size()) > sparsity) {
    std::stable_sort(out.support.begin(), out.support.end(),
                     [&](Index a, Index c) { return std::abs(ranking(a)) > std::abs(ranking(c)); });
    out.support.resize(static_cast<std::size_t>(sparsity));
    std::sort(out.support.begin(), out.support.end());
  }
  const CMatrix cols = weight * gather_cols(m, out.support);
  const CVector sol = cols.colPivHouseholderQr().solve(wb);
  for (std::size_t s = 0; s < out.support.size(); ++s)
    out.coefficients(out.support[s]) = sol(static_cast<Index>(s));
  out.residual = (weight * (m * out.coefficients - b)).norm();
  out.success = sparsity > 0 && out.residual <= residual_tol * b_norm;
  return out;
}

}  // namespace

SensingSystem sensing_system(const SpectralDecomposition& decomp, Index node,
                             const SelectionPlan& plan, const CVector& samples) {
  if (samples.size() != plan.size())
    throw Error(ErrorCode::DimensionMismatch, "one sample per picked row expected");
  const CVector upsilon = node_pattern(decomp, node);
  const CMatrix m = gather_rows(build_psi(decomp, plan.total()), plan.picks()) * upsilon.asDiagonal();
  return {m, samples, node, plan};
}

SparseSolution brute_force_l0(const SensingSystem& system, Index max_sparsity) {
  if (system.samples.size() != system.matrix.rows())
    throw Error(ErrorCode::DimensionMismatch, "sample count mismatch");
  // Rows of successive shifts differ by orders of magnitude; scaling them
  // keeps the residual test from ignoring the small ones.
  const RVector d = row_equilibration(system.matrix);
  const CMatrix m = d.cast<cplx>().asDiagonal() * system.matrix;
  const CVector b = d.cast<cplx>().cwiseProduct(system.samples);
  const Index n = m.cols();
  if (n > 30 || max_sparsity > 5)
    throw Error(ErrorCode::BudgetExceeded, "exhaustive search limited to N <= 30 and K <= 5");
  if (max_sparsity < 0 || m.rows() < max_sparsity)
    throw Error(ErrorCode::InvalidArgument, "need at least K observations");

  const double b_norm = b.norm();
  if (b_norm == 0.0) return {{}, CVector::Zero(n), 0.0};
  const double accept = kL0ResidualTol * b_norm;
  for (Index size = 1; size <= std::min(max_sparsity, n); ++size) {
    auto combo = first_combination(size);
    do {
      const CMatrix cols = gather_cols(m, combo);
      const CVector sol = cols.colPivHouseholderQr().solve(b);
      const double residual = (cols * sol - b).norm();
      if (residual <= accept) {
        SparseSolution out{combo, CVector::Zero(n), residual};
        for (std::size_t s = 0; s < combo.size(); ++s) out.coefficients(combo[s]) = sol(static_cast<Index>(s));
        return out;
      }
    } while (next_combination(combo, n));
  }
  throw Error(ErrorCode::Infeasible,
              "no support with at most " + std::to_string(max_sparsity) + " entries fits the samples");
}

bool has_full_spark(const CMatrix& m, Index size, double max_condition) {
  if (size < 1 || size > m.cols() || size > m.rows()) return false;
  auto combo = first_combination(size);
  do {
    const double cond = condition_number(gather_cols(m, combo));
    if (!std::isfinite(cond) || cond > max_condition) return false;
  } while (next_combination(combo, m.cols()));
  return true;
}

IdentifiabilityReport check_identifiability(const SpectralDecomposition& decomp, Index node,
                                            const SelectionPlan& plan, Index sparsity,
                                            std::span<const Index> support,
                                            const IdentifiabilityTolerances& tol) {
  const auto& pattern = plan.pattern();
  if (!pattern || plan.size() != 2 * sparsity)
    throw Error(ErrorCode::InvalidArgument, "identifiability needs an arithmetic plan with 2K rows");
  const CVector upsilon = node_pattern(decomp, node);
  const CVector& lambda = decomp.eigenvalues();
  const double lambda_scale = lambda.cwiseAbs().maxCoeff();
  const double power_scale = std::pow(lambda_scale, static_cast<double>(pattern->stride));
  CVector powered(lambda.size());
  for (Index k = 0; k < lambda.size(); ++k) {
    cplx p(1.0);
    for (Index e = 0; e < pattern->stride; ++e) p *= lambda(k);
    powered(k) = p;
  }

  auto clauses = [&](const std::vector<Index>& indices) {
    IdentifiabilityClauses c;
    for (Index k : indices) {
      if (!(std::abs(upsilon(k)) > tol.pattern * upsilon.norm())) c.pattern_nonzero = false;
      if (!(std::abs(lambda(k)) > tol.eigenvalue * lambda_scale)) c.eigenvalues_nonzero = false;
    }
    for (std::size_t a = 0; a < indices.size(); ++a)
      for (std::size_t b = a + 1; b < indices.size(); ++b)
        if (!(std::abs(powered(indices[a]) - powered(indices[b])) > tol.eigenvalue * power_scale))
          c.powers_distinct = false;
    return c;
  };

  IdentifiabilityReport report;
  std::vector<Index> every(static_cast<std::size_t>(decomp.size()));
  std::iota(every.begin(), every.end(), Index{0});
  report.strict = clauses(every);
  if (!support.empty()) {
    validate_support(support, decomp.size());
    report.on_support = clauses(std::vector<Index>(support.begin(), support.end()));
  }
  if (decomp.size() <= 12) {
    const CMatrix m = gather_rows(build_psi(decomp, plan.total()), plan.picks()) * upsilon.asDiagonal();
    report.full_spark = has_full_spark(m, std::min(2 * sparsity, decomp.size()), tol.spark_condition);
  }
  return report;
}

double gamma_max(const CMatrix& m, const CVector& b, const std::optional<CMatrix>& weight) {
  const CVector wb = weight ? CVector(*weight * b) : b;
  const CMatrix wm = weight ? CMatrix(*weight * m) : m;
  const CVector corr = wm.adjoint() * wb;
  return corr.size() == 0 ? 0.0 : corr.cwiseAbs().maxCoeff();
}

L1Result l1_recover(const SensingSystem& system, const L1Mode& mode, const L1Options& options) {
  const CMatrix& m = system.matrix;
  const CVector& b = system.samples;
  const Index n = m.cols();
  if (b.size() != m.rows()) throw Error(ErrorCode::DimensionMismatch, "sample count mismatch");
  CMatrix weight =
      options.weight ? *options.weight : CMatrix(CMatrix::Identity(m.rows(), m.rows()));
  if (weight.cols() != m.rows()) throw Error(ErrorCode::DimensionMismatch, "weight matrix size");
  if (!options.weight) weight = row_equilibration(m).cast<cplx>().asDiagonal();

  CMatrix a = weight * m;
  const CVector c = weight * b;
  RVector scale = RVector::Ones(n);
  if (options.normalize_columns) {
    for (Index k = 0; k < n; ++k) {
      const double norm = a.col(k).norm();
      if (norm > 0.0) {
        scale(k) = norm;
        a.col(k) /= norm;
      }
    }
  }

  L1Result result;
  result.coefficients = CVector::Zero(n);
  result.raw_iterate = CVector::Zero(n);
  const double sigma_max = a.size() == 0 ? 0.0 : Eigen::JacobiSVD<CMatrix>(a).singularValues()(0);
  if (b.norm() == 0.0 || sigma_max == 0.0) {
    result.success = b.norm() == 0.0;
    result.converged = true;
    result.residual = b.norm();
    return result;
  }
  const double lipschitz = 2.0 * sigma_max * sigma_max;

  Index sparsity = options.sparsity;
  std::vector<double> gammas;
  bool single = false;
  bool stop_on_success = false;
  bool equality = false;
  if (const auto* eq = std::get_if<l1::EqualityConstrained>(&mode)) {
    sparsity = eq->sparsity;
    equality = true;
  } else if (const auto* pen = std::get_if<l1::Penalized>(&mode)) {
    gammas = {pen->gamma};
    single = true;
  } else {
    gammas = std::get<l1::PenalizedPath>(mode).gammas;
    stop_on_success = sparsity > 0;
  }
  if (equality) {
    // Equality constrained: basis pursuit, polished as it goes.
    Polish pol;
    auto check = [&](const CVector& it) {
      pol = polish(m, b, weight, it, sparsity, options.residual_tolerance);
      return pol.success;
    };
    const BasisPursuit bp = basis_pursuit(a, c, options, check);
    if (!pol.success) pol = polish(m, b, weight, bp.z, sparsity, options.residual_tolerance);
    const CVector x = bp.z.cwiseQuotient(scale.cast<cplx>());
    Index nonzeros = 0;
    for (Index k = 0; k < n; ++k) nonzeros += x(k) != cplx(0.0) ? 1 : 0;
    result.path.push_back({0.0, bp.iterations, bp.converged, nonzeros});
    result.raw_iterate = x;
    result.converged = bp.converged || pol.success;
    result.success = pol.success;
    result.residual = pol.residual;
    result.support = pol.support;
    result.coefficients = pol.success ? pol.coefficients : x;
    return result;
  }
  if (gammas.empty()) {
    const double top = gamma_max(a, c, std::nullopt);
    const Index points = std::max<Index>(options.path_points, 2);
    for (Index p = 0; p < points; ++p)
      gammas.push_back(top * std::pow(options.path_ratio,
                                      static_cast<double>(p) / static_cast<double>(points - 1)));
  }

  CVector z = CVector::Zero(n);
  for (double gamma : gammas) {
    if (!(gamma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "penalty must be nonnegative");
    ProxOutcome prox = proximal_gradient(a, c, gamma, lipschitz, z, options);
    z = prox.x;
    CVector x = z.cwiseQuotient(scale.cast<cplx>());
    Index nonzeros = 0;
    for (Index k = 0; k < n; ++k) nonzeros += x(k) != cplx(0.0) ? 1 : 0;
    result.path.push_back({gamma, prox.iterations, prox.converged, nonzeros});
    if (single && !prox.converged)
      throw Error(ErrorCode::NoConvergence,
                  "proximal gradient hit " + std::to_string(options.max_iterations) +
                      " iterations at gamma " + std::to_string(gamma) + " (nonzeros " +
                      std::to_string(nonzeros) + ")");
    const Polish pol = polish(m, b, weight, z, sparsity, options.residual_tolerance);
    result.raw_iterate = x;
    result.converged = prox.converged;
    result.gamma = gamma;
    result.success = pol.success;
    result.residual = pol.residual;
    result.support = pol.support;
    result.coefficients = pol.success ? pol.coefficients : x;
    if (pol.success && stop_on_success) break;
  }
  return result;
}

CoherenceReport coherence(const CMatrix& m) {
  std::vector<Index> zero;
  for (Index k = 0; k < m.cols(); ++k)
    if (m.col(k).norm() == 0.0) zero.push_back(k);
  if (!zero.empty()) {
    std::string list;
    for (Index k : zero) list += (list.empty() ? "" : ", ") + std::to_string(k);
    throw Error(ErrorCode::ZeroColumn, "zero columns: " + list);
  }
  CoherenceReport out;
  const CMatrix normalized = m.colwise().normalized();
  const CMatrix gram = normalized.adjoint() * normalized;
  for (Index a = 0; a < m.cols(); ++a)
    for (Index b = a + 1; b < m.cols(); ++b) out.mu = std::max(out.mu, std::abs(gram(a, b)));
  out.mu = std::min(out.mu, 1.0);
  out.sparsity_bound =
      out.mu > 0.0 ? std::min<Index>(static_cast<Index>(std::floor(0.5 * (1.0 + 1.0 / out.mu))), m.cols())
                   : m.cols();
  return out;
}

}  // namespace aggsamp
