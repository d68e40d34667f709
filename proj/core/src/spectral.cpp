#include "aggsamp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "aggsamp/errors.hpp"

namespace aggsamp {

namespace {

constexpr double kReconstructionTol = 1e-10;
constexpr double kOrderTol = 1e-9;

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::vector<std::pair<Index, Index>> pattern_of(const CMatrix& m) {
  std::vector<std::pair<Index, Index>> pattern;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (i == j || m(i, j) != cplx(0.0)) pattern.emplace_back(i, j);
  return pattern;
}

// Phase mapped into (-pi, pi]; values within kOrderTol of -pi wrap to +pi.
double principal_phase(cplx z) {
  double phase = std::arg(z);
  if (phase <= -std::numbers::pi + kOrderTol) phase = std::numbers::pi;
  return phase;
}

// Splits the already-sorted range [first, last) into maximal runs whose
// consecutive keys differ by at most `tol` and sorts each run with `less`.
template <typename Key, typename Less>
void refine_ties(std::vector<Index>& order, std::size_t first, std::size_t last, Key key,
                 double tol, Less less) {
  std::size_t start = first;
  for (std::size_t i = first + 1; i <= last; ++i) {
    if (i == last || std::abs(key(order[i]) - key(order[i - 1])) > tol) {
      if (i - start > 1) std::stable_sort(order.begin() + start, order.begin() + i, less);
      start = i;
    }
  }
}

double reconstruction_residual(const CMatrix& s, const CMatrix& v, const CVector& lambda,
                               const CMatrix& v_inv) {
  const CMatrix rebuilt = v * lambda.asDiagonal() * v_inv;
  const double scale = s.norm();
  const double diff = (s - rebuilt).norm();
  return scale > 0.0 ? diff / scale : diff;
}

CMatrix dft_basis(Index n) {
  CMatrix f(n, n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k) {
      // Reduce the exponent mod n so large products stay exact.
      const auto e = static_cast<double>((i * k) % n);
      f(i, k) = std::polar(norm, 2.0 * std::numbers::pi * e / static_cast<double>(n));
    }
  return f;
}

struct RawEigen {
  CMatrix v;
  CVector lambda;
  CMatrix v_inv;
  bool unitary = false;
  bool canonical = true;
};

RawEigen solve_symmetric(const ShiftOperator& shift) {
  if (!shift.is_hermitian())
    throw Error(ErrorCode::InvalidArgument, "symmetric mode requires a Hermitian shift");
  const CMatrix& s = shift.matrix();
  RawEigen raw;
  if (is_real(s)) {
    Eigen::SelfAdjointEigenSolver<RMatrix> solver(s.real());
    raw.v = solver.eigenvectors().cast<cplx>();
    raw.lambda = solver.eigenvalues().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(s);
    raw.v = solver.eigenvectors();
    raw.lambda = solver.eigenvalues().cast<cplx>();
  }
  raw.v_inv = raw.v.adjoint();
  raw.unitary = true;
  return raw;
}

RawEigen solve_cycle(const ShiftOperator& shift) {
  const Index n = shift.size();
  RawEigen raw;
  raw.v = dft_basis(n);
  raw.lambda.resize(n);
  for (Index k = 0; k < n; ++k)
    raw.lambda(k) = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) /
                                        static_cast<double>(n));
  raw.v_inv = raw.v.adjoint();
  raw.unitary = true;
  raw.canonical = false;
  return raw;
}

RawEigen solve_general(const ShiftOperator& shift) {
  const CMatrix& s = shift.matrix();
  RawEigen raw;
  if (shift.is_normal()) {
    // The Schur factor of a normal matrix is diagonal, so U is a unitary
    // eigenbasis even across repeated eigenvalues.
    Eigen::ComplexSchur<CMatrix> schur(s);
    raw.v = schur.matrixU();
    raw.lambda = schur.matrixT().diagonal();
    raw.v_inv = raw.v.adjoint();
    raw.unitary = true;
    return raw;
  }
  Eigen::ComplexEigenSolver<CMatrix> solver(s);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::DefectiveOrIllConditioned, "complex eigensolver did not converge");
  raw.v = solver.eigenvectors();
  raw.v.colwise().normalize();
  raw.lambda = solver.eigenvalues();
  return raw;
}

RawEigen solve_user(const ShiftOperator& shift, const mode::UserSupplied& user) {
  const Index n = shift.size();
  if (user.eigenvectors.rows() != n || user.eigenvectors.cols() != n ||
      user.eigenvalues.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "user-supplied basis has the wrong shape");
  RawEigen raw;
  raw.v = user.eigenvectors;
  if (user.normalize_columns) {
    for (Index k = 0; k < n; ++k) {
      const double norm = raw.v.col(k).norm();
      if (norm == 0.0)
        throw Error(ErrorCode::DefectiveOrIllConditioned, "zero eigenvector column");
      raw.v.col(k) /= norm;
    }
  }
  raw.lambda = user.eigenvalues;
  return raw;
}

}  // namespace

ShiftOperator::ShiftOperator(CMatrix matrix)
    : matrix_(std::move(matrix)), pattern_(pattern_of(matrix_)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1)
    throw Error(ErrorCode::DimensionMismatch, "shift operator must be square with N >= 1");
}

ShiftOperator::ShiftOperator(CMatrix matrix, std::vector<std::pair<Index, Index>> pattern)
    : matrix_(std::move(matrix)), pattern_(std::move(pattern)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1)
    throw Error(ErrorCode::DimensionMismatch, "shift operator must be square with N >= 1");
  std::sort(pattern_.begin(), pattern_.end());
  for (Index i = 0; i < matrix_.rows(); ++i)
    for (Index j = 0; j < matrix_.cols(); ++j)
      if (i != j && matrix_(i, j) != cplx(0.0) &&
          !std::binary_search(pattern_.begin(), pattern_.end(), std::pair{i, j}))
        throw Error(ErrorCode::InvalidArgument,
                    "entry (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") is nonzero outside the sparsity pattern");
}

std::vector<Index> ShiftOperator::incoming_neighbors(Index i) const {
  if (i < 0 || i >= size()) throw Error(ErrorCode::IndexOutOfRange, "node out of range");
  std::vector<Index> out;
  for (const auto& [r, c] : pattern_)
    if (r == i && c != i) out.push_back(c);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool ShiftOperator::is_hermitian(double tol) const {
  return max_abs(matrix_ - matrix_.adjoint()) <= tol * std::max(1.0, max_abs(matrix_));
}

bool ShiftOperator::is_normal(double tol) const {
  const CMatrix commutator = matrix_ * matrix_.adjoint() - matrix_.adjoint() * matrix_;
  const double scale = std::max(1.0, matrix_.squaredNorm());
  return commutator.norm() <= tol * scale;
}

SpectralDecomposition::SpectralDecomposition(CMatrix eigenvectors, CVector eigenvalues,
                                             CMatrix inverse, bool normal, double condition,
                                             std::vector<Index> ordering, bool canonical)
    : v_(std::move(eigenvectors)),
      eigenvalues_(std::move(eigenvalues)),
      v_inv_(std::move(inverse)),
      normal_(normal),
      condition_(condition),
      ordering_(std::move(ordering)),
      canonical_(canonical),
      real_(aggsamp::is_real(v_) && aggsamp::is_real(eigenvalues_) && aggsamp::is_real(v_inv_)) {}

CMatrix SpectralDecomposition::basis(std::span<const Index> support) const {
  validate_support(support, size());
  return gather_cols(v_, support);
}

CVector SpectralDecomposition::eigenvalues(std::span<const Index> support) const {
  validate_support(support, size());
  return gather(eigenvalues_, support);
}

std::vector<Index> canonical_order(const CVector& eigenvalues) {
  const auto n = static_cast<std::size_t>(eigenvalues.size());
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  if (n == 0) return order;

  const double scale = std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
  auto modulus = [&](Index k) { return std::abs(eigenvalues(k)); };
  auto abs_phase = [&](Index k) { return std::abs(principal_phase(eigenvalues(k))); };
  auto phase = [&](Index k) { return principal_phase(eigenvalues(k)); };

  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return modulus(a) > modulus(b); });
  // Modulus tie groups: ascending |phase|.
  std::size_t start = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i == n || modulus(order[i - 1]) - modulus(order[i]) > kOrderTol * scale) {
      std::stable_sort(order.begin() + start, order.begin() + i,
                       [&](Index a, Index b) { return abs_phase(a) < abs_phase(b); });
      // |phase| tie groups: ascending signed phase, then solver index.
      refine_ties(order, start, i, abs_phase, kOrderTol, [&](Index a, Index b) {
        const double pa = phase(a);
        const double pb = phase(b);
        if (std::abs(pa - pb) > kOrderTol) return pa < pb;
        return a < b;
      });
      start = i;
    }
  }
  return order;
}

SpectralDecomposition decompose(const ShiftOperator& shift, const DecompositionMode& how) {
  RawEigen raw = std::visit(
      [&](const auto& m) -> RawEigen {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, mode::Symmetric>) return solve_symmetric(shift);
        if constexpr (std::is_same_v<M, mode::AnalyticCycle>) return solve_cycle(shift);
        if constexpr (std::is_same_v<M, mode::General>) return solve_general(shift);
        if constexpr (std::is_same_v<M, mode::UserSupplied>) return solve_user(shift, m);
      },
      how);

  double condition = 1.0;
  if (!raw.unitary) {
    condition = condition_number(raw.v);
    if (!std::isfinite(condition) || condition > kConditionGate)
      throw Error(ErrorCode::DefectiveOrIllConditioned,
                  "eigenvector matrix condition number " + std::to_string(condition) +
                      " exceeds 1e12");
    raw.v_inv = raw.v.fullPivLu().inverse();
  } else {
    condition = condition_number(raw.v);
  }

  const double residual = reconstruction_residual(shift.matrix(), raw.v, raw.lambda, raw.v_inv);
  if (!(residual <= kReconstructionTol))
    throw Error(ErrorCode::DefectiveOrIllConditioned,
                "reconstruction residual " + std::to_string(residual) + " exceeds 1e-10");

  const Index n = shift.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  if (raw.canonical) {
    order = canonical_order(raw.lambda);
  } else {
    std::iota(order.begin(), order.end(), Index{0});
  }

  CMatrix v(n, n);
  CMatrix v_inv(n, n);
  CVector lambda(n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    v.col(k) = raw.v.col(src);
    v_inv.row(k) = raw.v_inv.row(src);
    lambda(k) = raw.lambda(src);
  }
  return SpectralDecomposition(std::move(v), std::move(lambda), std::move(v_inv),
                               shift.is_normal(), condition, std::move(order), raw.canonical);
}

SpectralDecomposition decompose(const ShiftOperator& shift) {
  if (shift.is_hermitian()) return decompose(shift, mode::Symmetric{});
  return decompose(shift, mode::General{});
}

FrequencyRepresentation gft(const SpectralDecomposition& decomp, const CVector& signal) {
  if (signal.size() != decomp.size())
    throw Error(ErrorCode::DimensionMismatch, "signal length does not match the shift");
  return {decomp.inverse_eigenvectors() * signal, {}};
}

CVector igft(const SpectralDecomposition& decomp, const FrequencyRepresentation& freq) {
  if (freq.coefficients.size() != decomp.size())
    throw Error(ErrorCode::DimensionMismatch, "coefficient length does not match the shift");
  return decomp.eigenvectors() * freq.coefficients;
}

CMatrix vandermonde(const CVector& basis, Index rows) {
  if (rows < 1) throw Error(ErrorCode::InvalidArgument, "Vandermonde block needs rows >= 1");
  CMatrix psi(rows, basis.size());
  psi.row(0).setOnes();
  for (Index l = 1; l < rows; ++l)
    psi.row(l) = psi.row(l - 1).cwiseProduct(basis.transpose());
  return psi;
}

CMatrix build_psi(const SpectralDecomposition& decomp, Index rows) {
  return vandermonde(decomp.eigenvalues(), rows);
}

CVector node_pattern(const SpectralDecomposition& decomp, Index node) {
  if (node < 0 || node >= decomp.size())
    throw Error(ErrorCode::IndexOutOfRange, "node " + std::to_string(node) + " out of range");
  return decomp.eigenvectors().row(node).transpose();
}

CVector synthesize_bandlimited(const SpectralDecomposition& decomp,
                               std::span<const Index> support, const CVector& coeffs) {
  validate_support(support, decomp.size());
  if (coeffs.size() != static_cast<Index>(support.size()))
    throw Error(ErrorCode::InvalidSupport, "coefficient count differs from support size");
  return gather_cols(decomp.eigenvectors(), support) * coeffs;
}

CVector random_coefficients(const SpectralDecomposition& decomp, Index count, Rng& rng) {
  CVector c(count);
  for (Index k = 0; k < count; ++k)
    c(k) = decomp.is_real() ? cplx(rng.gaussian(), 0.0) : rng.complex_gaussian();
  return c;
}

CVector synthesize_bandlimited(const SpectralDecomposition& decomp,
                               std::span<const Index> support, Rng& rng) {
  validate_support(support, decomp.size());
  return synthesize_bandlimited(
      decomp, support, random_coefficients(decomp, static_cast<Index>(support.size()), rng));
}

}  // namespace aggsamp
