#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "aggsamp/linalg.hpp"
#include "aggsamp/rng.hpp"

namespace aggsamp {

/// Dense graph-shift operator S together with the index pairs where its
/// entries are allowed to be nonzero (diagonal plus the graph's edges).
class ShiftOperator {
 public:
  /// Pattern taken from the nonzero entries of `matrix` plus the diagonal.
  explicit ShiftOperator(CMatrix matrix);
  ShiftOperator(CMatrix matrix, std::vector<std::pair<Index, Index>> pattern);

  Index size() const noexcept { return matrix_.rows(); }
  const CMatrix& matrix() const noexcept { return matrix_; }
  const std::vector<std::pair<Index, Index>>& sparsity_pattern() const noexcept {
    return pattern_;
  }

  /// Nodes j != i with S(i, j) allowed nonzero: the incoming neighbours of i,
  /// i.e. the nodes whose values node i combines in one shift.
  std::vector<Index> incoming_neighbors(Index i) const;

  bool is_hermitian(double tol = 1e-12) const;
  bool is_normal(double tol = 1e-10) const;

 private:
  CMatrix matrix_;
  std::vector<std::pair<Index, Index>> pattern_;
};

namespace mode {
/// Hermitian shifts: symmetric eigensolver, unitary V.
struct Symmetric {};
/// Directed cycle: analytic DFT basis, eigenvalues exp(-j 2 pi k / N) in
/// natural frequency order.
struct AnalyticCycle {};
/// Caller-provided basis. Columns are scaled to unit 2-norm when
/// `normalize_columns` is set.
struct UserSupplied {
  CMatrix eigenvectors;
  CVector eigenvalues;
  bool normalize_columns = true;
};
/// Complex Schur for normal shifts, complex eigensolver otherwise.
struct General {};
}  // namespace mode

using DecompositionMode =
    std::variant<mode::Symmetric, mode::AnalyticCycle, mode::UserSupplied, mode::General>;

/// S = V diag(lambda) V^-1 with the eigenpairs in a deterministic order.
///
/// Canonical order: decreasing |lambda|; moduli within 1e-9 * max(1, max|lambda|)
/// of their neighbour form one tie group, ordered by ascending |phase|, then
/// ascending phase in (-pi, pi], then solver index. A conjugate pair
/// therefore lists the negative phase first, and for the unit circle the
/// order is 1, e^{-j theta}, e^{+j theta}, ..., -1.
class SpectralDecomposition {
 public:
  SpectralDecomposition(CMatrix eigenvectors, CVector eigenvalues, CMatrix inverse,
                        bool normal, double condition, std::vector<Index> ordering,
                        bool canonical);

  Index size() const noexcept { return eigenvalues_.size(); }
  const CMatrix& eigenvectors() const noexcept { return v_; }
  const CVector& eigenvalues() const noexcept { return eigenvalues_; }
  const CMatrix& inverse_eigenvectors() const noexcept { return v_inv_; }
  bool is_normal() const noexcept { return normal_; }
  double condition_number_v() const noexcept { return condition_; }
  /// ordering()[k] is the raw solver index of the k-th eigenpair.
  const std::vector<Index>& ordering() const noexcept { return ordering_; }
  /// False only for the analytic cycle basis, which keeps DFT order.
  bool canonically_ordered() const noexcept { return canonical_; }
  /// V, lambda and V^-1 are all real (symmetric real shifts).
  bool is_real() const noexcept { return real_; }

  /// V restricted to the support columns (V_K).
  CMatrix basis(std::span<const Index> support) const;
  CVector eigenvalues(std::span<const Index> support) const;

 private:
  CMatrix v_;
  CVector eigenvalues_;
  CMatrix v_inv_;
  bool normal_;
  double condition_;
  std::vector<Index> ordering_;
  bool canonical_;
  bool real_;
};

struct FrequencyRepresentation {
  CVector coefficients;
  Support support;  ///< declared-active frequencies; may be empty

  Index bandwidth() const noexcept { return static_cast<Index>(support.size()); }
};

/// Throws DefectiveOrIllConditioned when the reconstruction residual exceeds
/// 1e-10 (relative, Frobenius) or cond(V) > 1e12.
SpectralDecomposition decompose(const ShiftOperator& shift, const DecompositionMode& how);

/// Symmetric when S is Hermitian, General otherwise.
SpectralDecomposition decompose(const ShiftOperator& shift);

/// Permutation putting `eigenvalues` in canonical order (see
/// SpectralDecomposition).
std::vector<Index> canonical_order(const CVector& eigenvalues);

FrequencyRepresentation gft(const SpectralDecomposition& decomp, const CVector& signal);
CVector igft(const SpectralDecomposition& decomp, const FrequencyRepresentation& freq);

/// Column-wise Vandermonde block: entry (l, k) = basis_k^l for l = 0..rows-1,
/// built by repeated elementwise multiplication.
CMatrix vandermonde(const CVector& basis, Index rows);

/// Psi with `rows` rows over all eigenvalues.
CMatrix build_psi(const SpectralDecomposition& decomp, Index rows);

/// upsilon_i = V^T e_i: row i of V as a column, not conjugated.
CVector node_pattern(const SpectralDecomposition& decomp, Index node);

/// x = V_K * coeffs.
CVector synthesize_bandlimited(const SpectralDecomposition& decomp,
                               std::span<const Index> support, const CVector& coeffs);

/// Draws coefficients (real Gaussian for real bases, circular complex
/// Gaussian otherwise) and synthesizes.
CVector synthesize_bandlimited(const SpectralDecomposition& decomp,
                               std::span<const Index> support, Rng& rng);

/// Random coefficient vector following the realness rule above.
CVector random_coefficients(const SpectralDecomposition& decomp, Index count, Rng& rng);

}  // namespace aggsamp
