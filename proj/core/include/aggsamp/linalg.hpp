#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace aggsamp {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Ordered set of 0-based frequency indices (the active support).
using Support = std::vector<Index>;

/// Condition-number ceiling applied to every linear solve.
inline constexpr double kConditionGate = 1e12;

/// 2-norm condition number from singular values; +inf when rank deficient.
double condition_number(const CMatrix& m);

/// Numerical rank with threshold max(rows, cols) * eps * sigma_max.
Index numerical_rank(const CMatrix& m);

/// Gathers rows `rows` of `m` in order (the product C*M for an index-list C).
CMatrix gather_rows(const CMatrix& m, std::span<const Index> rows);
CVector gather(const CVector& v, std::span<const Index> rows);
CMatrix gather_cols(const CMatrix& m, std::span<const Index> cols);

/// Throws InvalidSupport unless `support` is nonempty, distinct and in [0, n).
void validate_support(std::span<const Index> support, Index n);

/// (M + M^H) / 2.
CMatrix hermitian_part(const CMatrix& m);

bool is_real(const CMatrix& m, double tol = 0.0);
bool is_real(const CVector& v, double tol = 0.0);

/// Relative error ||a - b|| / ||b||, falling back to the absolute error when
/// b vanishes.
double relative_error(const CVector& estimate, const CVector& truth);

}  // namespace aggsamp
