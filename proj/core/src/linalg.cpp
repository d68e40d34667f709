#include "aggsamp/linalg.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "aggsamp/errors.hpp"

namespace aggsamp {

double condition_number(const CMatrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (smax == 0.0) return std::numeric_limits<double>::infinity();
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

Index numerical_rank(const CMatrix& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  const double threshold = static_cast<double>(std::max(m.rows(), m.cols())) *
                           std::numeric_limits<double>::epsilon() * s(0);
  return static_cast<Index>((s.array() > threshold).count());
}

CMatrix gather_rows(const CMatrix& m, std::span<const Index> rows) {
  CMatrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= m.rows())
      throw Error(ErrorCode::IndexOutOfRange,
                  "row " + std::to_string(rows[r]) + " outside [0, " +
                      std::to_string(m.rows()) + ")");
    out.row(static_cast<Index>(r)) = m.row(rows[r]);
  }
  return out;
}

CVector gather(const CVector& v, std::span<const Index> rows) {
  CVector out(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= v.size())
      throw Error(ErrorCode::IndexOutOfRange,
                  "entry " + std::to_string(rows[r]) + " outside [0, " +
                      std::to_string(v.size()) + ")");
    out(static_cast<Index>(r)) = v(rows[r]);
  }
  return out;
}

CMatrix gather_cols(const CMatrix& m, std::span<const Index> cols) {
  CMatrix out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c] < 0 || cols[c] >= m.cols())
      throw Error(ErrorCode::IndexOutOfRange,
                  "column " + std::to_string(cols[c]) + " outside [0, " +
                      std::to_string(m.cols()) + ")");
    out.col(static_cast<Index>(c)) = m.col(cols[c]);
  }
  return out;
}

void validate_support(std::span<const Index> support, Index n) {
  if (support.empty()) throw Error(ErrorCode::InvalidSupport, "empty support");
  if (static_cast<Index>(support.size()) > n)
    throw Error(ErrorCode::InvalidSupport, "support larger than the graph");
  std::vector<Index> sorted(support.begin(), support.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0 || sorted.back() >= n)
    throw Error(ErrorCode::InvalidSupport, "support index out of range");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(ErrorCode::InvalidSupport, "repeated support index");
}

CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) * 0.5; }

bool is_real(const CMatrix& m, double tol) {
  return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() <= tol;
}

bool is_real(const CVector& v, double tol) {
  return v.size() == 0 || v.imag().cwiseAbs().maxCoeff() <= tol;
}

double relative_error(const CVector& estimate, const CVector& truth) {
  const double denom = truth.norm();
  const double diff = (estimate - truth).norm();
  return denom > 0.0 ? diff / denom : diff;
}

}  // namespace aggsamp
