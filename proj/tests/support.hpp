#pragma once

#include <aggsamp/errors.hpp>
#include <aggsamp/experiments.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace aggsamp::testing {

inline GraphInstance er_instance(Index n, double p, std::uint64_t seed,
                                 ShiftKind kind = ShiftKind::Adjacency) {
  return make_instance(erdos_renyi(n, p, seed), kind);
}

inline GraphInstance cycle_instance(Index n, bool analytic = false) {
  return make_instance(directed_cycle(n), ShiftKind::Adjacency, analytic);
}

inline double rel(const CMatrix& a, const CMatrix& b) {
  const double nb = b.norm();
  return nb == 0.0 ? a.norm() : (a - b).norm() / nb;
}

inline Support iota_support(Index k) {
  Support s;
  for (Index i = 0; i < k; ++i) s.push_back(i);
  return s;
}

inline CMatrix dft(Index n) {
  CMatrix f(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      f(i, j) = std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                           2.0 * std::numbers::pi * static_cast<double>(i * j) / static_cast<double>(n));
  return f;
}

}  // namespace aggsamp::testing
