#pragma once

#include <complex>
#include <cstdint>

namespace aggsamp {

/// SplitMix64: a counter-based 64-bit generator. The state advances by the
/// golden-ratio increment 0x9e3779b97f4a7c15 and each output is the state
/// passed through the finalizer (shifts 30/27/31, multipliers
/// 0xbf58476d1ce4e5b9 and 0x94d049bb133111eb). Every draw below is built
/// from these integers only, so streams reproduce bit-for-bit on any
/// platform (std:: distributions do not guarantee that).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  /// Independent stream for the `index`-th experiment under `master_seed`.
  static Rng stream(std::uint64_t master_seed, std::uint64_t index) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [lo, hi] (inclusive); unbiased via rejection.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept;

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Standard normal via the Box-Muller transform (no cached second draw).
  double gaussian() noexcept;

  /// Circular complex Gaussian with E|z|^2 = 1.
  std::complex<double> complex_gaussian() noexcept;

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// The SplitMix64 finalizer applied to one value.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace aggsamp
