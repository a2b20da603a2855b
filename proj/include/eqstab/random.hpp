#pragma once

// Deterministic random matrices for scenario generation.
//
// Stream definition (reproducible across implementations): the i-th 64-bit
// output (i = 0, 1, ...) of a stream with key `seed` is
//   splitmix64_mix(seed + (i + 1) * 0x9E3779B97F4A7C15)
// where splitmix64_mix(z) = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//                           z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31.
// Uniform doubles take the top 53 bits: (x >> 11) * 2^-53. Normal deviates use
// Box-Muller on two consecutive uniforms u1, u2: sqrt(-2 ln(1 - u1)) cos(2 pi u2);
// each call consumes two uniforms.

#include <cmath>
#include <cstdint>

#include "eqstab/matca.hpp"

namespace eqstab {

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() { return mix(seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }

  double normal() {
    const double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * kPi * u2);
  }

  /// Independent child stream (e.g. per trial).
  CounterRng fork(std::uint64_t key) const { return CounterRng(mix(seed_ ^ mix(key + 0x632BE59BD9B4E019ULL))); }

  std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

inline CMatrix random_gaussian(CounterRng& rng, Eigen::Index rows, Eigen::Index cols) {
  CMatrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      a(i, j) = Complex(re, im);
    }
  return a;
}

/// Random Hermitian matrix with operator norm exactly `norm`.
inline CMatrix random_hermitian(CounterRng& rng, Eigen::Index n, double norm = 1.0) {
  const CMatrix g = random_gaussian(rng, n, n);
  const CMatrix h = (g + g.adjoint()) / 2.0;
  const double s = operator_norm(h);
  return s > 0 ? CMatrix(h * (norm / s)) : CMatrix(CMatrix::Zero(n, n));
}

/// Random skew-Hermitian matrix with operator norm exactly `norm`.
inline CMatrix random_skew(CounterRng& rng, Eigen::Index n, double norm = 1.0) {
  return Complex(0.0, 1.0) * random_hermitian(rng, n, norm);
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
inline CMatrix random_unitary(CounterRng& rng, Eigen::Index n) {
  const CMatrix g = random_gaussian(rng, n, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return polar_unitary(q);
}

/// exp(eps H) with H random skew-Hermitian of norm 1.
inline CMatrix random_near_identity(CounterRng& rng, Eigen::Index n, double eps) {
  return exp_skew(random_skew(rng, n, eps));
}

}  // namespace eqstab
