#pragma once

// Independent oracles for the test suite. None of these call into the
// library's linear algebra: norms come from power iteration, group tables
// from direct permutation composition, circle integrals from entrywise
// degree bookkeeping.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "eqstab/groups.hpp"
#include "eqstab/matca.hpp"
#include "eqstab/random.hpp"

namespace oracle {

using eqstab::CMatrix;
using eqstab::Complex;

/// Largest singular value by power iteration on a* a with a Rayleigh
/// quotient readout. Deterministic start vector.
inline double power_norm(const CMatrix& a, int iterations = 4000) {
  if (a.size() == 0) return 0.0;
  const CMatrix m = a.adjoint() * a;
  Eigen::VectorXcd x(m.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = Complex(1.0 + 0.37 * i, 0.11 * (i % 3) - 0.05);
  double lambda = 0;
  for (int k = 0; k < iterations; ++k) {
    Eigen::VectorXcd y = m * x;
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;
    const double next = std::real(x.dot(y)) / x.squaredNorm();
    x = y / ny;
    if (k > 50 && std::abs(next - lambda) <= 1e-16 * std::max(1.0, next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

/// max over all pairs of ||f(gh) - f(g) f(h)|| by exhaustive enumeration.
inline double brute_pair_defect(const std::vector<CMatrix>& f, const std::function<int(int, int)>& mul) {
  double worst = 0;
  const int n = static_cast<int>(f.size());
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h) worst = std::max(worst, power_norm(f[mul(g, h)] - f[g] * f[h]));
  return worst;
}

/// Composition table of all permutations of {0..n-1}, (p o q)(i) = p(q(i)),
/// in lexicographic order.
struct PermGroup {
  std::vector<std::vector<int>> elements;
  std::vector<std::vector<int>> table;
};

inline PermGroup enumerate_permutations(int n) {
  PermGroup out;
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[i] = i;
  do out.elements.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  const auto find = [&](const std::vector<int>& q) {
    return static_cast<int>(std::find(out.elements.begin(), out.elements.end(), q) - out.elements.begin());
  };
  for (const auto& a : out.elements) {
    std::vector<int> row;
    for (const auto& b : out.elements) {
      std::vector<int> c(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) c[i] = a[b[i]];
      row.push_back(find(c));
    }
    out.table.push_back(std::move(row));
  }
  return out;
}

inline int perm_order(const std::vector<int>& p) {
  std::vector<int> q = p;
  int k = 1;
  while (true) {
    bool id = true;
    for (std::size_t i = 0; i < q.size(); ++i) id = id && q[i] == static_cast<int>(i);
    if (id) return k;
    std::vector<int> r(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) r[i] = p[q[i]];
    q = r;
    ++k;
  }
}

/// Exact circle average of zeta^m U* v U, U = diag(zeta^{k_j}): entry (i, j)
/// carries zeta^{m + k_j - k_i} and survives iff that exponent is zero.
inline CMatrix symbolic_circle_average(const std::vector<int>& weights, const CMatrix& v, int m) {
  CMatrix out = CMatrix::Zero(v.rows(), v.cols());
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index j = 0; j < v.cols(); ++j)
      if (m + weights[static_cast<std::size_t>(j)] - weights[static_cast<std::size_t>(i)] == 0) out(i, j) = v(i, j);
  return out;
}

/// Nearest d-th root of unity to a unit scalar, by argument.
inline Complex nearest_root(Complex z, int d) {
  const double two_pi = 2.0 * eqstab::kPi;
  double t = std::arg(z);
  if (t < 0) t += two_pi;
  const int k = static_cast<int>(std::lround(t / (two_pi / d))) % d;
  return std::polar(1.0, two_pi * k / d);
}

inline CMatrix random_diag_unitary(eqstab::CounterRng& rng, int n, double max_angle) {
  CMatrix d = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = std::polar(1.0, rng.uniform(-max_angle, max_angle));
  return d;
}

/// Left regular representation read straight off the multiplication table,
/// plus `trivial` copies of the trivial representation, conjugated by w.
inline std::vector<CMatrix> regular_plus_trivial(const eqstab::FiniteGroup& g, int trivial, const CMatrix& w) {
  const int m = g.order();
  const int n = m + trivial;
  std::vector<CMatrix> out;
  for (int x = 0; x < m; ++x) {
    CMatrix p = CMatrix::Zero(n, n);
    for (int h = 0; h < m; ++h) p(g.mul(x, h), h) = 1.0;
    for (int k = m; k < n; ++k) p(k, k) = 1.0;
    out.push_back(w * p * w.adjoint());
  }
  return out;
}

}  // namespace oracle
