#pragma once

// Dense complex matrices and the functional calculus used by the correctors:
// operator norm, polar part, principal logarithm, exponential of skew-Hermitian
// matrices, rounding of unitary spectra to roots of unity, and rounding of
// self-adjoint matrices to projections.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "eqstab/errors.hpp"

namespace eqstab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Tolerance ladder: one calculus step, composed steps, precondition slack.
namespace tol {
inline constexpr double kStep = 1e-12;
inline constexpr double kComposed = 1e-11;
inline constexpr double kInput = 1e-10;
}  // namespace tol

inline constexpr double kPi = std::numbers::pi;

inline CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

inline void require_square(const CMatrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    std::ostringstream os;
    os << who << ": expected a nonempty square matrix, got " << a.rows() << "x" << a.cols();
    throw DimensionError(os.str());
  }
}

inline void require_finite(const CMatrix& a, const char* who) {
  if (!a.allFinite()) throw InvalidArgument(std::string(who) + ": non-finite entries");
}

/// Largest singular value.
inline double operator_norm(const CMatrix& a) {
  require_finite(a, "operator_norm");
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

inline double smallest_singular_value(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

/// max(||a*a - 1||, ||aa* - 1||).
inline double unitarity_defect(const CMatrix& a) {
  require_square(a, "unitarity_defect");
  const auto n = a.rows();
  return std::max(operator_norm(a.adjoint() * a - identity(n)),
                  operator_norm(a * a.adjoint() - identity(n)));
}

inline double hermitian_defect(const CMatrix& a) { return operator_norm(a - a.adjoint()); }

inline double skew_defect(const CMatrix& a) { return operator_norm(a + a.adjoint()); }

inline bool approx_equal(const CMatrix& a, const CMatrix& b, double tolerance) {
  return a.rows() == b.rows() && a.cols() == b.cols() && operator_norm(a - b) <= tolerance;
}

/// Eigendecomposition of a normal matrix: input ~= V diag(eigenvalues) V*.
struct SpectralData {
  CVector eigenvalues;
  CMatrix eigenvectors;  // unitary

  CMatrix reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
  }
};

/// Relative residual ||aV - V diag(l)|| / max(1, ||a||).
inline double spectral_residual(const CMatrix& a, const SpectralData& s) {
  const CMatrix r = a * s.eigenvectors - s.eigenvectors * s.eigenvalues.asDiagonal();
  return operator_norm(r) / std::max(1.0, operator_norm(a));
}

inline SpectralData hermitian_eigen(const CMatrix& a) {
  require_square(a, "hermitian_eigen");
  const CMatrix h = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw Error("hermitian_eigen: eigensolver failed");
  return {es.eigenvalues().cast<Complex>(), es.eigenvectors()};
}

namespace detail {

// Mixing constant for the Hermitian combination Re(a) + c Im(a). Any
// irrational value works; collisions only occur for eigenvalue pairs placed
// symmetrically about the angle atan(c), which the residual check catches.
inline constexpr double kMixing = 0.7548776662466927;

inline SpectralData normal_eigen_hermitian_route(const CMatrix& a) {
  const CMatrix re = (a + a.adjoint()) / 2.0;
  const CMatrix im = (a - a.adjoint()) / Complex(0.0, 2.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(re + kMixing * im);
  if (es.info() != Eigen::Success) throw Error("normal_eigen: eigensolver failed");
  SpectralData s{CVector(a.rows()), es.eigenvectors()};
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const auto q = s.eigenvectors.col(i);
    s.eigenvalues(i) = (q.adjoint() * a * q)(0, 0);
  }
  return s;
}

inline SpectralData normal_eigen_schur_route(const CMatrix& a) {
  Eigen::ComplexSchur<CMatrix> cs(a);
  if (cs.info() != Eigen::Success) throw Error("normal_eigen: Schur decomposition failed");
  return {cs.matrixT().diagonal(), cs.matrixU()};
}

}  // namespace detail

/// Eigendecomposition of a normal matrix (unitary or Hermitian in practice).
/// Throws PreconditionError when neither route reaches the 1e-11 residual,
/// i.e. when the input is not normal to working accuracy.
inline SpectralData normal_eigen(const CMatrix& a) {
  require_square(a, "normal_eigen");
  require_finite(a, "normal_eigen");
  SpectralData s = detail::normal_eigen_hermitian_route(a);
  double res = spectral_residual(a, s);
  if (res <= tol::kComposed) return s;
  SpectralData t = detail::normal_eigen_schur_route(a);
  const double res_t = spectral_residual(a, t);
  if (res_t < res) {
    s = std::move(t);
    res = res_t;
  }
  if (res > 1e-9) {
    throw PreconditionError("normal_eigen: matrix is not normal (residual " +
                                std::to_string(res) + ")",
                            res);
  }
  return s;
}

/// f applied to the spectrum: V diag(f(l)) V*.
template <class F>
CMatrix apply_spectral(const SpectralData& s, F&& f) {
  CVector fl(s.eigenvalues.size());
  for (Eigen::Index i = 0; i < fl.size(); ++i) fl(i) = f(s.eigenvalues(i));
  return s.eigenvectors * fl.asDiagonal() * s.eigenvectors.adjoint();
}

/// Unitary part a (a*a)^{-1/2} of an invertible matrix.
inline CMatrix polar_unitary(const CMatrix& a) {
  require_square(a, "polar_unitary");
  require_finite(a, "polar_unitary");
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(smin > 1e-10)) {
    std::ostringstream os;
    os << "polar_unitary: input is numerically singular (smallest singular value " << smin << ")";
    throw PreconditionError(os.str(), smin);
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

/// Principal logarithm of a unitary; eigen-arguments land in (-pi, pi).
inline CMatrix principal_log_unitary(const CMatrix& u) {
  require_square(u, "principal_log_unitary");
  require_finite(u, "principal_log_unitary");
  const double ud = unitarity_defect(u);
  if (ud > tol::kInput) {
    throw PreconditionError("principal_log_unitary: input not unitary (defect " +
                                std::to_string(ud) + ")",
                            ud);
  }
  const SpectralData s = normal_eigen(u);
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    const double gap = kPi - std::abs(std::arg(s.eigenvalues(i)));
    if (gap <= 1e-8) {
      std::ostringstream os;
      os << "principal_log_unitary: eigenvalue " << s.eigenvalues(i)
         << " lies on the branch cut at -1 (argument gap " << gap << ")";
      throw PreconditionError(os.str(), gap);
    }
  }
  const CMatrix x =
      apply_spectral(s, [](Complex l) { return Complex(0.0, std::arg(l)); });
  return (x - x.adjoint()) / 2.0;
}

/// exp(X) for skew-Hermitian X, computed through the Hermitian matrix -iX.
inline CMatrix exp_skew(const CMatrix& x) {
  require_square(x, "exp_skew");
  require_finite(x, "exp_skew");
  const double sd = skew_defect(x);
  if (sd > tol::kInput) {
    throw PreconditionError("exp_skew: input not skew-Hermitian (defect " +
                                std::to_string(sd) + ")",
                            sd);
  }
  const CMatrix h = Complex(0.0, -1.0) * x;
  const SpectralData s = hermitian_eigen(h);
  return apply_spectral(s, [](Complex l) { return std::exp(Complex(0.0, l.real())); });
}

/// Result of rounding a unitary spectrum onto the d-th roots of unity.
struct RootRounding {
  CMatrix rounded;               // z, with z^d = 1
  std::vector<int> root_index;   // per eigenvector column: k with eigenvalue e^{2 pi i k/d}
  double min_midpoint_gap = 0;   // smallest angular distance to a midpoint e^{i pi (2k+1)/d}
  SpectralData spectrum;         // eigenbasis shared by input and output
};

/// Nearest-root rounding with the eigenbasis of w reused. Covariant:
/// rounding lambda*w gives lambda*rounding(w) for lambda a d-th root of unity.
inline RootRounding round_to_roots(const CMatrix& w, int d) {
  require_square(w, "spectral_round_unitary");
  if (d < 1) throw InvalidArgument("spectral_round_unitary: d must be positive");
  const double ud = unitarity_defect(w);
  if (ud > tol::kInput) {
    throw PreconditionError("spectral_round_unitary: input not unitary (defect " +
                                std::to_string(ud) + ")",
                            ud);
  }
  RootRounding out;
  out.spectrum = normal_eigen(w);
  const auto n = w.rows();
  out.root_index.resize(static_cast<std::size_t>(n));
  out.min_midpoint_gap = kPi;
  CVector roots(n);
  const double step = 2.0 * kPi / d;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex l = out.spectrum.eigenvalues(i);
    const double t = std::arg(l) / step;  // in (-d/2, d/2]
    const double nearest = std::round(t);
    const double gap = (0.5 - std::abs(t - nearest)) * step;
    if (gap <= 1e-6) {
      std::ostringstream os;
      os << "spectral_round_unitary: eigenvalue " << l
         << " is within " << gap << " rad of a rounding midpoint";
      throw PreconditionError(os.str(), gap);
    }
    out.min_midpoint_gap = std::min(out.min_midpoint_gap, gap);
    int k = static_cast<int>(nearest) % d;
    if (k < 0) k += d;
    out.root_index[static_cast<std::size_t>(i)] = k;
    roots(i) = std::polar(1.0, step * k);
  }
  out.rounded = out.spectrum.eigenvectors * roots.asDiagonal() * out.spectrum.eigenvectors.adjoint();
  return out;
}

inline CMatrix spectral_round_unitary(const CMatrix& w, int d) { return round_to_roots(w, d).rounded; }

/// Spectral projection of a self-adjoint matrix onto eigenvalues above 1/2.
struct ProjectionRounding {
  CMatrix projection;
  CMatrix range_basis;     // orthonormal columns spanning the range
  double band_distance{};  // min over eigenvalues of |lambda - 1/2|
};

inline ProjectionRounding round_to_projection_detailed(const CMatrix& b) {
  require_square(b, "round_to_projection");
  require_finite(b, "round_to_projection");
  const double hd = hermitian_defect(b);
  if (hd > tol::kInput) {
    throw PreconditionError("round_to_projection: input not self-adjoint (defect " +
                                std::to_string(hd) + ")",
                            hd);
  }
  const SpectralData s = hermitian_eigen(b);
  ProjectionRounding out;
  out.band_distance = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    const double l = s.eigenvalues(i).real();
    if (l >= 0.4 && l <= 0.6) {
      std::ostringstream os;
      os << "round_to_projection: eigenvalue " << l << " lies in the forbidden band [0.4, 0.6]";
      throw PreconditionError(os.str(), l);
    }
    out.band_distance = std::min(out.band_distance, std::abs(l - 0.5));
    if (l > 0.5) kept.push_back(i);
  }
  out.range_basis = CMatrix(b.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    out.range_basis.col(static_cast<Eigen::Index>(j)) = s.eigenvectors.col(kept[j]);
  }
  out.projection = out.range_basis * out.range_basis.adjoint();
  return out;
}

inline CMatrix round_to_projection(const CMatrix& b) { return round_to_projection_detailed(b).projection; }

inline CMatrix matrix_power(const CMatrix& a, int k) {
  CMatrix out = identity(a.rows());
  for (int i = 0; i < k; ++i) out = out * a;
  return out;
}

}  // namespace eqstab
