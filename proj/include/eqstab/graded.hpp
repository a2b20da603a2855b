#pragma once

// Gradings by finite abelian groups, realized through a dual action of the
// character group, and correction of approximately graded unitary
// representations to exact ones.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "eqstab/errors.hpp"
#include "eqstab/groups.hpp"
#include "eqstab/homcorrect.hpp"
#include "eqstab/matca.hpp"

namespace eqstab {

/// M_n graded by an abelian G through beta_tau = Ad(W_tau), tau in the dual
/// group. The g-component is the range of
///   P_g(x) = (1/|G|) sum_tau conj(tau(g)) beta_tau(x).
class GradedAlgebra {
 public:
  /// dual[t] implements the character characters(group)[t]. Throws for
  /// nonabelian groups and when tau -> beta_tau is not a homomorphism.
  GradedAlgebra(FiniteGroup group, std::vector<CMatrix> dual) : group_(std::move(group)), dual_(std::move(dual)) {
    if (!group_.is_abelian()) throw InvalidArgument("GradedAlgebra: nonabelian gradings are not supported");
    chars_ = characters(group_);
    const int m = group_.order();
    if (static_cast<int>(dual_.size()) != m) throw DimensionError("GradedAlgebra: one unitary per character");
    for (const auto& w : dual_) {
      require_square(w, "GradedAlgebra");
      if (w.rows() != dual_.front().rows()) throw DimensionError("GradedAlgebra: dual unitaries differ in size");
      const double u = unitarity_defect(w);
      if (u > tol::kInput) throw PreconditionError("GradedAlgebra: dual value is not unitary", u);
    }
    // Ad(W_s) Ad(W_t) = Ad(W_{st}) iff W_s W_t W_{st}* is a scalar.
    product_.assign(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(m), -1));
    for (int s = 0; s < m; ++s)
      for (int t = 0; t < m; ++t) {
        const int st = character_index_of_product(s, t);
        product_[s][t] = st;
        hom_defect_ = std::max(hom_defect_, scalar_defect(dual_[s] * dual_[t] * dual_[st].adjoint()));
      }
    if (hom_defect_ > tol::kStep) {
      throw PreconditionError("GradedAlgebra: dual action is not a homomorphism (defect " +
                                  std::to_string(hom_defect_) + ")",
                              hom_defect_);
    }
  }

  const FiniteGroup& group() const noexcept { return group_; }
  const std::vector<std::vector<Complex>>& chars() const noexcept { return chars_; }
  const std::vector<CMatrix>& dual() const noexcept { return dual_; }
  int dim() const { return static_cast<int>(dual_.front().rows()); }
  double homomorphism_defect() const noexcept { return hom_defect_; }

  CMatrix beta(int t, const CMatrix& x) const { return dual_.at(static_cast<std::size_t>(t)) * x * dual_[t].adjoint(); }

  CMatrix project(int g, const CMatrix& x) const {
    if (x.rows() != dim() || x.cols() != dim()) throw DimensionError("grading_projection: element has the wrong size");
    if (g < 0 || g >= group_.order()) throw InvalidArgument("grading_projection: unknown group element");
    CMatrix out = CMatrix::Zero(dim(), dim());
    for (int t = 0; t < group_.order(); ++t) out += std::conj(chars_[t][g]) * beta(t, x);
    return out / static_cast<double>(group_.order());
  }

  /// ||x - P_g(x)||: distance of x from the g-component.
  double leak(int g, const CMatrix& x) const { return operator_norm(x - project(g, x)); }

  /// The same grading transported along Ad(U).
  GradedAlgebra conjugated(const CMatrix& u) const {
    std::vector<CMatrix> w;
    for (const auto& d : dual_) w.push_back(u * d * u.adjoint());
    return GradedAlgebra(group_, std::move(w));
  }

 private:
  int character_index_of_product(int s, int t) const {
    for (int r = 0; r < group_.order(); ++r) {
      bool same = true;
      for (int g = 0; g < group_.order() && same; ++g) same = std::abs(chars_[s][g] * chars_[t][g] - chars_[r][g]) < 1e-9;
      if (same) return r;
    }
    throw Error("GradedAlgebra: character table is not closed under products");
  }

  static double scalar_defect(const CMatrix& m) {
    const Complex c = m.trace() / static_cast<double>(m.rows());
    return operator_norm(m - c * identity(m.rows()));
  }

  FiniteGroup group_;
  std::vector<CMatrix> dual_;
  std::vector<std::vector<Complex>> chars_;
  std::vector<std::vector<int>> product_;
  double hom_defect_ = 0;
};

inline CMatrix grading_projection(const GradedAlgebra& a, int g, const CMatrix& x) { return a.project(g, x); }

/// The regular model: C*(G) acting on l^2(G), u_g e_h = e_{gh}, W_tau = diag(tau(h)),
/// so beta_tau(u_g) = tau(g) u_g. With multiplicity k everything is tensored
/// with the identity of M_k.
struct RegularModel {
  GradedAlgebra algebra;
  ApproxRep units;
};

inline RegularModel regular_model(const FiniteGroup& group, int multiplicity = 1) {
  if (multiplicity < 1) throw InvalidArgument("regular_model: multiplicity must be positive");
  const int m = group.order();
  const int k = multiplicity;
  const auto chars = characters(group);
  std::vector<CMatrix> dual;
  for (int t = 0; t < m; ++t) {
    CMatrix w = CMatrix::Zero(m * k, m * k);
    for (int h = 0; h < m; ++h) w.block(h * k, h * k, k, k) = chars[t][h] * identity(k);
    dual.push_back(std::move(w));
  }
  ApproxRep units{group, {}};
  for (int g = 0; g < m; ++g) {
    CMatrix u = CMatrix::Zero(m * k, m * k);
    for (int h = 0; h < m; ++h) u.block(group.mul(g, h) * k, h * k, k, k) = identity(k);
    units.values.push_back(std::move(u));
  }
  return {GradedAlgebra(group, std::move(dual)), std::move(units)};
}

struct GradedOptions {
  double tolerance = 1e-12;
  int max_iterations = 64;
  double epsilon = kEps;  // admissible ||psi1(g) - P_g(psi1(g))||
};

struct GradedResult {
  ApproxRep rep;
  ApproxRep start;                     // rho0(g) = polar(P_g(psi1(g)))
  CorrectionResult correction;
  double input_leak = 0;               // max_g ||psi1(g) - P_g(psi1(g))||
  double start_leak = 0;               // max_g leak of rho0(g)
  std::vector<double> iterate_leaks;   // max_g leak of rho_m(g), m = 0, 1, ...
  double max_iterate_leak = 0;
  double distance = 0;                 // max_g ||rho(g) - rho0(g)||
  double distance_bound = 0;           // 2r/(1 - 17r) at the measured r = defect(rho0)
  double theorem_distance_bound = 0;   // 2 (6 eps0)/(1 - 17 (6 eps0))
};

inline double graded_leak(const GradedAlgebra& a, const ApproxRep& rho) {
  double worst = 0;
  for (int g = 0; g < a.group().order(); ++g) worst = std::max(worst, a.leak(g, rho(g)));
  return worst;
}

/// Projects each psi1(g) to its component, takes polar parts, and runs the
/// averaged-logarithm iteration; every iterate stays in the right components
/// because each correction factor lies in the identity component.
inline GradedResult graded_correct(const GradedAlgebra& a, const std::vector<CMatrix>& psi1,
                                   const GradedOptions& opts = {}) {
  const auto& G = a.group();
  if (static_cast<int>(psi1.size()) != G.order()) throw DimensionError("graded_correct: one value per group element");
  GradedResult out{ApproxRep{G, {}}, ApproxRep{G, {}}, {}, 0, 0, {}, 0, 0, 0, 0};
  std::vector<CMatrix> components;
  for (int g = 0; g < G.order(); ++g) {
    const CMatrix c = a.project(g, psi1[g]);
    const double d = operator_norm(psi1[g] - c);
    out.input_leak = std::max(out.input_leak, d);
    if (!(d < opts.epsilon)) {
      std::ostringstream os;
      os << "graded_correct: psi1(" << G.label(g) << ") is " << d << " from its component (admissible: < "
         << opts.epsilon << ")";
      throw PreconditionError(os.str(), d);
    }
    const double smin = smallest_singular_value(c);
    if (smin <= tol::kInput) {
      throw PreconditionError("graded_correct: component of psi1(" + G.label(g) + ") is singular", smin);
    }
    components.push_back(c);
  }
  for (const auto& c : components) out.start.values.push_back(polar_unitary(c));
  out.start_leak = graded_leak(a, out.start);

  CorrectionOptions copts;
  copts.tolerance = opts.tolerance;
  copts.max_iterations = opts.max_iterations;
  out.correction = correct_to_rep(out.start, copts, [&](const ApproxRep& rho) { return graded_leak(a, rho); });
  out.rep = out.correction.rep;
  out.iterate_leaks = out.correction.iterate_checks;
  for (double l : out.iterate_leaks) out.max_iterate_leak = std::max(out.max_iterate_leak, l);
  out.distance = out.correction.distance;
  const double r = out.correction.initial_defect;
  out.distance_bound = 2.0 * r / (1.0 - 17.0 * r);
  out.theorem_distance_bound = 2.0 * (6.0 * kEps0) / (1.0 - 17.0 * 6.0 * kEps0);
  return out;
}

}  // namespace eqstab
