#pragma once

// Correction of approximate unitary representations of finite groups:
// defect measurement, the logarithm-averaging one-step correction and its
// iteration, symmetrization against a group action, polar unitarization,
// intertwiners between close representations, and the equivariant lifting
// pipeline through a tower of quotients.

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eqstab/errors.hpp"
#include "eqstab/galg.hpp"
#include "eqstab/groups.hpp"
#include "eqstab/matca.hpp"

namespace eqstab {

/// eps0 = 1/(6*34): the unitarization budget of the lifting pipeline.
inline constexpr double kEps0 = 1.0 / (6.0 * 34.0);
/// eps = eps0/2: admissible distance to the unitaries before taking polar parts.
inline constexpr double kEps = kEps0 / 2.0;

using QuotientMap = std::function<CMatrix(const CMatrix&)>;

/// A map g -> square matrix on a finite group; multiplicativity is measured.
struct ApproxRep {
  FiniteGroup group;
  std::vector<CMatrix> values;

  int dim() const { return values.empty() ? 0 : static_cast<int>(values.front().rows()); }
  const CMatrix& operator()(int g) const { return values.at(static_cast<std::size_t>(g)); }

  void validate() const {
    if (static_cast<int>(values.size()) != group.order()) {
      throw DimensionError("ApproxRep: one value per group element required");
    }
    for (const auto& v : values) {
      require_square(v, "ApproxRep");
      if (v.rows() != values.front().rows()) throw DimensionError("ApproxRep: values differ in size");
    }
  }

  double unitarity() const {
    double worst = 0;
    for (const auto& v : values) worst = std::max(worst, unitarity_defect(v));
    return worst;
  }
};

struct PairDefect {
  double value = 0;
  int g = 0;
  int h = 0;
};

/// max over (g, h) of ||rho(gh) - rho(g) rho(h)||, with the attaining pair.
inline PairDefect worst_pair(const ApproxRep& rho) {
  rho.validate();
  PairDefect out;
  const auto& G = rho.group;
  for (int g = 0; g < G.order(); ++g)
    for (int h = 0; h < G.order(); ++h) {
      const double d = operator_norm(rho(G.mul(g, h)) - rho(g) * rho(h));
      if (d > out.value) out = {d, g, h};
    }
  return out;
}

inline double defect(const ApproxRep& rho) { return worst_pair(rho).value; }

/// max_g ||a(g) - b(g)||.
inline double distance(const ApproxRep& a, const ApproxRep& b) {
  double worst = 0;
  for (int g = 0; g < a.group.order(); ++g) worst = std::max(worst, operator_norm(a(g) - b(g)));
  return worst;
}

inline ApproxRep apply_quotient(const ApproxRep& rho, const QuotientMap& kappa) {
  ApproxRep out{rho.group, {}};
  for (const auto& v : rho.values) out.values.push_back(kappa(v));
  return out;
}

namespace detail {

inline void require_unitary_values(const ApproxRep& rho, const char* who) {
  const double u = rho.unitarity();
  if (u > tol::kInput) {
    throw PreconditionError(std::string(who) + ": values are not unitary (defect " + std::to_string(u) + ")", u);
  }
}

}  // namespace detail

/// sigma(g) = exp( avg_k log(rho(k)* rho(kg) rho(g)*) ) rho(g).
/// Requires defect(rho) <= 1/5.
inline ApproxRep one_step(const ApproxRep& rho) {
  detail::require_unitary_values(rho, "one_step");
  const PairDefect r = worst_pair(rho);
  if (r.value > 0.2) {
    std::ostringstream os;
    os << "one_step: defect " << r.value << " exceeds 1/5 at pair (" << rho.group.label(r.g) << ", "
       << rho.group.label(r.h) << ")";
    throw PreconditionError(os.str(), r.value);
  }
  const auto& G = rho.group;
  ApproxRep sigma{G, {}};
  sigma.values.reserve(rho.values.size());
  for (int g = 0; g < G.order(); ++g) {
    const CMatrix rg_adj = rho(g).adjoint();
    const CMatrix avg_log = haar_average(G, [&](int k) {
      return principal_log_unitary(rho(k).adjoint() * rho(G.mul(k, g)) * rg_adj);
    });
    sigma.values.push_back(exp_skew(avg_log) * rho(g));
  }
  return sigma;
}

/// One row of a correction trace.
struct TraceRow {
  int iteration = 0;
  double defect = 0;
  double distance = 0;  // from the starting point
};

/// The iteration cap was hit; carries the trace.
class ConvergenceError : public Error {
 public:
  ConvergenceError(std::string what, std::vector<TraceRow> trace)
      : Error(std::move(what)), trace_(std::move(trace)) {}
  const std::vector<TraceRow>& trace() const noexcept { return trace_; }

 private:
  std::vector<TraceRow> trace_;
};

struct CorrectionOptions {
  double tolerance = 1e-12;
  int max_iterations = 64;
  QuotientMap quotient;  // optional kappa whose image must stay fixed
};

struct CorrectionResult {
  ApproxRep rep;
  int iterations = 0;
  double initial_defect = 0;
  double final_defect = 0;
  double distance = 0;        // max_g ||rho(g) - rho0(g)||
  double quotient_drift = 0;  // max_g ||kappa(rho(g)) - kappa(rho0(g))||, 0 without kappa
  std::vector<TraceRow> trace;
  /// Optional per-iterate hook output (see graded correction).
  std::vector<double> iterate_checks;
};

/// Iterates one_step until the defect is below tolerance. Requires
/// defect(rho0) < 1/17; with a quotient kappa, kappa o rho0 must already be a
/// representation, and kappa o rho stays equal to kappa o rho0.
inline CorrectionResult correct_to_rep(const ApproxRep& rho0, const CorrectionOptions& opts = {},
                                       const std::function<double(const ApproxRep&)>& per_iterate = {}) {
  detail::require_unitary_values(rho0, "correct_to_rep");
  const PairDefect r0 = worst_pair(rho0);
  if (!(r0.value < 1.0 / 17.0)) {
    std::ostringstream os;
    os << "correct_to_rep: defect " << r0.value << " is not below 1/17 (pair " << rho0.group.label(r0.g) << ", "
       << rho0.group.label(r0.h) << ")";
    throw PreconditionError(os.str(), r0.value);
  }
  std::optional<ApproxRep> downstairs;
  if (opts.quotient) {
    downstairs = apply_quotient(rho0, opts.quotient);
    const double dd = defect(*downstairs);
    if (dd > tol::kStep) {
      throw PreconditionError("correct_to_rep: quotient image is not a representation (defect " +
                                  std::to_string(dd) + ")",
                              dd);
    }
  }
  CorrectionResult out{rho0, 0, r0.value, r0.value, 0.0, 0.0, {{0, r0.value, 0.0}}, {}};
  if (per_iterate) out.iterate_checks.push_back(per_iterate(rho0));
  while (out.final_defect > opts.tolerance) {
    if (out.iterations >= opts.max_iterations) {
      std::ostringstream os;
      os << "correct_to_rep: no convergence after " << out.iterations << " iterations (defect "
         << out.final_defect << ")";
      throw ConvergenceError(os.str(), out.trace);
    }
    out.rep = one_step(out.rep);
    ++out.iterations;
    out.final_defect = defect(out.rep);
    out.distance = distance(out.rep, rho0);
    out.trace.push_back({out.iterations, out.final_defect, out.distance});
    if (per_iterate) out.iterate_checks.push_back(per_iterate(out.rep));
  }
  if (downstairs) out.quotient_drift = distance(apply_quotient(out.rep, opts.quotient), *downstairs);
  return out;
}

// ---------------------------------------------------------------------------
// Source actions on group algebras

/// A G-action on the group algebra C*(H) by alpha_g(u_h) = c_g(h) u_{beta_g(h)},
/// with beta_g automorphisms of H and c_g characters of H.
struct SourceAction {
  FiniteGroup acting;                          // G
  FiniteGroup source;                          // H
  std::vector<std::vector<int>> automorphism;  // [g][h] = beta_g(h)
  std::vector<std::vector<Complex>> twist;     // [g][h] = c_g(h)

  static SourceAction trivial(FiniteGroup g, FiniteGroup h) {
    SourceAction a{g, h, {}, {}};
    for (int x = 0; x < g.order(); ++x) {
      std::vector<int> id(static_cast<std::size_t>(h.order()));
      std::iota(id.begin(), id.end(), 0);
      a.automorphism.push_back(std::move(id));
      a.twist.emplace_back(static_cast<std::size_t>(h.order()), Complex(1.0, 0.0));
    }
    return a;
  }

  /// H acting on itself by inner automorphisms h -> g h g^{-1}.
  static SourceAction conjugation(const FiniteGroup& h) {
    SourceAction a{h, h, {}, {}};
    for (int g = 0; g < h.order(); ++g) {
      std::vector<int> beta(static_cast<std::size_t>(h.order()));
      for (int x = 0; x < h.order(); ++x) beta[x] = h.mul(h.mul(g, x), h.inv(g));
      a.automorphism.push_back(std::move(beta));
      a.twist.emplace_back(static_cast<std::size_t>(h.order()), Complex(1.0, 0.0));
    }
    return a;
  }

  /// Z/d acting on C*(Z/d) = C(Z/d) by translation: u -> zeta^{-lambda} u for
  /// the generator u, zeta = e^{2 pi i/d}.
  static SourceAction translation(int d) {
    const FiniteGroup z = FiniteGroup::cyclic(d);
    SourceAction a{z, z, {}, {}};
    for (int l = 0; l < d; ++l) {
      std::vector<int> id(static_cast<std::size_t>(d));
      std::iota(id.begin(), id.end(), 0);
      a.automorphism.push_back(std::move(id));
      std::vector<Complex> c(static_cast<std::size_t>(d));
      for (int h = 0; h < d; ++h) c[h] = std::polar(1.0, -2.0 * kPi * l * h / d);
      a.twist.push_back(std::move(c));
    }
    return a;
  }

  void validate() const {
    const int ng = acting.order(), nh = source.order();
    if (static_cast<int>(automorphism.size()) != ng || static_cast<int>(twist.size()) != ng) {
      throw InvalidArgument("SourceAction: one automorphism and twist per acting element required");
    }
    for (int g = 0; g < ng; ++g) {
      const auto& b = automorphism[g];
      const auto& c = twist[g];
      if (static_cast<int>(b.size()) != nh || static_cast<int>(c.size()) != nh) {
        throw InvalidArgument("SourceAction: automorphism/twist has the wrong length");
      }
      for (int x = 0; x < nh; ++x)
        for (int y = 0; y < nh; ++y) {
          if (b[source.mul(x, y)] != source.mul(b[x], b[y])) {
            throw InvalidArgument("SourceAction: beta is not a homomorphism");
          }
          if (std::abs(c[source.mul(x, y)] - c[x] * c[y]) > 1e-12) {
            throw InvalidArgument("SourceAction: twist is not a character");
          }
        }
    }
    for (int g = 0; g < ng; ++g)
      for (int k = 0; k < ng; ++k) {
        const int gk = acting.mul(g, k);
        for (int x = 0; x < nh; ++x) {
          // alpha_g(alpha_k(u_x)) = c_k(x) c_g(beta_k x) u_{beta_g beta_k x}
          if (automorphism[g][automorphism[k][x]] != automorphism[gk][x] ||
              std::abs(twist[k][x] * twist[g][automorphism[k][x]] - twist[gk][x]) > 1e-12) {
            throw InvalidArgument("SourceAction: not an action");
          }
        }
      }
  }

  /// alpha_g(u_h) as (scalar, element).
  std::pair<Complex, int> apply(int g, int h) const { return {twist[g][h], automorphism[g][h]}; }
};

/// max over (g, h) of ||gamma_g(psi(h)) - c_g(h) psi(beta_g h)||.
inline double equivariance_defect(const ApproxRep& psi, const SourceAction& alpha, const GAlgebra& target) {
  double worst = 0;
  for (int g = 0; g < alpha.acting.order(); ++g)
    for (int h = 0; h < alpha.source.order(); ++h) {
      const auto [c, bh] = alpha.apply(g, h);
      worst = std::max(worst, operator_norm(target.act(g, psi(h)) - c * psi(bh)));
    }
  return worst;
}

/// T(h) = avg_k gamma_k(psi(alpha_k^{-1}(u_h))): exactly equivariant.
inline ApproxRep symmetrize(const ApproxRep& psi, const SourceAction& alpha, const GAlgebra& target) {
  psi.validate();
  if (!(alpha.acting == target.group())) throw DimensionError("symmetrize: action groups differ");
  if (psi.group.order() != alpha.source.order()) throw DimensionError("symmetrize: source group mismatch");
  if (psi.dim() != target.dim()) throw DimensionError("symmetrize: value size differs from target algebra");
  const auto& G = alpha.acting;
  ApproxRep out{psi.group, {}};
  for (int h = 0; h < alpha.source.order(); ++h) {
    out.values.push_back(haar_average(G, [&](int k) {
      const auto [c, bh] = alpha.apply(G.inv(k), h);
      return target.act(k, c * psi(bh));
    }));
  }
  return out;
}

/// Polar parts of values that lie within eps of the unitaries (all singular
/// values within eps of 1); each output is within eps0 of its input.
inline std::vector<CMatrix> unitarize_values(const std::vector<CMatrix>& values, double eps = kEps) {
  std::vector<CMatrix> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    require_square(values[i], "unitarize_values");
    Eigen::JacobiSVD<CMatrix> svd(values[i]);
    const auto& s = svd.singularValues();
    const double spread = std::max(std::abs(s(0) - 1.0), std::abs(s(s.size() - 1) - 1.0));
    if (spread >= eps) {
      std::ostringstream os;
      os << "unitarize_values: value " << i << " has a singular value " << spread
         << " away from 1 (admissible: < " << eps << ")";
      throw PreconditionError(os.str(), spread);
    }
    out.push_back(polar_unitary(values[i]));
  }
  return out;
}

/// Unitary u with u rho(g) u* = sigma(g) for exact representations at
/// distance < 1: u = polar(avg_h sigma(h)* rho(h)). With a quotient kappa that
/// identifies rho and sigma, kappa(u) = 1.
inline CMatrix intertwiner(const ApproxRep& rho, const ApproxRep& sigma, const QuotientMap& kappa = {}) {
  rho.validate();
  sigma.validate();
  for (const ApproxRep* r : {&rho, &sigma}) {
    const double d = defect(*r);
    if (d > tol::kComposed) {
      throw PreconditionError("intertwiner: input is not a representation (defect " + std::to_string(d) + ")", d);
    }
  }
  const auto& G = rho.group;
  for (int g = 0; g < G.order(); ++g) {
    const double d = operator_norm(rho(g) - sigma(g));
    if (d >= 1.0) {
      throw PreconditionError("intertwiner: representations are " + std::to_string(d) + " apart at " +
                                  G.label(g) + " (must be < 1)",
                              d);
    }
  }
  if (kappa) {
    const double d = distance(apply_quotient(rho, kappa), apply_quotient(sigma, kappa));
    if (d > tol::kComposed) {
      throw PreconditionError("intertwiner: quotient images differ (" + std::to_string(d) + ")", d);
    }
  }
  const CMatrix a = haar_average(G, [&](int h) { return CMatrix(sigma(h).adjoint() * rho(h)); });
  return polar_unitary(a);
}

// ---------------------------------------------------------------------------
// Equivariant lifting through a tower

/// Per-level diagnostics of the level search.
struct LevelReport {
  int level = 0;
  double equivariance_defect = 0;    // of the restricted seed
  double symmetrization_shift = 0;   // max_h ||T(h) - psi1(h)||
  double unitarized_defect = -1;     // defect of polar(T); -1 when not reached
  bool accepted = false;
};

class LiftFailure : public Error {
 public:
  LiftFailure(std::string what, std::vector<LevelReport> table)
      : Error(std::move(what)), table_(std::move(table)) {}
  const std::vector<LevelReport>& table() const noexcept { return table_; }

 private:
  std::vector<LevelReport> table_;
};

struct LiftResult {
  int level = 0;
  ApproxRep lift;  // exact, equivariant representation at `level`
  std::vector<LevelReport> levels;
  CorrectionResult correction;
  CMatrix intertwiner;
  double equivariance_defect = 0;
  double projection_error = 0;  // max_h ||pi(lift(h)) - phi(h)||
};

/// phi extended by the trivial representation on the blocks of level 0 that
/// die in the top quotient.
inline ApproxRep trivial_extension(const Tower& tower, const ApproxRep& phi) {
  const GAlgebra& level0 = tower.level_algebra(0);
  const GAlgebra& top = tower.level_algebra(tower.top());
  const auto& kept0 = tower.kept_blocks(0);
  const auto& kept_top = tower.kept_blocks(tower.top());
  ApproxRep out{phi.group, {}};
  for (int h = 0; h < phi.group.order(); ++h) {
    std::vector<CMatrix> parts;
    for (int k : kept0) {
      const auto it = std::lower_bound(kept_top.begin(), kept_top.end(), k);
      if (it != kept_top.end() && *it == k) {
        parts.push_back(top.block(phi(h), static_cast<int>(it - kept_top.begin())));
      } else {
        const int n = tower.algebra().blocks()[k];
        parts.push_back(identity(n));
      }
    }
    out.values.push_back(level0.assemble(parts));
  }
  return out;
}

/// Finds the first level n at which the restricted seed can be symmetrized,
/// unitarized and corrected, and returns an exact equivariant lift of phi to
/// C / J_n. `seed` is an exact (not necessarily equivariant) representation at
/// level 0 lifting phi; without one the trivial extension is used.
inline LiftResult lift_group_rep(const Tower& tower, const SourceAction& alpha, const ApproxRep& phi,
                                 const std::optional<ApproxRep>& seed = std::nullopt) {
  alpha.validate();
  phi.validate();
  const int top = tower.top();
  const GAlgebra& top_alg = tower.level_algebra(top);
  {
    const double d = defect(phi);
    const double e = equivariance_defect(phi, alpha, top_alg);
    if (d > tol::kComposed || e > tol::kComposed) {
      throw PreconditionError("lift_group_rep: phi is not an exact equivariant representation", std::max(d, e));
    }
  }
  const ApproxRep psi0 = seed ? *seed : trivial_extension(tower, phi);
  psi0.validate();
  if (psi0.dim() != tower.level_algebra(0).dim()) throw DimensionError("lift_group_rep: seed is not at level 0");
  {
    const double d = defect(psi0);
    const double p = distance(apply_quotient(psi0, tower.to_top_from(0)), phi);
    if (d > tol::kComposed || p > tol::kComposed) {
      throw PreconditionError("lift_group_rep: seed is not an exact representation lifting phi", std::max(d, p));
    }
  }

  std::vector<LevelReport> table;
  for (int n = 0; n <= top; ++n) {
    const GAlgebra& level = tower.level_algebra(n);
    const ApproxRep psi1 = apply_quotient(psi0, [&](const CMatrix& a) { return tower.project_to_level(n, 0, a); });
    LevelReport row{n, equivariance_defect(psi1, alpha, level), 0.0, -1.0, false};
    const ApproxRep t = symmetrize(psi1, alpha, level);
    row.symmetrization_shift = distance(t, psi1);
    if (!(row.symmetrization_shift < kEps)) {
      table.push_back(row);
      continue;
    }
    const ApproxRep rho0{psi1.group, unitarize_values(t.values)};
    row.unitarized_defect = defect(rho0);
    if (!(row.unitarized_defect < 1.0 / 34.0)) {
      table.push_back(row);
      continue;
    }
    row.accepted = true;
    table.push_back(row);

    LiftResult out;
    out.level = n;
    const QuotientMap kappa = tower.to_top_from(n);
    out.correction = correct_to_rep(rho0, {1e-12, 64, kappa});
    out.intertwiner = intertwiner(psi1, out.correction.rep, kappa);
    out.lift.group = psi1.group;
    for (const auto& v : psi1.values) out.lift.values.push_back(out.intertwiner * v * out.intertwiner.adjoint());
    out.levels = std::move(table);
    out.equivariance_defect = equivariance_defect(out.lift, alpha, level);
    out.projection_error = distance(apply_quotient(out.lift, kappa), phi);
    return out;
  }
  std::ostringstream os;
  os << "lift_group_rep: no level in 0.." << top << " brings the symmetrization shift below " << kEps;
  throw LiftFailure(os.str(), std::move(table));
}

}  // namespace eqstab
