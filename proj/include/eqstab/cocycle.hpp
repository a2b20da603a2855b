#pragma once

// Unitary cocycles w(gh) = w(g) alpha_g(w(h)) on block G-algebras: defect
// measurement, the one-step coboundary correction, iterated trivialization,
// and the averaged-logarithm integral estimate both correctors rest on.

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "eqstab/errors.hpp"
#include "eqstab/galg.hpp"
#include "eqstab/groups.hpp"
#include "eqstab/homcorrect.hpp"
#include "eqstab/matca.hpp"

namespace eqstab {

struct Cocycle {
  GAlgebra algebra;
  std::vector<CMatrix> values;

  const CMatrix& operator()(int g) const { return values.at(static_cast<std::size_t>(g)); }

  void validate() const {
    if (static_cast<int>(values.size()) != algebra.group().order()) {
      throw DimensionError("Cocycle: one value per group element required");
    }
    for (const auto& w : values) {
      algebra.check_conforms(w);
      const double u = unitarity_defect(w);
      if (u > tol::kInput) throw PreconditionError("Cocycle: value is not unitary", u);
    }
  }
};

/// max over (g, h) of ||w(gh) - w(g) alpha_g(w(h))||.
inline double cocycle_defect(const Cocycle& w) {
  const auto& G = w.algebra.group();
  double worst = 0;
  for (int g = 0; g < G.order(); ++g)
    for (int h = 0; h < G.order(); ++h)
      worst = std::max(worst, operator_norm(w(G.mul(g, h)) - w(g) * w.algebra.act(g, w(h))));
  return worst;
}

/// g -> v alpha_g(v)*.
inline Cocycle coboundary(const GAlgebra& algebra, const CMatrix& v) {
  Cocycle w{algebra, {}};
  for (int g = 0; g < algebra.group().order(); ++g) w.values.push_back(v * algebra.act(g, v).adjoint());
  return w;
}

/// max_g ||v alpha_g(v)* - w(g)||.
inline double coboundary_mismatch(const Cocycle& w, const CMatrix& v) {
  double worst = 0;
  for (int g = 0; g < w.algebra.group().order(); ++g)
    worst = std::max(worst, operator_norm(v * w.algebra.act(g, v).adjoint() - w(g)));
  return worst;
}

namespace detail {

inline void require_exact_cocycle(const Cocycle& w, const char* who) {
  w.validate();
  const double d = cocycle_defect(w);
  if (d > tol::kComposed) {
    throw PreconditionError(std::string(who) + ": w is not a cocycle (defect " + std::to_string(d) + ")", d);
  }
}

}  // namespace detail

/// z = v exp( avg_h log(v* alpha_h^{-1}(w(h)* v)) ). Requires w exact and
/// max_g ||v alpha_g(v)* - w(g)|| <= 1/5.
inline CMatrix one_step_cobound(const Cocycle& w, const CMatrix& v) {
  detail::require_exact_cocycle(w, "one_step_cobound");
  w.algebra.check_conforms(v);
  const double vu = unitarity_defect(v);
  if (vu > tol::kInput) throw PreconditionError("one_step_cobound: v is not unitary", vu);
  const double r = coboundary_mismatch(w, v);
  if (r > 0.2) {
    throw PreconditionError("one_step_cobound: mismatch " + std::to_string(r) + " exceeds 1/5", r);
  }
  const auto& G = w.algebra.group();
  const CMatrix v_adj = v.adjoint();
  const CMatrix avg_log = haar_average(G, [&](int h) {
    return principal_log_unitary(v_adj * w.algebra.act(G.inv(h), w(h).adjoint() * v));
  });
  return v * exp_skew(avg_log);
}

/// Equivariant quotient kappa: A -> B, with B's action for checking the
/// downstairs trivialization.
struct CocycleQuotient {
  QuotientMap map;
  GAlgebra target;
};

struct TrivializeOptions {
  double tolerance = 1e-12;
  int max_iterations = 64;
  std::optional<CocycleQuotient> quotient;
};

struct TrivializeResult {
  CMatrix v;
  int iterations = 0;
  double initial_mismatch = 0;
  double final_mismatch = 0;
  double distance = 0;        // ||v - v0||
  double quotient_drift = 0;  // ||kappa(v) - kappa(v0)||
  std::vector<TraceRow> trace;
};

/// Iterates one_step_cobound from v0 until v alpha_g(v)* = w(g) to tolerance.
/// Requires w exact and mismatch(v0) < 1/10.
inline TrivializeResult trivialize(const Cocycle& w, const std::optional<CMatrix>& seed = std::nullopt,
                                   const TrivializeOptions& opts = {}) {
  detail::require_exact_cocycle(w, "trivialize");
  const CMatrix v0 = seed.value_or(w.algebra.unit());
  w.algebra.check_conforms(v0);
  const double r = coboundary_mismatch(w, v0);
  if (!(r < 0.1)) {
    throw PreconditionError("trivialize: seed mismatch " + std::to_string(r) + " is not below 1/10", r);
  }
  if (opts.quotient) {
    const auto& q = *opts.quotient;
    const CMatrix k0 = q.map(v0);
    double worst = 0;
    for (int g = 0; g < w.algebra.group().order(); ++g)
      worst = std::max(worst, operator_norm(k0 * q.target.act(g, k0).adjoint() - q.map(w(g))));
    if (worst > tol::kStep) {
      throw PreconditionError("trivialize: seed does not trivialize the quotient cocycle (" +
                                  std::to_string(worst) + ")",
                              worst);
    }
  }
  TrivializeResult out{v0, 0, r, r, 0.0, 0.0, {{0, r, 0.0}}};
  while (out.final_mismatch > opts.tolerance) {
    if (out.iterations >= opts.max_iterations) {
      throw ConvergenceError("trivialize: no convergence after " + std::to_string(out.iterations) + " iterations",
                             out.trace);
    }
    out.v = one_step_cobound(w, out.v);
    ++out.iterations;
    out.final_mismatch = coboundary_mismatch(w, out.v);
    out.distance = operator_norm(out.v - v0);
    out.trace.push_back({out.iterations, out.final_mismatch, out.distance});
  }
  if (opts.quotient) out.quotient_drift = operator_norm(opts.quotient->map(out.v) - opts.quotient->map(v0));
  return out;
}

/// Both sides of the averaged-logarithm estimate for a family of unitaries
/// with ||u(g) - 1|| <= r <= 1/2.
struct IntegralEstimate {
  double lhs = 0;       // ||avg(u) - exp(avg(log u))||
  double bound = 0;     // 5 r^2 / (2 (1 - 2 r))
  double avg_norm = 0;  // ||avg(u)||
  double r = 0;

  bool holds(double slack = 1e-11) const { return lhs <= bound + slack && avg_norm <= 1.0 + 1e-12; }
};

inline double integral_estimate_bound(double r) { return 5.0 * r * r / (2.0 * (1.0 - 2.0 * r)); }

inline IntegralEstimate verify_integral_estimate(const FiniteGroup& group, const std::vector<CMatrix>& u,
                                                 double r) {
  if (static_cast<int>(u.size()) != group.order()) throw DimensionError("integral estimate: one value per element");
  if (r < 0 || r > 0.5) throw PreconditionError("integral estimate: r must lie in [0, 1/2]", r);
  for (int g = 0; g < group.order(); ++g) {
    const double d = operator_norm(u[g] - identity(u[g].rows()));
    if (d > r + tol::kStep) {
      throw PreconditionError("integral estimate: ||u(" + group.label(g) + ") - 1|| = " + std::to_string(d) +
                                  " exceeds r",
                              d);
    }
  }
  const CMatrix avg = haar_average(std::span<const CMatrix>(u));
  const CMatrix avg_log = haar_average(group, [&](int g) { return principal_log_unitary(u[g]); });
  return {operator_norm(avg - exp_skew(avg_log)), integral_estimate_bound(r), operator_norm(avg), r};
}

}  // namespace eqstab
