#pragma once

// Equivariant generators and relations: *-polynomials, assignment defects,
// symmetrization of assignments, and exact correction of approximately
// permuted projection families (Rokhlin-type towers) for cyclic groups.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "eqstab/errors.hpp"
#include "eqstab/galg.hpp"
#include "eqstab/groups.hpp"
#include "eqstab/matca.hpp"

namespace eqstab {

/// One symbol of a word: s, s*, sigma_g(s) or sigma_g(s)*. A symbol with a
/// group element evaluates to alpha_g(rho(s)).
struct Letter {
  int generator = 0;
  int group_element = -1;  // -1: plain generator
  bool adjoint = false;

  friend auto operator<=>(const Letter&, const Letter&) = default;
};

struct Term {
  Complex coefficient{1.0, 0.0};
  std::vector<Letter> word;  // empty word is the unit
};

/// Finite formal sum of scalar-weighted words.
class StarPolynomial {
 public:
  StarPolynomial() = default;
  explicit StarPolynomial(std::vector<Term> terms) : terms_(std::move(terms)) {}

  static StarPolynomial constant(Complex c) { return StarPolynomial({Term{c, {}}}); }
  static StarPolynomial one() { return constant(1.0); }
  static StarPolynomial gen(int s, int g = -1) { return StarPolynomial({Term{1.0, {Letter{s, g, false}}}}); }

  const std::vector<Term>& terms() const noexcept { return terms_; }

  StarPolynomial adjoint() const {
    std::vector<Term> out;
    for (const auto& t : terms_) {
      Term a{std::conj(t.coefficient), {}};
      for (auto it = t.word.rbegin(); it != t.word.rend(); ++it) a.word.push_back({it->generator, it->group_element, !it->adjoint});
      out.push_back(std::move(a));
    }
    return StarPolynomial(std::move(out));
  }

  friend StarPolynomial operator+(const StarPolynomial& a, const StarPolynomial& b) {
    std::vector<Term> t = a.terms_;
    t.insert(t.end(), b.terms_.begin(), b.terms_.end());
    return StarPolynomial(std::move(t));
  }
  friend StarPolynomial operator*(Complex c, const StarPolynomial& a) {
    std::vector<Term> t = a.terms_;
    for (auto& x : t) x.coefficient *= c;
    return StarPolynomial(std::move(t));
  }
  friend StarPolynomial operator-(const StarPolynomial& a, const StarPolynomial& b) {
    return a + Complex(-1.0, 0.0) * b;
  }
  friend StarPolynomial operator*(const StarPolynomial& a, const StarPolynomial& b) {
    std::vector<Term> t;
    for (const auto& x : a.terms_)
      for (const auto& y : b.terms_) {
        Term z{x.coefficient * y.coefficient, x.word};
        z.word.insert(z.word.end(), y.word.begin(), y.word.end());
        t.push_back(std::move(z));
      }
    return StarPolynomial(std::move(t));
  }

  /// Like terms combined, zero terms dropped, words sorted.
  StarPolynomial normalized(double zero = 1e-14) const {
    std::map<std::vector<Letter>, Complex> acc;
    for (const auto& t : terms_) acc[t.word] += t.coefficient;
    std::vector<Term> out;
    for (const auto& [w, c] : acc)
      if (std::abs(c) > zero) out.push_back({c, w});
    return StarPolynomial(std::move(out));
  }

  bool approx_equal(const StarPolynomial& other, double eps = 1e-12) const {
    const auto a = normalized().terms_, b = other.normalized().terms_;
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].word != b[i].word || std::abs(a[i].coefficient - b[i].coefficient) > eps) return false;
    return true;
  }

 private:
  std::vector<Term> terms_;
};

/// Values rho(s) for each generator s.
using Assignment = std::vector<CMatrix>;

/// Generators S, a permutation action sigma of G on S, and relations R closed
/// under the action.
struct RelationSystem {
  FiniteGroup group;
  std::vector<std::string> generators;
  std::vector<std::vector<int>> sigma;  // [g][s] = sigma_g(s)
  std::vector<StarPolynomial> relations;

  int generator_count() const { return static_cast<int>(generators.size()); }

  StarPolynomial relabel(const StarPolynomial& p, int g) const {
    std::vector<Term> out;
    for (const auto& t : p.terms()) {
      Term r{t.coefficient, {}};
      for (const auto& l : t.word) r.word.push_back({sigma[g][l.generator], l.group_element, l.adjoint});
      out.push_back(std::move(r));
    }
    return StarPolynomial(std::move(out));
  }

  /// Checks sigma is an action by permutations and R is closed under it
  /// (syntactically, after normalization).
  void validate() const {
    const int ns = generator_count();
    if (static_cast<int>(sigma.size()) != group.order()) throw InvalidArgument("RelationSystem: sigma needs one row per element");
    for (const auto& row : sigma) {
      std::vector<char> seen(ns, 0);
      if (static_cast<int>(row.size()) != ns) throw InvalidArgument("RelationSystem: sigma row has the wrong length");
      for (int s : row) {
        if (s < 0 || s >= ns || seen[s]) throw InvalidArgument("RelationSystem: sigma_g is not a permutation");
        seen[s] = 1;
      }
    }
    for (int g = 0; g < group.order(); ++g)
      for (int h = 0; h < group.order(); ++h)
        for (int s = 0; s < ns; ++s)
          if (sigma[g][sigma[h][s]] != sigma[group.mul(g, h)][s]) throw InvalidArgument("RelationSystem: sigma is not an action");
    for (const auto& p : relations)
      for (const auto& t : p.terms())
        for (const auto& l : t.word)
          if (l.generator < 0 || l.generator >= ns || l.group_element >= group.order())
            throw InvalidArgument("RelationSystem: relation uses an unknown symbol");
    for (const auto& p : relations)
      for (int g = 0; g < group.order(); ++g) {
        const StarPolynomial q = relabel(p, g);
        const bool found = std::any_of(relations.begin(), relations.end(),
                                       [&](const StarPolynomial& r) { return r.approx_equal(q); });
        if (!found) throw InvalidArgument("RelationSystem: relations are not closed under the action");
      }
  }
};

/// Evaluation of p at rho; sigma_g(s) symbols become alpha_g(rho(s)).
inline CMatrix eval_poly(const StarPolynomial& p, const Assignment& rho, const MatrixAction* action = nullptr) {
  if (rho.empty()) throw InvalidArgument("eval_poly: empty assignment");
  const auto n = rho.front().rows();
  CMatrix out = CMatrix::Zero(n, n);
  for (const auto& t : p.terms()) {
    CMatrix w = identity(n);
    for (const auto& l : t.word) {
      if (l.generator < 0 || l.generator >= static_cast<int>(rho.size())) {
        throw InvalidArgument("eval_poly: unknown generator " + std::to_string(l.generator));
      }
      CMatrix m = rho[l.generator];
      if (l.group_element >= 0) {
        if (!action) throw InvalidArgument("eval_poly: action symbol without an action");
        if (l.group_element >= action->group.order()) throw InvalidArgument("eval_poly: unknown group element");
        m = (*action)(l.group_element, m);
      }
      if (l.adjoint) m.adjointInPlace();
      w = w * m;
    }
    out += t.coefficient * w;
  }
  return out;
}

struct RepDefect {
  double relations = 0;    // max over R of ||p(rho)||
  double equivariance = 0; // max over (g, s) of ||rho(sigma_g s) - alpha_g(rho(s))||
};

inline void check_assignment(const RelationSystem& sys, const Assignment& rho) {
  if (static_cast<int>(rho.size()) != sys.generator_count()) throw DimensionError("assignment: one value per generator");
  for (std::size_t s = 0; s < rho.size(); ++s) {
    const double nrm = operator_norm(rho[s]);
    if (nrm > 2.0 + tol::kStep) {
      throw PreconditionError("assignment: ||rho(" + sys.generators[s] + ")|| = " + std::to_string(nrm) + " exceeds 2",
                              nrm);
    }
  }
}

inline RepDefect rep_defect(const RelationSystem& sys, const Assignment& rho, const MatrixAction& action) {
  check_assignment(sys, rho);
  RepDefect d;
  for (const auto& p : sys.relations) d.relations = std::max(d.relations, operator_norm(eval_poly(p, rho, &action)));
  for (int g = 0; g < sys.group.order(); ++g)
    for (int s = 0; s < sys.generator_count(); ++s)
      d.equivariance = std::max(d.equivariance, operator_norm(rho[sys.sigma[g][s]] - action(g, rho[s])));
  return d;
}

/// rho(s) = avg_g alpha_g(rho0(sigma_g^{-1}(s))): exactly equivariant, moves
/// each generator by at most the old equivariance defect.
inline Assignment symmetrize_assignment(const RelationSystem& sys, const Assignment& rho0, const MatrixAction& action) {
  check_assignment(sys, rho0);
  const auto& G = sys.group;
  Assignment out;
  for (int s = 0; s < sys.generator_count(); ++s) {
    out.push_back(haar_average(G, [&](int g) { return action(g, rho0[sys.sigma[G.inv(g)][s]]); }));
  }
  return out;
}

/// Generators p_g (g in G), sigma_h(p_g) = p_{hg}, relations
/// p_g p_h - delta_{g,h} p_g and p_g* - p_g; with `unital`, also sum_g p_g - 1.
inline RelationSystem partition_system(const FiniteGroup& group, bool unital) {
  RelationSystem sys{group, {}, {}, {}};
  const int n = group.order();
  for (int g = 0; g < n; ++g) sys.generators.push_back("p_" + group.label(g));
  for (int h = 0; h < n; ++h) {
    std::vector<int> row(n);
    for (int g = 0; g < n; ++g) row[g] = group.mul(h, g);
    sys.sigma.push_back(std::move(row));
  }
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h) {
      StarPolynomial r = StarPolynomial::gen(g) * StarPolynomial::gen(h);
      if (g == h) r = r - StarPolynomial::gen(g);
      sys.relations.push_back(r);
    }
    sys.relations.push_back(StarPolynomial::gen(g).adjoint() - StarPolynomial::gen(g));
  }
  if (unital) {
    StarPolynomial sum = Complex(-1.0, 0.0) * StarPolynomial::one();
    for (int g = 0; g < n; ++g) sum = sum + StarPolynomial::gen(g);
    sys.relations.push_back(sum);
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Exact Rokhlin towers for cyclic groups

/// Measured defects of a projection family against "orthogonal projections,
/// exactly permuted, summing to 1".
struct PartitionDefects {
  double projection = 0;     // max_g max(||e_g^2 - e_g||, ||e_g* - e_g||)
  double orthogonality = 0;  // max_{g != h} ||e_g e_h||
  double sum = 0;            // ||sum_g e_g - 1||
  double equivariance = 0;   // max ||alpha_g(e_h) - e_{gh}||

  double max() const { return std::max({projection, orthogonality, sum, equivariance}); }
};

inline PartitionDefects partition_defects(const FiniteGroup& G, const MatrixAction& action,
                                          const std::vector<CMatrix>& e) {
  PartitionDefects d;
  const auto n = e.at(0).rows();
  CMatrix total = CMatrix::Zero(n, n);
  for (int g = 0; g < G.order(); ++g) {
    total += e[g];
    d.projection = std::max({d.projection, operator_norm(e[g] * e[g] - e[g]), operator_norm(e[g].adjoint() - e[g])});
    for (int h = 0; h < G.order(); ++h) {
      if (h != g) d.orthogonality = std::max(d.orthogonality, operator_norm(e[g] * e[h]));
      d.equivariance = std::max(d.equivariance, operator_norm(action(g, e[h]) - e[G.mul(g, h)]));
    }
  }
  d.sum = operator_norm(total - identity(n));
  return d;
}

/// Upper bound on ||w^d - 1|| for the polar part w of the encoded unitary,
/// given seed defects <= delta (see partition_threshold).
inline double partition_propagation_bound(double delta, int d) {
  const double eta = delta;            // symmetrization displacement
  const double beta = 1.0 + delta;     // norm of a self-adjoint near-idempotent
  const double p = delta + 2.0 * beta * eta + eta;  // pair defects of symmetrized family
  const double s = delta;              // ||sum - 1||
  const double dd = static_cast<double>(d);
  const double u = dd * dd * p + s;    // ||w0* w0 - 1||
  if (u >= 1.0) return std::numeric_limits<double>::infinity();
  double e = 0;                        // ||w0^j - sum_g zeta^{j k(g)} b_g||
  for (int j = 1; j < d; ++j) e = std::sqrt(1.0 + u) * e + dd * dd * p;
  const double power_gap = e + s;      // ||w0^d - 1||
  const double polar_shift = dd * std::pow(1.0 + u, (dd - 1.0) / 2.0) * u;  // ||w^d - w0^d||
  return power_gap + polar_shift;
}

/// Largest seed defect delta for which the propagated bound on ||w^d - 1||
/// stays below sqrt(2), which keeps every eigenvalue of w within pi/(2d) of
/// a d-th root of unity.
inline double partition_threshold(int d) {
  const double target = std::sqrt(2.0);
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (partition_propagation_bound(mid, d) < target ? lo : hi) = mid;
  }
  return lo;
}

struct PartitionOptions {
  bool allow_uncertified = false;  // run past the threshold; measured gates still apply
};

struct PartitionReport {
  double seed_delta = 0;
  double threshold = 0;
  bool certified = false;
  PartitionDefects seed;
  double symmetrization_shift = 0;
  double encoded_unitarity = 0;  // ||w0* w0 - 1||
  double polar_shift = 0;        // ||w - a||
  double min_midpoint_gap = 0;
  PartitionDefects result;
  double displacement = 0;       // max_g ||e_g - e0_g||
};

struct PartitionResult {
  std::vector<CMatrix> family;
  CMatrix rounded_unitary;  // z = sum_g zeta^{k(g)} e_g
  PartitionReport report;
};

/// Seed defect delta: the worst of the projection, orthogonality, sum and
/// equivariance defects.
inline double seed_delta(const PartitionDefects& d) { return d.max(); }

/// Exact Rokhlin family for a cyclic group from approximate seeds:
/// symmetrize, encode w0 = sum_g zeta^{k(g)} b_g, average against the
/// translation characters, take the polar part, round its spectrum to the
/// d-th roots of unity, and read off the spectral projections.
inline PartitionResult stabilize_partition(const FiniteGroup& G, const MatrixAction& action,
                                           const std::vector<CMatrix>& seeds, const PartitionOptions& opts = {}) {
  const int d = G.order();
  if (static_cast<int>(seeds.size()) != d) throw DimensionError("stabilize_partition: one seed per group element");
  const auto gen = G.cyclic_generator();
  if (!gen) throw InvalidArgument("stabilize_partition: group is not cyclic");
  const auto n = seeds[0].rows();
  for (const auto& e : seeds) require_square(e, "stabilize_partition");

  PartitionResult out;
  auto& rep = out.report;
  rep.seed = partition_defects(G, action, seeds);
  rep.seed_delta = seed_delta(rep.seed);
  rep.threshold = partition_threshold(d);
  rep.certified = rep.seed_delta <= rep.threshold;
  if (!rep.certified && !opts.allow_uncertified) {
    std::ostringstream os;
    os << "stabilize_partition: seed defect " << rep.seed_delta << " exceeds the admissibility threshold "
       << rep.threshold << " for d = " << d;
    throw PreconditionError(os.str(), rep.seed_delta);
  }

  // k(g): exponent of g in the generator.
  std::vector<int> k(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) k[G.power(*gen, j)] = j;

  const RelationSystem sys = partition_system(G, true);
  const Assignment b = symmetrize_assignment(sys, seeds, action);
  for (int g = 0; g < d; ++g) rep.symmetrization_shift = std::max(rep.symmetrization_shift, operator_norm(b[g] - seeds[g]));

  CMatrix w0 = CMatrix::Zero(n, n);
  for (int g = 0; g < d; ++g) w0 += std::polar(1.0, 2.0 * kPi * k[g] / d) * b[g];
  rep.encoded_unitarity = operator_norm(w0.adjoint() * w0 - identity(n));

  // a = (1/d) sum_j lambda_j gamma_{t^j}(w0), lambda_j = zeta^j.
  CMatrix a = CMatrix::Zero(n, n);
  for (int j = 0; j < d; ++j) a += std::polar(1.0, 2.0 * kPi * j / d) * action(G.power(*gen, j), w0);
  a /= static_cast<double>(d);

  const CMatrix w = polar_unitary(a);
  rep.polar_shift = operator_norm(w - a);
  const RootRounding rr = round_to_roots(w, d);
  rep.min_midpoint_gap = rr.min_midpoint_gap;
  out.rounded_unitary = rr.rounded;

  std::vector<int> element_of_root(static_cast<std::size_t>(d));
  for (int g = 0; g < d; ++g) element_of_root[k[g]] = g;
  out.family.assign(static_cast<std::size_t>(d), CMatrix::Zero(n, n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto q = rr.spectrum.eigenvectors.col(i);
    out.family[element_of_root[rr.root_index[static_cast<std::size_t>(i)]]] += q * q.adjoint();
  }
  rep.result = partition_defects(G, action, out.family);
  for (int g = 0; g < d; ++g) rep.displacement = std::max(rep.displacement, operator_norm(out.family[g] - seeds[g]));
  return out;
}

inline PartitionResult stabilize_partition(const GAlgebra& algebra, const std::vector<CMatrix>& seeds,
                                           const PartitionOptions& opts = {}) {
  return stabilize_partition(algebra.group(), algebra.as_action(), seeds, opts);
}

struct TracialResult {
  std::vector<CMatrix> family;
  CMatrix support;          // q = sum_g e_g, an invariant projection
  int corner_rank = 0;      // rank q
  int complement_rank = 0;  // rank (1 - q)
  double witness_norm = 0;  // ||q x q||
  double support_invariance = 0;  // max_g ||alpha_g(q) - q||
  PartitionReport report;   // of the corner run
  PartitionDefects corner_defects;  // conditions other than the unit sum, in the full algebra
  double displacement = 0;  // max_g ||e_g - e0_g||
};

/// Tracial variant: the seeds sum approximately to an invariant
/// subprojection q. Rounds the symmetrized sum to q, compresses to the corner
/// qAq (where the seeds sum to the unit), runs the exact corrector there, and
/// reports ||q x q|| and rank(1 - q) for the witness x.
inline TracialResult stabilize_tracial_partition(const FiniteGroup& G, const MatrixAction& action,
                                                 const std::vector<CMatrix>& seeds, const CMatrix& witness,
                                                 const PartitionOptions& opts = {}) {
  const int d = G.order();
  if (static_cast<int>(seeds.size()) != d) throw DimensionError("stabilize_tracial_partition: one seed per element");
  const auto n = seeds[0].rows();
  if (witness.rows() != n || witness.cols() != n) throw DimensionError("stabilize_tracial_partition: witness size");
  {
    const double hd = hermitian_defect(witness);
    const double nrm = operator_norm(witness);
    const double lmin = hermitian_eigen(witness).eigenvalues.real().minCoeff();
    if (hd > tol::kInput || lmin < -tol::kInput || std::abs(nrm - 1.0) > tol::kInput) {
      throw PreconditionError("stabilize_tracial_partition: witness must be positive with norm 1", nrm);
    }
  }
  const RelationSystem sys = partition_system(G, false);
  const Assignment b = symmetrize_assignment(sys, seeds, action);
  CMatrix total = CMatrix::Zero(n, n);
  for (const auto& x : b) total += x;
  const ProjectionRounding pr = round_to_projection_detailed((total + total.adjoint()) / 2.0);
  const CMatrix& v = pr.range_basis;
  TracialResult out;
  out.corner_rank = static_cast<int>(v.cols());
  out.complement_rank = static_cast<int>(n - v.cols());
  if (out.corner_rank == 0) throw PreconditionError("stabilize_tracial_partition: seeds sum to zero", 0.0);
  out.support = pr.projection;
  for (int g = 0; g < d; ++g)
    out.support_invariance = std::max(out.support_invariance, operator_norm(action(g, out.support) - out.support));

  const MatrixAction corner{G, [action, v](int g, const CMatrix& a) {
                              return CMatrix(v.adjoint() * action(g, CMatrix(v * a * v.adjoint())) * v);
                            }};
  std::vector<CMatrix> corner_seeds;
  for (const auto& x : b) corner_seeds.push_back(v.adjoint() * x * v);
  const PartitionResult inner = stabilize_partition(G, corner, corner_seeds, opts);
  out.report = inner.report;
  for (const auto& e : inner.family) out.family.push_back(v * e * v.adjoint());
  out.corner_defects = partition_defects(G, action, out.family);
  CMatrix e_sum = CMatrix::Zero(n, n);
  for (const auto& e : out.family) e_sum += e;
  out.corner_defects.sum = operator_norm(e_sum - out.support);
  out.witness_norm = operator_norm(e_sum * witness * e_sum);
  for (int g = 0; g < d; ++g) out.displacement = std::max(out.displacement, operator_norm(out.family[g] - seeds[g]));
  return out;
}

}  // namespace eqstab
