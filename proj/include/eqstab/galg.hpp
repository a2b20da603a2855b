#pragma once

// Finite-dimensional G-algebras: block direct sums of matrix algebras with a
// group acting by (block permutation, per-block unitary) pairs, and towers of
// invariant block ideals with their quotient maps.
//
// Elements are stored as full block-diagonal matrices of size sum(blocks).

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eqstab/errors.hpp"
#include "eqstab/groups.hpp"
#include "eqstab/matca.hpp"

namespace eqstab {

/// An action of a finite group on square matrices of one fixed size, given
/// as a function. Used where the acting algebra is not a block algebra (for
/// instance a corner pAp).
struct MatrixAction {
  FiniteGroup group;
  std::function<CMatrix(int, const CMatrix&)> apply;

  CMatrix operator()(int g, const CMatrix& a) const { return apply(g, a); }
};

/// Automorphism of a block algebra: block k is moved to block perm[k] and then
/// conjugated by unitaries[perm[k]] (unitaries are indexed by target block).
struct BlockAutomorphism {
  std::vector<int> perm;
  std::vector<CMatrix> unitaries;
};

class GAlgebra {
 public:
  GAlgebra(FiniteGroup group, std::vector<int> blocks, std::vector<BlockAutomorphism> action)
      : group_(std::move(group)), blocks_(std::move(blocks)), action_(std::move(action)) {
    validate();
  }

  /// All group elements act trivially.
  static GAlgebra trivial(FiniteGroup group, std::vector<int> blocks) {
    std::vector<BlockAutomorphism> act;
    for (int g = 0; g < group.order(); ++g) {
      BlockAutomorphism a;
      a.perm.resize(blocks.size());
      std::iota(a.perm.begin(), a.perm.end(), 0);
      for (int n : blocks) a.unitaries.push_back(identity(n));
      act.push_back(std::move(a));
    }
    return GAlgebra(std::move(group), std::move(blocks), std::move(act));
  }

  /// Single block M_n with g acting by Ad(unitaries[g]).
  static GAlgebra inner(FiniteGroup group, const std::vector<CMatrix>& unitaries) {
    if (static_cast<int>(unitaries.size()) != group.order()) {
      throw DimensionError("GAlgebra::inner: one unitary per group element required");
    }
    const int n = static_cast<int>(unitaries.at(0).rows());
    std::vector<BlockAutomorphism> act;
    for (const auto& u : unitaries) act.push_back({{0}, {u}});
    return GAlgebra(std::move(group), {n}, std::move(act));
  }

  /// Several blocks, each mapped to itself and conjugated by its own unitary
  /// representation: unitaries[k][g].
  static GAlgebra blockwise_inner(FiniteGroup group, const std::vector<std::vector<CMatrix>>& unitaries) {
    std::vector<int> blocks;
    for (const auto& rep : unitaries) blocks.push_back(static_cast<int>(rep.at(0).rows()));
    std::vector<BlockAutomorphism> act;
    for (int g = 0; g < group.order(); ++g) {
      BlockAutomorphism a;
      a.perm.resize(blocks.size());
      std::iota(a.perm.begin(), a.perm.end(), 0);
      for (const auto& rep : unitaries) a.unitaries.push_back(rep.at(static_cast<std::size_t>(g)));
      act.push_back(std::move(a));
    }
    return GAlgebra(std::move(group), std::move(blocks), std::move(act));
  }

  const FiniteGroup& group() const noexcept { return group_; }
  const std::vector<int>& blocks() const noexcept { return blocks_; }
  int block_count() const noexcept { return static_cast<int>(blocks_.size()); }
  int dim() const { return std::accumulate(blocks_.begin(), blocks_.end(), 0); }
  const BlockAutomorphism& automorphism(int g) const { return action_.at(static_cast<std::size_t>(g)); }

  int offset(int k) const { return std::accumulate(blocks_.begin(), blocks_.begin() + k, 0); }

  CMatrix block(const CMatrix& a, int k) const {
    return a.block(offset(k), offset(k), blocks_[k], blocks_[k]);
  }

  CMatrix assemble(const std::vector<CMatrix>& parts) const {
    if (static_cast<int>(parts.size()) != block_count()) throw DimensionError("assemble: wrong block count");
    CMatrix a = CMatrix::Zero(dim(), dim());
    for (int k = 0; k < block_count(); ++k) {
      if (parts[k].rows() != blocks_[k] || parts[k].cols() != blocks_[k]) {
        throw DimensionError("assemble: block " + std::to_string(k) + " has the wrong size");
      }
      a.block(offset(k), offset(k), blocks_[k], blocks_[k]) = parts[k];
    }
    return a;
  }

  CMatrix unit() const { return identity(dim()); }

  /// Throws DimensionError unless a is (numerically) block diagonal.
  void check_conforms(const CMatrix& a) const {
    if (a.rows() != dim() || a.cols() != dim()) {
      std::ostringstream os;
      os << "element is " << a.rows() << "x" << a.cols() << ", algebra dimension is " << dim();
      throw DimensionError(os.str());
    }
    CMatrix off = a;
    for (int k = 0; k < block_count(); ++k) off.block(offset(k), offset(k), blocks_[k], blocks_[k]).setZero();
    const double leak = off.cwiseAbs().maxCoeff();
    if (block_count() > 1 && leak > tol::kInput * std::max(1.0, a.cwiseAbs().maxCoeff())) {
      throw DimensionError("element has entries outside the block structure (" + std::to_string(leak) + ")");
    }
  }

  /// alpha_g(a): permute blocks, then conjugate.
  CMatrix act(int g, const CMatrix& a) const {
    check_conforms(a);
    const auto& aut = action_.at(static_cast<std::size_t>(g));
    CMatrix out = CMatrix::Zero(dim(), dim());
    for (int k = 0; k < block_count(); ++k) {
      const int j = aut.perm[k];
      const CMatrix& u = aut.unitaries[j];
      out.block(offset(j), offset(j), blocks_[j], blocks_[j]) = u * block(a, k) * u.adjoint();
    }
    return out;
  }

  MatrixAction as_action() const {
    GAlgebra self = *this;
    return {group_, [self](int g, const CMatrix& a) { return self.act(g, a); }};
  }

  /// Sub-G-algebra on an invariant subset of blocks (the quotient by the
  /// complementary block ideal).
  GAlgebra restrict_to(const std::vector<int>& kept) const {
    std::vector<int> where(blocks_.size(), -1);
    std::vector<int> new_blocks;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      where[kept[i]] = static_cast<int>(i);
      new_blocks.push_back(blocks_[kept[i]]);
    }
    std::vector<BlockAutomorphism> act;
    for (int g = 0; g < group_.order(); ++g) {
      const auto& aut = action_[g];
      BlockAutomorphism r;
      for (int k : kept) {
        const int target = where[aut.perm[k]];
        if (target < 0) throw InvalidArgument("restrict_to: block subset is not invariant");
        r.perm.push_back(target);
        r.unitaries.push_back(aut.unitaries[k]);
      }
      act.push_back(std::move(r));
    }
    return GAlgebra(group_, std::move(new_blocks), std::move(act));
  }

  /// Worst deviation of (perm, unitary) data from a homomorphism, measured as
  /// the distance of u_{gh,j}* u_{g,j} u_{h, perm_g^{-1}(j)} from a scalar.
  double homomorphism_defect() const {
    double worst = 0;
    const int nb = block_count();
    for (int g = 0; g < group_.order(); ++g) {
      const auto& ag = action_[g];
      std::vector<int> ginv(nb);
      for (int k = 0; k < nb; ++k) ginv[ag.perm[k]] = k;
      for (int h = 0; h < group_.order(); ++h) {
        const auto& ah = action_[h];
        const auto& agh = action_[group_.mul(g, h)];
        for (int k = 0; k < nb; ++k) {
          if (ag.perm[ah.perm[k]] != agh.perm[k]) return std::numeric_limits<double>::infinity();
        }
        for (int j = 0; j < nb; ++j) {
          const CMatrix w = agh.unitaries[j].adjoint() * ag.unitaries[j] * ah.unitaries[ginv[j]];
          const Complex c = w.trace() / static_cast<double>(blocks_[j]);
          worst = std::max(worst, operator_norm(w - c * identity(blocks_[j])));
        }
      }
    }
    return worst;
  }

 private:
  void validate() const {
    const int nb = block_count();
    if (nb == 0) throw InvalidArgument("GAlgebra: no blocks");
    for (int n : blocks_)
      if (n < 1) throw InvalidArgument("GAlgebra: block sizes must be positive");
    if (static_cast<int>(action_.size()) != group_.order()) {
      throw InvalidArgument("GAlgebra: action must list one automorphism per group element");
    }
    for (const auto& aut : action_) {
      if (static_cast<int>(aut.perm.size()) != nb || static_cast<int>(aut.unitaries.size()) != nb) {
        throw InvalidArgument("GAlgebra: automorphism data has the wrong block count");
      }
      std::vector<char> seen(nb, 0);
      for (int k = 0; k < nb; ++k) {
        const int j = aut.perm[k];
        if (j < 0 || j >= nb || seen[j]) throw InvalidArgument("GAlgebra: block map is not a permutation");
        seen[j] = 1;
        if (blocks_[j] != blocks_[k]) throw InvalidArgument("GAlgebra: permutation mixes block sizes");
        if (aut.unitaries[j].rows() != blocks_[j] || aut.unitaries[j].cols() != blocks_[j]) {
          throw DimensionError("GAlgebra: unitary does not match its block");
        }
        if (unitarity_defect(aut.unitaries[j]) > tol::kInput) {
          throw InvalidArgument("GAlgebra: action matrix is not unitary");
        }
      }
    }
    const double hd = homomorphism_defect();
    if (hd > tol::kComposed) {
      throw InvalidArgument("GAlgebra: action is not a homomorphism (defect " + std::to_string(hd) + ")");
    }
  }

  FiniteGroup group_;
  std::vector<int> blocks_;
  std::vector<BlockAutomorphism> action_;
};

/// A G-algebra C with an increasing chain of invariant block ideals
/// J_0 <= J_1 <= ... <= J_N. Level n is the quotient C / J_n; level N is the top.
class Tower {
 public:
  Tower(GAlgebra algebra, std::vector<std::vector<int>> ideals)
      : algebra_(std::move(algebra)), ideals_(std::move(ideals)) {
    if (ideals_.empty()) throw InvalidArgument("Tower: at least one ideal level required");
    if (ideals_.size() > 33) throw InvalidArgument("Tower: at most 32 levels supported");
    const int nb = algebra_.block_count();
    for (auto& j : ideals_) {
      std::sort(j.begin(), j.end());
      j.erase(std::unique(j.begin(), j.end()), j.end());
      for (int k : j)
        if (k < 0 || k >= nb) throw InvalidArgument("Tower: ideal names a nonexistent block");
      for (int g = 0; g < algebra_.group().order(); ++g) {
        const auto& perm = algebra_.automorphism(g).perm;
        for (int k : j)
          if (!std::binary_search(j.begin(), j.end(), perm[k]))
            throw InvalidArgument("Tower: ideal is not invariant under the action");
      }
    }
    for (std::size_t n = 0; n + 1 < ideals_.size(); ++n) {
      if (!std::includes(ideals_[n + 1].begin(), ideals_[n + 1].end(), ideals_[n].begin(), ideals_[n].end())) {
        throw InvalidArgument("Tower: ideals are not increasing");
      }
      stationary_.push_back(ideals_[n + 1].size() == ideals_[n].size());
    }
    for (std::size_t n = 0; n < ideals_.size(); ++n) {
      std::vector<int> kept;
      for (int k = 0; k < nb; ++k)
        if (!std::binary_search(ideals_[n].begin(), ideals_[n].end(), k)) kept.push_back(k);
      kept_.push_back(std::move(kept));
      levels_.push_back(algebra_.restrict_to(kept_.back()));
    }
  }

  const GAlgebra& algebra() const noexcept { return algebra_; }
  /// N, the index of the top quotient.
  int top() const noexcept { return static_cast<int>(ideals_.size()) - 1; }
  const std::vector<int>& ideal(int n) const { return ideals_.at(static_cast<std::size_t>(n)); }
  const std::vector<int>& kept_blocks(int n) const { return kept_.at(static_cast<std::size_t>(n)); }
  const GAlgebra& level_algebra(int n) const { return levels_.at(static_cast<std::size_t>(n)); }
  /// Whether J_{n+1} == J_n.
  bool stationary(int n) const { return stationary_.at(static_cast<std::size_t>(n)); }

  /// C -> C / J_n.
  CMatrix quotient(int n, const CMatrix& a) const {
    check_level(n);
    algebra_.check_conforms(a);
    std::vector<CMatrix> parts;
    for (int k : kept_blocks(n)) parts.push_back(algebra_.block(a, k));
    return level_algebra(n).assemble(parts);
  }

  /// pi_{n,m}: C / J_m -> C / J_n for m <= n.
  CMatrix project_to_level(int n, int m, const CMatrix& a) const {
    check_level(n);
    check_level(m);
    if (m > n) throw InvalidArgument("project_to_level: source level exceeds target level");
    const GAlgebra& src = level_algebra(m);
    src.check_conforms(a);
    const auto& from = kept_blocks(m);
    std::vector<CMatrix> parts;
    for (int k : kept_blocks(n)) {
      const auto pos = std::lower_bound(from.begin(), from.end(), k) - from.begin();
      parts.push_back(src.block(a, static_cast<int>(pos)));
    }
    return level_algebra(n).assemble(parts);
  }

  /// Quotient map C / J_m -> C / J_N as a plain function, for use as a
  /// quotient constraint in the correctors.
  std::function<CMatrix(const CMatrix&)> to_top_from(int m) const {
    Tower self = *this;
    return [self, m](const CMatrix& a) { return self.project_to_level(self.top(), m, a); };
  }

 private:
  void check_level(int n) const {
    if (n < 0 || n > top()) throw InvalidArgument("tower level " + std::to_string(n) + " out of range");
  }

  GAlgebra algebra_;
  std::vector<std::vector<int>> ideals_;
  std::vector<std::vector<int>> kept_;
  std::vector<GAlgebra> levels_;
  std::vector<bool> stationary_;
};

/// Lift an invariant element x of the top quotient C / J_N to an invariant
/// element of C: place x on the surviving blocks and `junk` on the ideal
/// blocks, then average over the group.
inline CMatrix invariant_lift(const Tower& tower, const CMatrix& x, const CMatrix* junk = nullptr) {
  const GAlgebra& top = tower.level_algebra(tower.top());
  top.check_conforms(x);
  double worst = 0;
  for (int g = 0; g < top.group().order(); ++g) worst = std::max(worst, operator_norm(top.act(g, x) - x));
  if (worst > tol::kInput) {
    throw PreconditionError("invariant_lift: element is not invariant (defect " + std::to_string(worst) + ")",
                            worst);
  }
  const GAlgebra& c = tower.algebra();
  std::vector<CMatrix> parts(static_cast<std::size_t>(c.block_count()));
  for (int k = 0; k < c.block_count(); ++k) {
    parts[k] = junk ? c.block(*junk, k) : CMatrix::Zero(c.blocks()[k], c.blocks()[k]);
  }
  const auto& kept = tower.kept_blocks(tower.top());
  for (std::size_t i = 0; i < kept.size(); ++i) parts[kept[i]] = top.block(x, static_cast<int>(i));
  const CMatrix lifted = c.assemble(parts);
  return haar_average(c.group(), [&](int g) { return c.act(g, lifted); });
}

/// Images lambda(e^{(l)}_{jk}) of a system of matrix units of
/// F = M_{r_1} + ... + M_{r_L}: units[l][j][k].
using MatrixUnits = std::vector<std::vector<std::vector<CMatrix>>>;

/// Worst violation of e_{ij} e_{kl} = delta_{jk} e_{il}, e_{ij}* = e_{ji},
/// and sum of diagonal units = 1.
inline double matrix_unit_defect(const MatrixUnits& units) {
  if (units.empty()) throw InvalidArgument("matrix units: empty system");
  const auto n = units[0].at(0).at(0).rows();
  double worst = 0;
  CMatrix diag_sum = CMatrix::Zero(n, n);
  for (std::size_t l = 0; l < units.size(); ++l) {
    const auto r = units[l].size();
    for (std::size_t i = 0; i < r; ++i) {
      if (units[l][i].size() != r) throw DimensionError("matrix units: summand is not square");
      diag_sum += units[l][i][i];
      for (std::size_t j = 0; j < r; ++j) {
        worst = std::max(worst, operator_norm(units[l][i][j].adjoint() - units[l][j][i]));
        for (std::size_t m = 0; m < units.size(); ++m) {
          for (std::size_t k = 0; k < units[m].size(); ++k) {
            for (std::size_t q = 0; q < units[m].size(); ++q) {
              const CMatrix prod = units[l][i][j] * units[m][k][q];
              const CMatrix expect =
                  (l == m && j == k) ? units[l][i][q] : CMatrix::Zero(n, n).eval();
              worst = std::max(worst, operator_norm(prod - expect));
            }
          }
        }
      }
    }
  }
  return std::max(worst, operator_norm(diag_sum - identity(n)));
}

/// E(a) = sum_l sum_k lambda(e^{(l)}_{k1}) a lambda(e^{(l)}_{1k}); a conditional
/// expectation onto the relative commutant of lambda(F).
inline CMatrix commutant_expectation(const MatrixUnits& units, const CMatrix& a) {
  const double d = matrix_unit_defect(units);
  if (d > tol::kInput) {
    throw PreconditionError("commutant_expectation: matrix-unit relations violated (" + std::to_string(d) + ")",
                            d);
  }
  CMatrix out = CMatrix::Zero(a.rows(), a.cols());
  for (const auto& summand : units)
    for (std::size_t k = 0; k < summand.size(); ++k) out += summand[k][0] * a * summand[0][k];
  return out;
}

/// Standard matrix units of M_n, optionally conjugated by a unitary v.
inline MatrixUnits standard_units(int n, const CMatrix* v = nullptr) {
  MatrixUnits u(1, std::vector<std::vector<CMatrix>>(n, std::vector<CMatrix>(n)));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      CMatrix e = CMatrix::Zero(n, n);
      e(j, k) = 1.0;
      u[0][j][k] = v ? CMatrix(*v * e * v->adjoint()) : e;
    }
  return u;
}

}  // namespace eqstab
