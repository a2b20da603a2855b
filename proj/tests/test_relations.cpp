#include <gtest/gtest.h>

#include "eqstab/random.hpp"
#include "eqstab/relations.hpp"
#include "support.hpp"

using namespace eqstab;

namespace {

/// alpha = Ad(shift (x) 1 + 1_extra) on C^d (x) C^m (+ C^extra), conjugated
/// by w; e_{t^j} is the j-th tower level.
struct LevelModel {
  FiniteGroup group;
  MatrixAction action;
  std::vector<CMatrix> exact;
  CMatrix support;
};

LevelModel make_tower(int d, int m, int extra, const CMatrix& w) {
  const FiniteGroup g = FiniteGroup::cyclic(d);
  const int n = d * m + extra;
  CMatrix shift = identity(n);
  shift.topLeftCorner(d * m, d * m).setZero();
  for (int i = 0; i < d; ++i) shift.block(((i + 1) % d) * m, i * m, m, m) = identity(m);
  std::vector<CMatrix> u, e;
  CMatrix power = identity(n);
  for (int j = 0; j < d; ++j) {
    u.push_back(w * power * w.adjoint());
    CMatrix p = CMatrix::Zero(n, n);
    p.block(j * m, j * m, m, m) = identity(m);
    e.push_back(w * p * w.adjoint());
    power = shift * power;
  }
  CMatrix support = CMatrix::Zero(n, n);
  for (const auto& p : e) support += p;
  // In Z/d the element j is t^j for the generator t = 1.
  return {g, GAlgebra::inner(g, u).as_action(), e, support};
}

std::vector<CMatrix> seeds_at(const LevelModel& t, double s, const CMatrix& k, const std::vector<CMatrix>& noise) {
  const CMatrix v = exp_skew(s * k);
  std::vector<CMatrix> out;
  for (std::size_t g = 0; g < t.exact.size(); ++g) out.push_back(v * t.exact[g] * v.adjoint() + (s / 2) * noise[g]);
  return out;
}

/// Seeds whose defect (with the sum measured against the tower support) is
/// just below `target`.
std::vector<CMatrix> seeds_near(const LevelModel& t, CounterRng& rng, double target, bool noisy = true) {
  const auto n = t.exact[0].rows();
  const CMatrix k = random_skew(rng, n, 1.0);
  std::vector<CMatrix> noise;
  for (std::size_t g = 0; g < t.exact.size(); ++g)
    noise.push_back(noisy ? random_hermitian(rng, n, 1.0) : CMatrix(CMatrix::Zero(n, n)));
  auto delta = [&](double s) {
    const auto e = seeds_at(t, s, k, noise);
    PartitionDefects pd = partition_defects(t.group, t.action, e);
    CMatrix total = CMatrix::Zero(n, n);
    for (const auto& x : e) total += x;
    pd.sum = operator_norm(total - t.support);
    return pd.max();
  };
  double lo = 0, hi = 1;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (delta(mid) < target ? lo : hi) = mid;
  }
  return seeds_at(t, lo, k, noise);
}

double brute_relations(const std::vector<CMatrix>& e) {
  const auto n = e[0].rows();
  double worst = 0;
  CMatrix total = CMatrix::Zero(n, n);
  for (std::size_t g = 0; g < e.size(); ++g) {
    total += e[g];
    worst = std::max(worst, oracle::power_norm(e[g].adjoint() - e[g]));
    for (std::size_t h = 0; h < e.size(); ++h)
      worst = std::max(worst, oracle::power_norm(e[g] * e[h] - (g == h ? e[g] : CMatrix::Zero(n, n))));
  }
  return std::max(worst, oracle::power_norm(total - identity(n)));
}

CMatrix swap2() {
  CMatrix x = CMatrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  return x;
}

}  // namespace

TEST(EvalPoly, Examples) {
  CounterRng rng(1);
  const CMatrix u = random_unitary(rng, 3);
  const Assignment rho = {u};
  EXPECT_LE(operator_norm(eval_poly(StarPolynomial::one(), rho) - identity(3)), 1e-15);
  const StarPolynomial s = StarPolynomial::gen(0);
  EXPECT_LE(operator_norm(eval_poly(s.adjoint() * s - StarPolynomial::one(), rho)), 1e-12);
  EXPECT_LE(operator_norm(eval_poly(s * s.adjoint() - StarPolynomial::one(), rho)), 1e-12);
}

TEST(EvalPoly, IsAStarHomomorphism) {
  CounterRng rng(2);
  const FiniteGroup g = FiniteGroup::cyclic(3);
  const MatrixAction action = GAlgebra::inner(g, oracle::regular_plus_trivial(g, 1, random_unitary(rng, 4))).as_action();
  for (int t = 0; t < 30; ++t) {
    const Assignment rho = {random_gaussian(rng, 4, 4), random_gaussian(rng, 4, 4)};
    auto random_poly = [&]() {
      std::vector<Term> terms;
      const int nt = rng.uniform_int(1, 3);
      for (int i = 0; i < nt; ++i) {
        Term term{Complex(rng.normal(), rng.normal()), {}};
        const int len = rng.uniform_int(0, 3);
        for (int l = 0; l < len; ++l)
          term.word.push_back({rng.uniform_int(0, 1), rng.uniform_int(-1, 2), rng.uniform() < 0.5});
        terms.push_back(term);
      }
      return StarPolynomial(terms);
    };
    const StarPolynomial p = random_poly(), q = random_poly();
    const CMatrix pv = eval_poly(p, rho, &action), qv = eval_poly(q, rho, &action);
    const double scale = 1 + operator_norm(pv) * operator_norm(qv);
    EXPECT_LE(operator_norm(eval_poly(p * q, rho, &action) - pv * qv), 1e-12 * scale);
    EXPECT_LE(operator_norm(eval_poly(p + q, rho, &action) - (pv + qv)), 1e-12 * scale);
    EXPECT_LE(operator_norm(eval_poly(p.adjoint(), rho, &action) - pv.adjoint()), 1e-12 * scale);
    // A sigma_g symbol is alpha_g of the plain one.
    const CMatrix s1 = eval_poly(StarPolynomial::gen(1, 2), rho, &action);
    EXPECT_LE(operator_norm(s1 - action(2, rho[1])), 1e-13);
  }
}

TEST(EvalPoly, RejectsUnknownSymbols) {
  const Assignment rho = {identity(2)};
  EXPECT_THROW(eval_poly(StarPolynomial::gen(1), rho), InvalidArgument);
  EXPECT_THROW(eval_poly(StarPolynomial::gen(0, 1), rho), InvalidArgument);
  EXPECT_THROW(eval_poly(StarPolynomial::one(), {}), InvalidArgument);
}

TEST(RelationSystem, PartitionSystemValidates) {
  for (const auto& g : {FiniteGroup::cyclic(4), FiniteGroup::symmetric(3), FiniteGroup::dihedral(3)}) {
    for (bool unital : {false, true}) {
      const RelationSystem sys = partition_system(g, unital);
      EXPECT_NO_THROW(sys.validate());
      EXPECT_EQ(sys.generator_count(), g.order());
      EXPECT_EQ(static_cast<int>(sys.relations.size()), g.order() * (g.order() + 1) + (unital ? 1 : 0));
    }
  }
}

TEST(RelationSystem, ValidateRejectsBadData) {
  const FiniteGroup g = FiniteGroup::cyclic(3);
  RelationSystem sys = partition_system(g, true);
  {
    RelationSystem bad = sys;
    bad.sigma.pop_back();
    EXPECT_THROW(bad.validate(), InvalidArgument);
  }
  {
    RelationSystem bad = sys;
    bad.sigma[1] = {0, 0, 1};
    EXPECT_THROW(bad.validate(), InvalidArgument);
  }
  {
    RelationSystem bad = sys;
    bad.sigma[1] = {1, 0, 2};  // a transposition cannot carry a Z/3 action
    EXPECT_THROW(bad.validate(), InvalidArgument);
  }
  {
    RelationSystem bad = sys;
    bad.relations.push_back(StarPolynomial::gen(5));
    EXPECT_THROW(bad.validate(), InvalidArgument);
  }
  {
    RelationSystem bad = sys;
    bad.relations.erase(bad.relations.begin());  // p_0 p_0 - p_0 no longer has its orbit
    EXPECT_THROW(bad.validate(), InvalidArgument);
  }
}

TEST(RepDefect, ExactAndScaledModels) {
  CounterRng rng(3);
  for (int d = 2; d <= 5; ++d) {
    const LevelModel t = make_tower(d, 2, 0, random_unitary(rng, 2 * d));
    const RelationSystem sys = partition_system(t.group, true);
    const RepDefect exact = rep_defect(sys, t.exact, t.action);
    EXPECT_LE(exact.relations, 1e-12);
    EXPECT_LE(exact.equivariance, 1e-12);
    for (double delta : {0.01, 0.1, 0.5}) {
      Assignment scaled;
      for (const auto& e : t.exact) scaled.push_back((1 + delta) * e);
      const RepDefect r = rep_defect(sys, scaled, t.action);
      // (1+delta)^2 e - (1+delta) e on the diagonal relations, delta on the sum.
      EXPECT_NEAR(r.relations, delta * (1 + delta), 1e-12);
      EXPECT_LE(r.equivariance, 1e-12);
    }
  }
}

TEST(RepDefect, MatchesBruteForce) {
  CounterRng rng(4);
  for (int d = 2; d <= 4; ++d) {
    const LevelModel t = make_tower(d, 2, 0, random_unitary(rng, 2 * d));
    const RelationSystem sys = partition_system(t.group, true);
    const auto seeds = seeds_near(t, rng, 0.05);
    const RepDefect r = rep_defect(sys, seeds, t.action);
    EXPECT_NEAR(r.relations, brute_relations(seeds), 1e-9);
    double eq = 0;
    for (int g = 0; g < d; ++g)
      for (int h = 0; h < d; ++h)
        eq = std::max(eq, oracle::power_norm(seeds[t.group.mul(g, h)] - t.action(g, seeds[h])));
    EXPECT_NEAR(r.equivariance, eq, 1e-9);
  }
}

TEST(RepDefect, Preconditions) {
  const RelationSystem sys = partition_system(FiniteGroup::cyclic(2), true);
  const MatrixAction trivial{sys.group, [](int, const CMatrix& a) { return a; }};
  EXPECT_THROW(rep_defect(sys, {identity(2)}, trivial), DimensionError);
  EXPECT_THROW(rep_defect(sys, {identity(2), 3.0 * identity(2)}, trivial), PreconditionError);
}

TEST(SymmetrizeAssignment, FixesEquivariantAssignments) {
  CounterRng rng(5);
  const LevelModel t = make_tower(3, 2, 1, random_unitary(rng, 7));
  const RelationSystem sys = partition_system(t.group, false);
  const Assignment b = symmetrize_assignment(sys, t.exact, t.action);
  for (int g = 0; g < 3; ++g) EXPECT_LE(operator_norm(b[g] - t.exact[g]), 1e-12);

  const FiniteGroup s3 = FiniteGroup::symmetric(3);
  const RelationSystem trivial_sys{s3, {"x"}, std::vector<std::vector<int>>(6, {0}), {}};
  const MatrixAction trivial{s3, [](int, const CMatrix& a) { return a; }};
  const CMatrix x = random_gaussian(rng, 3, 3) / 4.0;
  EXPECT_LE(operator_norm(symmetrize_assignment(trivial_sys, {x}, trivial)[0] - x), 1e-15);
}

TEST(SymmetrizeAssignment, ExactlyEquivariantWithSmallDisplacement) {
  CounterRng rng(6);
  for (int d = 2; d <= 5; ++d) {
    const LevelModel t = make_tower(d, 2, 0, random_unitary(rng, 2 * d));
    const RelationSystem sys = partition_system(t.group, true);
    const auto seeds = seeds_near(t, rng, 0.06, false);
    const double eq0 = rep_defect(sys, seeds, t.action).equivariance;
    EXPECT_GT(eq0, 0.01);
    const Assignment b = symmetrize_assignment(sys, seeds, t.action);
    EXPECT_LE(rep_defect(sys, b, t.action).equivariance, 1e-12);
    double norm0 = 0;
    for (int g = 0; g < d; ++g) {
      EXPECT_LE(operator_norm(b[g] - seeds[g]), eq0 + 1e-12);
      norm0 = std::max(norm0, operator_norm(seeds[g]));
    }
    for (const auto& x : b) EXPECT_LE(operator_norm(x), norm0 + 1e-12);
    const Assignment bb = symmetrize_assignment(sys, b, t.action);
    for (int g = 0; g < d; ++g) EXPECT_LE(operator_norm(bb[g] - b[g]), 1e-12);
  }
}

TEST(PartitionThreshold, IsTheBisectedBound) {
  for (int d = 2; d <= 6; ++d) {
    const double th = partition_threshold(d);
    EXPECT_GT(th, 0.0);
    EXPECT_LT(partition_propagation_bound(th, d), std::sqrt(2.0));
    EXPECT_GE(partition_propagation_bound(th * (1 + 1e-9), d), std::sqrt(2.0));
    if (d > 2) EXPECT_LT(th, partition_threshold(d - 1));
  }
}

TEST(StabilizePartition, ExactFamilyIsFixed) {
  CounterRng rng(7);
  for (int d = 2; d <= 4; ++d) {
    const LevelModel t = make_tower(d, 3, 0, random_unitary(rng, 3 * d));
    const PartitionResult r = stabilize_partition(t.group, t.action, t.exact);
    EXPECT_TRUE(r.report.certified);
    for (int g = 0; g < d; ++g) EXPECT_LE(operator_norm(r.family[g] - t.exact[g]), 1e-12);
  }
}

TEST(StabilizePartition, TwoByTwoSwapClosedForm) {
  const FiniteGroup g = FiniteGroup::cyclic(2);
  const GAlgebra a = GAlgebra::inner(g, {identity(2), swap2()});
  const double theta = 0.05, c = std::cos(theta), s = std::sin(theta);
  CMatrix rot(2, 2);
  rot << c, -s, s, c;
  CMatrix e11 = CMatrix::Zero(2, 2), e22 = CMatrix::Zero(2, 2);
  e11(0, 0) = 1.0;
  e22(1, 1) = 1.0;
  const std::vector<CMatrix> seeds = {rot * e11 * rot.adjoint(), rot * e22 * rot.adjoint()};
  // The seed defect sin(2 theta) is above the certified threshold for d = 2;
  // the measured gates still decide.
  PartitionOptions opts;
  opts.allow_uncertified = true;
  const PartitionResult r = stabilize_partition(a, seeds, opts);
  EXPECT_FALSE(r.report.certified);
  EXPECT_NEAR(r.report.seed_delta, std::sin(2 * theta), 1e-12);
  // The symmetrized family is diag(c^2, s^2), diag(s^2, c^2); its encoding
  // cos(2 theta) diag(1, -1) has polar part diag(1, -1).
  EXPECT_LE(operator_norm(r.family[0] - e11), 1e-12);
  EXPECT_LE(operator_norm(r.family[1] - e22), 1e-12);
  EXPECT_NEAR(r.report.displacement, s, 1e-12);
  EXPECT_NEAR(r.report.encoded_unitarity, 1 - std::pow(std::cos(2 * theta), 2), 1e-12);
  EXPECT_LE(r.report.displacement, 0.2);
}

TEST(StabilizePartition, RandomCyclicTrialsMeetAllConditions) {
  CounterRng rng(8);
  for (int trial = 0; trial < 45; ++trial) {
    const int d = 2 + trial % 3;
    const int m = rng.uniform_int(1, 12 / d);
    const LevelModel t = make_tower(d, m, 0, random_unitary(rng, d * m));
    const double target = rng.uniform(0.1, 0.95) * partition_threshold(d);
    const auto seeds = seeds_near(t, rng, target);
    const PartitionResult r = stabilize_partition(t.group, t.action, seeds);
    ASSERT_TRUE(r.report.certified);
    const PartitionDefects pd = partition_defects(t.group, t.action, r.family);
    EXPECT_LE(pd.projection, 1e-12);
    EXPECT_LE(pd.orthogonality, 1e-12);
    EXPECT_LE(pd.sum, 1e-12);
    EXPECT_LE(pd.equivariance, 1e-12);
    EXPECT_LE(brute_relations(r.family), 1e-11);
    // The rounded unitary is sum_j zeta^j e_{t^j}.
    CMatrix z = CMatrix::Zero(d * m, d * m);
    for (int j = 0; j < d; ++j) z += std::polar(1.0, 2 * kPi * j / d) * r.family[j];
    EXPECT_LE(operator_norm(z - r.rounded_unitary), 1e-12);
  }
}

TEST(StabilizePartition, GaugeCovariant) {
  CounterRng rng(9);
  for (int d = 2; d <= 4; ++d) {
    const LevelModel t = make_tower(d, 2, 0, random_unitary(rng, 2 * d));
    const auto seeds = seeds_near(t, rng, 0.5 * partition_threshold(d));
    const CMatrix u = random_unitary(rng, 2 * d);
    const MatrixAction moved{t.group, [&](int g, const CMatrix& x) {
                               return CMatrix(u * t.action(g, CMatrix(u.adjoint() * x * u)) * u.adjoint());
                             }};
    std::vector<CMatrix> moved_seeds;
    for (const auto& e : seeds) moved_seeds.push_back(u * e * u.adjoint());
    const PartitionResult r = stabilize_partition(t.group, t.action, seeds);
    const PartitionResult r2 = stabilize_partition(t.group, moved, moved_seeds);
    for (int g = 0; g < d; ++g) EXPECT_LE(operator_norm(r2.family[g] - u * r.family[g] * u.adjoint()), 1e-11);
  }
}

TEST(StabilizePartition, Preconditions) {
  CounterRng rng(10);
  const LevelModel t = make_tower(3, 2, 0, random_unitary(rng, 6));
  const auto seeds = seeds_near(t, rng, 2 * partition_threshold(3));
  try {
    stabilize_partition(t.group, t.action, seeds);
    FAIL() << "expected a threshold rejection";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("threshold"), std::string::npos);
  }
  PartitionOptions opts;
  opts.allow_uncertified = true;
  const PartitionResult r = stabilize_partition(t.group, t.action, seeds, opts);
  EXPECT_FALSE(r.report.certified);
  EXPECT_THROW(stabilize_partition(t.group, t.action, {seeds[0], seeds[1]}), DimensionError);

  const FiniteGroup s3 = FiniteGroup::symmetric(3);
  const MatrixAction trivial{s3, [](int, const CMatrix& a) { return a; }};
  EXPECT_THROW(stabilize_partition(s3, trivial, std::vector<CMatrix>(6, identity(2) / 6.0)), InvalidArgument);
}

TEST(StabilizeTracialPartition, FullSupportReducesToPlainCase) {
  CounterRng rng(11);
  for (int d = 2; d <= 3; ++d) {
    const LevelModel t = make_tower(d, 2, 0, random_unitary(rng, 2 * d));
    const auto seeds = seeds_near(t, rng, 0.4 * partition_threshold(d));
    const TracialResult tr = stabilize_tracial_partition(t.group, t.action, seeds, identity(2 * d));
    const PartitionResult pr = stabilize_partition(t.group, t.action, seeds);
    EXPECT_EQ(tr.complement_rank, 0);
    EXPECT_LE(operator_norm(tr.support - identity(2 * d)), 1e-12);
    for (int g = 0; g < d; ++g) EXPECT_LE(operator_norm(tr.family[g] - pr.family[g]), 1e-10);
    EXPECT_NEAR(tr.witness_norm, 1.0, 1e-12);
  }
}

TEST(StabilizeTracialPartition, SmallComplement) {
  CounterRng rng(12);
  for (int trial = 0; trial < 12; ++trial) {
    const int d = 2 + trial % 2;
    const int m = rng.uniform_int(1, 3);
    const int n = d * m + 1;
    const CMatrix w = random_unitary(rng, n);
    const LevelModel t = make_tower(d, m, 1, w);
    const auto seeds = seeds_near(t, rng, rng.uniform(0.1, 0.8) * partition_threshold(d));
    CVector xi = CVector::Zero(n);
    for (int i = 0; i < m; ++i) xi(i) = Complex(rng.normal(), rng.normal());
    xi = w * (xi / xi.norm());
    const CMatrix x = xi * xi.adjoint();
    const TracialResult r = stabilize_tracial_partition(t.group, t.action, seeds, x);
    EXPECT_EQ(r.complement_rank, 1);
    EXPECT_EQ(r.corner_rank, n - 1);
    EXPECT_LE(r.support_invariance, 1e-12);
    const PartitionDefects pd = partition_defects(t.group, t.action, r.family);
    EXPECT_LE(pd.projection, 1e-12);
    EXPECT_LE(pd.orthogonality, 1e-12);
    EXPECT_LE(pd.equivariance, 1e-12);
    CMatrix q = CMatrix::Zero(n, n);
    for (const auto& e : r.family) q += e;
    EXPECT_LE(operator_norm(q - r.support), 1e-12);
    EXPECT_NEAR(r.witness_norm, oracle::power_norm(q * x * q), 1e-10);
    // The witness sits in the tower, so almost all of it survives.
    EXPECT_GT(r.witness_norm, 0.5);
  }
}

TEST(StabilizeTracialPartition, RejectsBadWitness) {
  CounterRng rng(13);
  const LevelModel t = make_tower(2, 2, 1, random_unitary(rng, 5));
  const auto seeds = seeds_near(t, rng, 0.01);
  EXPECT_THROW(stabilize_tracial_partition(t.group, t.action, seeds, 2.0 * identity(5)), PreconditionError);
  EXPECT_THROW(stabilize_tracial_partition(t.group, t.action, seeds, -identity(5)), PreconditionError);
  EXPECT_THROW(stabilize_tracial_partition(t.group, t.action, seeds, random_gaussian(rng, 5, 5)), PreconditionError);
  EXPECT_THROW(stabilize_tracial_partition(t.group, t.action, seeds, identity(4)), DimensionError);
}
