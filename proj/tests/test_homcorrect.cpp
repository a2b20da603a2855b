#include <gtest/gtest.h>

#include "eqstab/homcorrect.hpp"
#include "eqstab/random.hpp"
#include "support.hpp"

using namespace eqstab;

namespace {

std::vector<FiniteGroup> groups() {
  std::vector<FiniteGroup> out;
  for (int d = 2; d <= 6; ++d) out.push_back(FiniteGroup::cyclic(d));
  out.push_back(FiniteGroup::symmetric(3));
  out.push_back(FiniteGroup::dihedral(4));
  return out;
}

ApproxRep random_exact(const FiniteGroup& g, CounterRng& rng, int max_dim = 8) {
  const int extra = rng.uniform_int(0, std::max(0, max_dim - g.order()));
  const CMatrix w = random_unitary(rng, g.order() + extra);
  return {g, oracle::regular_plus_trivial(g, extra, w)};
}

ApproxRep perturbed(const ApproxRep& pi, const std::vector<CMatrix>& h, double eps) {
  ApproxRep out{pi.group, {}};
  for (int g = 0; g < pi.group.order(); ++g) out.values.push_back(exp_skew(eps * h[g]) * pi(g));
  return out;
}

/// Perturbation whose measured defect is close to `target` (bisection on the scale).
ApproxRep perturbed_to(const ApproxRep& pi, CounterRng& rng, double target) {
  std::vector<CMatrix> h;
  for (int g = 0; g < pi.group.order(); ++g) h.push_back(random_skew(rng, pi.dim(), 1.0));
  double lo = 0, hi = 1;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (defect(perturbed(pi, h, mid)) < target ? lo : hi) = mid;
  }
  return perturbed(pi, h, 0.5 * (lo + hi));
}

ApproxRep conjugate(const ApproxRep& r, const CMatrix& v) {
  ApproxRep out{r.group, {}};
  for (const auto& x : r.values) out.values.push_back(v * x * v.adjoint());
  return out;
}

ApproxRep block_sum(const ApproxRep& a, const ApproxRep& b) {
  ApproxRep out{a.group, {}};
  for (int g = 0; g < a.group.order(); ++g) {
    CMatrix m = CMatrix::Zero(a.dim() + b.dim(), a.dim() + b.dim());
    m.topLeftCorner(a.dim(), a.dim()) = a(g);
    m.bottomRightCorner(b.dim(), b.dim()) = b(g);
    out.values.push_back(m);
  }
  return out;
}

}  // namespace

TEST(Defect, Examples) {
  CounterRng rng(1);
  for (const auto& g : groups()) EXPECT_LE(defect(random_exact(g, rng)), 1e-12);
  for (double theta : {0.0, 0.1, 0.7, 2.0}) {
    ApproxRep r{FiniteGroup::cyclic(2), {identity(1), std::polar(1.0, theta) * identity(1)}};
    EXPECT_NEAR(defect(r), 2 * std::abs(std::sin(theta)), 1e-14);
  }
}

TEST(Defect, MatchesExhaustivePairOracle) {
  CounterRng rng(2);
  for (const auto& g : groups()) {
    const ApproxRep rho = perturbed_to(random_exact(g, rng), rng, rng.uniform(0.001, 0.1));
    const double ref = oracle::brute_pair_defect(rho.values, [&](int a, int b) { return g.mul(a, b); });
    EXPECT_NEAR(defect(rho), ref, 1e-9 * std::max(1.0, ref));
  }
}

TEST(OneStep, ExactFixedPoint) {
  CounterRng rng(3);
  const ApproxRep pi = random_exact(FiniteGroup::symmetric(3), rng);
  EXPECT_LE(distance(one_step(pi), pi), 1e-12);
}

TEST(OneStep, BoundsOverTheGroupMatrix) {
  CounterRng rng(4);
  double worst_ratio = 0;
  for (int t = 0; t < 70; ++t) {
    const FiniteGroup g = groups()[static_cast<std::size_t>(t) % groups().size()];
    const ApproxRep rho = perturbed_to(random_exact(g, rng), rng, rng.uniform(1e-3, 0.05));
    const double r = defect(rho);
    const ApproxRep sigma = one_step(rho);
    EXPECT_LE(sigma.unitarity(), 1e-12);
    EXPECT_LE(defect(sigma), 17 * r * r + 1e-11);
    EXPECT_LE(distance(sigma, rho), 2 * r + 1e-11);
    worst_ratio = std::max(worst_ratio, defect(sigma) / (r * r));
  }
  RecordProperty("worst_defect_over_r2", std::to_string(worst_ratio));
}

TEST(OneStep, RejectsLargeDefectNamingThePair) {
  ApproxRep r{FiniteGroup::cyclic(2), {identity(1), std::polar(1.0, 0.5) * identity(1)}};
  try {
    one_step(r);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NEAR(e.measured(), 2 * std::sin(0.5), 1e-12);
    EXPECT_NE(std::string(e.what()).find("pair"), std::string::npos);
  }
  ApproxRep nonunitary{FiniteGroup::cyclic(2), {identity(2), 1.1 * identity(2)}};
  EXPECT_THROW(one_step(nonunitary), PreconditionError);
}

TEST(OneStep, ConjugationCovariant) {
  CounterRng rng(5);
  for (const auto& g : groups()) {
    const ApproxRep rho = perturbed_to(random_exact(g, rng), rng, 0.03);
    const CMatrix v = random_unitary(rng, rho.dim());
    EXPECT_LE(distance(one_step(conjugate(rho, v)), conjugate(one_step(rho), v)), 1e-11);
  }
}

TEST(CorrectToRep, ExactInputUnchanged) {
  CounterRng rng(6);
  const ApproxRep pi = random_exact(FiniteGroup::dihedral(4), rng);
  const CorrectionResult c = correct_to_rep(pi);
  EXPECT_EQ(c.iterations, 0);
  EXPECT_LE(distance(c.rep, pi), 1e-15);
}

TEST(CorrectToRep, DistanceBoundAtPointZeroFour) {
  CounterRng rng(7);
  for (const auto& g : groups()) {
    const ApproxRep rho = perturbed_to(random_exact(g, rng), rng, 0.04);
    const double r = defect(rho);
    ASSERT_NEAR(r, 0.04, 1e-6);
    const CorrectionResult c = correct_to_rep(rho);
    EXPECT_LE(c.final_defect, 1e-12);
    EXPECT_LE(defect(c.rep), 1e-12);
    EXPECT_LE(c.iterations, 20);
    EXPECT_LE(c.distance, 2 * r / (1 - 17 * r) + 1e-10);
    EXPECT_LE(c.distance, 0.25 + 1e-6);
  }
}

TEST(CorrectToRep, SquaringCascade) {
  CounterRng rng(8);
  for (int t = 0; t < 20; ++t) {
    const FiniteGroup g = groups()[static_cast<std::size_t>(t) % groups().size()];
    const ApproxRep rho = perturbed_to(random_exact(g, rng), rng, rng.uniform(0.005, 0.055));
    const double r = defect(rho);
    const CorrectionResult c = correct_to_rep(rho);
    ASSERT_EQ(c.trace.front().iteration, 0);
    for (const auto& row : c.trace) {
      EXPECT_LE(row.defect, r * std::pow(17 * r, row.iteration) + 1e-10 * row.iteration);
      EXPECT_LE(row.distance, 2 * r / (1 - 17 * r) + 1e-10);
    }
  }
}

TEST(CorrectToRep, QuotientImageFixed) {
  CounterRng rng(9);
  for (const auto& g : groups()) {
    const ApproxRep pi1 = random_exact(g, rng, 6);
    const ApproxRep pi2 = random_exact(g, rng, 6);
    const ApproxRep rho = block_sum(perturbed_to(pi1, rng, 0.03), pi2);
    const int n1 = pi1.dim(), n2 = pi2.dim();
    const QuotientMap kappa = [n1, n2](const CMatrix& a) { return CMatrix(a.block(n1, n1, n2, n2)); };
    const CorrectionResult c = correct_to_rep(rho, {1e-12, 64, kappa});
    EXPECT_LE(c.final_defect, 1e-12);
    EXPECT_LE(c.quotient_drift, 1e-12);
    for (int x = 0; x < g.order(); ++x) EXPECT_LE(operator_norm(kappa(c.rep(x)) - pi2(x)), 1e-12);
  }
}

TEST(CorrectToRep, Preconditions) {
  CounterRng rng(10);
  const ApproxRep pi = random_exact(FiniteGroup::cyclic(3), rng);
  EXPECT_THROW(correct_to_rep(perturbed_to(pi, rng, 0.07)), PreconditionError);
  try {
    correct_to_rep(perturbed_to(pi, rng, 0.04), {1e-14, 1, {}});
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.trace().size(), 2u);
  }
  // kappa o rho0 must itself be a representation.
  const QuotientMap whole = [](const CMatrix& a) { return a; };
  EXPECT_THROW(correct_to_rep(perturbed_to(pi, rng, 0.01), {1e-12, 64, whole}), PreconditionError);
}

TEST(Symmetrize, FixedPointsAndTrivialSource) {
  CounterRng rng(11);
  const FiniteGroup s3 = FiniteGroup::symmetric(3);
  const ApproxRep pi = random_exact(s3, rng);
  const GAlgebra target = GAlgebra::inner(s3, pi.values);
  const SourceAction conj = SourceAction::conjugation(s3);
  ASSERT_LE(equivariance_defect(pi, conj, target), 1e-12);
  EXPECT_LE(distance(symmetrize(pi, conj, target), pi), 1e-12);

  // Trivial action on the source: T(h) is the average of gamma_k(psi(h)) and is invariant.
  const FiniteGroup z2 = FiniteGroup::cyclic(2);
  const ApproxRep psi = random_exact(z2, rng, 4);
  const CMatrix flip = random_unitary(rng, psi.dim());
  CMatrix d = identity(psi.dim());
  d(0, 0) = -1.0;
  const CMatrix inv = flip * d * flip.adjoint();
  const GAlgebra tgt = GAlgebra::inner(z2, {identity(psi.dim()), inv});
  const ApproxRep t = symmetrize(psi, SourceAction::trivial(z2, z2), tgt);
  for (int h = 0; h < 2; ++h) {
    EXPECT_LE(operator_norm(t(h) - 0.5 * (psi(h) + inv * psi(h) * inv.adjoint())), 1e-14);
    EXPECT_LE(operator_norm(tgt.act(1, t(h)) - t(h)), 1e-14);
  }
}

TEST(Symmetrize, CyclicScenarioRemovesEquivarianceDefect) {
  CounterRng rng(12);
  const FiniteGroup z3 = FiniteGroup::cyclic(3);
  const ApproxRep pi = random_exact(z3, rng, 5);
  const GAlgebra target = GAlgebra::inner(z3, pi.values);
  const SourceAction alpha = SourceAction::conjugation(z3);
  const CMatrix x = random_skew(rng, pi.dim(), 1.0);
  double lo = 0, hi = 1;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (equivariance_defect(conjugate(pi, exp_skew(mid * x)), alpha, target) < 0.08 ? lo : hi) = mid;
  }
  const ApproxRep psi = conjugate(pi, exp_skew(0.5 * (lo + hi) * x));
  const double before = equivariance_defect(psi, alpha, target);
  EXPECT_NEAR(before, 0.08, 1e-6);
  const ApproxRep t = symmetrize(psi, alpha, target);
  EXPECT_LE(equivariance_defect(t, alpha, target), 1e-12);
}

TEST(Symmetrize, PreservesEquivariantQuotient) {
  CounterRng rng(13);
  const FiniteGroup g = FiniteGroup::symmetric(3);
  const ApproxRep pi1 = random_exact(g, rng, 6), pi2 = random_exact(g, rng, 7);
  const GAlgebra target = GAlgebra::blockwise_inner(g, {pi1.values, pi2.values});
  const SourceAction conj = SourceAction::conjugation(g);
  const ApproxRep psi = block_sum(conjugate(pi1, random_unitary(rng, pi1.dim())), pi2);
  const ApproxRep t = symmetrize(psi, conj, target);
  EXPECT_LE(equivariance_defect(t, conj, target), 1e-12);
  for (int h = 0; h < g.order(); ++h)
    EXPECT_LE(operator_norm(t(h).bottomRightCorner(pi2.dim(), pi2.dim()) - pi2(h)), 1e-12);
}

TEST(UnitarizeValues, Examples) {
  CounterRng rng(14);
  const CMatrix u = random_unitary(rng, 4);
  EXPECT_LE(operator_norm(unitarize_values({u})[0] - u), 1e-13);
  EXPECT_LE(operator_norm(unitarize_values({1.001 * u})[0] - u), 1e-13);
  EXPECT_THROW(unitarize_values({1.01 * u}), PreconditionError);
}

TEST(UnitarizeValues, DistanceContract) {
  CounterRng rng(15);
  for (int t = 0; t < 100; ++t) {
    const int n = rng.uniform_int(2, 6);
    const CMatrix u = random_unitary(rng, n);
    const CMatrix e = random_gaussian(rng, n, n);
    const CMatrix a = u + e * (rng.uniform(0.0, 0.999) * kEps / oracle::power_norm(e));
    const CMatrix p = unitarize_values({a})[0];
    EXPECT_LT(oracle::power_norm(p - a), kEps0);
    EXPECT_LE(unitarity_defect(p), 1e-12);
  }
}

TEST(Intertwiner, IdentityAndConjugatePairs) {
  CounterRng rng(16);
  for (const auto& g : groups()) {
    const ApproxRep rho = random_exact(g, rng);
    EXPECT_LE(operator_norm(intertwiner(rho, rho) - identity(rho.dim())), 1e-12);
    const CMatrix v = exp_skew(random_skew(rng, rho.dim(), 0.3));
    const ApproxRep sigma = conjugate(rho, v);
    const CMatrix u = intertwiner(rho, sigma);
    EXPECT_LE(unitarity_defect(u), 1e-12);
    for (int x = 0; x < g.order(); ++x) EXPECT_LE(operator_norm(u * rho(x) * u.adjoint() - sigma(x)), 1e-11);
  }
}

TEST(Intertwiner, QuotientFixed) {
  CounterRng rng(17);
  const FiniteGroup g = FiniteGroup::dihedral(4);
  const ApproxRep a = random_exact(g, rng), b = random_exact(g, rng);
  const ApproxRep rho = block_sum(a, b);
  const ApproxRep sigma = block_sum(conjugate(a, exp_skew(random_skew(rng, a.dim(), 0.3))), b);
  const int n = a.dim(), m = b.dim();
  const QuotientMap kappa = [n, m](const CMatrix& x) { return CMatrix(x.block(n, n, m, m)); };
  const CMatrix u = intertwiner(rho, sigma, kappa);
  EXPECT_LE(operator_norm(kappa(u) - identity(m)), 1e-11);
  for (int x = 0; x < g.order(); ++x) EXPECT_LE(operator_norm(u * rho(x) * u.adjoint() - sigma(x)), 1e-11);
}

TEST(Intertwiner, RejectsFarApartPairs) {
  const ApproxRep rho{FiniteGroup::cyclic(2), {identity(1), identity(1)}};
  const ApproxRep sigma{FiniteGroup::cyclic(2), {identity(1), -identity(1)}};
  EXPECT_THROW(intertwiner(rho, sigma), PreconditionError);
}

namespace {

struct ConstructedTower {
  Tower tower;
  SourceAction alpha;
  ApproxRep phi;
  ApproxRep seed;
};

/// Blocks B_0..B_{L-1} carry v_k phi v_k* with ||v_k - 1|| ~ ratio^{k+1}; the
/// last block is the exact top. Level n drops B_0..B_{n-1}.
ConstructedTower build_tower(const FiniteGroup& g, const ApproxRep& pi, const std::vector<CMatrix>& gamma,
                             SourceAction alpha, int levels, double ratio, CounterRng& rng) {
  std::vector<std::vector<CMatrix>> act(static_cast<std::size_t>(levels + 1), gamma);
  const GAlgebra c = GAlgebra::blockwise_inner(g, act);
  std::vector<std::vector<int>> ideals;
  for (int n = 0; n <= levels; ++n) {
    std::vector<int> j;
    for (int k = 0; k < n; ++k) j.push_back(k);
    ideals.push_back(j);
  }
  std::vector<CMatrix> v;
  double e = 1;
  for (int k = 0; k < levels; ++k) v.push_back(exp_skew(random_skew(rng, pi.dim(), e *= ratio)));
  ApproxRep seed{g, {}};
  for (int h = 0; h < g.order(); ++h) {
    const int n = pi.dim() * (levels + 1);
    CMatrix m = CMatrix::Zero(n, n);
    for (int k = 0; k < levels; ++k) m.block(k * pi.dim(), k * pi.dim(), pi.dim(), pi.dim()) = v[k] * pi(h) * v[k].adjoint();
    m.bottomRightCorner(pi.dim(), pi.dim()) = pi(h);
    seed.values.push_back(m);
  }
  return {Tower(c, ideals), std::move(alpha), pi, seed};
}

}  // namespace

TEST(LiftGroupRep, ExactAtLevelZero) {
  CounterRng rng(18);
  const FiniteGroup g = FiniteGroup::symmetric(3);
  const ApproxRep pi = random_exact(g, rng, 7);
  const ConstructedTower t = build_tower(g, pi, pi.values, SourceAction::conjugation(g), 3, 0.0, rng);
  const LiftResult r = lift_group_rep(t.tower, t.alpha, t.phi, t.seed);
  EXPECT_EQ(r.level, 0);
  EXPECT_LE(distance(r.lift, t.seed), 1e-11);
}

TEST(LiftGroupRep, DecayingTowers) {
  CounterRng rng(19);
  for (int trial = 0; trial < 12; ++trial) {
    const FiniteGroup g = groups()[static_cast<std::size_t>(trial) % groups().size()];
    const ApproxRep pi = random_exact(g, rng, 8);
    const int levels = rng.uniform_int(3, 6);
    const double ratio = rng.uniform(0.1, 0.25);
    const ConstructedTower t = build_tower(g, pi, pi.values, SourceAction::conjugation(g), levels, ratio, rng);
    const LiftResult r = lift_group_rep(t.tower, t.alpha, t.phi, t.seed);
    const GAlgebra& level = t.tower.level_algebra(r.level);
    EXPECT_LE(defect(r.lift), 1e-11);
    EXPECT_LE(equivariance_defect(r.lift, t.alpha, level), 1e-11);
    for (int h = 0; h < g.order(); ++h)
      EXPECT_LE(operator_norm(t.tower.project_to_level(t.tower.top(), r.level, r.lift(h)) - pi(h)), 1e-11);
    // Every rejected level sits strictly below the accepted one.
    for (const auto& row : r.levels) EXPECT_EQ(row.accepted, row.level == r.level);
    EXPECT_LE(r.level, levels);
  }
}

TEST(LiftGroupRep, TranslationCovariance) {
  CounterRng rng(20);
  for (int d = 2; d <= 5; ++d) {
    CMatrix z = CMatrix::Zero(d, d), shift = CMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
      z(j, j) = std::polar(1.0, 2 * kPi * j / d);
      shift((j + 1) % d, j) = 1.0;
    }
    const FiniteGroup g = FiniteGroup::cyclic(d);
    ApproxRep pi{g, {}};
    std::vector<CMatrix> gamma;
    for (int h = 0; h < d; ++h) {
      pi.values.push_back(matrix_power(z, h));
      gamma.push_back(matrix_power(shift, h));
    }
    const ConstructedTower t = build_tower(g, pi, gamma, SourceAction::translation(d), 5, 0.2, rng);
    const LiftResult r = lift_group_rep(t.tower, t.alpha, t.phi, t.seed);
    const GAlgebra& level = t.tower.level_algebra(r.level);
    const CMatrix& lifted_z = r.lift(1);
    const Complex zeta = std::polar(1.0, 2 * kPi / d);
    EXPECT_LE(operator_norm(matrix_power(lifted_z, d) - identity(lifted_z.rows())), 1e-11);
    for (int lambda = 0; lambda < d; ++lambda)
      EXPECT_LE(operator_norm(level.act(lambda, lifted_z) - std::pow(zeta, -lambda) * lifted_z), 1e-11);
  }
}

TEST(LiftGroupRep, RejectsNonEquivariantTop) {
  CounterRng rng(21);
  const FiniteGroup g = FiniteGroup::symmetric(3);
  const ApproxRep pi = random_exact(g, rng, 6);
  const ConstructedTower t = build_tower(g, pi, pi.values, SourceAction::conjugation(g), 2, 0.1, rng);
  // S3 is nonabelian, so phi is not equivariant for the trivial source action.
  EXPECT_THROW(lift_group_rep(t.tower, SourceAction::trivial(g, g), t.phi, t.seed), PreconditionError);
  ApproxRep bad = t.seed;
  const int n = pi.dim();
  bad.values[1].topLeftCorner(n, n) = bad.values[1].topLeftCorner(n, n) * exp_skew(random_skew(rng, n, 0.1));
  EXPECT_THROW(lift_group_rep(t.tower, t.alpha, t.phi, bad), PreconditionError);
}
