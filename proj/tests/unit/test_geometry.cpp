#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "../support/suites.hpp"
#include "discrank/games.hpp"
#include "discrank/geometry.hpp"

using namespace discrank;

namespace {

DensePayoff payoff_of(const PlanarPointSet& pts) {
  Vector u(static_cast<Eigen::Index>(pts.size()));
  Vector v(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t k = 0; k < pts.size(); ++k) {
    u[static_cast<Eigen::Index>(k)] = pts[k].u;
    v[static_cast<Eigen::Index>(k)] = pts[k].v;
  }
  return realize(GameSpec{DiscGame{u, v}});
}

}  // namespace

TEST(ConvexHull, SquareWithInteriorPoint) {
  const PlanarPointSet pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {1, 0.5}};
  const auto hull = convex_hull(pts);
  EXPECT_EQ(hull, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(ClassifyDisc, EquilateralTriangleIsCyclic) {
  const auto c = classify_disc({{1, 0}, {-0.5, 0.866}, {-0.5, -0.866}});
  EXPECT_EQ(c.verdict, Verdict::FullyCyclic);
  EXPECT_EQ(c.origin_location, OriginLocation::Interior);
  ASSERT_TRUE(c.witness.has_value());
  EXPECT_EQ(*c.witness, (Triple{0, 1, 2}));
}

TEST(ClassifyDisc, PositiveQuadrantIsTransitive) {
  const auto c = classify_disc({{1, 1}, {2, 1}, {1, 2}});
  EXPECT_EQ(c.verdict, Verdict::FullyTransitive);
  EXPECT_EQ(c.origin_location, OriginLocation::Exterior);
  EXPECT_FALSE(c.witness.has_value());
}

TEST(ClassifyDisc, CyclicSevenMatchesBruteForce) {
  const auto spec = canonical_cyclic_disc(7);
  const auto& g = std::get<DiscGame>(spec.kind);
  PlanarPointSet pts;
  for (int i = 0; i < 7; ++i) pts.push_back({g.u[i], g.v[i]});
  const auto c = classify_disc(pts);
  EXPECT_EQ(c.verdict, Verdict::FullyCyclic);
  const auto p = realize(canonical_cyclic_disc(7));
  EXPECT_TRUE(oracle::tournament_has_cycle(p.matrix));
  ASSERT_TRUE(c.witness.has_value());
  const auto w = *c.witness;
  EXPECT_GT(p.matrix(w.i, w.j), 0.5);
  EXPECT_GT(p.matrix(w.j, w.k), 0.5);
  EXPECT_GT(p.matrix(w.k, w.i), 0.5);
}

TEST(ClassifyDisc, Errors) {
  EXPECT_THROW(classify_disc({{1, 0}, {0, 1}}), DegenerateGame);
  EXPECT_THROW(classify_disc({{1, 0}, {0, 0}, {0, 1}}), OriginPlayer);
}

TEST(ClassifyDisc, OriginOnEdgeIsPerturbedDeterministically) {
  // The origin is the midpoint of the edge (1,0)-(-1,0).
  const PlanarPointSet pts = {{1, 0}, {-1, 0}, {0, 1}};
  const auto a = classify_disc(pts);
  const auto b = classify_disc(pts);
  EXPECT_EQ(a.origin_location, OriginLocation::OnBorderPerturbed);
  EXPECT_EQ(a.verdict, b.verdict);
  EXPECT_EQ(a.origin_margin, b.origin_margin);
  EXPECT_EQ(a.verdict == Verdict::FullyCyclic, a.witness.has_value());
}

TEST(ClassifyDisc, CollinearThroughOrigin) {
  const auto c = classify_disc({{1, 1}, {2, 2}, {-1, -1}});
  EXPECT_EQ(c.origin_location, OriginLocation::OnBorderPerturbed);
}

TEST(IsFullyTransitive, Examples) {
  Vector u(3);
  u << 2, 1, 0;
  EXPECT_TRUE(is_fully_transitive(realize(GameSpec{EloGame{u}})));
  EXPECT_FALSE(is_fully_transitive(realize(canonical_cyclic_disc(3))));
  EXPECT_TRUE(is_fully_transitive(realize(GameSpec{ExampleThree{0.6, 0.7}})));
}

TEST(IsFullyTransitive, TiesAreNeitherBeating) {
  DensePayoff p{Matrix::Constant(3, 3, 0.5), BoolMatrix::Constant(3, 3, true)};
  EXPECT_TRUE(is_fully_transitive(p));
  EXPECT_FALSE(find_cycle(p).has_value());
}

TEST(IsFullyTransitive, RequiresFullObservation) {
  auto p = realize(canonical_cyclic_disc(3));
  p.mask(0, 1) = p.mask(1, 0) = false;
  EXPECT_THROW(is_fully_transitive(p), InvalidConfig);
  EXPECT_THROW(find_cycle(p), InvalidConfig);
}

TEST(FindCycle, Examples) {
  const auto c = find_cycle(realize(canonical_cyclic_disc(3)));
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(*c, (Triple{0, 1, 2}));
  EXPECT_FALSE(find_cycle(realize(random_elo_game(8, 1))).has_value());
}

TEST(FindCycle, RandomSkewMatchesOracles) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = oracle::random_skew(6, rng);
    DensePayoff p{Matrix::Constant(6, 6, 0.5), BoolMatrix::Constant(6, 6, true)};
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        if (i != j) p.matrix(i, j) = oracle::sig(a(i, j));
      }
    }
    const auto c = find_cycle(p);
    EXPECT_EQ(c.has_value(), oracle::tournament_has_cycle(p.matrix));
    EXPECT_EQ(!c.has_value(), is_fully_transitive(p));
  }
}

TEST(Reparametrize, TwoPoints) {
  const PlanarPointSet pts = {{1, 1}, {2, 1}};
  const auto out = reparametrize_positive(pts);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_GT(out[0].v, 0.0);
  EXPECT_GT(out[1].v, 0.0);
  EXPECT_NEAR(cross(out[0], out[1]), -1.0, 1e-12);
}

TEST(Reparametrize, NegativeQuadrant) {
  const PlanarPointSet pts = {{-1, -1}, {-2, -1}, {-1, -2}};
  const auto out = reparametrize_positive(pts);
  for (const auto& p : out) EXPECT_GT(p.v, 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      EXPECT_NEAR(cross(out[i], out[j]), cross(pts[i], pts[j]), 1e-10);
    }
  }
}

TEST(Reparametrize, AlreadyPositiveIsUnchanged) {
  const PlanarPointSet pts = {{-3, 0.5}, {2, 1}, {0, 4}};
  const auto out = reparametrize_positive(pts);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    EXPECT_EQ(out[k].u, pts[k].u);
    EXPECT_EQ(out[k].v, pts[k].v);
  }
}

TEST(Reparametrize, CyclicThrows) {
  EXPECT_THROW(reparametrize_positive({{1, 0}, {-0.5, 0.866}, {-0.5, -0.866}}), NotTransitive);
}

TEST(HullVsCycles, VerdictMatchesBruteForceCycles) {
  const auto r = suites::hull_vs_cycles(500, 20240);
  EXPECT_EQ(r.cases, 500u);
  EXPECT_EQ(r.mismatches, 0u);
  EXPECT_GT(r.cyclic, 50u);
  EXPECT_GT(r.transitive, 50u);
}

TEST(ReparametrizeSuite, PositiveAndPayoffPreserving) {
  const auto r = suites::reparametrize_positive_suite(100, 77);
  EXPECT_EQ(r.cases, 100u);
  EXPECT_EQ(r.failures, 0u);
  EXPECT_LE(r.worst_payoff_change, 1e-10);
}

TEST(Reparametrize, PreservesPayoffsOfRealizedGame) {
  const PlanarPointSet pts = {{0.3, -1}, {1.2, -0.4}, {-0.2, -2}, {0.9, -0.9}};
  ASSERT_EQ(classify_disc(pts).verdict, Verdict::FullyTransitive);
  const auto out = reparametrize_positive(pts);
  EXPECT_LE((payoff_of(out).matrix - payoff_of(pts).matrix).cwiseAbs().maxCoeff(), 1e-10);
}
