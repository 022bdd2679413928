#include "builders.hpp"
#include "oracles.hpp"

#include "ppstar/error.hpp"
#include "ppstar/lattice.hpp"

#include <gtest/gtest.h>

using namespace ppstar;
using namespace ppstar::testing;

TEST(Hnf, IdentityStaysIdentity) {
  Lattice l = hnf(IntMatrix::identity(2));
  EXPECT_EQ(l.basis(), IntMatrix::identity(2));
}

TEST(Hnf, ReducesEntriesAbovePivots) {
  EXPECT_EQ(hnf(M({{2, 4}, {6, 8}})).basis(), M({{2, 0}, {0, 4}}));
}

TEST(Hnf, ZeroMatrixKeepsAmbientDimension) {
  Lattice l = hnf(M({{0, 0}}));
  EXPECT_EQ(l.rank(), 0u);
  EXPECT_EQ(l.ambient_dim(), 2u);
}

TEST(Hnf, DependentRowsCollapse) {
  Lattice l = hnf(M({{1, 2, 3}, {2, 4, 6}, {0, 0, 5}}));
  EXPECT_EQ(l.rank(), 2u);
  EXPECT_EQ(l.basis(), M({{1, 2, 3}, {0, 0, 5}}));
}

TEST(Hnf, NegativePivotsBecomePositive) {
  EXPECT_EQ(hnf(M({{-3}})).basis(), M({{3}}));
  EXPECT_EQ(hnf(M({{0, -2}, {-1, 0}})).basis(), M({{1, 0}, {0, 2}}));
}

TEST(Hnf, TransformRecordsTheRowOperations) {
  IntMatrix m = M({{2, 4}, {6, 8}, {1, 1}});
  Echelon e = hermite_with_transform(m);
  EXPECT_EQ(naive_product(e.transform, m), e.form);
  EXPECT_EQ(abs(rational_determinant(e.transform)), 1);
  EXPECT_EQ(e.rank, 2u);
}

TEST(Snf, Identity) {
  SmithForm sf = snf(IntMatrix::identity(3));
  EXPECT_EQ(sf.d, IntMatrix::identity(3));
  EXPECT_EQ(naive_product(naive_product(sf.u, IntMatrix::identity(3)), sf.v), sf.d);
}

TEST(Snf, TwoByTwoExample) {
  IntMatrix m = M({{2, 4}, {6, 8}});
  SmithForm sf = snf(m);
  EXPECT_EQ(sf.d, M({{2, 0}, {0, 4}}));
  EXPECT_EQ(naive_product(naive_product(sf.u, m), sf.v), sf.d);
  EXPECT_EQ(abs(rational_determinant(sf.u)), 1);
  EXPECT_EQ(abs(rational_determinant(sf.v)), 1);
}

TEST(Snf, OneByOne) { EXPECT_EQ(snf(M({{6}})).d, M({{6}})); }

TEST(Snf, RectangularWithZeroColumn) {
  IntMatrix m = M({{4, 0, 6}});
  SmithForm sf = snf(m);
  EXPECT_EQ(sf.d, M({{2, 0, 0}}));
  EXPECT_EQ(naive_product(naive_product(sf.u, m), sf.v), sf.d);
}

TEST(Intersect, CoprimeMultiples) { EXPECT_EQ(intersect(L({{2}}), L({{3}})), L({{6}})); }

TEST(Intersect, Idempotent) {
  Lattice l = L({{1, 1}, {0, 2}});
  EXPECT_EQ(intersect(l, l), l);
}

TEST(Intersect, SkewLatticeWithAxis) {
  EXPECT_EQ(intersect(L({{1, 1}, {0, 2}}), L({{1, 0}})), L({{2, 0}}));
}

TEST(Intersect, DimensionMismatchThrows) {
  try {
    intersect(L({{1}}), L({{1, 0}}));
    FAIL() << "expected a dimension error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Dimension);
  }
}

TEST(IndexOf, ScaledSquareLattice) {
  auto idx = index_of(Lattice::scaled(2, 2), Lattice::full(2));
  ASSERT_FALSE(idx.is_infinite());
  EXPECT_EQ(idx.value(), 4);
}

TEST(IndexOf, SelfIndexIsOne) {
  Lattice l = L({{3, 1}, {0, 5}});
  EXPECT_EQ(index_of(l, l), IndexValue::finite(1));
}

TEST(IndexOf, RankDropIsInfinite) { EXPECT_TRUE(index_of(L({{1, 0}}), Lattice::full(2)).is_infinite()); }

TEST(IndexOf, NotContainedThrows) {
  try {
    index_of(L({{1}}), L({{2}}));
    FAIL() << "expected a precondition error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Precondition);
  }
}

TEST(IndexOf, SubLatticeOfRankTwoInsideRankTwoPlane) {
  // Both lie in the plane z = 0 of Z^3.
  auto idx = index_of(L({{2, 0, 0}, {0, 3, 0}}), L({{1, 0, 0}, {0, 1, 0}}));
  EXPECT_EQ(idx, IndexValue::finite(6));
}

TEST(Solve, TripleIntoEvens) {
  auto sol = solve(M({{3}}), L({{2}}), V({0}));
  ASSERT_TRUE(sol);
  EXPECT_EQ(sol->group, L({{2}}));
  EXPECT_TRUE(sol->contains(V({0})));
}

TEST(Solve, IdentityIntoEverything) {
  auto sol = solve(IntMatrix::identity(3), Lattice::full(3), V({0, 0, 0}));
  ASSERT_TRUE(sol);
  EXPECT_EQ(sol->group, Lattice::full(3));
}

TEST(Solve, ParityObstructionIsEmpty) { EXPECT_FALSE(solve(M({{2}}), Lattice(1), V({1}))); }

TEST(Solve, ShiftedCoset) {
  // 2x - 1 in 4Z has no solution; 2x - 2 in 4Z gives x odd.
  EXPECT_FALSE(solve(M({{2}}), L({{4}}), V({1})));
  auto sol = solve(M({{2}}), L({{4}}), V({2}));
  ASSERT_TRUE(sol);
  EXPECT_EQ(sol->group, L({{2}}));
  EXPECT_TRUE(sol->contains(V({1})));
  EXPECT_FALSE(sol->contains(V({0})));
}

TEST(LatticeOps, SumAndMembership) {
  Lattice s = sum(L({{4, 0}}), L({{6, 0}, {0, 3}}));
  EXPECT_EQ(s, L({{2, 0}, {0, 3}}));
  EXPECT_TRUE(s.contains(V({-2, 9})));
  EXPECT_FALSE(s.contains(V({1, 0})));
}

TEST(LatticeOps, ReduceGivesCanonicalRepresentative) {
  Lattice l = L({{4}});
  EXPECT_EQ(l.reduce(V({7})), V({3}));
  EXPECT_EQ(l.reduce(V({-1})), V({3}));
}

TEST(LatticeOps, ImageAndProjection) {
  Lattice l = L({{1, 2}, {0, 3}});
  EXPECT_EQ(image(l, M({{1, 1}})), L({{3}}));
  EXPECT_EQ(project(L({{2, 1}, {0, 3}}), 0, 1), L({{2}}));
  EXPECT_EQ(project(L({{2, 1}, {0, 3}}), 1, 1), L({{1}}));
}

TEST(LatticeOps, ProjectionLiftsAndKernel) {
  Lattice l = L({{2, 1}, {0, 3}});
  auto p = project_with_lifts(l, 1, 1);
  EXPECT_EQ(p.image, L({{1}}));
  for (std::size_t r = 0; r < p.lifts.rows(); ++r) {
    EXPECT_TRUE(l.contains(p.lifts.row(r)));
    EXPECT_EQ(p.lifts(r, 1), p.image.basis()(r, 0));
  }
  EXPECT_EQ(p.kernel, L({{6, 0}}));
}

TEST(LatticeOps, DeterminantMatchesRationalElimination) {
  IntMatrix m = M({{2, -1, 3}, {4, 0, 1}, {-2, 5, 7}});
  EXPECT_EQ(Rational(determinant(m)), rational_determinant(m));
}
