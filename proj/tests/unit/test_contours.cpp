#include <gtest/gtest.h>

#include <cmath>

#include "clansim/contours.hpp"
#include "clansim/oracle.hpp"

using namespace clansim;

namespace {

std::vector<DualEdge> unit_square_at(int x, int y) {
  return {{{x, y}, true}, {{x, y}, false}, {{x + 1, y}, false}, {{x, y + 1}, true}};
}

}  // namespace

TEST(Contour, Predicate) {
  EXPECT_TRUE(is_contour(unit_square_at(0, 0)));
  auto open = unit_square_at(0, 0);
  open.pop_back();
  EXPECT_FALSE(is_contour(open));
  EXPECT_FALSE(is_contour({}));
  auto two = unit_square_at(0, 0);
  for (const auto& e : unit_square_at(3, 0)) two.push_back(e);
  EXPECT_FALSE(is_contour(two));  // disconnected
  auto touching = unit_square_at(0, 0);
  for (const auto& e : unit_square_at(1, 1)) touching.push_back(e);
  EXPECT_TRUE(is_contour(touching));  // degree-4 vertex
}

TEST(Contour, NormalizationMovesRootToOrigin) {
  DualVertex root;
  const auto s = normalize_contour(unit_square_at(3, -2), &root);
  EXPECT_EQ(root, (DualVertex{3, -2}));
  EXPECT_EQ(s.vertices.front(), (DualVertex{0, 0}));
  EXPECT_EQ(s.length(), 4);
  EXPECT_EQ(s.vertices.size(), 4u);
}

TEST(Catalog, TwoEnumeratorsAgree) {
  const int lmax = 10;
  const auto a = count_by_length(enumerate_contours_face_sets(lmax), lmax);
  const auto b = count_by_length(enumerate_contours_edge_growth(lmax), lmax);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a[4], 1);
  EXPECT_EQ(a[6], 2);
  // 7 simple polygons plus two squares meeting at a corner, in two ways
  EXPECT_EQ(a[8], 9);
  EXPECT_EQ(a[10], 36);
  for (int l = 0; l <= lmax; l += 2)
    if (l != 4 && l != 6 && l != 8 && l != 10) {
      EXPECT_EQ(a[l], 0);
    }
  for (int l = 1; l <= lmax; l += 2) EXPECT_EQ(a[l], 0);
}

TEST(Catalog, LengthIndexAndLookup) {
  const auto c = ContourCatalog::enumerate(8);
  EXPECT_TRUE(c.complete());
  EXPECT_EQ(c.size(), 12u);
  EXPECT_EQ(c.ids_of_length(6).size(), 2u);
  const auto square = normalize_contour(unit_square_at(5, 5));
  ASSERT_TRUE(c.find(square).has_value());
  EXPECT_EQ(c.shape(*c.find(square)).length(), 4);
  EXPECT_EQ(ContourCatalog::within_box(1).size(), 1u);
  EXPECT_EQ(ContourCatalog::within_box(2).size(), 10u);
}

TEST(SpinContour, SingleFlippedSite) {
  SpinSquare s(3);
  s.set(1, 1, -1);
  const auto g = spins_to_contours(s);
  ASSERT_EQ(g.contours.size(), 1u);
  EXPECT_EQ(g.contours[0].size(), 4u);
  EXPECT_EQ(contours_to_spins(g), s);
}

TEST(SpinContour, RoundTripOnEveryThreeByThree) {
  for (std::uint64_t bits = 0; bits < 512; ++bits) {
    const auto s = SpinSquare::from_bits(3, bits);
    const auto g = spins_to_contours(s);
    for (const auto& c : g.contours) EXPECT_TRUE(is_contour(c));
    EXPECT_EQ(contours_to_spins(g), s);
  }
  EXPECT_TRUE(spins_to_contours(SpinSquare(3)).contours.empty());
}

TEST(SpinContour, CheckerboardSplitsIntoCornerSharingContour) {
  SpinSquare s(2);
  s.set(0, 0, -1);
  s.set(1, 1, -1);
  const auto g = spins_to_contours(s);
  ASSERT_EQ(g.contours.size(), 1u);  // edge-connected through the shared corner
  EXPECT_EQ(g.contours[0].size(), 8u);
}

TEST(PeierlsSeries, FirstTermAndMonotonicity) {
  const auto c4 = ContourCatalog::enumerate(4);
  for (double beta : {0.3, 1.0}) EXPECT_NEAR(peierls_lhs(beta, c4).value, 4 * std::exp(-8 * beta), 1e-15);
  const auto c10 = ContourCatalog::enumerate(10);
  double prev = kInfinity;
  for (int i = 0; i < 10; ++i) {
    const double v = peierls_lhs(0.3 + 0.1 * i, c10).value;
    EXPECT_LT(v, prev);
    prev = v;
  }
  const auto s = peierls_lhs(1.0, c10);
  EXPECT_EQ(s.lmax, 10);
  EXPECT_TRUE(s.tail_conclusive);
  EXPECT_GT(s.tail_estimate, 0.0);
}

TEST(ContourIdentity, SmallSquares) {
  for (int n : {1, 2, 3})
    for (double beta : {0.5, 0.8, 1.2}) EXPECT_LE(check_contour_identity(n, beta), 1e-10);
  // single site: P(minus) / P(plus) = e^{-8 beta}
  const auto p = ising_distribution(1, 0.7);
  EXPECT_NEAR(p[1] / p[0], std::exp(-8 * 0.7), 1e-15);
}

TEST(ContourIdentity, FourByFour) { EXPECT_LE(check_contour_identity(4, 0.8), 1e-10); }
