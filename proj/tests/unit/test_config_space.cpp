#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "clansim/config_space.hpp"
#include "clansim/random.hpp"
#include "stats.hpp"

using namespace clansim;

TEST(FormatReal, RoundTripsAndPrintsIntegersPlainly) {
  EXPECT_EQ(format_real(3.0), "3");
  EXPECT_EQ(format_real(0.0), "0");
  EXPECT_EQ(format_real(-0.0), "0");
  EXPECT_EQ(format_real(std::numeric_limits<double>::infinity()), "inf");
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(uniform01(rng) - 0.5, static_cast<int>(uniform01(rng) * 200) - 100);
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
}

TEST(Distance, SupNormPlusMarkMetric) {
  EXPECT_DOUBLE_EQ(distance(spin_particle(kPlus, {0, 0}), spin_particle(kPlus, {0.3, -0.5})), 0.5);
  EXPECT_DOUBLE_EQ(distance(spin_particle(kPlus, {0, 0}), spin_particle(kMinus, {0.3, 0})), 1.3);
  EXPECT_NEAR(mark_distance(Angle{0.1}, Angle{kPi - 0.1}), 0.2, 1e-15);
  EXPECT_TRUE(std::isinf(mark_distance(Angle{0.1}, kPlus)));
}

TEST(Box, ClosureDecidesTheFaces) {
  const Box closed = Box::make({0, 0}, {1, 1});
  const Box open = Box::make({0, 0}, {1, 1}, BoxClosure::kOpen);
  const Box half = Box::make({0, 0}, {1, 1}, BoxClosure::kHalfOpen);
  const Location corner{1, 1}, origin{0, 0};
  EXPECT_TRUE(closed.contains(corner));
  EXPECT_FALSE(open.contains(corner));
  EXPECT_FALSE(open.contains(origin));
  EXPECT_TRUE(half.contains(origin));
  EXPECT_FALSE(half.contains(corner));
  EXPECT_DOUBLE_EQ(closed.inflated(0.5).volume(), 4.0);
  EXPECT_TRUE(closed.inflated(0.1).covers(closed));
}

TEST(Region, MembershipOfComposites) {
  const Region a = Region::box(Box::make({0, 0}, {2, 2}));
  const Region hole = Region::box(Box::make({0.5, 0.5}, {1, 1}));
  const Region ring = Region::minus(a, hole);
  EXPECT_TRUE(ring.contains(spin_particle(kPlus, {0.1, 0.1})));
  EXPECT_FALSE(ring.contains(spin_particle(kPlus, {0.7, 0.7})));

  const Region plus_only = Region::with_marks(a, MarkSet::of({kPlus}));
  EXPECT_TRUE(plus_only.contains(spin_particle(kPlus, {1, 1})));
  EXPECT_FALSE(plus_only.contains(spin_particle(kMinus, {1, 1})));
  EXPECT_TRUE(plus_only.contains_location(Location{1, 1}));

  const Region sites = Region::sites({Location{0, 0}, Location{1, 0}});
  EXPECT_TRUE(sites.contains(spin_particle(kMinus, {1, 0})));
  EXPECT_FALSE(sites.contains(spin_particle(kMinus, {0.5, 0})));

  const Region u = Region::unite({sites, Region::point(spin_particle(kPlus, {5, 5}))});
  EXPECT_TRUE(u.contains(spin_particle(kPlus, {5, 5})));
  EXPECT_FALSE(u.contains(spin_particle(kMinus, {5, 5})));
  ASSERT_TRUE(u.bounds().has_value());
  EXPECT_DOUBLE_EQ(u.bounds()->hi[0], 5.0);

  EXPECT_TRUE(Region::empty().is_empty());
  EXPECT_TRUE(Region::everything().is_everything());
  EXPECT_FALSE(Region::everything().bounds().has_value());
  EXPECT_TRUE(a.covers(hole));
  EXPECT_FALSE(hole.covers(a));
}

TEST(Region, PredicateAndAngles) {
  const Region right = Region::predicate(Box::make({0, 0}, {1, 1}), [](const Particle& p) { return p.x[0] > 0.5; },
                                         "right half");
  EXPECT_TRUE(right.contains(spin_particle(kPlus, {0.75, 0.2})));
  EXPECT_FALSE(right.contains(spin_particle(kPlus, {0.25, 0.2})));
  EXPECT_FALSE(right.contains(spin_particle(kPlus, {1.75, 0.2})));

  const Region steep = Region::with_marks(Region::everything(), MarkSet::angles(1.0, 2.0));
  EXPECT_TRUE(steep.contains(rod_particle(1.5, {0, 0})));
  EXPECT_FALSE(steep.contains(rod_particle(2.0, {0, 0})));
}

TEST(Configuration, EntriesStaySortedAndMerge) {
  ParticleConfiguration c(Region::everything());
  c.add(spin_particle(kPlus, {1, 0}));
  c.add(spin_particle(kMinus, {0, 0}));
  c.add(spin_particle(kPlus, {1, 0}), 2);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.total(), 4);
  EXPECT_EQ(c.multiplicity(spin_particle(kPlus, {1, 0})), 3);
  EXPECT_TRUE(c.entries()[0].particle < c.entries()[1].particle);

  ParticleConfiguration d;
  d.add(spin_particle(kPlus, {1, 0}), 3);
  d.add(spin_particle(kMinus, {0, 0}));
  EXPECT_EQ(c, d);  // windows are ignored

  const Region left = Region::box(Box::make({-1, -1}, {0.5, 1}));
  EXPECT_EQ(count(c, left), 1);
  EXPECT_EQ(restrict_to(c, left).total(), 1);
  EXPECT_EQ(superpose(c, d).total(), 8);
}

TEST(Embedding, SmallExamples) {
  ParticleConfiguration xi, eta;
  xi.add(spin_particle(kPlus, {0, 0}), 2);
  eta.add(spin_particle(kPlus, {0.05, 0}));
  EXPECT_FALSE(is_delta_embedded(xi, eta, 0.1));  // multiplicity 2 needs two images
  eta.add(spin_particle(kPlus, {0, 0.05}));
  EXPECT_TRUE(is_delta_embedded(xi, eta, 0.1));
  EXPECT_FALSE(is_delta_embedded(xi, eta, 0.05));  // strict inequality
  EXPECT_TRUE(is_delta_embedded(ParticleConfiguration(), eta, 0.01));

  ParticleConfiguration minus;
  minus.add(spin_particle(kMinus, {0, 0}));
  EXPECT_FALSE(is_delta_embedded(minus, eta, 0.9));
  EXPECT_TRUE(is_delta_embedded(minus, eta, 1.1));
}

TEST(Embedding, GreedyTrapNeedsAugmentingPath) {
  // x1 can use only y1; x0 can use y0 or y1
  ParticleConfiguration xi, eta;
  xi.add(spin_particle(kPlus, {0, 0}));
  xi.add(spin_particle(kPlus, {0.3, 0}));
  eta.add(spin_particle(kPlus, {0.2, 0}));
  eta.add(spin_particle(kPlus, {-0.1, 0}));
  EXPECT_TRUE(is_delta_embedded(xi, eta, 0.25));
}

TEST(Embedding, AgreesWithExhaustiveSearch) {
  Rng rng(99);
  for (int i = 0; i < 500; ++i) {
    ParticleConfiguration xi, eta;
    const int nx = static_cast<int>(uniform01(rng) * 4), ny = static_cast<int>(uniform01(rng) * 5);
    auto p = [&] {
      return spin_particle(uniform01(rng) < 0.5 ? kPlus : kMinus,
                           {std::floor(uniform01(rng) * 5) * 0.2, std::floor(uniform01(rng) * 5) * 0.2});
    };
    for (int k = 0; k < nx; ++k) xi.add(p());
    for (int k = 0; k < ny; ++k) eta.add(p());
    const double delta = 0.05 + uniform01(rng);
    EXPECT_EQ(is_delta_embedded(xi, eta, delta), clansim::testing::brute_force_embedded(xi, eta, delta));
  }
}

TEST(Neighborhood, IsSymmetricInsideK) {
  const Region K = Region::box(Box::make({0, 0}, {1, 1}));
  ParticleConfiguration a, b;
  a.add(spin_particle(kPlus, {0.5, 0.5}));
  b.add(spin_particle(kPlus, {0.505, 0.5}));
  b.add(spin_particle(kMinus, {3, 3}));  // outside K, ignored on that side
  EXPECT_TRUE(in_neighborhood(a, b, K, 0.01));
  EXPECT_TRUE(in_neighborhood(b, a, K, 0.01));
  EXPECT_FALSE(in_neighborhood(a, b, K, 0.001));
  b.add(spin_particle(kMinus, {0.1, 0.1}));
  EXPECT_FALSE(in_neighborhood(a, b, K, 0.01));
}

TEST(Seeds, StreamsAreReproducibleAndDistinct) {
  auto a = make_stream(5, {1, 2, 3});
  auto b = make_stream(5, {1, 2, 3});
  auto c = make_stream(5, {1, 2, 4});
  EXPECT_EQ(a(), b());
  EXPECT_NE(a(), c());
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_EQ(derive_seed(1, 7), derive_seed(1, 7));
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, [](std::size_t i) { if (i == 3) throw std::runtime_error("x"); }, 2),
               std::runtime_error);
}
