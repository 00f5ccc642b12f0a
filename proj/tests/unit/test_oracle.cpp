#include <gtest/gtest.h>

#include <cmath>

#include "clansim/errors.hpp"
#include "clansim/oracle.hpp"

using namespace clansim;

namespace {

Region square_sites(int n) {
  std::vector<Location> s;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) s.push_back(Location{static_cast<double>(x), static_cast<double>(y)});
  return Region::sites(std::move(s));
}

}  // namespace

TEST(Enumeration, TwoByTwoWidomRowlinson) {
  auto wr = WidomRowlinson::discrete(2, 0.05, 0.05, 1);
  const auto d = enumerate_gibbs(*wr, square_sites(2), ParticleConfiguration());
  EXPECT_EQ(d.support.size(), 31u);  // empty, or a non-empty single-type subset
  EXPECT_NEAR(d.normalizer, 2 * std::pow(1.05, 4) - 1, 1e-14);
  EXPECT_NEAR(d.probability(ParticleConfiguration()), 1 / (2 * std::pow(1.05, 4) - 1), 1e-14);
  double total = 0;
  for (double p : d.probabilities) total += p;
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(Enumeration, AgreesWithBruteForceOnAChain) {
  // 1D chain of 5 sites, k = 1, boundary - at x = -1
  const double lp = 0.4, lm = 0.7;
  auto wr = WidomRowlinson::discrete(1, lp, lm, 1);
  std::vector<Location> sites;
  for (int x = 0; x < 5; ++x) sites.push_back(Location{static_cast<double>(x)});
  const Region volume = Region::sites(sites);
  ParticleConfiguration eta;
  eta.add(spin_particle(kMinus, {-1}));
  const auto d = enumerate_gibbs(*wr, volume, eta);

  double z = 0.0;
  std::map<ParticleConfiguration, double> brute;
  for (int code = 0; code < 243; ++code) {
    int s[5], c = code;
    for (int& v : s) {
      v = c % 3 - 1;  // -1, 0, +1
      c /= 3;
    }
    bool ok = s[0] != 1;
    for (int i = 0; i + 1 < 5; ++i) ok = ok && s[i] * s[i + 1] != -1;
    if (!ok) continue;
    double w = 1.0;
    ParticleConfiguration cfg(volume);
    for (int i = 0; i < 5; ++i) {
      if (s[i] == 0) continue;
      w *= s[i] > 0 ? lp : lm;
      cfg.add(spin_particle(s[i] > 0 ? kPlus : kMinus, {static_cast<double>(i)}));
    }
    brute[cfg] += w;
    z += w;
  }
  EXPECT_EQ(d.support.size(), brute.size());
  EXPECT_NEAR(d.normalizer, z, 1e-12);
  for (const auto& [cfg, w] : brute) EXPECT_NEAR(d.probability(cfg), w / z, 1e-14);
}

TEST(Enumeration, RefusesUnboundedMultiplicity) {
  GeneralizedWidomRowlinson::Params p;
  p.lambda_plus = 0.1;
  const GeneralizedWidomRowlinson g(p);
  try {
    enumerate_gibbs(g, Region::box(Box::make({0, 0}, {1, 1})), ParticleConfiguration());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMultiplicityUnbounded);
  }
}

TEST(Enumeration, StateBudget) {
  auto wr = WidomRowlinson::discrete(2, 0.05, 0.05, 0);
  try {
    enumerate_gibbs(*wr, square_sites(3), ParticleConfiguration(), 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStateSpaceTooLarge);
  }
}

TEST(ContourGas, BitmaskEnumeratorMatchesGeneric) {
  for (int n : {1, 2, 3}) {
    auto catalog = std::make_shared<const ContourCatalog>(ContourCatalog::within_box(n));
    const PeierlsContours m(0.7, catalog);
    const auto a = enumerate_gibbs(m, contour_volume(n), ParticleConfiguration());
    const auto b = enumerate_contour_gas(m, n);
    ASSERT_EQ(a.support.size(), b.support.size());
    EXPECT_NEAR(a.normalizer, b.normalizer, 1e-13);
    for (std::size_t i = 0; i < a.support.size(); ++i)
      EXPECT_NEAR(a.probabilities[i], b.probability(a.support[i]), 1e-15);
  }
  // one contour per Ising state on the 2 x 2 square
  auto catalog = std::make_shared<const ContourCatalog>(ContourCatalog::within_box(2));
  EXPECT_EQ(enumerate_contour_gas(PeierlsContours(1.0, catalog), 2).support.size(), 16u);
}

TEST(Ising, DistributionSumsToOne) {
  const auto p = ising_distribution(3, 0.6);
  ASSERT_EQ(p.size(), 512u);
  double total = 0;
  for (double v : p) total += v;
  EXPECT_NEAR(total, 1.0, 1e-13);
  EXPECT_EQ(std::max_element(p.begin(), p.end()) - p.begin(), 0);
}

TEST(TotalVariation, Examples) {
  EXPECT_NEAR(tv_distance(std::vector<double>{0.6, 0.4}, std::vector<double>{0.5, 0.5}), 0.1, 1e-15);
  EXPECT_THROW(tv_distance(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}), Error);

  EmpiricalDistribution a, b;
  ParticleConfiguration x;
  x.add(spin_particle(kPlus, {0, 0}));
  a.add(x, 3);
  a.add(ParticleConfiguration(), 1);
  b.add(ParticleConfiguration(), 2);
  EXPECT_DOUBLE_EQ(tv_distance(a, b), 0.75);
  a.merge(b);
  EXPECT_EQ(a.total(), 6u);
  EXPECT_DOUBLE_EQ(a.frequency(ParticleConfiguration()), 0.5);

  ExactDistribution e;
  e.support = {ParticleConfiguration(), x};
  e.probabilities = {0.5, 0.5};
  EXPECT_DOUBLE_EQ(tv_distance(a, e), 0.0);
}
