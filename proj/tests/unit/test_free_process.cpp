#include <gtest/gtest.h>

#include <cmath>

#include "clansim/errors.hpp"
#include "clansim/free_process.hpp"
#include "stats.hpp"

using namespace clansim;
using namespace clansim::testing;

namespace {

const auto kExpCdf = [](double x) { return x <= 0 ? 0.0 : -std::expm1(-x); };

}  // namespace

TEST(CellPartition, Masses) {
  auto wr = WidomRowlinson::discrete(2, 0.05, 0.07, 1);
  const CellPartition lattice(wr->intensity(), 0.0);
  EXPECT_NEAR(lattice.mass(CellId{}), 0.12, 1e-15);
  const CellPartition shifted(wr->intensity(), std::log(2.0));
  EXPECT_NEAR(shifted.mass(CellId{}), 0.06, 1e-15);

  auto cont = WidomRowlinson::continuum(2, 1.0, 3.0, 0.5);
  EXPECT_NEAR(CellPartition(cont->intensity(), 0.0).mass(CellId{}), 1.0, 1e-15);
  EXPECT_NEAR(CellPartition(cont->intensity(), 0.0, 0.25).mass(CellId{}), 0.25, 1e-15);
}

TEST(CellPartition, CellsAndBases) {
  auto cont = WidomRowlinson::continuum(2, 1.0, 1.0, 0.5);
  const CellPartition part(cont->intensity(), 0.0);
  EXPECT_EQ(part.cells_meeting(Region::box(Box::make({0, 0}, {0.9, 0.4}))).size(), 2u);
  const auto c = part.cell_of(spin_particle(kPlus, {-0.1, 0.75}));
  EXPECT_EQ(c.index[0], -1);
  EXPECT_EQ(c.index[1], 1);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Particle p = part.sample_basis(c, rng);
    EXPECT_EQ(part.cell_of(p), c);
  }
  auto wr = WidomRowlinson::discrete(2, 0.05, 0.05, 1);
  const CellPartition lattice(wr->intensity(), 0.0);
  EXPECT_EQ(lattice.cells_meeting(Region::box(Box::make({-0.5, -0.5}, {1.5, 0.5}))).size(), 2u);
}

TEST(CellPartition, RejectsPushforward) {
  auto wr = WidomRowlinson::discrete(2, 0.05, 0.05, 1);
  IntensityMeasure push(IntensityMeasure::Pushforward{std::make_shared<IntensityMeasure>(wr->intensity()),
                                                      [](const Particle& p) { return p; }, "id"});
  EXPECT_THROW(CellPartition(push, 0.0), Error);
}

TEST(Substrate, FirstQueryCountsArePoisson) {
  auto cont = WidomRowlinson::continuum(2, 3.0, 3.0, 0.5);  // cell mass 1.5
  const double m = 1.5;
  std::vector<int> counts, reference;
  std::vector<double> ages, residuals;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    Substrate s(cont->intensity(), 0.0, derive_seed(17, i));
    const auto alive = s.alive_at(CellId{}, 0.0);
    counts.push_back(static_cast<int>(alive.size()));
    for (const auto& c : alive) {
      ages.push_back(-c.birth);
      residuals.push_back(c.death());
    }
    reference.push_back(simulate_alive_count(m, 30.0, derive_seed(18, i)));
  }
  EXPECT_GE(poisson_gof(counts, m).pvalue, 1e-3);
  EXPECT_GE(poisson_gof(reference, m).pvalue, 1e-3);
  EXPECT_GE(ks_pvalue(ks_statistic(ages, kExpCdf), ages.size()), 1e-3);
  EXPECT_GE(ks_pvalue(ks_statistic(residuals, kExpCdf), residuals.size()), 1e-3);
}

TEST(Substrate, LaterQueriesKeepStationaryLaw) {
  auto wr = WidomRowlinson::discrete(2, 0.5, 0.5, 1);  // site mass 1
  std::vector<int> counts;
  std::vector<double> ages;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    Substrate s(wr->intensity(), 0.0, derive_seed(19, i));
    const auto first = s.alive_at(CellId{}, 0.0);
    const auto later = s.alive_at(CellId{}, -0.8);
    // everything alive at both times was already revealed
    for (const auto& c : first)
      if (c.alive_at(-0.8)) {
        EXPECT_NE(std::find(later.begin(), later.end(), c), later.end());
      }
    counts.push_back(static_cast<int>(later.size()));
    for (const auto& c : later) ages.push_back(-0.8 - c.birth);
  }
  EXPECT_GE(poisson_gof(counts, 1.0).pvalue, 1e-3);
  EXPECT_GE(ks_pvalue(ks_statistic(ages, kExpCdf), ages.size()), 1e-3);
}

TEST(Substrate, IdempotentAndDeterministic) {
  auto cont = WidomRowlinson::continuum(2, 2.0, 2.0, 0.5);
  const Region w = Region::box(Box::make({0, 0}, {1.5, 1.5}));
  Substrate a(cont->intensity(), 0.0, 5), b(cont->intensity(), 0.0, 5);
  EXPECT_EQ(a.alive_at(CellId{}, -1.0), a.alive_at(CellId{}, -1.0));
  // reveal order across cells does not matter
  const auto other = a.reveal_window(w, -1.0);
  const auto again = b.reveal_window(w, -1.0);
  EXPECT_EQ(other, again);
  Substrate c(cont->intensity(), 0.0, 6);
  EXPECT_NE(c.reveal_window(w, -1.0), other);
  EXPECT_EQ(a.seed(), 5u);
  EXPECT_GT(a.revealed_count(), 0u);
}

TEST(Substrate, QueriesMustGoBackward) {
  auto wr = WidomRowlinson::discrete(2, 0.05, 0.05, 1);
  Substrate s(wr->intensity(), 0.0, 1);
  s.alive_at(CellId{}, -1.0);
  try {
    s.alive_at(CellId{}, 0.0);
    FAIL() << "forward query accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kQueryOrderViolation);
  }
}

TEST(Substrate, FlagsAreUniform) {
  auto cont = WidomRowlinson::continuum(2, 4.0, 4.0, 0.5);
  Substrate s(cont->intensity(), 0.0, 23);
  std::vector<double> flags;
  for (int x = 0; x < 60; ++x)
    for (int y = 0; y < 60; ++y) {
      CellId c;
      c.index = {x, y, 0};
      for (const auto& cyl : s.alive_at(c, 0.0)) flags.push_back(cyl.flag);
    }
  ASSERT_GT(flags.size(), 5000u);
  EXPECT_GE(ks_pvalue(ks_statistic(flags, [](double u) { return std::clamp(u, 0.0, 1.0); }), flags.size()), 1e-3);
}

TEST(Substrate, ContourCellsByLength) {
  auto catalog = std::make_shared<const ContourCatalog>(ContourCatalog::enumerate(6));
  const PeierlsContours m(0.5, catalog);
  const CellPartition part(m.intensity(), 0.0);
  CellId c;
  c.cls = 6;
  EXPECT_NEAR(part.mass(c), 2 * std::exp(-6.0), 1e-15);
  EXPECT_EQ(part.cells_meeting(Region::box(Box::make({0, 0}, {1, 0}))).size(), 4u);
}
