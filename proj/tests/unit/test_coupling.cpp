#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "clansim/coupling.hpp"
#include "clansim/errors.hpp"
#include "clansim/oracle.hpp"

using namespace clansim;

TEST(Family, MapExamples) {
  const auto d = ApproximationFamily::spatial_discretization();
  const Particle q = d.map(0.25, spin_particle(kPlus, {0.3, -0.1}));
  EXPECT_EQ(q.x, (Location{0.25, -0.25}));
  EXPECT_EQ(d.map(0.0, spin_particle(kPlus, {0.3, -0.1})).x, (Location{0.3, -0.1}));
  EXPECT_DOUBLE_EQ(d.modulus(0.25), 0.25);

  const auto s = ApproximationFamily::spin_discretization();
  EXPECT_DOUBLE_EQ(std::get<Angle>(s.map(kPi / 4, rod_particle(1.0, {0, 0})).mark).radians, kPi / 4);

  const auto t = ApproximationFamily::translation(Location{1, -2});
  EXPECT_EQ(t.map(0.5, spin_particle(kPlus, {0, 0})).x, (Location{0.5, -1}));
  EXPECT_DOUBLE_EQ(t.modulus(0.5), 1.0);

  const auto c = ApproximationFamily::compose(d, t);
  EXPECT_EQ(c.map(0.5, spin_particle(kPlus, {0.1, 0.1})).x, (Location{0.5, -1}));
  EXPECT_DOUBLE_EQ(c.modulus(0.5), 1.5);
  EXPECT_TRUE(std::isinf(ApproximationFamily::shrink().modulus(0.1)));
  EXPECT_EQ(ApproximationFamily::identity().modulus(0.3), 0.0);
}

TEST(Family, DisplacementBoundedByModulus) {
  const auto d = ApproximationFamily::spatial_discretization();
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double eps = std::ldexp(1.0, -1 - static_cast<int>(uniform01(rng) * 10));
    const Particle p = spin_particle(kMinus, {uniform01(rng) * 10 - 5, uniform01(rng) * 10 - 5});
    EXPECT_LE(distance(p, d.map(eps, p)), d.modulus(eps));
  }
}

TEST(CoupledRun, ValidatesGrid) {
  auto m = WidomRowlinson::discrete(2, 0.05, 0.05, 1);
  EXPECT_THROW(identity_run(m, {0.1, 0.2, 0.0}), Error);
  EXPECT_THROW(identity_run(m, {0.2, 0.1}), Error);
  auto other = effective_model(m, m->intensity(), [](const Particle&) { return 1.0; }, -0.1);
  EXPECT_THROW(CoupledRun(ApproximationFamily::identity(), {{0.1, other}, {0.0, m}}), Error);
  EXPECT_EQ(dyadic_grid(3), (std::vector<double>{0.5, 0.25, 0.125, 0.0}));
}

TEST(CoupledRun, UnboundedModulusIsRejected) {
  auto m = WidomRowlinson::discrete(2, 0.05, 0.05, 1);
  const CoupledRun run(ApproximationFamily::shrink(), {{0.5, m}, {0.0, m}});
  EXPECT_THROW(coupled_sample(run, Region::box(Box::make({0, 0}, {1, 1})), 1), Error);
}

TEST(Coupling, LevelMarginalMatchesStandaloneSampler) {
  const auto run = fugacity_run(2, 0.05, 0.05, 1, {0.2, 0.0});
  auto direct = WidomRowlinson::discrete(2, 0.06, 0.06, 1);
  const Region site = Region::sites({Location{0, 0}});
  std::map<std::string, double> coupled, alone;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    coupled[to_string(coupled_sample(run, site, derive_seed(31, i)).samples[0])] += 1.0 / n;
    alone[to_string(perfect_sample(*direct, site, derive_seed(32, i)).config)] += 1.0 / n;
  }
  double tv = 0.0;
  for (const auto& [k, v] : coupled) tv += std::abs(v - alone[k]);
  for (const auto& [k, v] : alone)
    if (!coupled.count(k)) tv += v;
  EXPECT_LE(0.5 * tv, 0.02);
}

TEST(Coupling, EqualDecisionsImplyIdentity) {
  const std::vector<double> grid = {0.2, 0.1, 0.05, 0.0};
  const auto run = fugacity_run(2, 0.05, 0.05, 1, grid);
  const Region window = Region::box(Box::make({0, 0}, {2, 2}));
  int differing = 0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    const auto out = coupled_sample(run, window, i);
    for (std::size_t l = 0; l < grid.size(); ++l) {
      if (out.keep[l] == out.keep.back()) {
        EXPECT_TRUE(out.identity_holds(run.family(), l));
      }
      differing += out.keep[l] != out.keep.back();
    }
    EXPECT_TRUE(out.identity_holds(run.family(), grid.size() - 1));
  }
  EXPECT_GT(differing, 0);
}

TEST(Coupling, FugacityDensitiesStayBelowBound) {
  // lambda (1 + eps) against lambda: leaps shift by -log(1 + eps) >= delta_e
  const auto run = fugacity_run(2, 0.05, 0.05, 1, {0.2, 0.1, 0.0});
  for (const auto& level : run.levels()) {
    ParticleConfiguration empty(Region::box(Box::make({-3, -3}, {3, 3})));
    const double leap = level.model->energy_leap(spin_particle(kPlus, {0, 0}), empty);
    EXPECT_NEAR(leap, -std::log1p(level.epsilon), 1e-15);
    EXPECT_GE(leap, level.model->delta_e() - 1e-15);
  }
}

TEST(Coupling, DiscretizationIdentityEventuallyHolds) {
  const auto grid = dyadic_grid(8);
  const auto run = discretization_run(2, 0.1, 0.1, 0.5, grid);
  const Region window = Region::box(Box::make({-0.05, -0.05}, {1.05, 1.05}));
  int with_star = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto out = coupled_sample(run, window, i);
    EXPECT_FALSE(out.negligible.back());
    const auto star = stabilization_epsilon(run, out);
    if (!star) continue;
    ++with_star;
    const auto smallest = smallest_identity_epsilon(run, out);
    ASSERT_TRUE(smallest.has_value());
    EXPECT_LE(*smallest, *star);
    EXPECT_DOUBLE_EQ(*smallest, grid[grid.size() - 2]);
  }
  EXPECT_GE(with_star, 190);
}

TEST(ShrinkAdapter, MassBookkeeping) {
  WidomRowlinson::Params p;
  p.lambda_plus = 0.1;
  p.lambda_minus = 0.2;
  p.radius = 0.5;
  const WidomRowlinson unit(p);
  const auto m = std::dynamic_pointer_cast<const WidomRowlinson>(shrink_adapter(unit, 0.125));
  ASSERT_TRUE(m);
  EXPECT_DOUBLE_EQ(m->params().spacing, 0.125);
  EXPECT_DOUBLE_EQ(m->params().radius, 0.5);
  EXPECT_TRUE(m->site_exclusive());
  const Region box = Region::box(Box::make({0, 0}, {0.999, 0.999}));
  // 8 x 8 sites with eps^2 lambda each: same mass as the continuum unit box
  EXPECT_NEAR(m->intensity().mass(box), 0.3, 1e-14);
  const auto c = shrink_adapter(unit, 0.0);
  EXPECT_NEAR(c->intensity().mass(Region::box(Box::make({0, 0}, {1, 1}))), 0.3, 1e-14);
  EXPECT_THROW(shrink_adapter(*WidomRowlinson::continuum(2, 0.1, 0.1, 0.5), 0.5), Error);
}

TEST(VagueCheck, LargestPrefixSemantics) {
  const Region K = Region::box(Box::make({0, 0}, {1, 1}));
  const std::vector<double> grid = {0.5, 0.25, 0.125, 0.0};
  auto at = [](double x) {
    ParticleConfiguration c;
    c.add(spin_particle(kPlus, {x, 0.5}));
    return c;
  };
  EXPECT_EQ(vague_convergence_check(grid, {at(0.9), at(0.52), at(0.505), at(0.5)}, K, 0.01), 0.125);
  EXPECT_EQ(vague_convergence_check(grid, {at(0.9), at(0.52), at(0.6), at(0.5)}, K, 0.01), std::nullopt);
  EXPECT_EQ(vague_convergence_check(grid, {at(0.501), at(0.502), at(0.505), at(0.5)}, K, 0.01), 0.5);
}
