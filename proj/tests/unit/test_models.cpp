#include <gtest/gtest.h>

#include <cmath>

#include "clansim/errors.hpp"
#include "clansim/models.hpp"
#include "clansim/random.hpp"

using namespace clansim;

namespace {

double wr_alpha_by_counting(double lp, double lm, int k, int dim) {
  // + at the origin: one same-site + atom plus every - atom within k
  double sites = 1;
  for (int i = 0; i < dim; ++i) sites *= 2 * k + 1;
  return std::max(lp + lm * sites, lm + lp * sites);
}

}  // namespace

TEST(WidomRowlinson, DiscreteCoefficient) {
  auto m = WidomRowlinson::discrete(2, 0.05, 0.05, 1);
  EXPECT_DOUBLE_EQ(m->closed_form(SizeFunction::kConstant)->alpha, 0.5);
  EXPECT_EQ(m->closed_form(SizeFunction::kConstant)->verdict(), "heavily diluted");
  for (int k : {0, 1, 2, 3})
    for (int d : {1, 2, 3}) {
      auto w = WidomRowlinson::discrete(d, 0.01, 0.03, k);
      EXPECT_NEAR(w->closed_form(SizeFunction::kConstant)->alpha, wr_alpha_by_counting(0.01, 0.03, k, d), 1e-15);
      EXPECT_NEAR(w->diluteness(SizeFunction::kConstant, Relation::kImpact).alpha,
                  wr_alpha_by_counting(0.01, 0.03, k, d), 1e-14 * wr_alpha_by_counting(0.01, 0.03, k, d));
    }
  EXPECT_EQ(WidomRowlinson::discrete(2, 0, 0, 1)->closed_form(SizeFunction::kConstant)->alpha, 0.0);
}

TEST(WidomRowlinson, ContinuumCoefficient) {
  auto m = WidomRowlinson::continuum(2, 0.1, 0.2, 0.5);
  EXPECT_NEAR(m->closed_form(SizeFunction::kConstant)->alpha, 0.2, 1e-15);
  EXPECT_NEAR(m->diluteness(SizeFunction::kConstant, Relation::kImpact).alpha, 0.2, 1e-14);
  // the envelope adds an open same-type box of side 2 delta and widens the
  // opposite box by delta
  auto e = WidomRowlinson::continuum(2, 0.1, 0.1, 0.5, 0.25);
  EXPECT_NEAR(e->diluteness(SizeFunction::kConstant, Relation::kEnvelope).alpha, 0.1 * 1.5 * 1.5 + 0.1 * 0.25,
              1e-14);
}

TEST(WidomRowlinson, LeapsAndExclusion) {
  auto m = WidomRowlinson::discrete(2, 0.05, 0.05, 1);
  const Region window = Region::box(Box::make({-5, -5}, {5, 5}));
  ParticleConfiguration c(window);
  c.add(spin_particle(kMinus, {1, 1}));
  EXPECT_TRUE(std::isinf(m->energy_leap(spin_particle(kPlus, {0, 0}), c)));
  EXPECT_TRUE(std::isinf(m->energy_leap(spin_particle(kPlus, {2, 0}), c)));  // sup distance 1
  EXPECT_EQ(m->energy_leap(spin_particle(kPlus, {3, 0}), c), 0.0);
  EXPECT_EQ(m->energy_leap(spin_particle(kMinus, {2, 0}), c), 0.0);
  EXPECT_TRUE(std::isinf(m->energy_leap(spin_particle(kMinus, {1, 1}), c)));  // same site

  ParticleConfiguration narrow(Region::box(Box::make({0, 0}, {0.5, 0.5})));
  try {
    m->energy_leap(spin_particle(kPlus, {0, 0}), narrow);
    FAIL() << "window too small";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientSupport);
  }
}

TEST(WidomRowlinson, ImpactMatchesPairEnergy) {
  auto m = WidomRowlinson::continuum(2, 0.1, 0.1, 0.5);
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const Particle a = spin_particle(kPlus, {uniform01(rng) * 2 - 1, uniform01(rng) * 2 - 1});
    const Particle b = spin_particle(uniform01(rng) < 0.5 ? kPlus : kMinus, {0, 0});
    EXPECT_EQ(m->impacts(a, b), std::isinf(m->pair_energy(a, b)));
    EXPECT_EQ(m->impacts(a, b), m->impact_region(b).contains(a));
  }
}

TEST(StepFunction, RightClosedSteps) {
  StepFunction f;
  f.steps = {{0.5, kInfinity}, {1.0, 0.7}};
  EXPECT_TRUE(std::isinf(f(0.5)));
  EXPECT_DOUBLE_EQ(f(0.75), 0.7);
  EXPECT_DOUBLE_EQ(f(1.0), 0.7);
  EXPECT_EQ(f(1.01), 0.0);
  EXPECT_DOUBLE_EQ(f.support_radius(), 1.0);
  EXPECT_TRUE(StepFunction{}.is_zero());
}

TEST(GeneralizedWidomRowlinson, FormulaAgainstIntegrator) {
  GeneralizedWidomRowlinson::Params p;
  p.lambda_plus = 0.05;
  p.lambda_minus = 0.08;
  p.h.steps = {{0.5, kInfinity}, {1.0, 0.7}};
  p.j_plus.steps = {{0.4, 0.3}};
  p.j_minus.steps = {{0.25, kInfinity}};
  const GeneralizedWidomRowlinson m(p);
  // + : 4 (0.08 * 1 + 0.05 * 0.16); - : 4 (0.05 * 1 + 0.08 * 0.0625)
  const double expected = 4 * std::max(0.08 + 0.05 * 0.16, 0.05 + 0.08 * 0.0625);
  EXPECT_NEAR(m.closed_form(SizeFunction::kConstant)->alpha, expected, 1e-15);
  EXPECT_NEAR(m.diluteness(SizeFunction::kConstant, Relation::kImpact).alpha, expected, 1e-14);

  // pair energies follow the step functions, 2-particle leaps add up
  EXPECT_DOUBLE_EQ(m.pair_energy(spin_particle(kPlus, {0, 0}), spin_particle(kMinus, {0.8, 0})), 0.7);
  EXPECT_TRUE(std::isinf(m.pair_energy(spin_particle(kPlus, {0, 0}), spin_particle(kMinus, {0.5, 0}))));
  EXPECT_DOUBLE_EQ(m.pair_energy(spin_particle(kPlus, {0, 0}), spin_particle(kPlus, {0, 0.3})), 0.3);
  ParticleConfiguration c(Region::box(Box::make({-3, -3}, {3, 3})));
  c.add(spin_particle(kMinus, {0.8, 0}));
  c.add(spin_particle(kMinus, {-0.9, 0.2}));
  c.add(spin_particle(kPlus, {0.2, 0.2}));
  EXPECT_NEAR(m.energy_leap(spin_particle(kPlus, {0, 0}), c), 0.7 + 0.7 + 0.3, 1e-15);
}

TEST(GeneralizedWidomRowlinson, FormulaIsAnUpperBoundWhenSameTypeRangeDominates) {
  GeneralizedWidomRowlinson::Params p;
  p.lambda_plus = 0.05;
  p.lambda_minus = 0.05;
  p.h.steps = {{0.2, kInfinity}};
  p.j_plus.steps = {{0.6, 1.0}};
  const GeneralizedWidomRowlinson m(p);
  EXPECT_GE(m.closed_form(SizeFunction::kConstant)->alpha + 1e-15,
            m.diluteness(SizeFunction::kConstant, Relation::kImpact).alpha);
}

TEST(Rods, IntersectionPredicate) {
  const double l = 0.5;
  EXPECT_TRUE(rods_intersect(rod_particle(0, {0, 0}), rod_particle(kPi / 2, {0, 0}), l));
  EXPECT_TRUE(rods_intersect(rod_particle(0, {0, 0}), rod_particle(kPi / 2, {0.49, 0.3}), l));
  EXPECT_FALSE(rods_intersect(rod_particle(0, {0, 0}), rod_particle(kPi / 2, {0.51, 0.3}), l));
  // collinear overlap, disjoint collinear, parallel offset
  EXPECT_TRUE(rods_intersect(rod_particle(0, {0, 0}), rod_particle(0, {0.9, 0}), l));
  EXPECT_FALSE(rods_intersect(rod_particle(0, {0, 0}), rod_particle(0, {1.1, 0}), l));
  EXPECT_FALSE(rods_intersect(rod_particle(0, {0, 0}), rod_particle(0, {0, 0.1}), l));
  // endpoint touching counts
  EXPECT_TRUE(rods_intersect(rod_particle(0, {0, 0}), rod_particle(kPi / 2, {0.5, 0.5}), l));
  EXPECT_DOUBLE_EQ(rods_distance(rod_particle(0, {0, 0}), rod_particle(0, {0, 0.1}), l), 0.1);
}

TEST(Rods, ExcludedAreaAgainstMonteCarlo) {
  // centres of rods at angle t hitting a rod at angle 0 form a parallelogram
  // of area 4 l^2 |sin t|
  const double l = 0.5, t = 1.0;
  Rng rng(11);
  const int n = 200000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const double x = uniform01(rng) * 2 - 1, y = uniform01(rng) * 2 - 1;
    hits += rods_intersect(rod_particle(0, {0, 0}), rod_particle(t, {x, y}), l);
  }
  const double area = 4.0 * hits / n;
  const double expected = 4 * l * l * std::sin(t);
  EXPECT_NEAR(area, expected, 4 * 4 * std::sqrt(expected / 4 * (1 - expected / 4) / n));

  MarkMeasure atom;
  atom.atoms = {{Angle{t}, 1.0}};
  const ThinRods rods(ThinRods::Params{false, 1.0, l, atom, 0.0});
  EXPECT_NEAR(rods.excluded_mass(0.0), expected, 1e-12);
}

TEST(Rods, UniformCoefficient) {
  MarkMeasure uniform;
  uniform.uniform_angle = 1.0;
  for (double lambda : {0.0, 0.1, 1.5})
    for (double l : {0.25, 0.5}) {
      const ThinRods rods(ThinRods::Params{false, lambda, l, uniform, 0.0});
      const double expected = 8 * lambda * l * l / kPi;
      EXPECT_NEAR(rods.closed_form(SizeFunction::kConstant)->alpha, expected, 1e-15);
      EXPECT_NEAR(rods.diluteness(SizeFunction::kConstant, Relation::kImpact).alpha, expected, 1e-12);
      EXPECT_NEAR(alpha_thin_rods(lambda, l, uniform), expected, 1e-15);
    }
}

TEST(Rods, NematicCoefficientAndEnvelope) {
  MarkMeasure nematic;
  nematic.atoms = {{Angle{0.0}, 0.5}, {Angle{kPi / 2}, 0.5}};
  // sup over g of (|sin g| + |cos g|) / 2 is at g = pi / 4
  const double expected = 0.2 * 4 * 0.25 * std::sqrt(2.0) / 2;
  EXPECT_NEAR(alpha_thin_rods(0.2, 0.5, nematic), expected, 1e-15);
  const ThinRods rods(ThinRods::Params{false, 0.2, 0.5, nematic, 0.1});
  EXPECT_NEAR(rods.diluteness(SizeFunction::kConstant, Relation::kImpact).alpha, expected, 1e-12);
  EXPECT_NEAR(rods.diluteness(SizeFunction::kConstant, Relation::kEnvelope).alpha,
              expected + 0.2 * (8 * 0.5 * 0.1 + kPi * 0.01), 1e-12);
}

TEST(Peierls, ContoursExcludeOnSharedVertices) {
  auto catalog = std::make_shared<const ContourCatalog>(ContourCatalog::enumerate(8));
  const PeierlsContours m(1.0, catalog);
  const auto& square = catalog->shape(ShapeId{0});
  ASSERT_EQ(square.length(), 4);
  const Particle a = m.place(square, {0, 0});
  EXPECT_TRUE(m.impacts(m.place(square, {1, 1}), a));   // corner contact
  EXPECT_FALSE(m.impacts(m.place(square, {2, 0}), a));  // one column apart
  EXPECT_TRUE(m.impacts(m.place(square, {-1, 0}), a));
  EXPECT_TRUE(std::isinf(m.pair_energy(a, m.place(square, {1, 0}))));
  EXPECT_EQ(m.pair_energy(a, m.place(square, {3, 3})), 0.0);
  EXPECT_NEAR(m.intensity().atom_mass(a), std::exp(-8.0), 1e-15);
  EXPECT_EQ(m.size(a, SizeFunction::kContourLength), 4.0);
}

TEST(Peierls, IntegratorBelowPerSiteBound) {
  auto catalog = std::make_shared<const ContourCatalog>(ContourCatalog::enumerate(10));
  for (double beta : {0.8, 1.0, 1.5}) {
    const PeierlsContours m(beta, catalog);
    const auto gen = m.diluteness(SizeFunction::kContourLength, Relation::kImpact);
    const auto bound = m.closed_form(SizeFunction::kContourLength);
    ASSERT_TRUE(bound.has_value());
    EXPECT_LE(gen.alpha, bound->alpha * (1 + 1e-12));
    EXPECT_TRUE(gen.truncated);
    EXPECT_EQ(gen.lmax, 10);
  }
}

TEST(Peierls, InconclusiveTruncationIsReported) {
  const auto catalog = ContourCatalog::enumerate(6);
  try {
    alpha_peierls(0.45, catalog);
    SUCCEED();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTruncationInconclusive);
  }
  EXPECT_LT(alpha_peierls(2.0, catalog).value, 1.0);
}

TEST(EffectiveModel, LeapsShiftByLogDensity) {
  auto base = WidomRowlinson::discrete(2, 0.06, 0.06, 1);
  auto ref = WidomRowlinson::discrete(2, 0.05, 0.05, 1);
  auto eff = effective_model(base, ref->intensity(), [](const Particle&) { return 1.2; }, -std::log(1.2));
  ParticleConfiguration c(Region::box(Box::make({-3, -3}, {3, 3})));
  EXPECT_NEAR(eff->energy_leap(spin_particle(kPlus, {0, 0}), c), -std::log(1.2), 1e-15);
  c.add(spin_particle(kMinus, {1, 0}));
  EXPECT_TRUE(std::isinf(eff->energy_leap(spin_particle(kPlus, {0, 0}), c)));
  EXPECT_DOUBLE_EQ(eff->delta_e(), -std::log(1.2));
  EXPECT_DOUBLE_EQ(eff->intensity().atom_mass(spin_particle(kPlus, {0, 0})), 0.05);
}

TEST(Intensity, LatticeMassesAndSites) {
  auto m = WidomRowlinson::discrete(2, 0.05, 0.07, 1);
  const auto& nu = m->intensity();
  EXPECT_EQ(nu.sites_in(Box::make({0, 0}, {2, 1})).size(), 6u);
  EXPECT_NEAR(nu.mass(Region::box(Box::make({0, 0}, {2, 1}))), 6 * 0.12, 1e-15);
  EXPECT_NEAR(nu.mass(Region::with_marks(Region::box(Box::make({0, 0}, {2, 1})), MarkSet::of({kMinus}))), 6 * 0.07,
              1e-15);
  EXPECT_DOUBLE_EQ(nu.atom_mass(spin_particle(kPlus, {0.5, 0})), 0.0);
  auto c = WidomRowlinson::continuum(2, 0.1, 0.3, 0.5);
  EXPECT_NEAR(c->intensity().mass(Region::box(Box::make({0, 0}, {2, 0.5}))), 0.4, 1e-15);
}

TEST(Negligible, WidomRowlinsonEvents) {
  ParticleConfiguration c;
  c.add(spin_particle(kPlus, {0, 0}));
  c.add(spin_particle(kMinus, {0.5, 0.2}));
  EXPECT_TRUE(negligible_set_membership(NegligibleFamily::kWidomRowlinson, c, 0.5));
  EXPECT_FALSE(negligible_set_membership(NegligibleFamily::kWidomRowlinson, c, 0.6));
  ParticleConfiguration twice;
  twice.add(spin_particle(kPlus, {0, 0}), 2);
  EXPECT_TRUE(negligible_set_membership(NegligibleFamily::kWidomRowlinson, twice, 0.5));
  EXPECT_FALSE(negligible_set_membership(NegligibleFamily::kNone, twice));
}
