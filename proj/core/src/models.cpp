#include "clansim/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "clansim/errors.hpp"

namespace clansim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Spin spin_of(const Particle& p) {
  if (const auto* s = std::get_if<Spin>(&p.mark)) return *s;
  throw Error(ErrorCode::kInvalidArgument, "expected a spin mark: " + to_string(p));
}

double angle_of(const Particle& p) {
  if (const auto* a = std::get_if<Angle>(&p.mark)) return a->radians;
  throw Error(ErrorCode::kInvalidArgument, "expected an angle mark: " + to_string(p));
}

std::string params_text(std::initializer_list<std::pair<const char*, double>> kv) {
  std::string s;
  for (const auto& [k, v] : kv) {
    if (!s.empty()) s += " ";
    s += std::string(k) + "=" + format_real(v);
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// MarkMeasure

double MarkMeasure::total() const {
  double t = uniform_angle;
  for (const auto& [m, w] : atoms) t += w;
  return t;
}

double MarkMeasure::mass_of(const MarkSet& marks) const {
  double t = 0.0;
  for (const auto& [m, w] : atoms)
    if (marks.contains(m)) t += w;
  if (uniform_angle > 0) {
    if (marks.kind == MarkSet::Kind::kAll) {
      t += uniform_angle;
    } else if (marks.kind == MarkSet::Kind::kAngleRange) {
      double lo = std::max(0.0, marks.angle_lo), hi = std::min(kPi, marks.angle_hi);
      if (hi > lo) t += uniform_angle * (hi - lo) / kPi;
    }
  }
  return t;
}

Mark MarkMeasure::sample(Rng& rng) const {
  double u = uniform01(rng) * total();
  for (const auto& [m, w] : atoms) {
    if (u < w) return m;
    u -= w;
  }
  if (uniform_angle > 0) return Angle{uniform01(rng) * kPi};
  // rounding left u just above the last atom
  return atoms.back().first;
}

MarkMeasure MarkMeasure::scaled(double factor) const {
  MarkMeasure r = *this;
  for (auto& a : r.atoms) a.second *= factor;
  r.uniform_angle *= factor;
  return r;
}

// ---------------------------------------------------------------------------
// IntensityMeasure

int IntensityMeasure::dim() const {
  return std::visit(Overloaded{
                        [](const Lattice& k) { return k.dim; },
                        [](const Continuum& k) { return k.dim; },
                        [](const Contours&) { return 2; },
                        [](const Pushforward& k) { return k.base->dim(); },
                    },
                    kind_);
}

LocationKind IntensityMeasure::location_kind() const {
  return std::visit(Overloaded{
                        [](const Lattice&) { return LocationKind::kLattice; },
                        [](const Continuum&) { return LocationKind::kContinuum; },
                        [](const Contours&) { return LocationKind::kDualLattice; },
                        [](const Pushforward& k) { return k.base->location_kind(); },
                    },
                    kind_);
}

bool IntensityMeasure::is_atomic() const { return location_kind() != LocationKind::kContinuum; }

namespace {

bool on_lattice(const Location& x, int dim, double spacing) {
  if (x.dim != dim) return false;
  for (int i = 0; i < dim; ++i)
    if (x[i] != spacing * std::round(x[i] / spacing)) return false;
  return true;
}

}  // namespace

double IntensityMeasure::atom_mass(const Particle& p) const {
  return std::visit(
      Overloaded{
          [&](const Lattice& k) {
            if (!on_lattice(p.x, k.dim, k.spacing)) return 0.0;
            double t = 0.0;
            for (const auto& [m, w] : k.per_site.atoms)
              if (m == p.mark) t += w;
            return t;
          },
          [](const Continuum&) { return 0.0; },
          [&](const Contours& k) {
            const auto* id = std::get_if<ShapeId>(&p.mark);
            if (!id || !on_lattice(p.x, 2, 1.0) || id->index < 0 ||
                static_cast<std::size_t>(id->index) >= k.catalog->size())
              return 0.0;
            return std::exp(-2.0 * k.beta * k.catalog->shape(*id).length());
          },
          [](const Pushforward&) -> double {
            throw Error(ErrorCode::kNoClosedForm, "atom masses of a pushforward");
          },
      },
      kind_);
}

std::vector<std::pair<Mark, double>> IntensityMeasure::atoms_at(const Location& x) const {
  return std::visit(
      Overloaded{
          [&](const Lattice& k) {
            if (!on_lattice(x, k.dim, k.spacing)) return std::vector<std::pair<Mark, double>>{};
            return k.per_site.atoms;
          },
          [](const Continuum&) -> std::vector<std::pair<Mark, double>> {
            throw Error(ErrorCode::kInvalidArgument, "continuum intensity has no atoms");
          },
          [&](const Contours& k) {
            std::vector<std::pair<Mark, double>> r;
            if (!on_lattice(x, 2, 1.0)) return r;
            for (std::size_t i = 0; i < k.catalog->size(); ++i)
              r.emplace_back(ShapeId{static_cast<std::int32_t>(i)},
                             std::exp(-2.0 * k.beta * k.catalog->shapes()[i].length()));
            return r;
          },
          [](const Pushforward&) -> std::vector<std::pair<Mark, double>> {
            throw Error(ErrorCode::kNoClosedForm, "atoms of a pushforward");
          },
      },
      kind_);
}

namespace {

std::vector<Location> grid_points(const Box& box, int dim, double spacing) {
  std::vector<Location> out;
  if (box.dim != dim) return out;
  std::array<std::int64_t, kMaxDim> lo{}, hi{};
  for (int i = 0; i < dim; ++i) {
    lo[i] = static_cast<std::int64_t>(std::floor(box.lo[i] / spacing)) - 1;
    hi[i] = static_cast<std::int64_t>(std::ceil(box.hi[i] / spacing)) + 1;
  }
  std::array<std::int64_t, kMaxDim> idx = lo;
  while (true) {
    Location x;
    x.dim = dim;
    for (int i = 0; i < dim; ++i) x[i] = spacing * static_cast<double>(idx[i]);
    if (box.contains(x)) out.push_back(x);
    int i = 0;
    for (; i < dim; ++i) {
      if (++idx[i] <= hi[i]) break;
      idx[i] = lo[i];
    }
    if (i == dim) break;
  }
  return out;
}

}  // namespace

std::vector<Location> IntensityMeasure::sites_in(const Box& box) const {
  return std::visit(Overloaded{
                        [&](const Lattice& k) { return grid_points(box, k.dim, k.spacing); },
                        [&](const Contours&) { return grid_points(box, 2, 1.0); },
                        [](const auto&) -> std::vector<Location> {
                          throw Error(ErrorCode::kInvalidArgument, "intensity has no sites");
                        },
                    },
                    kind_);
}

namespace {

double continuum_integral(const Region& r, const MarkMeasure& marks,
                          std::vector<const MarkSet*>& filters) {
  auto mark_mass = [&] {
    double t = 0.0;
    for (const auto& [m, w] : marks.atoms) {
      bool ok = true;
      for (const auto* f : filters) ok = ok && f->contains(m);
      if (ok) t += w;
    }
    if (marks.uniform_angle > 0) {
      double lo = 0.0, hi = kPi;
      for (const auto* f : filters) {
        if (f->kind == MarkSet::Kind::kAtoms) hi = lo;
        if (f->kind == MarkSet::Kind::kAngleRange) {
          lo = std::max(lo, f->angle_lo);
          hi = std::min(hi, f->angle_hi);
        }
      }
      if (hi > lo) t += marks.uniform_angle * (hi - lo) / kPi;
    }
    return t;
  };
  return std::visit(
      Overloaded{
          [](const EmptyRegion&) { return 0.0; },
          [](const WholeRegion&) -> double {
            throw Error(ErrorCode::kNoClosedForm, "unbounded region");
          },
          [&](const BoxRegion& b) { return b.box.volume() * mark_mass(); },
          [](const ParticleRegion&) { return 0.0; },
          [](const SiteRegion&) { return 0.0; },
          [&](const UnionRegion& u) {
            if (!u.disjoint && u.parts.size() > 1)
              throw Error(ErrorCode::kNoClosedForm, "overlapping union");
            double t = 0.0;
            for (const auto& q : u.parts) t += continuum_integral(q, marks, filters);
            return t;
          },
          [&](const MarkedRegion& m) {
            filters.push_back(&m.marks);
            double t = continuum_integral(m.base, marks, filters);
            filters.pop_back();
            return t;
          },
          [&](const ComplementRegion& c) {
            if (!c.removed.is_empty()) throw Error(ErrorCode::kNoClosedForm, "complement region");
            return continuum_integral(c.window, marks, filters);
          },
          [](const PredicateRegion& p) -> double {
            throw Error(ErrorCode::kNoClosedForm, "predicate region " + p.label);
          },
      },
      r.node().v);
}

}  // namespace

double IntensityMeasure::integrate(const Region& region, SizeFunction q) const {
  if (region.is_empty()) return 0.0;
  return std::visit(
      Overloaded{
          [&](const Lattice& k) {
            if (q != SizeFunction::kConstant)
              throw Error(ErrorCode::kInvalidArgument, "size function needs contours");
            if (k.per_site.uniform_angle > 0)
              throw Error(ErrorCode::kNoClosedForm, "lattice with continuous marks");
            auto b = region.bounds();
            if (!b) throw Error(ErrorCode::kNoClosedForm, "unbounded region");
            double t = 0.0;
            for (const auto& x : grid_points(*b, k.dim, k.spacing))
              for (const auto& [m, w] : k.per_site.atoms)
                if (region.contains(Particle{x, m})) t += w;
            return t;
          },
          [&](const Continuum& k) {
            if (q != SizeFunction::kConstant)
              throw Error(ErrorCode::kInvalidArgument, "size function needs contours");
            std::vector<const MarkSet*> filters;
            return continuum_integral(region, k.per_volume, filters);
          },
          [&](const Contours& k) {
            auto b = region.bounds();
            if (!b) throw Error(ErrorCode::kNoClosedForm, "unbounded region");
            double t = 0.0;
            for (const auto& x : grid_points(*b, 2, 1.0)) {
              for (std::size_t i = 0; i < k.catalog->size(); ++i) {
                Particle p{x, ShapeId{static_cast<std::int32_t>(i)}};
                if (!region.contains(p)) continue;
                const int len = k.catalog->shapes()[i].length();
                t += (q == SizeFunction::kContourLength ? len : 1) * std::exp(-2.0 * k.beta * len);
              }
            }
            return t;
          },
          [](const Pushforward&) -> double {
            throw Error(ErrorCode::kNoClosedForm, "pushforward intensity");
          },
      },
      kind_);
}

std::string IntensityMeasure::describe() const {
  auto marks_text = [](const MarkMeasure& m) {
    std::string s;
    for (const auto& [mk, w] : m.atoms) s += (s.empty() ? "" : ",") + to_string(mk) + ":" + format_real(w);
    if (m.uniform_angle > 0) s += (s.empty() ? "" : ",") + std::string("uniform:") + format_real(m.uniform_angle);
    return s;
  };
  return std::visit(
      Overloaded{
          [&](const Lattice& k) {
            return "lattice(d=" + std::to_string(k.dim) + ",spacing=" + format_real(k.spacing) +
                   "," + marks_text(k.per_site) + ")";
          },
          [&](const Continuum& k) {
            return "continuum(d=" + std::to_string(k.dim) + "," + marks_text(k.per_volume) + ")";
          },
          [](const Contours& k) {
            return "contours(beta=" + format_real(k.beta) + ",lmax=" + std::to_string(k.catalog->lmax()) + ")";
          },
          [](const Pushforward& k) { return "pushforward(" + k.label + "," + k.base->describe() + ")"; },
      },
      kind_);
}

// ---------------------------------------------------------------------------
// GasModel

std::string DilutenessReport::verdict() const {
  if (heavily_diluted()) return "heavily diluted";
  if (!tail_conclusive && alpha < 1.0) return "inconclusive";
  return "not heavily diluted";
}

Region GasModel::relation_region(const Particle& p, Relation r) const {
  return r == Relation::kImpact ? impact_region(p) : envelope_region(p);
}

bool GasModel::impacts(const Particle& source, const Particle& target) const {
  return impact_region(target).contains(source);
}

double GasModel::self_energy(const Particle&, const Region*) const { return 0.0; }

double GasModel::energy_leap(const Particle& p, const ParticleConfiguration& config) const {
  if (!config.window().covers(impact_region(p)))
    throw Error(ErrorCode::kInsufficientSupport,
                "window " + config.window().describe() + " does not cover the impact region of " +
                    to_string(p));
  return leap(p, config, nullptr);
}

double GasModel::finite_volume_leap(const Region& volume, const Particle& p,
                                    const ParticleConfiguration& config) const {
  return leap(p, config, &volume);
}

double GasModel::leap(const Particle& p, const ParticleConfiguration& config,
                      const Region* volume) const {
  double e = self_energy(p, volume);
  if (e == kInfinity) return e;
  for (const auto& entry : config.entries()) {
    double pe = pair_energy(p, entry.particle);
    if (pe == kInfinity) return kInfinity;
    e += entry.multiplicity * pe;
  }
  return e;
}

double GasModel::size(const Particle&, SizeFunction q) const {
  if (q != SizeFunction::kConstant)
    throw Error(ErrorCode::kInvalidArgument, family() + " supports only the constant size function");
  return 1.0;
}

Particle GasModel::at_origin(const Mark& m) const {
  Particle p;
  p.x.dim = dim();
  p.mark = m;
  return p;
}

DilutenessReport GasModel::diluteness(SizeFunction q, Relation r) const {
  DilutenessReport rep;
  rep.size_function = q;
  rep.envelope_used = r == Relation::kEnvelope;
  rep.method = "integrator";
  double sup = 0.0;
  for (const auto& m : probe_marks()) {
    Particle p = at_origin(m);
    sup = std::max(sup, intensity().integrate(relation_region(p, r), q) / size(p, q));
  }
  rep.alpha = std::exp(-delta_e()) * sup;
  return rep;
}

std::optional<DilutenessReport> GasModel::closed_form(SizeFunction) const { return std::nullopt; }

DilutenessReport diluteness_coefficient(const GasModel& model, SizeFunction q, bool use_envelope) {
  return model.diluteness(q, use_envelope ? Relation::kEnvelope : Relation::kImpact);
}

// ---------------------------------------------------------------------------
// Widom-Rowlinson

WidomRowlinson::WidomRowlinson(Params p)
    : p_(p),
      intensity_(p.spacing > 0
                     ? IntensityMeasure::Kind{IntensityMeasure::Lattice{
                           p.dim, p.spacing, MarkMeasure{{{kPlus, p.lambda_plus}, {kMinus, p.lambda_minus}}, 0.0}}}
                     : IntensityMeasure::Kind{IntensityMeasure::Continuum{
                           p.dim, MarkMeasure{{{kPlus, p.lambda_plus}, {kMinus, p.lambda_minus}}, 0.0}}}) {
  if (p.dim < 1 || p.dim > kMaxDim) throw Error(ErrorCode::kInvalidArgument, "dimension outside 1..3");
  if (p.lambda_plus < 0 || p.lambda_minus < 0)
    throw Error(ErrorCode::kInvalidArgument, "negative fugacity");
  if (!(p.radius >= 0) || !(p.spacing >= 0) || !(p.envelope_inflation >= 0))
    throw Error(ErrorCode::kInvalidArgument, "negative radius, spacing or inflation");
}

std::shared_ptr<WidomRowlinson> WidomRowlinson::discrete(int dim, double lambda_plus,
                                                         double lambda_minus, int k) {
  Params p;
  p.dim = dim;
  p.lambda_plus = lambda_plus;
  p.lambda_minus = lambda_minus;
  p.radius = k;
  p.spacing = 1.0;
  p.same_site_exclusion = true;
  return std::make_shared<WidomRowlinson>(p);
}

std::shared_ptr<WidomRowlinson> WidomRowlinson::continuum(int dim, double lambda_plus,
                                                          double lambda_minus, double r,
                                                          double envelope_inflation) {
  Params p;
  p.dim = dim;
  p.lambda_plus = lambda_plus;
  p.lambda_minus = lambda_minus;
  p.radius = r;
  p.spacing = 0.0;
  p.same_site_exclusion = false;
  p.envelope_inflation = envelope_inflation;
  return std::make_shared<WidomRowlinson>(p);
}

int WidomRowlinson::steps() const {
  return lattice() ? static_cast<int>(std::floor(p_.radius / p_.spacing + 1e-9)) : 0;
}

std::string WidomRowlinson::family() const {
  if (!lattice()) return "continuum_wr";
  return p_.spacing == 1.0 ? "discrete_wr" : "shrunken_wr";
}

std::string WidomRowlinson::describe() const {
  return family() + " " +
         params_text({{"dim", p_.dim},
                      {"lambda_plus", p_.lambda_plus},
                      {"lambda_minus", p_.lambda_minus},
                      {"radius", p_.radius},
                      {"spacing", p_.spacing},
                      {"same_site", p_.same_site_exclusion ? 1.0 : 0.0},
                      {"envelope_inflation", p_.envelope_inflation}});
}

std::int64_t WidomRowlinson::index(double coordinate) const {
  return static_cast<std::int64_t>(std::llround(coordinate / p_.spacing));
}

bool WidomRowlinson::same_site(const Location& a, const Location& b) const {
  if (a.dim != b.dim) return false;
  if (!lattice()) return a == b;
  for (int i = 0; i < a.dim; ++i)
    if (index(a[i]) != index(b[i])) return false;
  return true;
}

bool WidomRowlinson::within_range(const Location& a, const Location& b) const {
  if (!lattice()) return sup_distance(a, b) <= p_.radius;
  const std::int64_t k = steps();
  for (int i = 0; i < a.dim; ++i)
    if (std::llabs(index(a[i]) - index(b[i])) > k) return false;
  return true;
}

double WidomRowlinson::pair_energy(const Particle& a, const Particle& b) const {
  const Spin sa = spin_of(a), sb = spin_of(b);
  if (a.x.dim != b.x.dim) throw Error(ErrorCode::kInvalidArgument, "dimension mismatch");
  if (lattice() && p_.same_site_exclusion && same_site(a.x, b.x)) return kInfinity;
  if (sa != sb && within_range(a.x, b.x)) return kInfinity;
  return 0.0;
}

bool WidomRowlinson::impacts(const Particle& source, const Particle& target) const {
  return pair_energy(source, target) == kInfinity;
}

Region WidomRowlinson::impact_region(const Particle& p) const {
  const Spin s = spin_of(p);
  const double reach = lattice() ? steps() * p_.spacing + 0.5 * p_.spacing : p_.radius;
  std::vector<Region> parts;
  if (lattice() && p_.same_site_exclusion) parts.push_back(Region::point(p));
  parts.push_back(Region::with_marks(Region::box(Box::around(p.x, reach)), MarkSet::of({opposite(s)})));
  return Region::unite(std::move(parts), true);
}

Region WidomRowlinson::envelope_region(const Particle& p) const {
  if (p_.envelope_inflation <= 0) return impact_region(p);
  const Spin s = spin_of(p);
  const double d = p_.envelope_inflation;
  const double reach = lattice() ? steps() * p_.spacing + 0.5 * p_.spacing : p_.radius;
  return Region::unite(
      {Region::with_marks(Region::box(Box::around(p.x, d, BoxClosure::kOpen)), MarkSet::of({s})),
       Region::with_marks(Region::box(Box::around(p.x, reach + d)), MarkSet::of({opposite(s)}))},
      true);
}

std::optional<DilutenessReport> WidomRowlinson::closed_form(SizeFunction q) const {
  if (q != SizeFunction::kConstant) return std::nullopt;
  DilutenessReport r;
  r.method = "closed-form";
  if (lattice()) {
    const double lp = p_.lambda_plus, lm = p_.lambda_minus;
    r.alpha = p_.same_site_exclusion ? alpha_discrete_wr(lp, lm, steps(), p_.dim)
                                     : std::max(lp, lm) * std::pow(2 * steps() + 1, p_.dim);
  } else {
    r.alpha = alpha_continuum_wr(p_.lambda_plus, p_.lambda_minus, p_.radius, p_.dim);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Step functions and the generalized model

double StepFunction::operator()(double s) const {
  for (const auto& [r, v] : steps)
    if (s <= r) return v;
  return 0.0;
}

double StepFunction::support_radius() const {
  double m = 0.0;
  for (const auto& [r, v] : steps)
    if (v != 0.0) m = r;
  return m;
}

bool StepFunction::is_zero() const {
  return std::all_of(steps.begin(), steps.end(), [](const auto& s) { return s.second == 0.0; });
}

namespace {

void validate_step(const StepFunction& f, const char* name) {
  double last_r = -1.0, last_v = kInfinity;
  for (const auto& [r, v] : f.steps) {
    if (!(r > last_r) || r < 0)
      throw Error(ErrorCode::kInvalidArgument, std::string(name) + ": radii must increase from 0");
    if (!(v >= 0) || v > last_v)
      throw Error(ErrorCode::kInvalidArgument, std::string(name) + ": values must be non-increasing and non-negative");
    last_r = r;
    last_v = v;
  }
}

}  // namespace

GeneralizedWidomRowlinson::GeneralizedWidomRowlinson(Params p)
    : p_(std::move(p)),
      intensity_(IntensityMeasure::Continuum{
          p_.dim, MarkMeasure{{{kPlus, p_.lambda_plus}, {kMinus, p_.lambda_minus}}, 0.0}}) {
  if (p_.dim < 1 || p_.dim > kMaxDim) throw Error(ErrorCode::kInvalidArgument, "dimension outside 1..3");
  if (p_.lambda_plus < 0 || p_.lambda_minus < 0)
    throw Error(ErrorCode::kInvalidArgument, "negative fugacity");
  validate_step(p_.h, "h");
  validate_step(p_.j_minus, "j_minus");
  validate_step(p_.j_plus, "j_plus");
}

std::string GeneralizedWidomRowlinson::describe() const {
  return "generalized_wr " + params_text({{"dim", p_.dim},
                                          {"lambda_plus", p_.lambda_plus},
                                          {"lambda_minus", p_.lambda_minus},
                                          {"m_h", p_.h.support_radius()},
                                          {"m_j_minus", p_.j_minus.support_radius()},
                                          {"m_j_plus", p_.j_plus.support_radius()}});
}

const StepFunction& GeneralizedWidomRowlinson::repulsion(Spin a, Spin b) const {
  if (a != b) return p_.h;
  return a == kMinus ? p_.j_minus : p_.j_plus;
}

double GeneralizedWidomRowlinson::pair_energy(const Particle& a, const Particle& b) const {
  return repulsion(spin_of(a), spin_of(b))(sup_distance(a.x, b.x));
}

bool GeneralizedWidomRowlinson::impacts(const Particle& source, const Particle& target) const {
  return pair_energy(source, target) != 0.0;
}

Region GeneralizedWidomRowlinson::region_with_margin(const Particle& p, double margin) const {
  const Spin s = spin_of(p);
  std::vector<Region> parts;
  if (!p_.h.is_zero())
    parts.push_back(Region::with_marks(Region::box(Box::around(p.x, p_.h.support_radius() + margin)),
                                       MarkSet::of({opposite(s)})));
  const StepFunction& j = repulsion(s, s);
  if (!j.is_zero())
    parts.push_back(Region::with_marks(Region::box(Box::around(p.x, j.support_radius() + margin)),
                                       MarkSet::of({s})));
  return Region::unite(std::move(parts), true);
}

Region GeneralizedWidomRowlinson::impact_region(const Particle& p) const {
  return region_with_margin(p, 0.0);
}

Region GeneralizedWidomRowlinson::envelope_region(const Particle& p) const {
  return region_with_margin(p, p_.envelope_inflation);
}

std::optional<DilutenessReport> GeneralizedWidomRowlinson::closed_form(SizeFunction q) const {
  if (q != SizeFunction::kConstant) return std::nullopt;
  DilutenessReport r;
  r.method = "closed-form";
  r.alpha = alpha_generalized_wr(p_.lambda_plus, p_.lambda_minus, p_.h, p_.j_minus, p_.j_plus, p_.dim);
  return r;
}

// ---------------------------------------------------------------------------
// Rods

namespace {

struct Vec2 {
  double x, y;
};
Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

struct Segment {
  Vec2 p, q;
};

Segment segment_of(const Particle& r, double l) {
  if (r.x.dim != 2) throw Error(ErrorCode::kInvalidArgument, "rods live in two dimensions");
  const double g = angle_of(r);
  const Vec2 u{std::cos(g) * l, std::sin(g) * l};
  return {{r.x[0] - u.x, r.x[1] - u.y}, {r.x[0] + u.x, r.x[1] + u.y}};
}

// Orientation sign with the fixed tolerance, relative to the squared length.
int orientation(Vec2 a, Vec2 b, Vec2 c, double scale) {
  const double v = cross(b - a, c - a);
  if (std::abs(v) <= 1e-12 * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool within_bbox(Vec2 a, Vec2 b, Vec2 c, double tol) {
  return c.x >= std::min(a.x, b.x) - tol && c.x <= std::max(a.x, b.x) + tol &&
         c.y >= std::min(a.y, b.y) - tol && c.y <= std::max(a.y, b.y) + tol;
}

bool segments_intersect(const Segment& s, const Segment& t, double scale) {
  const int o1 = orientation(s.p, s.q, t.p, scale), o2 = orientation(s.p, s.q, t.q, scale);
  const int o3 = orientation(t.p, t.q, s.p, scale), o4 = orientation(t.p, t.q, s.q, scale);
  if (o1 != o2 && o3 != o4 && !(o1 == 0 && o2 == 0)) return true;
  const double tol = 1e-12 * std::sqrt(scale);
  if (o1 == 0 && within_bbox(s.p, s.q, t.p, tol)) return true;
  if (o2 == 0 && within_bbox(s.p, s.q, t.q, tol)) return true;
  if (o3 == 0 && within_bbox(t.p, t.q, s.p, tol)) return true;
  if (o4 == 0 && within_bbox(t.p, t.q, s.q, tol)) return true;
  return false;
}

double point_segment_distance(Vec2 c, const Segment& s) {
  const Vec2 d = s.q - s.p;
  const double len2 = dot(d, d);
  double t = len2 > 0 ? dot(c - s.p, d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 f{s.p.x + t * d.x - c.x, s.p.y + t * d.y - c.y};
  return std::sqrt(dot(f, f));
}

}  // namespace

bool rods_intersect(const Particle& a, const Particle& b, double half_length) {
  const double scale = 4.0 * half_length * half_length;
  return segments_intersect(segment_of(a, half_length), segment_of(b, half_length), scale);
}

double rods_distance(const Particle& a, const Particle& b, double half_length) {
  if (rods_intersect(a, b, half_length)) return 0.0;
  const Segment s = segment_of(a, half_length), t = segment_of(b, half_length);
  return std::min({point_segment_distance(s.p, t), point_segment_distance(s.q, t),
                   point_segment_distance(t.p, s), point_segment_distance(t.q, s)});
}

ThinRods::ThinRods(Params p)
    : p_(std::move(p)),
      intensity_(p_.lattice ? IntensityMeasure::Kind{IntensityMeasure::Lattice{2, 1.0, p_.orientation.scaled(p_.lambda)}}
                            : IntensityMeasure::Kind{IntensityMeasure::Continuum{2, p_.orientation.scaled(p_.lambda)}}) {
  if (p_.lambda < 0) throw Error(ErrorCode::kInvalidArgument, "negative fugacity");
  if (!(p_.half_length > 0)) throw Error(ErrorCode::kInvalidArgument, "half length must be positive");
  if (std::abs(p_.orientation.total() - 1.0) > 1e-9)
    throw Error(ErrorCode::kInvalidArgument, "orientation measure must have total mass 1");
  for (const auto& [m, w] : p_.orientation.atoms) {
    const auto* a = std::get_if<Angle>(&m);
    if (!a || !(a->radians >= 0 && a->radians < kPi) || w < 0)
      throw Error(ErrorCode::kInvalidArgument, "orientation atoms must be angles in [0,pi)");
  }
}

std::string ThinRods::describe() const {
  return "thin_rods " + params_text({{"lattice", p_.lattice ? 1.0 : 0.0},
                                     {"lambda", p_.lambda},
                                     {"half_length", p_.half_length},
                                     {"uniform", p_.orientation.uniform_angle},
                                     {"atoms", static_cast<double>(p_.orientation.atoms.size())}});
}

Region ThinRods::impact_region(const Particle& p) const {
  const double l = p_.half_length;
  return Region::predicate(
      Box::around(p.x, 2 * l),
      [p, l](const Particle& q) { return std::holds_alternative<Angle>(q.mark) && rods_intersect(q, p, l); },
      "rods");
}

Region ThinRods::envelope_region(const Particle& p) const {
  const double d = p_.envelope_inflation;
  if (d <= 0) return impact_region(p);
  const double l = p_.half_length;
  return Region::predicate(
      Box::around(p.x, 2 * l + d),
      [p, l, d](const Particle& q) {
        return std::holds_alternative<Angle>(q.mark) && rods_distance(q, p, l) <= d;
      },
      "rod-hull");
}

bool ThinRods::impacts(const Particle& source, const Particle& target) const {
  return rods_intersect(source, target, p_.half_length);
}

double ThinRods::pair_energy(const Particle& a, const Particle& b) const {
  return rods_intersect(a, b, p_.half_length) ? kInfinity : 0.0;
}

std::vector<Mark> ThinRods::probe_marks() const {
  std::vector<Mark> m;
  for (const auto& [a, w] : p_.orientation.atoms) m.push_back(a);
  if (p_.orientation.uniform_angle > 0 || m.empty()) m.push_back(Angle{0.0});
  return m;
}

double ThinRods::excluded_mass(double gamma) const {
  const double l = p_.half_length;
  // area of (L_gamma) - (L_t): parallelogram spanned by the two rod vectors
  auto area = [&](double t) {
    const Vec2 a{2 * l * std::cos(gamma), 2 * l * std::sin(gamma)};
    const Vec2 b{2 * l * std::cos(t), 2 * l * std::sin(t)};
    return std::abs(cross(a, b));
  };
  double total = 0.0;
  for (const auto& [m, w] : p_.orientation.atoms) total += w * area(std::get<Angle>(m).radians);
  if (p_.orientation.uniform_angle > 0) {
    using boost::math::quadrature::gauss_kronrod;
    const double g = std::fmod(gamma, kPi);
    double integral = 0.0;
    if (g > 0) integral += gauss_kronrod<double, 61>::integrate(area, 0.0, g, 15, 1e-14);
    integral += gauss_kronrod<double, 61>::integrate(area, g, kPi, 15, 1e-14);
    total += p_.orientation.uniform_angle * integral / kPi;
  }
  return p_.lambda * total;
}

DilutenessReport ThinRods::diluteness(SizeFunction q, Relation r) const {
  if (p_.lattice) return GasModel::diluteness(q, r);
  if (q != SizeFunction::kConstant)
    throw Error(ErrorCode::kInvalidArgument, "rods support only the constant size function");
  std::vector<double> kinks;
  for (const auto& [m, w] : p_.orientation.atoms) kinks.push_back(std::get<Angle>(m).radians);
  std::sort(kinks.begin(), kinks.end());
  double sup = excluded_mass(0.0);
  if (!kinks.empty()) {
    // concave between consecutive kinks (period pi)
    for (std::size_t i = 0; i < kinks.size(); ++i) {
      const double a = kinks[i];
      const double b = (i + 1 < kinks.size()) ? kinks[i + 1] : kinks.front() + kPi;
      sup = std::max(sup, excluded_mass(std::fmod(a, kPi)));
      if (b - a <= 0) continue;
      auto neg = [&](double g) { return -excluded_mass(std::fmod(g, kPi)); };
      auto best = boost::math::tools::brent_find_minima(neg, a, b, 52);
      sup = std::max(sup, -best.second);
    }
  } else {
    for (int i = 1; i < 8; ++i) sup = std::max(sup, excluded_mass(kPi * i / 8.0));
  }
  DilutenessReport rep;
  rep.size_function = q;
  rep.envelope_used = r == Relation::kEnvelope;
  rep.method = "integrator";
  double extra = 0.0;
  if (r == Relation::kEnvelope && p_.envelope_inflation > 0) {
    // Steiner formula for the parallelogram thickened by the inflation
    const double d = p_.envelope_inflation, l = p_.half_length;
    extra = p_.lambda * (8.0 * l * d + kPi * d * d);
  }
  rep.alpha = std::exp(-delta_e()) * (sup + extra);
  return rep;
}

std::optional<DilutenessReport> ThinRods::closed_form(SizeFunction q) const {
  if (q != SizeFunction::kConstant || p_.lattice) return std::nullopt;
  DilutenessReport r;
  r.method = "closed-form";
  r.alpha = alpha_thin_rods(p_.lambda, p_.half_length, p_.orientation);
  return r;
}

// ---------------------------------------------------------------------------
// Peierls contours

PeierlsContours::PeierlsContours(double beta, std::shared_ptr<const ContourCatalog> catalog)
    : beta_(beta), catalog_(std::move(catalog)), intensity_(IntensityMeasure::Contours{beta, catalog_}) {
  if (!(beta > 0)) throw Error(ErrorCode::kInvalidArgument, "beta must be positive");
  if (!catalog_ || catalog_->size() == 0) throw Error(ErrorCode::kInvalidArgument, "empty contour catalog");
}

std::string PeierlsContours::describe() const {
  return "peierls " + params_text({{"beta", beta_},
                                   {"lmax", catalog_->lmax()},
                                   {"shapes", static_cast<double>(catalog_->size())},
                                   {"complete", catalog_->complete() ? 1.0 : 0.0}});
}

const ContourShape& PeierlsContours::shape_of(const Particle& p) const {
  const auto* id = std::get_if<ShapeId>(&p.mark);
  if (!id || id->index < 0 || static_cast<std::size_t>(id->index) >= catalog_->size())
    throw Error(ErrorCode::kInvalidArgument, "not a catalog contour: " + to_string(p));
  return catalog_->shape(*id);
}

std::vector<DualVertex> PeierlsContours::vertices(const Particle& p) const {
  const auto& s = shape_of(p);
  const int rx = static_cast<int>(std::lround(p.x[0])), ry = static_cast<int>(std::lround(p.x[1]));
  std::vector<DualVertex> v;
  v.reserve(s.vertices.size());
  for (const auto& w : s.vertices) v.push_back({w.x + rx, w.y + ry});
  return v;
}

std::vector<DualEdge> PeierlsContours::edges(const Particle& p) const {
  const auto& s = shape_of(p);
  const int rx = static_cast<int>(std::lround(p.x[0])), ry = static_cast<int>(std::lround(p.x[1]));
  std::vector<DualEdge> e;
  e.reserve(s.edges.size());
  for (const auto& d : s.edges) e.push_back({{d.from.x + rx, d.from.y + ry}, d.horizontal});
  return e;
}

Particle PeierlsContours::place(const ContourShape& shape, DualVertex root) const {
  auto id = catalog_->find(shape);
  if (!id) throw Error(ErrorCode::kInvalidArgument, "shape not in catalog");
  return Particle{Location{static_cast<double>(root.x), static_cast<double>(root.y)}, *id};
}

bool PeierlsContours::impacts(const Particle& source, const Particle& target) const {
  // merge of two sorted vertex lists; translation keeps the order
  const auto& a = shape_of(source).vertices;
  const auto& b = shape_of(target).vertices;
  const int ax = static_cast<int>(std::lround(source.x[0])), ay = static_cast<int>(std::lround(source.x[1]));
  const int bx = static_cast<int>(std::lround(target.x[0])), by = static_cast<int>(std::lround(target.x[1]));
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const DualVertex u{a[i].x + ax, a[i].y + ay}, v{b[j].x + bx, b[j].y + by};
    if (u == v) return true;
    if (u < v) ++i; else ++j;
  }
  return false;
}

double PeierlsContours::pair_energy(const Particle& a, const Particle& b) const {
  return impacts(a, b) ? kInfinity : 0.0;
}

double PeierlsContours::self_energy(const Particle& p, const Region* volume) const {
  if (!volume) return 0.0;
  for (const auto& v : vertices(p))
    if (!volume->contains_location(Location{static_cast<double>(v.x), static_cast<double>(v.y)}))
      return kInfinity;
  return 0.0;
}

double PeierlsContours::size(const Particle& p, SizeFunction q) const {
  return q == SizeFunction::kContourLength ? shape_of(p).length() : 1.0;
}

std::vector<Mark> PeierlsContours::probe_marks() const {
  std::vector<Mark> m;
  m.reserve(catalog_->size());
  for (std::size_t i = 0; i < catalog_->size(); ++i) m.push_back(ShapeId{static_cast<std::int32_t>(i)});
  return m;
}

Region PeierlsContours::impact_region(const Particle& p) const {
  const auto v = vertices(p);
  int x0 = v.front().x, x1 = v.front().x, y0 = v.front().y, y1 = v.front().y;
  for (const auto& w : v) {
    x0 = std::min(x0, w.x);
    x1 = std::max(x1, w.x);
    y0 = std::min(y0, w.y);
    y1 = std::max(y1, w.y);
  }
  // a root r shares vertex w with offset o in [0,max_dx] x [min_dy,max_dy]
  Box b = Box::make({static_cast<double>(x0 - catalog_->max_dx()), static_cast<double>(y0 - catalog_->max_dy())},
                    {static_cast<double>(x1), static_cast<double>(y1 - catalog_->min_dy())});
  return Region::predicate(
      b, [this, p](const Particle& q) { return std::holds_alternative<ShapeId>(q.mark) && impacts(q, p); },
      "contours-meeting");
}

DilutenessReport PeierlsContours::diluteness(SizeFunction q, Relation r) const {
  // For each shape g: sum over placed shapes meeting g, counted once per
  // distinct placement, of q e^{-2 beta l}.
  const auto& shapes = catalog_->shapes();
  double sup = 0.0;
  std::vector<std::int64_t> offsets;
  for (const auto& g : shapes) {
    double total = 0.0;
    for (const auto& h : shapes) {
      offsets.clear();
      for (const auto& v : g.vertices)
        for (const auto& w : h.vertices)
          offsets.push_back((static_cast<std::int64_t>(v.x - w.x) << 32) + (v.y - w.y));
      std::sort(offsets.begin(), offsets.end());
      const auto distinct = std::unique(offsets.begin(), offsets.end()) - offsets.begin();
      const double qh = q == SizeFunction::kContourLength ? h.length() : 1.0;
      total += static_cast<double>(distinct) * qh * std::exp(-2.0 * beta_ * h.length());
    }
    const double qg = q == SizeFunction::kContourLength ? g.length() : 1.0;
    sup = std::max(sup, total / qg);
  }
  DilutenessReport rep;
  rep.size_function = q;
  rep.envelope_used = r == Relation::kEnvelope;
  rep.method = "integrator (catalog contours)";
  rep.alpha = sup;
  rep.truncated = true;
  rep.lmax = catalog_->lmax();
  auto series = peierls_alpha_series(beta_, *catalog_);
  rep.tail_conclusive = series.tail_conclusive;
  rep.tail_estimate = series.tail_estimate;
  return rep;
}

std::optional<DilutenessReport> PeierlsContours::closed_form(SizeFunction q) const {
  if (q != SizeFunction::kContourLength) return std::nullopt;
  auto s = peierls_alpha_series(beta_, *catalog_);
  DilutenessReport r;
  r.size_function = q;
  r.method = "per-site series bound";
  r.truncated = true;
  r.lmax = s.lmax;
  r.tail_conclusive = s.tail_conclusive;
  r.tail_estimate = s.tail_estimate;
  r.alpha = s.value + (s.tail_conclusive ? s.tail_estimate : 0.0);
  return r;
}

// ---------------------------------------------------------------------------
// Effective model

EffectiveModel::EffectiveModel(ModelPtr base, IntensityMeasure reference,
                               std::function<double(const Particle&)> density, double delta_e_tilde,
                               std::string label)
    : base_(std::move(base)),
      reference_(std::move(reference)),
      density_(std::move(density)),
      delta_e_(delta_e_tilde),
      label_(std::move(label)) {
  if (!base_) throw Error(ErrorCode::kInvalidArgument, "null base model");
}

std::string EffectiveModel::describe() const {
  return label_ + " delta_e=" + format_real(delta_e_) + " base=[" + base_->describe() + "]";
}

double EffectiveModel::log_density(const Particle& p) const {
  const double d = density_(p);
  if (!(d > 0) || !std::isfinite(d))
    throw Error(ErrorCode::kUnboundedDensity, "density not positive and finite at " + to_string(p));
  return std::log(d);
}

double EffectiveModel::self_energy(const Particle& p, const Region* volume) const {
  return base_->self_energy(p, volume) - log_density(p);
}

double EffectiveModel::leap(const Particle& p, const ParticleConfiguration& config,
                            const Region* volume) const {
  const double e = base_->leap(p, config, volume) - log_density(p);
  if (e < delta_e_ - 1e-12)
    throw Error(ErrorCode::kUnboundedDensity,
                "leap " + format_real(e) + " below the declared bound " + format_real(delta_e_));
  return e;
}

ModelPtr effective_model(ModelPtr base, IntensityMeasure reference_intensity,
                         std::function<double(const Particle&)> density, double delta_e_tilde) {
  return std::make_shared<EffectiveModel>(std::move(base), std::move(reference_intensity),
                                          std::move(density), delta_e_tilde);
}

// ---------------------------------------------------------------------------
// Closed forms

double alpha_discrete_wr(double lambda_plus, double lambda_minus, int k, int dim) {
  if (lambda_plus < 0 || lambda_minus < 0 || k < 0 || dim < 1)
    throw Error(ErrorCode::kInvalidArgument, "discrete WR parameters");
  return std::max(lambda_plus, lambda_minus) * std::pow(2.0 * k + 1.0, dim) +
         std::min(lambda_plus, lambda_minus);
}

double alpha_continuum_wr(double lambda_plus, double lambda_minus, double r, int dim) {
  if (lambda_plus < 0 || lambda_minus < 0 || r < 0 || dim < 1)
    throw Error(ErrorCode::kInvalidArgument, "continuum WR parameters");
  return std::max(lambda_plus, lambda_minus) * std::pow(2.0 * r, dim);
}

double alpha_generalized_wr(double lambda_plus, double lambda_minus, const StepFunction& h,
                            const StepFunction& j_minus, const StepFunction& j_plus, int dim) {
  const double mh = std::pow(h.support_radius(), dim);
  const double mm = std::pow(j_minus.support_radius(), dim);
  const double mp = std::pow(j_plus.support_radius(), dim);
  return std::pow(2.0, dim) * std::max(lambda_minus * mm + lambda_plus * std::max(mh, mp),
                                       lambda_plus * mp + lambda_minus * std::max(mh, mm));
}

double alpha_thin_rods(double lambda, double half_length, const MarkMeasure& rho) {
  std::vector<std::pair<double, double>> atoms;
  for (const auto& [m, w] : rho.atoms) atoms.emplace_back(std::get<Angle>(m).radians, w);
  std::sort(atoms.begin(), atoms.end());
  auto value = [&](double g) {
    double s = 0.0;
    for (const auto& [t, w] : atoms) s += w * std::abs(std::sin(g - t));
    return s;
  };
  double sup = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double a = atoms[i].first;
    const double b = (i + 1 < atoms.size()) ? atoms[i + 1].first : atoms.front().first + kPi;
    sup = std::max({sup, value(a), value(b)});
    if (!(b > a)) continue;
    // on (a, b) every |sin(g - t)| keeps its sign: A sin g + B cos g
    const double mid = 0.5 * (a + b);
    double A = 0.0, B = 0.0;
    for (const auto& [t, w] : atoms) {
      const double s = std::sin(mid - t) >= 0 ? 1.0 : -1.0;
      A += w * s * std::cos(t);
      B -= w * s * std::sin(t);
    }
    const double phi = std::atan2(A, B);
    for (int k = -2; k <= 2; ++k) {
      const double g = phi + 2 * kPi * k;
      if (g > a && g < b) sup = std::max(sup, std::hypot(A, B));
    }
  }
  return 4.0 * half_length * half_length * lambda * (sup + 2.0 * rho.uniform_angle / kPi);
}

PeierlsSeries alpha_peierls(double beta, const ContourCatalog& catalog) {
  auto s = peierls_alpha_series(beta, catalog);
  if (s.value < 1.0 && (!s.tail_conclusive || s.value + s.tail_estimate >= 1.0))
    throw Error(ErrorCode::kTruncationInconclusive,
                "partial sum " + format_real(s.value) + " up to length " + std::to_string(s.lmax) +
                    " with tail ratio " + format_real(s.growth_ratio));
  return s;
}

// ---------------------------------------------------------------------------
// Negligible sets

bool negligible_set_membership(NegligibleFamily family, const ParticleConfiguration& config,
                               double r0) {
  const auto& e = config.entries();
  switch (family) {
    case NegligibleFamily::kNone:
      return false;
    case NegligibleFamily::kWidomRowlinson:
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i].multiplicity > 1) return true;
        for (std::size_t j = i + 1; j < e.size(); ++j) {
          if (e[i].particle.x == e[j].particle.x) return true;
          if (e[i].particle.mark != e[j].particle.mark &&
              sup_distance(e[i].particle.x, e[j].particle.x) == r0)
            return true;
        }
      }
      return false;
    case NegligibleFamily::kNematicRods:
      for (std::size_t i = 0; i < e.size(); ++i) {
        const double gi = std::get<Angle>(e[i].particle.mark).radians;
        if (e[i].multiplicity > 1) return true;
        for (std::size_t j = i + 1; j < e.size(); ++j) {
          const double gj = std::get<Angle>(e[j].particle.mark).radians;
          if (gi != gj) continue;
          if (gi == 0.0 && e[i].particle.x[1] == e[j].particle.x[1]) return true;
          if (gi == kPi / 2 && e[i].particle.x[0] == e[j].particle.x[0]) return true;
        }
      }
      return false;
  }
  return false;
}

}  // namespace clansim
