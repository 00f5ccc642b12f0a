#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "clansim/config_space.hpp"
#include "clansim/contours.hpp"
#include "clansim/random.hpp"

namespace clansim {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Intensity measures

// Measure on the mark space: weighted atoms plus an optional mass spread
// uniformly over angles in [0, pi).
struct MarkMeasure {
  std::vector<std::pair<Mark, double>> atoms;
  double uniform_angle = 0.0;

  double total() const;
  double mass_of(const MarkSet& marks) const;
  Mark sample(Rng& rng) const;
  MarkMeasure scaled(double factor) const;
};

enum class LocationKind { kLattice, kContinuum, kDualLattice };
enum class SizeFunction { kConstant, kContourLength };

class IntensityMeasure {
 public:
  // spacing * Z^d, per_site masses at every site
  struct Lattice {
    int dim = 2;
    double spacing = 1.0;
    MarkMeasure per_site;
  };
  // Lebesgue density times a mark measure
  struct Continuum {
    int dim = 2;
    MarkMeasure per_volume;
  };
  // e^{-2 beta |gamma|} for every catalog shape rooted at every dual site
  struct Contours {
    double beta = 0.0;
    std::shared_ptr<const ContourCatalog> catalog;
  };
  struct Pushforward {
    std::shared_ptr<const IntensityMeasure> base;
    std::function<Particle(const Particle&)> map;
    std::string label;
  };
  using Kind = std::variant<Lattice, Continuum, Contours, Pushforward>;

  explicit IntensityMeasure(Kind kind) : kind_(std::move(kind)) {}

  const Kind& kind() const { return kind_; }
  int dim() const;
  LocationKind location_kind() const;
  bool is_atomic() const;

  // nu({p}); zero off the atoms and for continuum measures
  double atom_mass(const Particle& p) const;
  // Atoms located at x (atomic kinds only).
  std::vector<std::pair<Mark, double>> atoms_at(const Location& x) const;
  // Lattice sites / dual sites inside a bounded box.
  std::vector<Location> sites_in(const Box& box) const;

  // integral of q over the region; throws no-closed-form when the region
  // structure cannot be integrated for this kind
  double integrate(const Region& region, SizeFunction q) const;
  double mass(const Region& region) const { return integrate(region, SizeFunction::kConstant); }

  std::string describe() const;

 private:
  Kind kind_;
};

// ---------------------------------------------------------------------------
// Gas models

enum class Relation { kImpact, kEnvelope };

struct DilutenessReport {
  double alpha = 0.0;
  SizeFunction size_function = SizeFunction::kConstant;
  bool envelope_used = false;
  std::string method;
  // series-based models
  bool truncated = false;
  int lmax = 0;
  double tail_estimate = 0.0;
  bool tail_conclusive = true;

  bool heavily_diluted() const { return alpha < 1.0 && tail_conclusive; }
  std::string verdict() const;
};

class GasModel {
 public:
  virtual ~GasModel() = default;

  virtual std::string family() const = 0;
  virtual std::string describe() const { return family(); }
  virtual const IntensityMeasure& intensity() const = 0;
  // uniform lower bound on leaps
  virtual double delta_e() const { return 0.0; }
  int dim() const { return intensity().dim(); }

  virtual Region impact_region(const Particle& p) const = 0;
  virtual Region envelope_region(const Particle& p) const { return impact_region(p); }
  Region relation_region(const Particle& p, Relation r) const;
  // whether `source` lies in the impact region of `target`
  virtual bool impacts(const Particle& source, const Particle& target) const;

  // Potential description. Infinite values encode exclusion.
  virtual double pair_energy(const Particle& a, const Particle& b) const = 0;
  // One-body term; with a volume, the finite-volume term for that volume.
  virtual double self_energy(const Particle& p, const Region* volume) const;
  // At most one particle per site in every admissible configuration.
  virtual bool site_exclusive() const = 0;

  // Infinite-volume leap. Throws insufficient-support when the window of
  // config does not cover the impact region of p.
  double energy_leap(const Particle& p, const ParticleConfiguration& config) const;
  // Leap in volume Lambda relative to config, which holds both the inner
  // particles and the boundary condition.
  double finite_volume_leap(const Region& volume, const Particle& p,
                            const ParticleConfiguration& config) const;
  // Unchecked leap; volume may be null.
  virtual double leap(const Particle& p, const ParticleConfiguration& config,
                      const Region* volume) const;

  virtual double size(const Particle& p, SizeFunction q) const;
  // Marks over which coefficient suprema are taken.
  virtual std::vector<Mark> probe_marks() const = 0;
  // Particle with the given mark at the origin of the location space.
  Particle at_origin(const Mark& m) const;

  // Generic path: integrates the relation region against the intensity.
  virtual DilutenessReport diluteness(SizeFunction q, Relation r) const;
  // Closed-form coefficient where one exists.
  virtual std::optional<DilutenessReport> closed_form(SizeFunction q) const;
};

using ModelPtr = std::shared_ptr<const GasModel>;

DilutenessReport diluteness_coefficient(const GasModel& model, SizeFunction q, bool use_envelope);

// Widom-Rowlinson: two types excluding each other within `radius` (sup
// norm). With spacing > 0 the particles live on spacing * Z^d and carry
// per-site masses; with spacing == 0 they live in R^d with densities.
class WidomRowlinson : public GasModel {
 public:
  struct Params {
    int dim = 2;
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    double radius = 1.0;
    double spacing = 1.0;
    bool same_site_exclusion = true;
    double envelope_inflation = 0.0;
  };

  explicit WidomRowlinson(Params p);

  static std::shared_ptr<WidomRowlinson> discrete(int dim, double lambda_plus, double lambda_minus,
                                                  int k);
  static std::shared_ptr<WidomRowlinson> continuum(int dim, double lambda_plus, double lambda_minus,
                                                   double r, double envelope_inflation = 0.0);

  const Params& params() const { return p_; }
  bool lattice() const { return p_.spacing > 0; }
  // exclusion range in lattice steps
  int steps() const;

  std::string family() const override;
  std::string describe() const override;
  const IntensityMeasure& intensity() const override { return intensity_; }
  Region impact_region(const Particle& p) const override;
  Region envelope_region(const Particle& p) const override;
  bool impacts(const Particle& source, const Particle& target) const override;
  double pair_energy(const Particle& a, const Particle& b) const override;
  bool site_exclusive() const override { return lattice() && p_.same_site_exclusion; }
  std::vector<Mark> probe_marks() const override { return {kPlus, kMinus}; }
  std::optional<DilutenessReport> closed_form(SizeFunction q) const override;

 private:
  std::int64_t index(double coordinate) const;
  bool same_site(const Location& a, const Location& b) const;
  bool within_range(const Location& a, const Location& b) const;

  Params p_;
  IntensityMeasure intensity_;
};

// Non-increasing step function on [0, inf): value v_i on (r_{i-1}, r_i],
// zero beyond the last breakpoint. Values may be +inf.
struct StepFunction {
  std::vector<std::pair<double, double>> steps;  // (radius, value), radii increasing

  double operator()(double s) const;
  // sup { r : f(r) != 0 }
  double support_radius() const;
  bool is_zero() const;
};

class GeneralizedWidomRowlinson : public GasModel {
 public:
  struct Params {
    int dim = 2;
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    StepFunction h;        // between opposite types
    StepFunction j_minus;  // between two - particles
    StepFunction j_plus;   // between two + particles
    double envelope_inflation = 0.0;
  };

  explicit GeneralizedWidomRowlinson(Params p);

  const Params& params() const { return p_; }
  std::string family() const override { return "generalized_wr"; }
  std::string describe() const override;
  const IntensityMeasure& intensity() const override { return intensity_; }
  Region impact_region(const Particle& p) const override;
  Region envelope_region(const Particle& p) const override;
  bool impacts(const Particle& source, const Particle& target) const override;
  double pair_energy(const Particle& a, const Particle& b) const override;
  bool site_exclusive() const override { return false; }
  std::vector<Mark> probe_marks() const override { return {kPlus, kMinus}; }
  std::optional<DilutenessReport> closed_form(SizeFunction q) const override;

 private:
  const StepFunction& repulsion(Spin a, Spin b) const;
  Region region_with_margin(const Particle& p, double margin) const;

  Params p_;
  IntensityMeasure intensity_;
};

bool rods_intersect(const Particle& a, const Particle& b, double half_length);
double rods_distance(const Particle& a, const Particle& b, double half_length);

// Hard rods of length 2 * half_length with centres on Z^2 or R^2.
class ThinRods : public GasModel {
 public:
  struct Params {
    bool lattice = false;
    double lambda = 0.0;
    double half_length = 0.5;
    MarkMeasure orientation;  // probability measure on angles
    double envelope_inflation = 0.0;
  };

  explicit ThinRods(Params p);

  const Params& params() const { return p_; }
  std::string family() const override { return "thin_rods"; }
  std::string describe() const override;
  const IntensityMeasure& intensity() const override { return intensity_; }
  Region impact_region(const Particle& p) const override;
  Region envelope_region(const Particle& p) const override;
  bool impacts(const Particle& source, const Particle& target) const override;
  double pair_energy(const Particle& a, const Particle& b) const override;
  bool site_exclusive() const override { return p_.lattice; }
  std::vector<Mark> probe_marks() const override;
  DilutenessReport diluteness(SizeFunction q, Relation r) const override;
  std::optional<DilutenessReport> closed_form(SizeFunction q) const override;

  // lambda * integral of the excluded area 4 l^2 |sin(g - t)| over rho(dt),
  // computed from segment geometry and quadrature
  double excluded_mass(double gamma) const;

 private:
  Params p_;
  IntensityMeasure intensity_;
};

// Peierls contours on the dual lattice: particles are catalog shapes rooted
// at dual sites, excluding each other when they share a vertex.
class PeierlsContours : public GasModel {
 public:
  PeierlsContours(double beta, std::shared_ptr<const ContourCatalog> catalog);

  double beta() const { return beta_; }
  const ContourCatalog& catalog() const { return *catalog_; }
  std::shared_ptr<const ContourCatalog> catalog_ptr() const { return catalog_; }

  std::string family() const override { return "peierls"; }
  std::string describe() const override;
  const IntensityMeasure& intensity() const override { return intensity_; }
  Region impact_region(const Particle& p) const override;
  bool impacts(const Particle& source, const Particle& target) const override;
  double pair_energy(const Particle& a, const Particle& b) const override;
  double self_energy(const Particle& p, const Region* volume) const override;
  bool site_exclusive() const override { return true; }
  double size(const Particle& p, SizeFunction q) const override;
  std::vector<Mark> probe_marks() const override;
  DilutenessReport diluteness(SizeFunction q, Relation r) const override;
  std::optional<DilutenessReport> closed_form(SizeFunction q) const override;

  Particle place(const ContourShape& shape, DualVertex root) const;
  // Absolute vertices and edges of a placed contour.
  std::vector<DualVertex> vertices(const Particle& p) const;
  std::vector<DualEdge> edges(const Particle& p) const;

 private:
  const ContourShape& shape_of(const Particle& p) const;

  double beta_;
  std::shared_ptr<const ContourCatalog> catalog_;
  IntensityMeasure intensity_;
};

// Base model re-expressed relative to a reference intensity: leaps are
// shifted by -log density, and delta_e is the supplied uniform bound.
class EffectiveModel : public GasModel {
 public:
  EffectiveModel(ModelPtr base, IntensityMeasure reference,
                 std::function<double(const Particle&)> density, double delta_e_tilde,
                 std::string label = "effective");

  const GasModel& base() const { return *base_; }
  double density(const Particle& p) const { return density_(p); }

  std::string family() const override { return label_; }
  std::string describe() const override;
  const IntensityMeasure& intensity() const override { return reference_; }
  double delta_e() const override { return delta_e_; }
  Region impact_region(const Particle& p) const override { return base_->impact_region(p); }
  Region envelope_region(const Particle& p) const override { return base_->envelope_region(p); }
  bool impacts(const Particle& s, const Particle& t) const override { return base_->impacts(s, t); }
  double pair_energy(const Particle& a, const Particle& b) const override {
    return base_->pair_energy(a, b);
  }
  double self_energy(const Particle& p, const Region* volume) const override;
  bool site_exclusive() const override { return base_->site_exclusive(); }
  double leap(const Particle& p, const ParticleConfiguration& config,
              const Region* volume) const override;
  double size(const Particle& p, SizeFunction q) const override { return base_->size(p, q); }
  std::vector<Mark> probe_marks() const override { return base_->probe_marks(); }

 private:
  double log_density(const Particle& p) const;

  ModelPtr base_;
  IntensityMeasure reference_;
  std::function<double(const Particle&)> density_;
  double delta_e_;
  std::string label_;
};

ModelPtr effective_model(ModelPtr base, IntensityMeasure reference_intensity,
                         std::function<double(const Particle&)> density, double delta_e_tilde);

// ---------------------------------------------------------------------------
// Closed-form coefficients

double alpha_discrete_wr(double lambda_plus, double lambda_minus, int k, int dim);
double alpha_continuum_wr(double lambda_plus, double lambda_minus, double r, int dim);
double alpha_generalized_wr(double lambda_plus, double lambda_minus, const StepFunction& h,
                            const StepFunction& j_minus, const StepFunction& j_plus, int dim);
// lambda * 4 l^2 * sup_g integral |sin(g - t)| rho(dt), rho a probability
double alpha_thin_rods(double lambda, double half_length, const MarkMeasure& rho);
// Per-site upper bound on alpha_P with a geometric tail; throws
// truncation-inconclusive when the bound cannot decide alpha_P < 1.
PeierlsSeries alpha_peierls(double beta, const ContourCatalog& catalog);

// ---------------------------------------------------------------------------
// Negligible sets (diagnostics)

enum class NegligibleFamily { kWidomRowlinson, kNematicRods, kNone };

// WR: a location carrying more than one particle, or an opposite pair at
// sup distance exactly r0. Nematic rods: two horizontal rods on one
// horizontal line or two vertical rods on one vertical line.
bool negligible_set_membership(NegligibleFamily family, const ParticleConfiguration& config,
                               double r0 = 0.0);

}  // namespace clansim
