#include "clansim/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "clansim/errors.hpp"

namespace clansim {

ApproximationFamily ApproximationFamily::identity() { return {}; }

ApproximationFamily ApproximationFamily::translation(Location v) {
  ApproximationFamily f;
  f.kind_ = Kind::kTranslation;
  f.shift_ = v;
  return f;
}

ApproximationFamily ApproximationFamily::spatial_discretization() {
  ApproximationFamily f;
  f.kind_ = Kind::kSpatialDiscretization;
  return f;
}

ApproximationFamily ApproximationFamily::spin_discretization() {
  ApproximationFamily f;
  f.kind_ = Kind::kSpinDiscretization;
  return f;
}

ApproximationFamily ApproximationFamily::shrink() {
  ApproximationFamily f;
  f.kind_ = Kind::kShrink;
  return f;
}

ApproximationFamily ApproximationFamily::compose(const ApproximationFamily& outer,
                                                 const ApproximationFamily& inner) {
  ApproximationFamily f;
  f.kind_ = Kind::kComposition;
  f.outer_ = std::make_shared<ApproximationFamily>(outer);
  f.inner_ = std::make_shared<ApproximationFamily>(inner);
  return f;
}

std::string ApproximationFamily::describe() const {
  switch (kind_) {
    case Kind::kIdentity: return "identity";
    case Kind::kTranslation: {
      std::string s = "translation(";
      for (int i = 0; i < shift_.dim; ++i) s += (i ? "," : "") + format_real(shift_[i]);
      return s + ")";
    }
    case Kind::kSpatialDiscretization: return "spatial_discretization";
    case Kind::kSpinDiscretization: return "spin_discretization";
    case Kind::kShrink: return "shrink";
    case Kind::kComposition: return outer_->describe() + "*" + inner_->describe();
  }
  return "";
}

Particle ApproximationFamily::map(double eps, const Particle& p) const {
  if (eps < 0) throw Error(ErrorCode::kInvalidArgument, "epsilon must be non-negative");
  if (eps == 0) return p;
  Particle q = p;
  switch (kind_) {
    case Kind::kIdentity:
      break;
    case Kind::kTranslation:
      if (shift_.dim != p.x.dim) throw Error(ErrorCode::kInvalidArgument, "translation dimension mismatch");
      for (int i = 0; i < p.x.dim; ++i) q.x[i] = p.x[i] + eps * shift_[i];
      break;
    case Kind::kSpatialDiscretization:
      for (int i = 0; i < p.x.dim; ++i) q.x[i] = eps * std::floor(p.x[i] / eps);
      break;
    case Kind::kSpinDiscretization:
      if (const auto* a = std::get_if<Angle>(&p.mark)) q.mark = Angle{eps * std::floor(a->radians / eps)};
      break;
    case Kind::kShrink:
      for (int i = 0; i < p.x.dim; ++i) q.x[i] = eps * p.x[i];
      break;
    case Kind::kComposition:
      q = outer_->map(eps, inner_->map(eps, p));
      break;
  }
  return q;
}

double ApproximationFamily::modulus(double eps) const {
  if (eps <= 0) return 0.0;
  switch (kind_) {
    case Kind::kIdentity: return 0.0;
    case Kind::kTranslation: {
      double m = 0.0;
      for (int i = 0; i < shift_.dim; ++i) m = std::max(m, std::abs(shift_[i]));
      return eps * m;
    }
    case Kind::kSpatialDiscretization:
    case Kind::kSpinDiscretization:
      return eps;
    case Kind::kShrink:
      return kInfinity;
    case Kind::kComposition:
      return outer_->modulus(eps) + inner_->modulus(eps);
  }
  return kInfinity;
}

ParticleMap ApproximationFamily::at(double eps) const {
  ApproximationFamily self = *this;
  return [self, eps](const Particle& p) { return self.map(eps, p); };
}

CoupledRun::CoupledRun(ApproximationFamily family, std::vector<EpsilonLevel> levels,
                       NegligibleFamily negligible, double negligible_r0)
    : family_(std::move(family)),
      levels_(std::move(levels)),
      negligible_(negligible),
      negligible_r0_(negligible_r0) {
  if (levels_.empty() || levels_.back().epsilon != 0.0)
    throw Error(ErrorCode::kInvalidArgument, "epsilon grid must end at 0");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (!levels_[i].model) throw Error(ErrorCode::kInvalidArgument, "missing model for a level");
    if (i > 0 && !(levels_[i].epsilon < levels_[i - 1].epsilon))
      throw Error(ErrorCode::kInvalidArgument, "epsilon grid must be strictly decreasing");
    if (levels_[i].model->delta_e() != levels_.back().model->delta_e())
      throw Error(ErrorCode::kInvalidArgument, "levels must share delta_e");
  }
}

std::vector<double> CoupledRun::grid() const {
  std::vector<double> g;
  for (const auto& l : levels_) g.push_back(l.epsilon);
  return g;
}

std::size_t CoupledOutput::level_of(double eps) const {
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] == eps) return i;
  throw Error(ErrorCode::kInvalidArgument, "epsilon " + format_real(eps) + " not on the grid");
}

bool CoupledOutput::identity_holds(const ApproximationFamily& family, std::size_t level) const {
  const std::size_t zero = grid.size() - 1;
  const double eps = grid.at(level);
  ParticleConfiguration expected(window);
  for (int r : clan.roots) {
    const auto i = static_cast<std::size_t>(r);
    if (!keep[zero][i]) continue;
    Particle q = family.map(eps, clan.cylinders[i].basis);
    if (window.contains(q)) expected.add(q);
  }
  return expected == samples.at(level);
}

CoupledOutput coupled_sample(const CoupledRun& run, const Region& window, std::uint64_t seed,
                             const CouplingOptions& options) {
  const auto& levels = run.levels();
  const double a = run.family().modulus(levels.front().epsilon);
  if (!std::isfinite(a))
    throw Error(ErrorCode::kInvalidArgument, "family " + run.family().describe() + " has an unbounded modulus");
  const GasModel& reference = run.reference();

  CoupledOutput out;
  out.grid = run.grid();
  out.window = window;
  const Region roots_window = a > 0 ? window.inflated(a) : window;

  Substrate substrate(reference.intensity(), run.delta_e(), seed, options.cell_size);
  ClanOptions co;
  co.cap = options.cap;
  out.clan = build_clan(substrate, roots_window, reference, Relation::kEnvelope, co);

  for (const auto& level : levels) {
    ParticleMap map = run.family().at(level.epsilon);
    ThinningContext ctx;
    ctx.map = &map;
    ctx.check_envelope = options.check_envelope;
    auto keep = thin_clan(out.clan, *level.model, ctx);
    ParticleConfiguration z(window);
    for (int r : out.clan.roots) {
      const auto i = static_cast<std::size_t>(r);
      if (!keep[i]) continue;
      Particle q = map(out.clan.cylinders[i].basis);
      if (window.contains(q)) z.add(q);
    }
    out.negligible.push_back(negligible_set_membership(run.negligible(), z, run.negligible_r0()));
    out.samples.push_back(std::move(z));
    out.keep.push_back(std::move(keep));
  }
  return out;
}

bool coupling_identity_holds(const CoupledRun& run, const CoupledOutput& out, double eps) {
  return out.identity_holds(run.family(), out.level_of(eps));
}

namespace {

template <class Pred>
std::optional<double> largest_prefix(const std::vector<double>& grid, Pred ok) {
  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] > 0) positive.push_back(i);
  std::sort(positive.begin(), positive.end(), [&](auto a, auto b) { return grid[a] < grid[b]; });
  if (positive.empty()) return 0.0;
  std::optional<double> best;
  for (auto i : positive) {
    if (!ok(i)) break;
    best = grid[i];
  }
  return best;
}

}  // namespace

std::optional<double> stabilization_epsilon(const CoupledRun& run, const CoupledOutput& out) {
  return largest_prefix(out.grid, [&](std::size_t i) { return out.identity_holds(run.family(), i); });
}

std::optional<double> smallest_identity_epsilon(const CoupledRun& run, const CoupledOutput& out) {
  std::optional<double> best;
  for (std::size_t i = 0; i < out.grid.size(); ++i)
    if (out.grid[i] > 0 && out.identity_holds(run.family(), i)) best = out.grid[i];
  return best;
}

std::optional<double> vague_convergence_check(const std::vector<double>& grid,
                                              const std::vector<ParticleConfiguration>& configs,
                                              const Region& K, double delta) {
  if (grid.size() != configs.size()) throw Error(ErrorCode::kInvalidArgument, "grid and configs differ in size");
  std::size_t zero = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] == 0) zero = i;
  if (zero == grid.size()) throw Error(ErrorCode::kInvalidArgument, "grid lacks 0");
  return largest_prefix(grid, [&](std::size_t i) { return in_neighborhood(configs[zero], configs[i], K, delta); });
}

ModelPtr shrink_adapter(const WidomRowlinson& base, double eps) {
  if (!base.lattice()) throw Error(ErrorCode::kInvalidArgument, "shrink adapter needs a lattice model");
  if (eps < 0) throw Error(ErrorCode::kInvalidArgument, "epsilon must be non-negative");
  const auto& p = base.params();
  if (eps == 0)
    return WidomRowlinson::continuum(p.dim, p.lambda_plus, p.lambda_minus, p.radius, p.envelope_inflation);
  WidomRowlinson::Params q = p;
  q.spacing = eps * p.spacing;
  q.lambda_plus = p.lambda_plus * std::pow(eps, p.dim);
  q.lambda_minus = p.lambda_minus * std::pow(eps, p.dim);
  q.same_site_exclusion = true;
  return std::make_shared<WidomRowlinson>(q);
}

CoupledRun identity_run(ModelPtr model, const std::vector<double>& grid) {
  std::vector<EpsilonLevel> levels;
  for (double e : grid) levels.push_back({e, model});
  return CoupledRun(ApproximationFamily::identity(), std::move(levels));
}

CoupledRun fugacity_run(int dim, double lambda_plus, double lambda_minus, int k,
                        const std::vector<double>& grid) {
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "empty grid");
  auto reference = WidomRowlinson::discrete(dim, lambda_plus, lambda_minus, k);
  const double bound = -std::log1p(grid.front());
  std::vector<EpsilonLevel> levels;
  for (double e : grid) {
    auto base = WidomRowlinson::discrete(dim, lambda_plus * (1 + e), lambda_minus * (1 + e), k);
    levels.push_back({e, effective_model(base, reference->intensity(),
                                         [e](const Particle&) { return 1.0 + e; }, bound)});
  }
  return CoupledRun(ApproximationFamily::identity(), std::move(levels));
}

CoupledRun discretization_run(int dim, double lambda_plus, double lambda_minus, double r0,
                              const std::vector<double>& grid) {
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "empty grid");
  WidomRowlinson::Params p;
  p.dim = dim;
  p.lambda_plus = lambda_plus;
  p.lambda_minus = lambda_minus;
  p.radius = r0;
  p.spacing = 1.0;
  p.same_site_exclusion = true;
  p.envelope_inflation = ApproximationFamily::spatial_discretization().modulus(grid.front());
  const WidomRowlinson unit(p);
  std::vector<EpsilonLevel> levels;
  for (double e : grid) levels.push_back({e, shrink_adapter(unit, e)});
  return CoupledRun(ApproximationFamily::spatial_discretization(), std::move(levels),
                    NegligibleFamily::kWidomRowlinson, r0);
}

std::vector<double> dyadic_grid(int k) {
  std::vector<double> g;
  for (int i = 1; i <= k; ++i) g.push_back(std::ldexp(1.0, -i));
  g.push_back(0.0);
  return g;
}

}  // namespace clansim
