#include "clansim/ffg_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <random>

#include "clansim/errors.hpp"

namespace clansim {

int Clan::depth() const {
  int d = 0;
  for (int g : generation) d = std::max(d, g);
  return d;
}

ClanStats Clan::stats() const { return {size(), roots.size(), depth()}; }

Clan build_clan(Substrate& substrate, const Region& window, const RelationFn& relation,
                const ClanOptions& options) {
  Clan clan;
  std::map<CylinderId, int> index;
  using Item = std::pair<double, int>;  // (birth, index), latest birth first
  std::priority_queue<Item> queue;

  auto add = [&](const Cylinder& c, int generation) {
    const int i = static_cast<int>(clan.cylinders.size());
    clan.cylinders.push_back(c);
    clan.ancestors.emplace_back();
    clan.generation.push_back(generation);
    index.emplace(c.id, i);
    queue.emplace(c.birth, i);
    if (clan.cylinders.size() > options.cap)
      throw Error(ErrorCode::kClanCapExceeded,
                  "clan exceeded " + std::to_string(options.cap) + " cylinders");
    return i;
  };

  for (const auto& c : substrate.reveal_window(window, 0.0)) {
    if (options.confine && !options.confine->contains(c.basis)) continue;
    clan.roots.push_back(add(c, 0));
  }

  double last_birth = std::numeric_limits<double>::infinity();
  int last_index = -1;
  while (!queue.empty()) {
    const int i = queue.top().second;
    queue.pop();
    const Cylinder c = clan.cylinders[static_cast<std::size_t>(i)];
    if (c.birth == last_birth)
      throw Error(ErrorCode::kBirthTimeCollision,
                  "cylinders " + std::to_string(last_index) + " and " + std::to_string(i) +
                      " share birth time " + format_real(c.birth));
    last_birth = c.birth;
    last_index = i;

    const Region r = relation(c.basis);
    for (const auto& cell : substrate.partition().cells_meeting(r)) {
      for (const auto& a : substrate.alive_at(cell, c.birth)) {
        if (a.id == c.id) continue;
        if (a.birth == c.birth)
          throw Error(ErrorCode::kBirthTimeCollision, "birth time " + format_real(c.birth) + " repeated");
        if (!r.contains(a.basis)) continue;
        if (options.confine && !options.confine->contains(a.basis)) continue;
        const int gen = clan.generation[static_cast<std::size_t>(i)] + 1;
        auto it = index.find(a.id);
        int j;
        if (it == index.end()) {
          j = add(a, gen);
        } else {
          j = it->second;
          auto& g = clan.generation[static_cast<std::size_t>(j)];
          g = std::max(g, gen);
        }
        clan.ancestors[static_cast<std::size_t>(i)].push_back(j);
      }
    }
  }
  return clan;
}

Clan build_clan(Substrate& substrate, const Region& window, const GasModel& model, Relation relation,
                const ClanOptions& options) {
  return build_clan(
      substrate, window, [&](const Particle& p) { return model.relation_region(p, relation); }, options);
}

namespace {

struct Judge {
  const Clan& clan;
  const GasModel& model;
  const ThinningContext& ctx;
  std::vector<Particle> bases;

  Judge(const Clan& c, const GasModel& m, const ThinningContext& x) : clan(c), model(m), ctx(x) {
    bases.reserve(clan.size());
    for (const auto& cyl : clan.cylinders) bases.push_back(ctx.map ? (*ctx.map)(cyl.basis) : cyl.basis);
  }

  // Keep decision for cylinder i given the decisions of `kept` on the
  // listed ancestors.
  bool decide(std::size_t i, const std::vector<int>& kept_ancestors) const {
    ParticleConfiguration conf;
    for (int j : kept_ancestors) conf.add(bases[static_cast<std::size_t>(j)]);
    double leap;
    if (ctx.volume) {
      if (ctx.boundary)
        for (const auto& e : ctx.boundary->entries())
          if (!ctx.volume->contains(e.particle)) conf.add(e.particle, e.multiplicity);
      leap = model.finite_volume_leap(*ctx.volume, bases[i], conf);
    } else {
      leap = model.leap(bases[i], conf, nullptr);
    }
    const double m = std::exp(-(leap - model.delta_e()));
    return clan.cylinders[i].flag < m;
  }
};

}  // namespace

std::vector<bool> thin_clan(const Clan& clan, const GasModel& model, const ThinningContext& ctx) {
  const std::size_t n = clan.size();
  Judge judge(clan, model, ctx);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ca = clan.cylinders[a];
    const auto& cb = clan.cylinders[b];
    if (ca.birth != cb.birth) return ca.birth < cb.birth;
    return ca.id < cb.id;
  });

  std::vector<bool> keep(n, false);
  std::vector<std::size_t> kept_so_far;
  std::vector<int> kept_anc;
  std::vector<char> is_ancestor(n, 0);
  for (std::size_t i : order) {
    kept_anc.clear();
    for (int j : clan.ancestors[i])
      if (keep[static_cast<std::size_t>(j)]) kept_anc.push_back(j);
    keep[i] = judge.decide(i, kept_anc);

    if (ctx.check_envelope) {
      const auto& c = clan.cylinders[i];
      for (int j : clan.ancestors[i]) is_ancestor[static_cast<std::size_t>(j)] = 1;
      for (std::size_t j : kept_so_far) {
        const auto& a = clan.cylinders[j];
        if (is_ancestor[j] || !(a.birth < c.birth && c.birth < a.death())) continue;
        if (model.impacts(judge.bases[j], judge.bases[i]))
          throw Error(ErrorCode::kEnvelopeViolation,
                      to_string(judge.bases[j]) + " impacts " + to_string(judge.bases[i]) +
                          " outside the envelope");
      }
      for (int j : clan.ancestors[i]) is_ancestor[static_cast<std::size_t>(j)] = 0;
    }
    if (keep[i]) kept_so_far.push_back(i);
  }
  return keep;
}

std::vector<bool> thin_clan_generational(const Clan& clan, const GasModel& model,
                                         const ThinningContext& ctx) {
  const std::size_t n = clan.size();
  Judge judge(clan, model, ctx);
  std::vector<int> decided(n, -1);  // -1 unknown, else 0/1

  // cylinders in decreasing birth order, used to propagate longest paths
  std::vector<std::size_t> by_birth(n);
  for (std::size_t i = 0; i < n; ++i) by_birth[i] = i;
  std::sort(by_birth.begin(), by_birth.end(), [&](std::size_t a, std::size_t b) {
    return clan.cylinders[a].birth > clan.cylinders[b].birth;
  });

  std::vector<int> gen(n, -1);
  std::vector<int> kept_anc;
  for (int root : clan.roots) {
    // generations A_i(root) by longest path inside the ancestry of root
    std::fill(gen.begin(), gen.end(), -1);
    gen[static_cast<std::size_t>(root)] = 0;
    int max_gen = 0;
    for (std::size_t u : by_birth) {
      if (gen[u] < 0) continue;
      for (int a : clan.ancestors[u]) {
        auto& g = gen[static_cast<std::size_t>(a)];
        g = std::max(g, gen[u] + 1);
        max_gen = std::max(max_gen, g);
      }
    }
    // K_{N} ... K_0: each generation judged against deeper kept ones
    std::vector<char> in_k(n, 0);
    for (int level = max_gen; level >= 0; --level) {
      for (std::size_t u = 0; u < n; ++u) {
        if (gen[u] != level) continue;
        kept_anc.clear();
        for (int a : clan.ancestors[u])
          if (in_k[static_cast<std::size_t>(a)]) kept_anc.push_back(a);
        const bool k = judge.decide(u, kept_anc);
        if (decided[u] >= 0 && decided[u] != static_cast<int>(k))
          throw Error(ErrorCode::kInvalidArgument, "inconsistent generational decisions");
        decided[u] = k ? 1 : 0;
        in_k[u] = k ? 1 : 0;
      }
    }
  }
  std::vector<bool> keep(n, false);
  for (std::size_t i = 0; i < n; ++i) keep[i] = decided[i] == 1;
  return keep;
}

SampleResult perfect_sample(const GasModel& model, const Region& window, std::uint64_t seed,
                            const SamplerOptions& options) {
  Substrate substrate(model.intensity(), model.delta_e(), seed, options.cell_size);
  ClanOptions co;
  co.cap = options.cap;
  Clan clan = build_clan(substrate, window, model, Relation::kImpact, co);
  auto keep = thin_clan(clan, model);
  SampleResult r{ParticleConfiguration(window), clan.stats()};
  for (int i : clan.roots)
    if (keep[static_cast<std::size_t>(i)]) r.config.add(clan.cylinders[static_cast<std::size_t>(i)].basis);
  return r;
}

SampleResult finite_volume_sample(const GasModel& model, const Region& volume,
                                  const ParticleConfiguration& boundary, std::uint64_t seed,
                                  const SamplerOptions& options) {
  Substrate substrate(model.intensity(), model.delta_e(), seed, options.cell_size);
  ClanOptions co;
  co.cap = options.cap;
  co.confine = volume;
  Clan clan = build_clan(substrate, volume, model, Relation::kImpact, co);
  ThinningContext ctx;
  ctx.volume = &volume;
  ctx.boundary = &boundary;
  auto keep = thin_clan(clan, model, ctx);
  SampleResult r{ParticleConfiguration(volume), clan.stats()};
  for (int i : clan.roots)
    if (keep[static_cast<std::size_t>(i)]) r.config.add(clan.cylinders[static_cast<std::size_t>(i)].basis);
  return r;
}

Trajectory forward_dynamics(const GasModel& model, const Region& volume,
                            const ParticleConfiguration& boundary,
                            const ParticleConfiguration& initial, double horizon, std::uint64_t seed) {
  if (!(horizon >= 0)) throw Error(ErrorCode::kInvalidArgument, "horizon must be non-negative");
  Rng rng = make_stream(seed, {0x64796e616d696373});
  const double scale = std::exp(-model.delta_e());
  const auto& intensity = model.intensity();

  // proposal law on volume x marks
  std::vector<std::pair<Particle, double>> atoms;
  double rate = 0.0;
  std::optional<Box> box;
  const MarkMeasure* marks = nullptr;
  if (!volume.is_empty()) {
    box = volume.bounds();
    if (!box) throw Error(ErrorCode::kInvalidArgument, "dynamics need a bounded volume");
    if (intensity.is_atomic()) {
      for (const auto& site : intensity.sites_in(*box))
        for (const auto& [m, w] : intensity.atoms_at(site)) {
          Particle p{site, m};
          if (w > 0 && volume.contains(p)) {
            atoms.emplace_back(p, w);
            rate += w;
          }
        }
    } else {
      const auto* c = std::get_if<IntensityMeasure::Continuum>(&intensity.kind());
      if (!c) throw Error(ErrorCode::kInvalidArgument, "unsupported intensity for dynamics");
      marks = &c->per_volume;
      rate = box->volume() * marks->total();
    }
  }
  rate *= scale;
  std::discrete_distribution<std::size_t> pick_atom;
  if (!atoms.empty()) {
    std::vector<double> w;
    for (const auto& a : atoms) w.push_back(a.second);
    pick_atom = std::discrete_distribution<std::size_t>(w.begin(), w.end());
  }

  ParticleConfiguration outside;
  for (const auto& e : boundary.entries())
    if (!volume.contains(e.particle)) outside.add(e.particle, e.multiplicity);

  std::vector<Particle> current;
  for (const auto& e : initial.entries())
    for (int k = 0; k < e.multiplicity; ++k) current.push_back(e.particle);

  Trajectory traj;
  double t = 0.0;
  while (true) {
    const double total = rate + static_cast<double>(current.size());
    if (total <= 0) break;
    t += std::exponential_distribution<double>(total)(rng);
    if (t > horizon) break;
    if (uniform01(rng) * total < rate) {
      ++traj.proposals;
      Particle p;
      if (marks) {
        p.x.dim = box->dim;
        for (int i = 0; i < box->dim; ++i) p.x[i] = box->lo[i] + (box->hi[i] - box->lo[i]) * uniform01(rng);
        p.mark = marks->sample(rng);
        if (!volume.contains(p)) continue;
      } else {
        p = atoms[pick_atom(rng)].first;
      }
      ParticleConfiguration conf = outside;
      for (const auto& q : current) conf.add(q);
      const double leap = model.finite_volume_leap(volume, p, conf);
      if (uniform01(rng) < std::exp(-(leap - model.delta_e()))) {
        current.push_back(p);
        traj.events.push_back({t, DynamicsEvent::Kind::kBirth, p});
      }
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, current.size() - 1);
      const std::size_t k = pick(rng);
      traj.events.push_back({t, DynamicsEvent::Kind::kDeath, current[k]});
      current.erase(current.begin() + static_cast<std::ptrdiff_t>(k));
    }
  }
  traj.final_state = ParticleConfiguration(volume);
  for (const auto& q : current) traj.final_state.add(q);
  return traj;
}

bool has_conflict(const GasModel& model, const ParticleConfiguration& config) {
  const auto& e = config.entries();
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i].multiplicity > 1 && model.pair_energy(e[i].particle, e[i].particle) == kInfinity) return true;
    for (std::size_t j = i + 1; j < e.size(); ++j)
      if (model.pair_energy(e[i].particle, e[j].particle) == kInfinity) return true;
  }
  return false;
}

}  // namespace clansim
