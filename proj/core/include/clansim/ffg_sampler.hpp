#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "clansim/config_space.hpp"
#include "clansim/free_process.hpp"
#include "clansim/models.hpp"

namespace clansim {

inline constexpr std::size_t kDefaultClanCap = 1'000'000;

// Region in which ancestors of a basis are looked for.
using RelationFn = std::function<Region(const Particle&)>;
// Optional map applied to bases before thinning.
using ParticleMap = std::function<Particle(const Particle&)>;

struct ClanStats {
  std::size_t size = 0;
  std::size_t roots = 0;
  int depth = 0;
};

// Backward ancestry graph of the cylinders alive at time 0 in a window.
struct Clan {
  std::vector<Cylinder> cylinders;
  // first-generation ancestors of cylinder i (indices into cylinders)
  std::vector<std::vector<int>> ancestors;
  std::vector<int> roots;
  // longest ancestry path from a root down to i
  std::vector<int> generation;

  std::size_t size() const { return cylinders.size(); }
  int depth() const;
  ClanStats stats() const;
};

struct ClanOptions {
  std::size_t cap = kDefaultClanCap;
  // When set, only cylinders with basis in this region take part (finite
  // volume runs).
  std::optional<Region> confine;
};

Clan build_clan(Substrate& substrate, const Region& window, const RelationFn& relation,
                const ClanOptions& options = {});
Clan build_clan(Substrate& substrate, const Region& window, const GasModel& model, Relation relation,
                const ClanOptions& options = {});

struct ThinningContext {
  const ParticleMap* map = nullptr;                      // basis map, identity when null
  const Region* volume = nullptr;                        // finite-volume leaps when set
  const ParticleConfiguration* boundary = nullptr;       // eta, used outside the volume
  bool check_envelope = false;                           // throw envelope-violation
};

// Decisions in increasing birth order: C is kept iff its flag is below
// exp(-(leap - delta_e)) relative to its kept first-generation ancestors.
std::vector<bool> thin_clan(const Clan& clan, const GasModel& model, const ThinningContext& ctx = {});
// Generation-indexed recursion: deepest generation first, each cylinder
// judged against the kept members of deeper generations among its ancestors.
std::vector<bool> thin_clan_generational(const Clan& clan, const GasModel& model,
                                         const ThinningContext& ctx = {});

struct SamplerOptions {
  std::size_t cap = kDefaultClanCap;
  double cell_size = 0.5;
};

struct SampleResult {
  ParticleConfiguration config;
  ClanStats stats;
};

// Exact draw from the unique gas measure restricted to the window.
SampleResult perfect_sample(const GasModel& model, const Region& window, std::uint64_t seed,
                            const SamplerOptions& options = {});
// Exact draw from the finite-volume kernel on `volume` with boundary eta.
SampleResult finite_volume_sample(const GasModel& model, const Region& volume,
                                  const ParticleConfiguration& boundary, std::uint64_t seed,
                                  const SamplerOptions& options = {});

struct DynamicsEvent {
  enum class Kind { kBirth, kDeath };
  double time = 0.0;
  Kind kind = Kind::kBirth;
  Particle particle;
};

struct Trajectory {
  std::vector<DynamicsEvent> events;
  ParticleConfiguration final_state;
  std::size_t proposals = 0;
};

// Birth proposals at rate e^{-delta_e} nu(volume), accepted with probability
// exp(-(leap - delta_e)); unit-rate deaths.
Trajectory forward_dynamics(const GasModel& model, const Region& volume,
                            const ParticleConfiguration& boundary,
                            const ParticleConfiguration& initial, double horizon, std::uint64_t seed);

// True when some pair of particles in the configuration has infinite pair
// energy under the model.
bool has_conflict(const GasModel& model, const ParticleConfiguration& config);

}  // namespace clansim
