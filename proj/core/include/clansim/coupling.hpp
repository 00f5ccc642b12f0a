#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clansim/config_space.hpp"
#include "clansim/ffg_sampler.hpp"
#include "clansim/models.hpp"

namespace clansim {

// Particle maps D_eps with displacement modulus a(eps); D_0 is the identity.
class ApproximationFamily {
 public:
  enum class Kind { kIdentity, kTranslation, kSpatialDiscretization, kSpinDiscretization, kShrink, kComposition };

  static ApproximationFamily identity();
  // x -> x + eps v
  static ApproximationFamily translation(Location v);
  // x -> eps floor(x / eps) coordinatewise
  static ApproximationFamily spatial_discretization();
  // angle -> eps floor(angle / eps)
  static ApproximationFamily spin_discretization();
  // x -> eps x for eps > 0; unbounded modulus
  static ApproximationFamily shrink();
  // D_eps = outer_eps o inner_eps
  static ApproximationFamily compose(const ApproximationFamily& outer, const ApproximationFamily& inner);

  Kind kind() const { return kind_; }
  std::string describe() const;
  Particle map(double eps, const Particle& p) const;
  double modulus(double eps) const;
  ParticleMap at(double eps) const;

 private:
  Kind kind_ = Kind::kIdentity;
  Location shift_;
  std::shared_ptr<const ApproximationFamily> outer_, inner_;
};

struct EpsilonLevel {
  double epsilon = 0.0;
  ModelPtr model;
};

// Shared-randomness run: one clan for every level, bases mapped per level.
class CoupledRun {
 public:
  // levels in strictly decreasing epsilon, the last one at 0; all models
  // must share delta_e. The clan is built from the eps = 0 model's envelope
  // relation over its intensity.
  CoupledRun(ApproximationFamily family, std::vector<EpsilonLevel> levels,
             NegligibleFamily negligible = NegligibleFamily::kNone, double negligible_r0 = 0.0);

  const ApproximationFamily& family() const { return family_; }
  const std::vector<EpsilonLevel>& levels() const { return levels_; }
  std::vector<double> grid() const;
  const GasModel& reference() const { return *levels_.back().model; }
  double delta_e() const { return levels_.back().model->delta_e(); }
  NegligibleFamily negligible() const { return negligible_; }
  double negligible_r0() const { return negligible_r0_; }

 private:
  ApproximationFamily family_;
  std::vector<EpsilonLevel> levels_;
  NegligibleFamily negligible_;
  double negligible_r0_;
};

struct CouplingOptions {
  std::size_t cap = kDefaultClanCap;
  double cell_size = 0.5;
  bool check_envelope = true;
};

struct CoupledOutput {
  std::vector<double> grid;
  // per level: kept roots whose mapped basis lies in B, mapped
  std::vector<ParticleConfiguration> samples;
  std::vector<std::vector<bool>> keep;
  Clan clan;
  Region window;
  std::vector<bool> negligible;  // per level

  // Z^eps_B == D_eps(Z^0 on the roots mapped into B)
  bool identity_holds(const ApproximationFamily& family, std::size_t level) const;
  std::size_t level_of(double eps) const;
};

CoupledOutput coupled_sample(const CoupledRun& run, const Region& window, std::uint64_t seed,
                             const CouplingOptions& options = {});

bool coupling_identity_holds(const CoupledRun& run, const CoupledOutput& out, double eps);

// Largest grid eps with the identity at every positive grid value <= eps;
// nullopt ("none on grid") when it fails at the smallest positive value.
std::optional<double> stabilization_epsilon(const CoupledRun& run, const CoupledOutput& out);
// Smallest positive grid eps at which the identity holds.
std::optional<double> smallest_identity_epsilon(const CoupledRun& run, const CoupledOutput& out);

// Largest grid eps such that in_neighborhood(xi^0, xi^e, K, delta) holds
// for every grid e <= eps; nullopt when the smallest positive value fails.
std::optional<double> vague_convergence_check(const std::vector<double>& grid,
                                              const std::vector<ParticleConfiguration>& configs,
                                              const Region& K, double delta);

// Discrete WR viewed in shrunken coordinates: sites eps Z^d, per-site
// fugacity eps^d lambda, exclusion radius r0 = base radius in the shrunken
// units, same-site exclusion. eps = 0 gives the continuum model.
ModelPtr shrink_adapter(const WidomRowlinson& base, double eps);

// Ready-made runs.
CoupledRun identity_run(ModelPtr model, const std::vector<double>& grid);
// Discrete WR with fugacities lambda (1 + eps) over the eps = 0 reference.
CoupledRun fugacity_run(int dim, double lambda_plus, double lambda_minus, int k,
                        const std::vector<double>& grid);
// Continuum WR against its spatial discretizations.
CoupledRun discretization_run(int dim, double lambda_plus, double lambda_minus, double r0,
                              const std::vector<double>& grid);

// {2^-1, ..., 2^-k, 0}
std::vector<double> dyadic_grid(int k);

}  // namespace clansim
