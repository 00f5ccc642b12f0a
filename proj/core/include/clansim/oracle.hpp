#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "clansim/config_space.hpp"
#include "clansim/contours.hpp"
#include "clansim/models.hpp"

namespace clansim {

inline constexpr std::size_t kDefaultMaxStates = 10'000'000;

struct ExactDistribution {
  std::vector<ParticleConfiguration> support;
  std::vector<double> probabilities;
  // sum over admissible configurations of prod nu({p}) e^{-H}
  double normalizer = 0.0;

  // index into support, or -1
  long index_of(const ParticleConfiguration& c) const;
  double probability(const ParticleConfiguration& c) const;
};

// Exact finite-volume kernel of a site-exclusive lattice model on the sites
// of `volume`, with boundary condition eta outside it. Admissible
// configurations are enumerated depth first; `max_states` bounds the number
// of admissible partial assignments visited.
ExactDistribution enumerate_gibbs(const GasModel& model, const Region& volume,
                                  const ParticleConfiguration& boundary,
                                  std::size_t max_states = kDefaultMaxStates);

// Dual sites {-1..n-1}^2 where contours of the n x n square are rooted.
Region contour_volume(int n);

// Kernel of the contour gas on contour_volume(n) by vertex bitmasks; same
// law as enumerate_gibbs on that volume, usable up to n = 4.
ExactDistribution enumerate_contour_gas(const PeierlsContours& model, int n);

// Ising probabilities on the n x n square with + boundary, from spins, and
// from the contour gas kernel mapped back to spins (generic enumeration for
// n <= 3, bitmask enumeration for n = 4); returns the largest
// absolute difference over all 2^(n*n) assignments.
double check_contour_identity(int n, double beta);

// Ising law on the n x n square with + boundary, indexed by SpinSquare bits.
std::vector<double> ising_distribution(int n, double beta);

class EmpiricalDistribution {
 public:
  void add(const ParticleConfiguration& c, std::size_t count = 1);
  void merge(const EmpiricalDistribution& other);
  std::size_t total() const { return total_; }
  std::size_t count(const ParticleConfiguration& c) const;
  double frequency(const ParticleConfiguration& c) const;
  const std::map<ParticleConfiguration, std::size_t>& counts() const { return counts_; }

 private:
  std::map<ParticleConfiguration, std::size_t> counts_;
  std::size_t total_ = 0;
};

// 1/2 sum |p_hat - p| over the union of supports.
double tv_distance(const EmpiricalDistribution& empirical, const ExactDistribution& exact);
double tv_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b);
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace clansim
