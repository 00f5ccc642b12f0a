#include "clansim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "clansim/errors.hpp"

namespace clansim {

long ExactDistribution::index_of(const ParticleConfiguration& c) const {
  for (std::size_t i = 0; i < support.size(); ++i)
    if (support[i] == c) return static_cast<long>(i);
  return -1;
}

double ExactDistribution::probability(const ParticleConfiguration& c) const {
  const long i = index_of(c);
  return i < 0 ? 0.0 : probabilities[static_cast<std::size_t>(i)];
}

ExactDistribution enumerate_gibbs(const GasModel& model, const Region& volume,
                                  const ParticleConfiguration& boundary, std::size_t max_states) {
  if (!model.site_exclusive())
    throw Error(ErrorCode::kMultiplicityUnbounded,
                model.family() + " allows several particles per site; no exact enumeration");
  const auto& intensity = model.intensity();
  if (!intensity.is_atomic()) throw Error(ErrorCode::kInvalidArgument, "exact enumeration needs atoms");

  ParticleConfiguration outside;
  for (const auto& e : boundary.entries())
    if (!volume.contains(e.particle)) outside.add(e.particle, e.multiplicity);

  // candidate particles per site, with their atom masses
  std::vector<std::vector<std::pair<Particle, double>>> candidates;
  if (!volume.is_empty()) {
    auto box = volume.bounds();
    if (!box) throw Error(ErrorCode::kInvalidArgument, "volume must be bounded");
    for (const auto& site : intensity.sites_in(*box)) {
      if (!volume.contains_location(site)) continue;
      std::vector<std::pair<Particle, double>> here;
      for (const auto& [m, w] : intensity.atoms_at(site)) {
        Particle p{site, m};
        if (!(w > 0) || !volume.contains(p)) continue;
        if (model.finite_volume_leap(volume, p, outside) == kInfinity) continue;
        here.emplace_back(p, w);
      }
      if (!here.empty()) candidates.push_back(std::move(here));
    }
  }

  ExactDistribution dist;
  std::vector<double> log_weights;
  std::vector<Particle> chosen;
  std::size_t visited = 0;

  std::function<void(std::size_t, double)> visit = [&](std::size_t k, double log_w) {
    if (++visited > max_states)
      throw Error(ErrorCode::kStateSpaceTooLarge,
                  "more than " + std::to_string(max_states) + " admissible partial configurations");
    if (k == candidates.size()) {
      ParticleConfiguration c(volume);
      for (const auto& p : chosen) c.add(p);
      dist.support.push_back(std::move(c));
      log_weights.push_back(log_w);
      return;
    }
    visit(k + 1, log_w);
    ParticleConfiguration conf = outside;
    for (const auto& p : chosen) conf.add(p);
    for (const auto& [p, w] : candidates[k]) {
      const double leap = model.finite_volume_leap(volume, p, conf);
      if (leap == kInfinity) continue;
      chosen.push_back(p);
      visit(k + 1, log_w + std::log(w) - leap);
      chosen.pop_back();
    }
  };
  visit(0, 0.0);

  for (double lw : log_weights) dist.normalizer += std::exp(lw);
  if (!(dist.normalizer > 0) || !std::isfinite(dist.normalizer))
    throw Error(ErrorCode::kInvalidArgument, "normalizer is not a positive finite number");
  dist.probabilities.reserve(log_weights.size());
  for (double lw : log_weights) dist.probabilities.push_back(std::exp(lw) / dist.normalizer);
  return dist;
}

Region contour_volume(int n) {
  std::vector<Location> sites;
  for (int x = -1; x <= n - 1; ++x)
    for (int y = -1; y <= n - 1; ++y) sites.push_back(Location{static_cast<double>(x), static_cast<double>(y)});
  return Region::sites(std::move(sites));
}

ExactDistribution enumerate_contour_gas(const PeierlsContours& model, int n) {
  if (n < 1 || n > 4) throw Error(ErrorCode::kInvalidArgument, "square side must be 1..4");
  const int side = n + 1;  // dual coordinates -1..n-1
  auto bit = [&](int x, int y) { return (x + 1) * side + (y + 1); };
  struct Candidate {
    Particle p;
    std::uint32_t mask;
    double log_w;
  };
  // candidates by root bit; the root is the smallest vertex, so every other
  // vertex has a larger bit index
  std::vector<std::vector<Candidate>> rooted(static_cast<std::size_t>(side * side));
  const auto& catalog = model.catalog();
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto& shape = catalog.shapes()[i];
    for (int rx = -1; rx < n; ++rx)
      for (int ry = -1; ry < n; ++ry) {
        std::uint32_t mask = 0;
        bool inside = true;
        for (const auto& v : shape.vertices) {
          const int x = v.x + rx, y = v.y + ry;
          if (x < -1 || y < -1 || x > n - 1 || y > n - 1) {
            inside = false;
            break;
          }
          mask |= std::uint32_t{1} << bit(x, y);
        }
        if (!inside) continue;
        Particle p{Location{static_cast<double>(rx), static_cast<double>(ry)},
                   ShapeId{static_cast<std::int32_t>(i)}};
        rooted[static_cast<std::size_t>(bit(rx, ry))].push_back(
            {p, mask, -2.0 * model.beta() * shape.length()});
      }
  }

  const Region volume = contour_volume(n);
  ExactDistribution dist;
  std::vector<double> log_weights;
  std::vector<const Candidate*> chosen;
  std::function<void(int, std::uint32_t, double)> visit = [&](int v, std::uint32_t used, double log_w) {
    if (v == side * side) {
      ParticleConfiguration c(volume);
      for (const auto* k : chosen) c.add(k->p);
      dist.support.push_back(std::move(c));
      log_weights.push_back(log_w);
      return;
    }
    visit(v + 1, used, log_w);
    if (used & (std::uint32_t{1} << v)) return;
    for (const auto& k : rooted[static_cast<std::size_t>(v)]) {
      if (k.mask & used) continue;
      chosen.push_back(&k);
      visit(v + 1, used | k.mask, log_w + k.log_w);
      chosen.pop_back();
    }
  };
  visit(0, 0, 0.0);
  for (double lw : log_weights) dist.normalizer += std::exp(lw);
  for (double lw : log_weights) dist.probabilities.push_back(std::exp(lw) / dist.normalizer);
  return dist;
}

std::vector<double> ising_distribution(int n, double beta) {
  if (n < 1 || n * n > 20) throw Error(ErrorCode::kInvalidArgument, "square side must be 1..4");
  const std::uint64_t states = std::uint64_t{1} << (n * n);
  std::vector<double> p(states);
  int bonds = 0;
  for (std::uint64_t bits = 0; bits < states; ++bits) {
    const SpinSquare s = SpinSquare::from_bits(n, bits);
    int sum = 0;
    bonds = 0;
    // every nearest-neighbour bond with at least one end in the square
    for (int x = -1; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        sum += s.at(x, y) * s.at(x + 1, y);
        sum += s.at(y, x) * s.at(y, x + 1);
        bonds += 2;
      }
    p[bits] = std::exp(beta * (sum - bonds));
  }
  double z = 0.0;
  for (double v : p) z += v;
  for (double& v : p) v /= z;
  return p;
}

double check_contour_identity(int n, double beta) {
  const auto ising = ising_distribution(n, beta);
  auto catalog = std::make_shared<const ContourCatalog>(ContourCatalog::within_box(n));
  const PeierlsContours model(beta, catalog);
  const Region volume = contour_volume(n);
  const auto dist =
      n <= 3 ? enumerate_gibbs(model, volume, ParticleConfiguration()) : enumerate_contour_gas(model, n);

  std::vector<double> from_contours(ising.size(), 0.0);
  for (std::size_t i = 0; i < dist.support.size(); ++i) {
    ContourSet set;
    set.n = n;
    for (const auto& e : dist.support[i].entries()) {
      auto edges = model.edges(e.particle);
      std::sort(edges.begin(), edges.end());
      set.contours.push_back(std::move(edges));
    }
    std::sort(set.contours.begin(), set.contours.end());
    const SpinSquare s = contours_to_spins(set);
    std::uint64_t bits = 0;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (s.at(x, y) < 0) bits |= std::uint64_t{1} << (x * n + y);
    from_contours[bits] += dist.probabilities[i];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < ising.size(); ++i) worst = std::max(worst, std::abs(ising[i] - from_contours[i]));
  return worst;
}

void EmpiricalDistribution::add(const ParticleConfiguration& c, std::size_t count) {
  counts_[c] += count;
  total_ += count;
}

void EmpiricalDistribution::merge(const EmpiricalDistribution& other) {
  for (const auto& [c, k] : other.counts_) add(c, k);
}

std::size_t EmpiricalDistribution::count(const ParticleConfiguration& c) const {
  auto it = counts_.find(c);
  return it == counts_.end() ? 0 : it->second;
}

double EmpiricalDistribution::frequency(const ParticleConfiguration& c) const {
  return total_ == 0 ? 0.0 : static_cast<double>(count(c)) / static_cast<double>(total_);
}

double tv_distance(const EmpiricalDistribution& empirical, const ExactDistribution& exact) {
  std::map<ParticleConfiguration, double> p;
  for (std::size_t i = 0; i < exact.support.size(); ++i) p[exact.support[i]] += exact.probabilities[i];
  double s = 0.0;
  for (const auto& [c, q] : p) s += std::abs(empirical.frequency(c) - q);
  for (const auto& [c, k] : empirical.counts())
    if (!p.count(c)) s += empirical.frequency(c);
  return 0.5 * s;
}

double tv_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  double s = 0.0;
  for (const auto& [c, k] : a.counts()) s += std::abs(a.frequency(c) - b.frequency(c));
  for (const auto& [c, k] : b.counts())
    if (!a.count(c)) s += b.frequency(c);
  return 0.5 * s;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw Error(ErrorCode::kInvalidArgument, "distributions differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace clansim
