#include "clansim/free_process.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "clansim/errors.hpp"

namespace clansim {

bool operator==(const CellId& a, const CellId& b) { return a.index == b.index && a.cls == b.cls; }
bool operator<(const CellId& a, const CellId& b) {
  if (a.index != b.index) return a.index < b.index;
  return a.cls < b.cls;
}

std::string to_string(const CellId& c) {
  return "(" + std::to_string(c.index[0]) + "," + std::to_string(c.index[1]) + "," +
         std::to_string(c.index[2]) + ";" + std::to_string(c.cls) + ")";
}

bool operator==(const CylinderId& a, const CylinderId& b) {
  return a.cell == b.cell && a.reveal == b.reveal;
}
bool operator<(const CylinderId& a, const CylinderId& b) {
  if (!(a.cell == b.cell)) return a.cell < b.cell;
  return a.reveal < b.reveal;
}

bool operator==(const Cylinder& a, const Cylinder& b) {
  return a.basis == b.basis && a.birth == b.birth && a.lifespan == b.lifespan && a.flag == b.flag &&
         a.id == b.id;
}

namespace {

// (0, 1]
double open_unit(Rng& rng) { return 1.0 - uniform01(rng); }

}  // namespace

CellPartition::CellPartition(IntensityMeasure intensity, double delta_e, double cell_size)
    : intensity_(std::move(intensity)), delta_e_(delta_e), cell_size_(cell_size) {
  if (!(cell_size > 0)) throw Error(ErrorCode::kInvalidArgument, "cell size must be positive");
  if (!std::isfinite(delta_e)) throw Error(ErrorCode::kInvalidArgument, "delta_e must be finite");
  const auto& k = intensity_.kind();
  if (const auto* l = std::get_if<IntensityMeasure::Lattice>(&k)) {
    unit_mass_ = l->per_site.total();
  } else if (const auto* c = std::get_if<IntensityMeasure::Continuum>(&k)) {
    unit_mass_ = c->per_volume.total() * std::pow(cell_size_, c->dim);
  } else if (std::holds_alternative<IntensityMeasure::Pushforward>(k)) {
    throw Error(ErrorCode::kInvalidArgument, "substrates need a lattice, continuum or contour intensity");
  }
}

std::int64_t CellPartition::grid_index(double coordinate) const {
  const auto& k = intensity_.kind();
  if (const auto* l = std::get_if<IntensityMeasure::Lattice>(&k))
    return static_cast<std::int64_t>(std::llround(coordinate / l->spacing));
  if (std::holds_alternative<IntensityMeasure::Contours>(k))
    return static_cast<std::int64_t>(std::llround(coordinate));
  return static_cast<std::int64_t>(std::floor(coordinate / cell_size_));
}

double CellPartition::mass(const CellId& cell) const {
  const double scale = std::exp(-delta_e_);
  if (const auto* c = std::get_if<IntensityMeasure::Contours>(&intensity_.kind())) {
    const auto& ids = c->catalog->ids_of_length(static_cast<int>(cell.cls));
    return scale * static_cast<double>(ids.size()) * std::exp(-2.0 * c->beta * static_cast<double>(cell.cls));
  }
  return scale * unit_mass_;
}

Particle CellPartition::sample_basis(const CellId& cell, Rng& rng) const {
  Particle p;
  const auto& k = intensity_.kind();
  if (const auto* l = std::get_if<IntensityMeasure::Lattice>(&k)) {
    p.x.dim = l->dim;
    for (int i = 0; i < l->dim; ++i) p.x[i] = l->spacing * static_cast<double>(cell.index[i]);
    p.mark = l->per_site.sample(rng);
  } else if (const auto* c = std::get_if<IntensityMeasure::Continuum>(&k)) {
    p.x.dim = c->dim;
    for (int i = 0; i < c->dim; ++i)
      p.x[i] = cell_size_ * (static_cast<double>(cell.index[i]) + uniform01(rng));
    p.mark = c->per_volume.sample(rng);
  } else if (const auto* ct = std::get_if<IntensityMeasure::Contours>(&k)) {
    p.x = Location{static_cast<double>(cell.index[0]), static_cast<double>(cell.index[1])};
    const auto& ids = ct->catalog->ids_of_length(static_cast<int>(cell.cls));
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    p.mark = ShapeId{ids[pick(rng)]};
  }
  return p;
}

CellId CellPartition::cell_of(const Particle& p) const {
  CellId c;
  for (int i = 0; i < p.x.dim; ++i) c.index[static_cast<std::size_t>(i)] = grid_index(p.x[i]);
  if (const auto* ct = std::get_if<IntensityMeasure::Contours>(&intensity_.kind())) {
    const auto* id = std::get_if<ShapeId>(&p.mark);
    if (!id) throw Error(ErrorCode::kInvalidArgument, "contour cell needs a shape mark");
    c.cls = ct->catalog->shape(*id).length();
  }
  return c;
}

std::vector<CellId> CellPartition::cells_meeting(const Region& region) const {
  std::vector<CellId> out;
  if (region.is_empty()) return out;
  auto b = region.bounds();
  if (!b) throw Error(ErrorCode::kInvalidArgument, "cannot reveal an unbounded region");
  const int dim = intensity_.dim();
  if (b->dim != dim) throw Error(ErrorCode::kInvalidArgument, "region dimension mismatch");

  const auto& k = intensity_.kind();
  const bool continuum = std::holds_alternative<IntensityMeasure::Continuum>(k);
  std::array<std::int64_t, kMaxDim> lo{}, hi{};
  for (int i = 0; i < dim; ++i) {
    lo[i] = grid_index(b->lo[i]);
    hi[i] = grid_index(b->hi[i]);
  }
  std::vector<std::int64_t> classes{0};
  if (const auto* ct = std::get_if<IntensityMeasure::Contours>(&k)) {
    classes.clear();
    for (int l : ct->catalog->lengths()) classes.push_back(l);
  }
  double spacing = 1.0;
  if (const auto* l = std::get_if<IntensityMeasure::Lattice>(&k)) spacing = l->spacing;

  std::array<std::int64_t, kMaxDim> idx = lo;
  while (true) {
    bool inside = true;
    if (!continuum) {
      // keep only sites inside the closed bounding box
      for (int i = 0; i < dim; ++i) {
        const double x = spacing * static_cast<double>(idx[i]);
        inside = inside && x >= b->lo[i] && x <= b->hi[i];
      }
    }
    if (inside) {
      for (auto cls : classes) {
        CellId c;
        c.index = idx;
        c.cls = cls;
        out.push_back(c);
      }
    }
    int i = 0;
    for (; i < dim; ++i) {
      if (++idx[i] <= hi[i]) break;
      idx[i] = lo[i];
    }
    if (i == dim) break;
  }
  return out;
}

std::string CellPartition::describe() const {
  const auto& k = intensity_.kind();
  if (std::holds_alternative<IntensityMeasure::Lattice>(k)) return "one cell per lattice site";
  if (const auto* c = std::get_if<IntensityMeasure::Contours>(&k))
    return "one cell per (dual site, contour length), lmax=" + std::to_string(c->catalog->lmax());
  return "cubic cells of edge " + format_real(cell_size_);
}

Substrate::Substrate(IntensityMeasure intensity, double delta_e, std::uint64_t seed, double cell_size)
    : partition_(std::move(intensity), delta_e, cell_size), seed_(seed) {}

Substrate::Timeline& Substrate::timeline(const CellId& cell) {
  auto it = cells_.find(cell);
  if (it != cells_.end()) return it->second;
  const std::int64_t key[4] = {cell.index[0], cell.index[1], cell.index[2], cell.cls};
  Timeline t{make_stream(seed_, key, 4), {}, std::numeric_limits<double>::infinity()};
  return cells_.emplace(cell, std::move(t)).first->second;
}

std::vector<Cylinder> Substrate::alive_at(const CellId& cell, double t) {
  Timeline& tl = timeline(cell);
  if (t > tl.last_query)
    throw Error(ErrorCode::kQueryOrderViolation, "cell " + to_string(cell) + " queried at " +
                                                     format_real(t) + " after " +
                                                     format_real(tl.last_query));
  const double m = partition_.mass(cell);
  const double gap = tl.last_query - t;  // +inf on the first query
  if (m > 0 && gap > 0) {
    // cylinders alive at t that died in (t, last_query]: age ~ Exp(1),
    // residual ~ Exp(1) truncated to (0, gap]
    const double keep_fraction = -std::expm1(-gap);
    const double mean = m * keep_fraction;
    std::poisson_distribution<std::int64_t> count(mean);
    const std::int64_t n = count(tl.rng);
    for (std::int64_t i = 0; i < n; ++i) {
      Cylinder c;
      const double age = -std::log(open_unit(tl.rng));
      const double u = open_unit(tl.rng);
      const double residual = -std::log1p(-u * keep_fraction);
      c.basis = partition_.sample_basis(cell, tl.rng);
      c.flag = uniform01(tl.rng);
      c.birth = t - age;
      c.lifespan = age + residual;
      c.id.cell = cell;
      c.id.reveal = static_cast<std::int32_t>(tl.revealed.size());
      tl.revealed.push_back(c);
    }
  }
  tl.last_query = t;
  std::vector<Cylinder> out;
  for (const auto& c : tl.revealed)
    if (c.alive_at(t)) out.push_back(c);
  return out;
}

std::vector<Cylinder> Substrate::reveal_window(const Region& window, double t) {
  std::vector<Cylinder> out;
  for (const auto& cell : partition_.cells_meeting(window))
    for (auto& c : alive_at(cell, t))
      if (window.contains(c.basis)) out.push_back(std::move(c));
  return out;
}

std::size_t Substrate::revealed_count() const {
  std::size_t n = 0;
  for (const auto& [k, t] : cells_) n += t.revealed.size();
  return n;
}

}  // namespace clansim
