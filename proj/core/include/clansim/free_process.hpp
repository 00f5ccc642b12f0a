#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "clansim/config_space.hpp"
#include "clansim/models.hpp"
#include "clansim/random.hpp"

namespace clansim {

// Lattice / grid index plus a class slot (contour length for Peierls cells).
struct CellId {
  std::array<std::int64_t, kMaxDim> index{};
  std::int64_t cls = 0;
};
bool operator==(const CellId& a, const CellId& b);
bool operator<(const CellId& a, const CellId& b);
std::string to_string(const CellId& c);

struct CylinderId {
  CellId cell;
  std::int32_t reveal = 0;
};
bool operator==(const CylinderId& a, const CylinderId& b);
bool operator<(const CylinderId& a, const CylinderId& b);

struct Cylinder {
  Particle basis;
  double birth = 0.0;
  double lifespan = 1.0;
  double flag = 0.0;
  CylinderId id;

  double death() const { return birth + lifespan; }
  bool alive_at(double t) const { return birth <= t && t < birth + lifespan; }
};
// Bitwise equality of every field.
bool operator==(const Cylinder& a, const Cylinder& b);

// How particle space is cut into cells of finite mass.
class CellPartition {
 public:
  // cell_size applies to continuum intensities only.
  CellPartition(IntensityMeasure intensity, double delta_e, double cell_size = 0.5);

  const IntensityMeasure& intensity() const { return intensity_; }
  double delta_e() const { return delta_e_; }
  double cell_size() const { return cell_size_; }

  // e^{-delta_e} nu(cell)
  double mass(const CellId& cell) const;
  // Draw a basis from the normalized intensity restricted to the cell.
  Particle sample_basis(const CellId& cell, Rng& rng) const;
  CellId cell_of(const Particle& p) const;
  // Cells whose particles can lie in a bounded region.
  std::vector<CellId> cells_meeting(const Region& region) const;
  std::string describe() const;

 private:
  std::int64_t grid_index(double coordinate) const;

  IntensityMeasure intensity_;
  double delta_e_;
  double cell_size_;
  double unit_mass_ = 0.0;  // per lattice site or per continuum cell
};

// Lazily revealed free cylinder process, one backward timeline per cell.
class Substrate {
 public:
  Substrate(IntensityMeasure intensity, double delta_e, std::uint64_t seed, double cell_size = 0.5);

  std::uint64_t seed() const { return seed_; }
  const CellPartition& partition() const { return partition_; }

  // Cylinders with basis in the cell that are alive at t. Queries on one
  // cell must come at non-increasing times.
  std::vector<Cylinder> alive_at(const CellId& cell, double t);
  // alive_at over the cells meeting the window, filtered to the window.
  std::vector<Cylinder> reveal_window(const Region& window, double t);

  std::size_t revealed_count() const;
  std::size_t touched_cells() const { return cells_.size(); }

 private:
  struct Timeline {
    Rng rng;
    std::vector<Cylinder> revealed;
    double last_query = std::numeric_limits<double>::infinity();
  };
  Timeline& timeline(const CellId& cell);

  CellPartition partition_;
  std::uint64_t seed_;
  std::map<CellId, Timeline> cells_;
};

}  // namespace clansim
