#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clansim/config_space.hpp"

namespace clansim {

// Dual vertex (x, y) stands for the point (x + 1/2, y + 1/2) of the plane;
// site (a, b) is the centre of the dual face with corners (a-1, b-1)..(a, b).
struct DualVertex {
  int x = 0;
  int y = 0;
};
inline bool operator==(DualVertex a, DualVertex b) { return a.x == b.x && a.y == b.y; }
inline bool operator!=(DualVertex a, DualVertex b) { return !(a == b); }
// Roots are lexicographic minima: first coordinate, then second.
inline bool operator<(DualVertex a, DualVertex b) { return a.x != b.x ? a.x < b.x : a.y < b.y; }

// Unit edge from `from` to from + (1,0) (horizontal) or from + (0,1).
struct DualEdge {
  DualVertex from;
  bool horizontal = true;

  DualVertex to() const { return horizontal ? DualVertex{from.x + 1, from.y} : DualVertex{from.x, from.y + 1}; }
};
inline bool operator==(const DualEdge& a, const DualEdge& b) {
  return a.from == b.from && a.horizontal == b.horizontal;
}
inline bool operator<(const DualEdge& a, const DualEdge& b) {
  if (a.from != b.from) return a.from < b.from;
  return a.horizontal < b.horizontal;
}

// A contour translated so that its root (smallest vertex) is the origin.
struct ContourShape {
  std::vector<DualEdge> edges;       // sorted
  std::vector<DualVertex> vertices;  // sorted
  int length() const { return static_cast<int>(edges.size()); }
};
inline bool operator==(const ContourShape& a, const ContourShape& b) { return a.edges == b.edges; }
inline bool operator<(const ContourShape& a, const ContourShape& b) { return a.edges < b.edges; }

// Connected, non-empty, every vertex of even degree.
bool is_contour(const std::vector<DualEdge>& edges);

// Translates an edge set so that its smallest vertex is the origin. The
// removed offset (the root) is written to *root when given.
ContourShape normalize_contour(std::vector<DualEdge> edges, DualVertex* root = nullptr);

std::vector<DualVertex> vertices_of(const std::vector<DualEdge>& edges);

class ContourCatalog {
 public:
  ContourCatalog() = default;

  // Every contour with at most lmax edges, generated from boundaries of
  // finite face sets.
  static ContourCatalog enumerate(int lmax, std::size_t max_shapes = 5'000'000);
  // Every contour that fits inside the dual edges of an n x n block of sites.
  static ContourCatalog within_box(int n, std::size_t max_shapes = 5'000'000);
  static ContourCatalog from_shapes(std::vector<ContourShape> shapes, int lmax, bool complete);

  int lmax() const { return lmax_; }
  // True when all contours of length <= lmax are present.
  bool complete() const { return complete_; }
  std::size_t size() const { return shapes_.size(); }
  const std::vector<ContourShape>& shapes() const { return shapes_; }
  const ContourShape& shape(ShapeId id) const { return shapes_.at(static_cast<std::size_t>(id.index)); }
  // N_l for l = 0..lmax
  std::vector<std::int64_t> counts() const;
  const std::vector<std::int32_t>& ids_of_length(int length) const;
  std::vector<int> lengths() const;
  std::optional<ShapeId> find(const ContourShape& s) const;

  // Offsets of vertices relative to the root over all shapes.
  int max_dx() const { return max_dx_; }
  int min_dy() const { return min_dy_; }
  int max_dy() const { return max_dy_; }

 private:
  int lmax_ = 0;
  bool complete_ = false;
  std::vector<ContourShape> shapes_;  // sorted by (length, edges)
  std::vector<std::vector<std::int32_t>> by_length_;
  int max_dx_ = 0, min_dy_ = 0, max_dy_ = 0;
};

// Rooted contour shapes by boundary generation from face subsets of boxes.
std::vector<ContourShape> enumerate_contours_face_sets(int lmax, std::size_t max_shapes = 5'000'000);
// Rooted contour shapes by growing connected edge sets from the origin.
std::vector<ContourShape> enumerate_contours_edge_growth(int lmax, std::size_t max_shapes = 5'000'000);
std::vector<std::int64_t> count_by_length(const std::vector<ContourShape>& shapes, int lmax);

// Spins on the n x n block {0..n-1}^2 with + outside.
struct SpinSquare {
  int n = 0;
  std::vector<std::int8_t> spins;  // index x * n + y, values +1 / -1

  explicit SpinSquare(int n_ = 0) : n(n_), spins(static_cast<std::size_t>(n_ * n_), 1) {}
  static SpinSquare from_bits(int n, std::uint64_t bits);  // bit set => -1

  std::int8_t at(int x, int y) const;
  void set(int x, int y, std::int8_t s) { spins[static_cast<std::size_t>(x * n + y)] = s; }
};
inline bool operator==(const SpinSquare& a, const SpinSquare& b) {
  return a.n == b.n && a.spins == b.spins;
}

// Contours in absolute dual coordinates.
struct ContourSet {
  int n = 0;
  std::vector<std::vector<DualEdge>> contours;  // each sorted; list sorted
};
inline bool operator==(const ContourSet& a, const ContourSet& b) {
  return a.n == b.n && a.contours == b.contours;
}

ContourSet spins_to_contours(const SpinSquare& sigma);
SpinSquare contours_to_spins(const ContourSet& gamma);

// Truncated series with a geometric tail estimate from the ratio of the last
// two non-zero terms (two length classes apart).
struct PeierlsSeries {
  double value = 0.0;          // partial sum up to lmax
  double tail_estimate = 0.0;  // meaningful only when tail_conclusive
  bool tail_conclusive = false;
  double growth_ratio = 0.0;
  int lmax = 0;
};

// sum over l <= lmax of l N_l e^{-2 beta l}
PeierlsSeries peierls_lhs(double beta, const ContourCatalog& catalog);
// sum over l <= lmax of l M_l e^{-2 beta l}, M_l = number of rooted shapes of
// length l counted with their vertex counts (contours through a fixed site).
PeierlsSeries peierls_alpha_series(double beta, const ContourCatalog& catalog);

}  // namespace clansim
