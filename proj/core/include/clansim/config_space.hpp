#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace clansim {

inline constexpr int kMaxDim = 3;
inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Locations and marks

struct Location {
  int dim = 0;
  std::array<double, kMaxDim> coord{};

  Location() = default;
  Location(std::initializer_list<double> c);

  double operator[](int i) const { return coord[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return coord[static_cast<std::size_t>(i)]; }
};

bool operator==(const Location& a, const Location& b);
bool operator<(const Location& a, const Location& b);
inline bool operator!=(const Location& a, const Location& b) { return !(a == b); }

enum class Spin : std::int8_t { kMinus = -1, kPlus = 1 };

inline Spin opposite(Spin s) { return s == Spin::kPlus ? Spin::kMinus : Spin::kPlus; }

// Orientation of a rod, in [0, pi).
struct Angle {
  double radians = 0.0;
};
inline bool operator==(Angle a, Angle b) { return a.radians == b.radians; }
inline bool operator<(Angle a, Angle b) { return a.radians < b.radians; }

// Index into a contour catalog.
struct ShapeId {
  std::int32_t index = 0;
};
inline bool operator==(ShapeId a, ShapeId b) { return a.index == b.index; }
inline bool operator<(ShapeId a, ShapeId b) { return a.index < b.index; }

using Mark = std::variant<Spin, Angle, ShapeId>;

inline constexpr Spin kPlus = Spin::kPlus;
inline constexpr Spin kMinus = Spin::kMinus;

// Shortest text that reads back to the same double, at most 17 significant
// digits; integral values print without a decimal point.
std::string format_real(double v);

std::string to_string(const Mark& m);

struct Particle {
  Location x;
  Mark mark;
};

bool operator==(const Particle& a, const Particle& b);
bool operator<(const Particle& a, const Particle& b);
inline bool operator!=(const Particle& a, const Particle& b) { return !(a == b); }

std::string to_string(const Particle& p);

Particle spin_particle(Spin s, std::initializer_list<double> x);
Particle rod_particle(double angle, std::initializer_list<double> x);

// sup-norm on locations
double sup_distance(const Location& a, const Location& b);
// discrete metric on spins and shapes, arc distance on angles; infinite
// between marks of different kinds
double mark_distance(const Mark& a, const Mark& b);
// d = d_S + d_G
double distance(const Particle& a, const Particle& b);

// ---------------------------------------------------------------------------
// Regions

enum class BoxClosure { kClosed, kOpen, kHalfOpen };

// Axis-aligned box in location space. kHalfOpen means lo <= x < hi.
struct Box {
  int dim = 0;
  std::array<double, kMaxDim> lo{};
  std::array<double, kMaxDim> hi{};
  BoxClosure closure = BoxClosure::kClosed;

  static Box around(const Location& c, double radius, BoxClosure closure = BoxClosure::kClosed);
  static Box make(std::initializer_list<double> lo, std::initializer_list<double> hi,
                  BoxClosure closure = BoxClosure::kClosed);

  bool contains(const Location& x) const;
  bool intersects(const Box& other) const;
  bool covers(const Box& other) const;
  Box inflated(double margin) const;
  double volume() const;
};

std::optional<Box> intersect(const Box& a, const Box& b);
Box hull(const Box& a, const Box& b);

struct MarkSet {
  enum class Kind { kAll, kAtoms, kAngleRange };
  Kind kind = Kind::kAll;
  std::vector<Mark> atoms;
  double angle_lo = 0.0;  // [angle_lo, angle_hi)
  double angle_hi = kPi;

  static MarkSet all() { return {}; }
  static MarkSet of(std::vector<Mark> atoms);
  static MarkSet angles(double lo, double hi);

  bool contains(const Mark& m) const;
};

namespace detail {
struct RegionNode;
}

class Region;

struct EmptyRegion {};
struct WholeRegion {};
struct BoxRegion {
  Box box;
};
struct ParticleRegion {
  Particle particle;
};
struct SiteRegion {
  std::vector<Location> sites;  // sorted, unique
};
struct UnionRegion {
  std::vector<Region> parts;
  bool disjoint = false;
};
struct MarkedRegion;
struct ComplementRegion;
struct PredicateRegion;

// Finitely describable subset of S x G with exact membership.
class Region {
 public:
  Region();  // empty

  static Region empty();
  static Region everything();
  static Region box(const Box& b);
  static Region point(const Particle& p);
  static Region sites(std::vector<Location> sites);
  static Region unite(std::vector<Region> parts, bool disjoint = false);
  static Region with_marks(Region base, MarkSet marks);
  static Region minus(Region window, Region removed);
  static Region predicate(Box bounds, std::function<bool(const Particle&)> test,
                          std::string label);

  bool contains(const Particle& p) const;
  // Membership of the location part, ignoring mark restrictions.
  bool contains_location(const Location& x) const;
  // Bounding box of locations; nullopt when unbounded.
  std::optional<Box> bounds() const;
  bool is_empty() const;
  bool is_everything() const;
  // Conservative support check on bounding boxes.
  bool covers(const Region& other) const;
  // Box hull of the bounds, inflated by margin.
  Region inflated(double margin) const;

  std::string describe() const;

  const detail::RegionNode& node() const { return *node_; }

 private:
  explicit Region(std::shared_ptr<const detail::RegionNode> node);
  std::shared_ptr<const detail::RegionNode> node_;
};

struct MarkedRegion {
  Region base;
  MarkSet marks;
};
struct ComplementRegion {
  Region window;
  Region removed;
};
struct PredicateRegion {
  Box bounds;
  std::function<bool(const Particle&)> test;
  std::string label;
};

namespace detail {
struct RegionNode {
  std::variant<EmptyRegion, WholeRegion, BoxRegion, ParticleRegion, SiteRegion, UnionRegion,
               MarkedRegion, ComplementRegion, PredicateRegion>
      v;
};
}  // namespace detail

// ---------------------------------------------------------------------------
// Configurations

class ParticleConfiguration {
 public:
  struct Entry {
    Particle particle;
    int multiplicity = 1;
  };

  ParticleConfiguration();
  explicit ParticleConfiguration(Region window);
  ParticleConfiguration(Region window, const std::vector<Entry>& entries);

  // Adds multiplicity to an existing entry or inserts a new one.
  void add(const Particle& p, int multiplicity = 1);

  const std::vector<Entry>& entries() const { return entries_; }
  const Region& window() const { return window_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  int total() const;
  int multiplicity(const Particle& p) const;

 private:
  Region window_;
  std::vector<Entry> entries_;  // sorted by particle
};

bool operator==(const ParticleConfiguration::Entry& a, const ParticleConfiguration::Entry& b);
bool operator<(const ParticleConfiguration::Entry& a, const ParticleConfiguration::Entry& b);
// Equality and ordering look at entries only, not at windows.
bool operator==(const ParticleConfiguration& a, const ParticleConfiguration& b);
bool operator<(const ParticleConfiguration& a, const ParticleConfiguration& b);
inline bool operator!=(const ParticleConfiguration& a, const ParticleConfiguration& b) {
  return !(a == b);
}

std::string to_string(const ParticleConfiguration& c);

int count(const ParticleConfiguration& config, const Region& region);
ParticleConfiguration restrict_to(const ParticleConfiguration& config, const Region& region);
ParticleConfiguration superpose(const ParticleConfiguration& a, const ParticleConfiguration& b);

// True iff the weighted support of xi injects into that of eta with every
// pair at distance < delta.
bool is_delta_embedded(const ParticleConfiguration& xi, const ParticleConfiguration& eta,
                       double delta);

bool in_neighborhood(const ParticleConfiguration& xi, const ParticleConfiguration& eta,
                     const Region& K, double delta);

}  // namespace clansim
