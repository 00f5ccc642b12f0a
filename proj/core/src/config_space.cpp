#include "clansim/config_space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <type_traits>

#include "clansim/errors.hpp"

namespace clansim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

// ---------------------------------------------------------------------------

Location::Location(std::initializer_list<double> c) {
  if (c.size() > static_cast<std::size_t>(kMaxDim))
    throw Error(ErrorCode::kInvalidArgument, "location dimension above 3");
  dim = static_cast<int>(c.size());
  std::copy(c.begin(), c.end(), coord.begin());
}

bool operator==(const Location& a, const Location& b) {
  if (a.dim != b.dim) return false;
  for (int i = 0; i < a.dim; ++i)
    if (a[i] != b[i]) return false;
  return true;
}

bool operator<(const Location& a, const Location& b) {
  if (a.dim != b.dim) return a.dim < b.dim;
  for (int i = 0; i < a.dim; ++i) {
    if (a[i] < b[i]) return true;
    if (b[i] < a[i]) return false;
  }
  return false;
}

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_string(const Mark& m) {
  return std::visit(Overloaded{
                        [](Spin s) { return std::string(s == Spin::kPlus ? "+" : "-"); },
                        [](Angle a) { return "a:" + format_real(a.radians); },
                        [](ShapeId c) { return "c:" + std::to_string(c.index); },
                    },
                    m);
}

bool operator==(const Particle& a, const Particle& b) { return a.x == b.x && a.mark == b.mark; }

bool operator<(const Particle& a, const Particle& b) {
  if (a.x < b.x) return true;
  if (b.x < a.x) return false;
  return a.mark < b.mark;
}

std::string to_string(const Particle& p) {
  std::string s = to_string(p.mark) + "@(";
  for (int i = 0; i < p.x.dim; ++i) {
    if (i) s += ",";
    s += format_real(p.x[i]);
  }
  return s + ")";
}

Particle spin_particle(Spin s, std::initializer_list<double> x) { return {Location(x), s}; }

Particle rod_particle(double angle, std::initializer_list<double> x) {
  if (!(angle >= 0.0 && angle < kPi))
    throw Error(ErrorCode::kInvalidArgument, "rod angle outside [0,pi)");
  return {Location(x), Angle{angle}};
}

double sup_distance(const Location& a, const Location& b) {
  if (a.dim != b.dim) return kInf;
  double d = 0.0;
  for (int i = 0; i < a.dim; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double mark_distance(const Mark& a, const Mark& b) {
  if (a.index() != b.index()) return kInf;
  if (const auto* x = std::get_if<Angle>(&a)) {
    double d = std::abs(x->radians - std::get<Angle>(b).radians);
    return std::min(d, kPi - d);
  }
  return a == b ? 0.0 : 1.0;
}

double distance(const Particle& a, const Particle& b) {
  return sup_distance(a.x, b.x) + mark_distance(a.mark, b.mark);
}

// ---------------------------------------------------------------------------
// Box

Box Box::around(const Location& c, double radius, BoxClosure closure) {
  Box b;
  b.dim = c.dim;
  b.closure = closure;
  for (int i = 0; i < c.dim; ++i) {
    b.lo[i] = c[i] - radius;
    b.hi[i] = c[i] + radius;
  }
  return b;
}

Box Box::make(std::initializer_list<double> lo, std::initializer_list<double> hi,
              BoxClosure closure) {
  if (lo.size() != hi.size() || lo.size() > static_cast<std::size_t>(kMaxDim))
    throw Error(ErrorCode::kInvalidArgument, "box corner dimensions differ");
  Box b;
  b.dim = static_cast<int>(lo.size());
  b.closure = closure;
  std::copy(lo.begin(), lo.end(), b.lo.begin());
  std::copy(hi.begin(), hi.end(), b.hi.begin());
  return b;
}

bool Box::contains(const Location& x) const {
  if (x.dim != dim) return false;
  for (int i = 0; i < dim; ++i) {
    switch (closure) {
      case BoxClosure::kClosed:
        if (x[i] < lo[i] || x[i] > hi[i]) return false;
        break;
      case BoxClosure::kOpen:
        if (x[i] <= lo[i] || x[i] >= hi[i]) return false;
        break;
      case BoxClosure::kHalfOpen:
        if (x[i] < lo[i] || x[i] >= hi[i]) return false;
        break;
    }
  }
  return true;
}

bool Box::intersects(const Box& other) const {
  if (dim != other.dim) return false;
  for (int i = 0; i < dim; ++i)
    if (other.hi[i] < lo[i] || hi[i] < other.lo[i]) return false;
  return true;
}

bool Box::covers(const Box& other) const {
  if (dim != other.dim) return false;
  for (int i = 0; i < dim; ++i)
    if (other.lo[i] < lo[i] || other.hi[i] > hi[i]) return false;
  return true;
}

Box Box::inflated(double margin) const {
  Box b = *this;
  for (int i = 0; i < dim; ++i) {
    b.lo[i] -= margin;
    b.hi[i] += margin;
  }
  return b;
}

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= std::max(0.0, hi[i] - lo[i]);
  return v;
}

std::optional<Box> intersect(const Box& a, const Box& b) {
  if (!a.intersects(b)) return std::nullopt;
  Box r = a;
  for (int i = 0; i < a.dim; ++i) {
    r.lo[i] = std::max(a.lo[i], b.lo[i]);
    r.hi[i] = std::min(a.hi[i], b.hi[i]);
  }
  return r;
}

Box hull(const Box& a, const Box& b) {
  Box r = a;
  for (int i = 0; i < a.dim; ++i) {
    r.lo[i] = std::min(a.lo[i], b.lo[i]);
    r.hi[i] = std::max(a.hi[i], b.hi[i]);
  }
  r.closure = BoxClosure::kClosed;
  return r;
}

// ---------------------------------------------------------------------------
// MarkSet

MarkSet MarkSet::of(std::vector<Mark> atoms) {
  MarkSet m;
  m.kind = Kind::kAtoms;
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  m.atoms = std::move(atoms);
  return m;
}

MarkSet MarkSet::angles(double lo, double hi) {
  MarkSet m;
  m.kind = Kind::kAngleRange;
  m.angle_lo = lo;
  m.angle_hi = hi;
  return m;
}

bool MarkSet::contains(const Mark& m) const {
  switch (kind) {
    case Kind::kAll:
      return true;
    case Kind::kAtoms:
      return std::binary_search(atoms.begin(), atoms.end(), m);
    case Kind::kAngleRange:
      if (const auto* a = std::get_if<Angle>(&m))
        return a->radians >= angle_lo && a->radians < angle_hi;
      return false;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Region

Region::Region() : Region(std::make_shared<detail::RegionNode>(detail::RegionNode{EmptyRegion{}})) {}

Region::Region(std::shared_ptr<const detail::RegionNode> node) : node_(std::move(node)) {}

Region Region::empty() { return Region(); }

Region Region::everything() {
  static const auto node = std::make_shared<detail::RegionNode>(detail::RegionNode{WholeRegion{}});
  return Region(node);
}

Region Region::box(const Box& b) {
  return Region(std::make_shared<detail::RegionNode>(detail::RegionNode{BoxRegion{b}}));
}

Region Region::point(const Particle& p) {
  return Region(std::make_shared<detail::RegionNode>(detail::RegionNode{ParticleRegion{p}}));
}

Region Region::sites(std::vector<Location> s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return Region(
      std::make_shared<detail::RegionNode>(detail::RegionNode{SiteRegion{std::move(s)}}));
}

Region Region::unite(std::vector<Region> parts, bool disjoint) {
  return Region(std::make_shared<detail::RegionNode>(
      detail::RegionNode{UnionRegion{std::move(parts), disjoint}}));
}

Region Region::with_marks(Region base, MarkSet marks) {
  return Region(std::make_shared<detail::RegionNode>(
      detail::RegionNode{MarkedRegion{std::move(base), std::move(marks)}}));
}

Region Region::minus(Region window, Region removed) {
  return Region(std::make_shared<detail::RegionNode>(
      detail::RegionNode{ComplementRegion{std::move(window), std::move(removed)}}));
}

Region Region::predicate(Box bounds, std::function<bool(const Particle&)> test,
                         std::string label) {
  return Region(std::make_shared<detail::RegionNode>(
      detail::RegionNode{PredicateRegion{bounds, std::move(test), std::move(label)}}));
}

bool Region::contains(const Particle& p) const {
  return std::visit(
      Overloaded{
          [](const EmptyRegion&) { return false; },
          [](const WholeRegion&) { return true; },
          [&](const BoxRegion& r) { return r.box.contains(p.x); },
          [&](const ParticleRegion& r) { return r.particle == p; },
          [&](const SiteRegion& r) {
            return std::binary_search(r.sites.begin(), r.sites.end(), p.x);
          },
          [&](const UnionRegion& r) {
            return std::any_of(r.parts.begin(), r.parts.end(),
                               [&](const Region& q) { return q.contains(p); });
          },
          [&](const MarkedRegion& r) { return r.marks.contains(p.mark) && r.base.contains(p); },
          [&](const ComplementRegion& r) {
            return r.window.contains(p) && !r.removed.contains(p);
          },
          [&](const PredicateRegion& r) { return r.bounds.contains(p.x) && r.test(p); },
      },
      node_->v);
}

bool Region::contains_location(const Location& x) const {
  return std::visit(
      Overloaded{
          [](const EmptyRegion&) { return false; },
          [](const WholeRegion&) { return true; },
          [&](const BoxRegion& r) { return r.box.contains(x); },
          [&](const ParticleRegion& r) { return r.particle.x == x; },
          [&](const SiteRegion& r) { return std::binary_search(r.sites.begin(), r.sites.end(), x); },
          [&](const UnionRegion& r) {
            return std::any_of(r.parts.begin(), r.parts.end(),
                               [&](const Region& q) { return q.contains_location(x); });
          },
          [&](const MarkedRegion& r) { return r.base.contains_location(x); },
          [&](const ComplementRegion& r) {
            return r.window.contains_location(x) && !r.removed.contains_location(x);
          },
          [&](const PredicateRegion& r) { return r.bounds.contains(x); },
      },
      node_->v);
}

std::optional<Box> Region::bounds() const {
  return std::visit(
      Overloaded{
          [](const EmptyRegion&) -> std::optional<Box> { return Box{}; },
          [](const WholeRegion&) -> std::optional<Box> { return std::nullopt; },
          [](const BoxRegion& r) -> std::optional<Box> { return r.box; },
          [](const ParticleRegion& r) -> std::optional<Box> { return Box::around(r.particle.x, 0); },
          [](const SiteRegion& r) -> std::optional<Box> {
            if (r.sites.empty()) return Box{};
            Box b = Box::around(r.sites.front(), 0);
            for (const auto& s : r.sites) b = hull(b, Box::around(s, 0));
            return b;
          },
          [](const UnionRegion& r) -> std::optional<Box> {
            std::optional<Box> acc;
            for (const auto& q : r.parts) {
              if (q.is_empty()) continue;
              auto b = q.bounds();
              if (!b) return std::nullopt;
              acc = acc ? hull(*acc, *b) : *b;
            }
            return acc ? *acc : Box{};
          },
          [](const MarkedRegion& r) { return r.base.bounds(); },
          [](const ComplementRegion& r) { return r.window.bounds(); },
          [](const PredicateRegion& r) -> std::optional<Box> { return r.bounds; },
      },
      node_->v);
}

bool Region::is_empty() const {
  return std::visit(Overloaded{
                        [](const EmptyRegion&) { return true; },
                        [](const SiteRegion& r) { return r.sites.empty(); },
                        [](const UnionRegion& r) {
                          return std::all_of(r.parts.begin(), r.parts.end(),
                                             [](const Region& q) { return q.is_empty(); });
                        },
                        [](const MarkedRegion& r) { return r.base.is_empty(); },
                        [](const ComplementRegion& r) { return r.window.is_empty(); },
                        [](const auto&) { return false; },
                    },
                    node_->v);
}

bool Region::is_everything() const { return std::holds_alternative<WholeRegion>(node_->v); }

bool Region::covers(const Region& other) const {
  if (is_everything() || other.is_empty()) return true;
  auto ob = other.bounds();
  if (!ob) return false;
  if (is_empty()) return false;
  auto tb = bounds();
  if (!tb) return true;
  return tb->covers(*ob);
}

Region Region::inflated(double margin) const {
  if (is_empty()) return Region::empty();
  auto b = bounds();
  if (!b) return Region::everything();
  Box r = b->inflated(margin);
  r.closure = BoxClosure::kClosed;
  return Region::box(r);
}

std::string Region::describe() const {
  auto box_text = [](const Box& b) {
    std::string s = "[";
    for (int i = 0; i < b.dim; ++i) {
      if (i) s += "x";
      s += format_real(b.lo[i]) + "," + format_real(b.hi[i]);
    }
    return s + (b.closure == BoxClosure::kHalfOpen ? ")" : "]");
  };
  return std::visit(
      Overloaded{
          [](const EmptyRegion&) { return std::string("empty"); },
          [](const WholeRegion&) { return std::string("all"); },
          [&](const BoxRegion& r) { return "box" + box_text(r.box); },
          [](const ParticleRegion& r) { return "{" + to_string(r.particle) + "}"; },
          [](const SiteRegion& r) { return "sites(" + std::to_string(r.sites.size()) + ")"; },
          [](const UnionRegion& r) {
            std::string s = "union(";
            for (std::size_t i = 0; i < r.parts.size(); ++i)
              s += (i ? "," : "") + r.parts[i].describe();
            return s + ")";
          },
          [](const MarkedRegion& r) { return r.base.describe() + "*marks"; },
          [](const ComplementRegion& r) {
            return r.window.describe() + "\\" + r.removed.describe();
          },
          [&](const PredicateRegion& r) { return r.label + box_text(r.bounds); },
      },
      node_->v);
}

// ---------------------------------------------------------------------------
// ParticleConfiguration

ParticleConfiguration::ParticleConfiguration() : window_(Region::everything()) {}

ParticleConfiguration::ParticleConfiguration(Region window) : window_(std::move(window)) {}

ParticleConfiguration::ParticleConfiguration(Region window, const std::vector<Entry>& entries)
    : window_(std::move(window)) {
  for (const auto& e : entries) add(e.particle, e.multiplicity);
}

void ParticleConfiguration::add(const Particle& p, int multiplicity) {
  if (multiplicity < 1) throw Error(ErrorCode::kInvalidArgument, "multiplicity below 1");
  if (const auto* a = std::get_if<Angle>(&p.mark); a && !(a->radians >= 0 && a->radians < kPi))
    throw Error(ErrorCode::kInvalidArgument, "angle mark outside [0,pi)");
  if (!window_.contains(p))
    throw Error(ErrorCode::kInvalidArgument, to_string(p) + " outside window " + window_.describe());
  auto it = std::lower_bound(entries_.begin(), entries_.end(), p,
                             [](const Entry& e, const Particle& q) { return e.particle < q; });
  if (it != entries_.end() && it->particle == p)
    it->multiplicity += multiplicity;
  else
    entries_.insert(it, Entry{p, multiplicity});
}

int ParticleConfiguration::total() const {
  int n = 0;
  for (const auto& e : entries_) n += e.multiplicity;
  return n;
}

int ParticleConfiguration::multiplicity(const Particle& p) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), p,
                             [](const Entry& e, const Particle& q) { return e.particle < q; });
  return (it != entries_.end() && it->particle == p) ? it->multiplicity : 0;
}

bool operator==(const ParticleConfiguration::Entry& a, const ParticleConfiguration::Entry& b) {
  return a.multiplicity == b.multiplicity && a.particle == b.particle;
}

bool operator<(const ParticleConfiguration::Entry& a, const ParticleConfiguration::Entry& b) {
  if (a.particle < b.particle) return true;
  if (b.particle < a.particle) return false;
  return a.multiplicity < b.multiplicity;
}

bool operator==(const ParticleConfiguration& a, const ParticleConfiguration& b) {
  return a.entries() == b.entries();
}

bool operator<(const ParticleConfiguration& a, const ParticleConfiguration& b) {
  return std::lexicographical_compare(a.entries().begin(), a.entries().end(), b.entries().begin(),
                                      b.entries().end());
}

std::string to_string(const ParticleConfiguration& c) {
  std::string s = "{";
  bool first = true;
  for (const auto& e : c.entries()) {
    if (!first) s += ", ";
    first = false;
    s += to_string(e.particle);
    if (e.multiplicity > 1) s += " m=" + std::to_string(e.multiplicity);
  }
  return s + "}";
}

int count(const ParticleConfiguration& config, const Region& region) {
  int n = 0;
  for (const auto& e : config.entries())
    if (region.contains(e.particle)) n += e.multiplicity;
  return n;
}

ParticleConfiguration restrict_to(const ParticleConfiguration& config, const Region& region) {
  ParticleConfiguration out(config.window());
  for (const auto& e : config.entries())
    if (region.contains(e.particle)) out.add(e.particle, e.multiplicity);
  return out;
}

ParticleConfiguration superpose(const ParticleConfiguration& a, const ParticleConfiguration& b) {
  Region window = a.window();
  if (&a.window().node() != &b.window().node()) {
    if (a.window().is_everything() || b.window().is_everything())
      window = Region::everything();
    else
      window = Region::unite({a.window(), b.window()});
  }
  ParticleConfiguration out(window);
  for (const auto& e : a.entries()) out.add(e.particle, e.multiplicity);
  for (const auto& e : b.entries()) out.add(e.particle, e.multiplicity);
  return out;
}

namespace {

// Kuhn's augmenting paths on the expanded supports.
bool try_augment(std::size_t u, const std::vector<std::vector<std::size_t>>& adj,
                 std::vector<std::size_t>& match_right, std::vector<char>& seen) {
  for (std::size_t v : adj[u]) {
    if (seen[v]) continue;
    seen[v] = 1;
    if (match_right[v] == SIZE_MAX || try_augment(match_right[v], adj, match_right, seen)) {
      match_right[v] = u;
      return true;
    }
  }
  return false;
}

std::vector<const Particle*> expand(const ParticleConfiguration& c) {
  std::vector<const Particle*> out;
  for (const auto& e : c.entries())
    for (int k = 0; k < e.multiplicity; ++k) out.push_back(&e.particle);
  return out;
}

}  // namespace

bool is_delta_embedded(const ParticleConfiguration& xi, const ParticleConfiguration& eta,
                       double delta) {
  if (!(delta > 0)) throw Error(ErrorCode::kInvalidArgument, "delta must be positive");
  const auto left = expand(xi);
  const auto right = expand(eta);
  if (left.size() > right.size()) return false;
  std::vector<std::vector<std::size_t>> adj(left.size());
  for (std::size_t i = 0; i < left.size(); ++i)
    for (std::size_t j = 0; j < right.size(); ++j)
      if (distance(*left[i], *right[j]) < delta) adj[i].push_back(j);
  std::vector<std::size_t> match_right(right.size(), SIZE_MAX);
  for (std::size_t i = 0; i < left.size(); ++i) {
    if (adj[i].empty()) return false;
    std::vector<char> seen(right.size(), 0);
    if (!try_augment(i, adj, match_right, seen)) return false;
  }
  return true;
}

bool in_neighborhood(const ParticleConfiguration& xi, const ParticleConfiguration& eta,
                     const Region& K, double delta) {
  return is_delta_embedded(restrict_to(xi, K), eta, delta) &&
         is_delta_embedded(restrict_to(eta, K), xi, delta);
}

}  // namespace clansim
