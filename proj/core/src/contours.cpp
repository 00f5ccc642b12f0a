#include "clansim/contours.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "clansim/errors.hpp"

namespace clansim {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

std::size_t index_of(const std::vector<DualVertex>& sorted, DualVertex v) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
}

}  // namespace

std::vector<DualVertex> vertices_of(const std::vector<DualEdge>& edges) {
  std::vector<DualVertex> v;
  v.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    v.push_back(e.from);
    v.push_back(e.to());
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool is_contour(const std::vector<DualEdge>& edges) {
  if (edges.empty()) return false;
  auto verts = vertices_of(edges);
  std::vector<int> degree(verts.size(), 0);
  UnionFind uf(verts.size());
  for (const auto& e : edges) {
    auto a = index_of(verts, e.from);
    auto b = index_of(verts, e.to());
    ++degree[a];
    ++degree[b];
    uf.unite(static_cast<int>(a), static_cast<int>(b));
  }
  for (int d : degree)
    if (d % 2) return false;
  int root = uf.find(0);
  for (std::size_t i = 1; i < verts.size(); ++i)
    if (uf.find(static_cast<int>(i)) != root) return false;
  std::vector<DualEdge> sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

ContourShape normalize_contour(std::vector<DualEdge> edges, DualVertex* root) {
  ContourShape s;
  if (edges.empty()) return s;
  DualVertex r = vertices_of(edges).front();
  for (auto& e : edges) {
    e.from.x -= r.x;
    e.from.y -= r.y;
  }
  std::sort(edges.begin(), edges.end());
  s.vertices = vertices_of(edges);
  s.edges = std::move(edges);
  if (root) *root = r;
  return s;
}

// ---------------------------------------------------------------------------
// Face-set generator

namespace {

// Appends the rooted boundary shapes of all face subsets of a w x h box that
// touch every side of the box.
void face_sets_in_box(int w, int h, int lmax, std::vector<ContourShape>& out,
                      std::size_t max_shapes) {
  const int nf = w * h;
  auto bit = [h](int c, int r) { return std::uint64_t{1} << (c * h + r); };
  std::uint64_t col0 = 0, colw = 0, row0 = 0, rowh = 0;
  for (int r = 0; r < h; ++r) {
    col0 |= bit(0, r);
    colw |= bit(w - 1, r);
  }
  for (int c = 0; c < w; ++c) {
    row0 |= bit(c, 0);
    rowh |= bit(c, h - 1);
  }
  const std::uint64_t limit = std::uint64_t{1} << nf;
  std::vector<DualEdge> edges;
  const int vw = h + 1;
  UnionFind uf(static_cast<std::size_t>((w + 1) * (h + 1)));
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    if (!(mask & col0) || !(mask & colw) || !(mask & row0) || !(mask & rowh)) continue;
    auto in = [&](int c, int r) {
      return c >= 0 && c < w && r >= 0 && r < h && (mask & bit(c, r));
    };
    edges.clear();
    bool too_long = false;
    for (int c = 0; c < w && !too_long; ++c) {
      for (int r = 0; r < h; ++r) {
        if (!(mask & bit(c, r))) continue;
        if (!in(c - 1, r)) edges.push_back({{c - 1, r - 1}, false});
        if (!in(c + 1, r)) edges.push_back({{c, r - 1}, false});
        if (!in(c, r - 1)) edges.push_back({{c - 1, r - 1}, true});
        if (!in(c, r + 1)) edges.push_back({{c - 1, r}, true});
        if (lmax > 0 && static_cast<int>(edges.size()) > lmax) {
          too_long = true;
          break;
        }
      }
    }
    if (too_long) continue;
    // vertices lie in [-1, w-1] x [-1, h-1]
    std::iota(uf.parent.begin(), uf.parent.end(), 0);
    for (const auto& e : edges) {
      auto t = e.to();
      uf.unite((e.from.x + 1) * vw + e.from.y + 1, (t.x + 1) * vw + t.y + 1);
    }
    const int root = uf.find((edges.front().from.x + 1) * vw + edges.front().from.y + 1);
    bool connected = true;
    for (const auto& e : edges) {
      if (uf.find((e.from.x + 1) * vw + e.from.y + 1) != root) {
        connected = false;
        break;
      }
    }
    if (!connected) continue;
    out.push_back(normalize_contour(edges));
    if (out.size() > max_shapes)
      throw Error(ErrorCode::kCatalogTooLarge, "more than " + std::to_string(max_shapes) + " shapes");
  }
}

}  // namespace

std::vector<ContourShape> enumerate_contours_face_sets(int lmax, std::size_t max_shapes) {
  if (lmax < 4 || lmax % 2) throw Error(ErrorCode::kInvalidArgument, "lmax must be even and >= 4");
  std::vector<ContourShape> out;
  for (int w = 1; 2 * (w + 1) <= lmax; ++w) {
    for (int h = 1; 2 * (w + h) <= lmax; ++h) {
      if (w * h > 40) throw Error(ErrorCode::kCatalogTooLarge, "face box above 40 faces");
      face_sets_in_box(w, h, lmax, out, max_shapes);
    }
  }
  std::sort(out.begin(), out.end(), [](const ContourShape& a, const ContourShape& b) {
    return a.length() != b.length() ? a.length() < b.length() : a < b;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Edge-growth generator (Redelmeier's method on the edge adjacency graph)

namespace {

class EdgeGrower {
 public:
  EdgeGrower(int lmax, std::size_t max_shapes)
      : L_(lmax), H_(2 * lmax + 1), max_shapes_(max_shapes) {
    const std::size_t nv = static_cast<std::size_t>((L_ + 2) * H_);
    degree_.assign(nv, 0);
    seen_.assign(nv * 2, 0);
  }

  std::vector<ContourShape> run() {
    std::vector<int> untried;
    for (int e : incident(vertex_id(0, 0))) {
      if (allowed(e)) {
        seen_[static_cast<std::size_t>(e)] = 1;
        untried.push_back(e);
      }
    }
    grow(untried);
    return std::move(out_);
  }

 private:
  int vertex_id(int x, int y) const { return x * H_ + (y + L_); }
  int vx(int v) const { return v / H_; }
  int vy(int v) const { return v % H_ - L_; }
  bool in_grid(int x, int y) const { return x >= 0 && x <= L_ + 1 && y >= -L_ && y <= L_; }
  // edge id = 2 * vertex + (0 horizontal | 1 vertical)
  int tail(int e) const { return e / 2; }
  int head(int e) const {
    int v = e / 2;
    return (e % 2 == 0) ? vertex_id(vx(v) + 1, vy(v)) : vertex_id(vx(v), vy(v) + 1);
  }
  bool allowed(int e) const {
    int v = e / 2;
    int x = vx(v), y = vy(v);
    int hx = (e % 2 == 0) ? x + 1 : x, hy = (e % 2 == 0) ? y : y + 1;
    if (!in_grid(x, y) || !in_grid(hx, hy) || hx > L_) return false;
    // both endpoints at or after the origin in lexicographic order
    return x > 0 || (x == 0 && y >= 0);
  }
  std::vector<int> incident(int v) const {
    std::vector<int> r;
    int x = vx(v), y = vy(v);
    r.push_back(2 * v);
    r.push_back(2 * v + 1);
    if (in_grid(x - 1, y)) r.push_back(2 * vertex_id(x - 1, y));
    if (in_grid(x, y - 1)) r.push_back(2 * vertex_id(x, y - 1) + 1);
    return r;
  }

  void bump(int v, int delta) {
    int& d = degree_[static_cast<std::size_t>(v)];
    d += delta;
    odd_ += (d % 2) ? 1 : -1;
  }

  void grow(std::vector<int> untried) {
    while (!untried.empty()) {
      int e = untried.back();
      untried.pop_back();
      current_.push_back(e);
      bump(tail(e), 1);
      bump(head(e), 1);
      if (odd_ == 0) record();
      const int size = static_cast<int>(current_.size());
      if (size < L_ && odd_ <= 2 * (L_ - size)) {
        std::vector<int> fresh;
        for (int v : {tail(e), head(e)}) {
          for (int f : incident(v)) {
            if (f >= 0 && static_cast<std::size_t>(f) < seen_.size() && allowed(f) &&
                !seen_[static_cast<std::size_t>(f)]) {
              seen_[static_cast<std::size_t>(f)] = 1;
              fresh.push_back(f);
            }
          }
        }
        std::vector<int> next = untried;
        next.insert(next.end(), fresh.begin(), fresh.end());
        grow(std::move(next));
        for (int f : fresh) seen_[static_cast<std::size_t>(f)] = 0;
      }
      bump(tail(e), -1);
      bump(head(e), -1);
      current_.pop_back();
    }
  }

  void record() {
    std::vector<DualEdge> edges;
    edges.reserve(current_.size());
    for (int e : current_) edges.push_back({{vx(e / 2), vy(e / 2)}, e % 2 == 0});
    out_.push_back(normalize_contour(std::move(edges)));
    if (out_.size() > max_shapes_)
      throw Error(ErrorCode::kCatalogTooLarge, "more than " + std::to_string(max_shapes_) + " shapes");
  }

  int L_, H_;
  std::size_t max_shapes_;
  std::vector<int> degree_;
  std::vector<char> seen_;
  std::vector<int> current_;
  int odd_ = 0;
  std::vector<ContourShape> out_;
};

}  // namespace

std::vector<ContourShape> enumerate_contours_edge_growth(int lmax, std::size_t max_shapes) {
  if (lmax < 4 || lmax % 2) throw Error(ErrorCode::kInvalidArgument, "lmax must be even and >= 4");
  auto out = EdgeGrower(lmax, max_shapes).run();
  std::sort(out.begin(), out.end(), [](const ContourShape& a, const ContourShape& b) {
    return a.length() != b.length() ? a.length() < b.length() : a < b;
  });
  return out;
}

std::vector<std::int64_t> count_by_length(const std::vector<ContourShape>& shapes, int lmax) {
  std::vector<std::int64_t> n(static_cast<std::size_t>(lmax + 1), 0);
  for (const auto& s : shapes)
    if (s.length() <= lmax) ++n[static_cast<std::size_t>(s.length())];
  return n;
}

// ---------------------------------------------------------------------------
// Catalog

ContourCatalog ContourCatalog::from_shapes(std::vector<ContourShape> shapes, int lmax,
                                           bool complete) {
  ContourCatalog c;
  std::sort(shapes.begin(), shapes.end(), [](const ContourShape& a, const ContourShape& b) {
    return a.length() != b.length() ? a.length() < b.length() : a < b;
  });
  c.lmax_ = lmax;
  c.complete_ = complete;
  c.shapes_ = std::move(shapes);
  c.by_length_.assign(static_cast<std::size_t>(lmax + 1), {});
  for (std::size_t i = 0; i < c.shapes_.size(); ++i) {
    const auto& s = c.shapes_[i];
    if (s.length() > lmax) throw Error(ErrorCode::kInvalidArgument, "shape longer than lmax");
    c.by_length_[static_cast<std::size_t>(s.length())].push_back(static_cast<std::int32_t>(i));
    for (const auto& v : s.vertices) {
      c.max_dx_ = std::max(c.max_dx_, v.x);
      c.min_dy_ = std::min(c.min_dy_, v.y);
      c.max_dy_ = std::max(c.max_dy_, v.y);
    }
  }
  return c;
}

ContourCatalog ContourCatalog::enumerate(int lmax, std::size_t max_shapes) {
  return from_shapes(enumerate_contours_face_sets(lmax, max_shapes), lmax, true);
}

ContourCatalog ContourCatalog::within_box(int n, std::size_t max_shapes) {
  if (n < 1 || n * n > 40) throw Error(ErrorCode::kInvalidArgument, "box side outside [1,6]");
  std::vector<ContourShape> out;
  for (int w = 1; w <= n; ++w)
    for (int h = 1; h <= n; ++h) face_sets_in_box(w, h, 0, out, max_shapes);
  int lmax = 4;
  for (const auto& s : out) lmax = std::max(lmax, s.length());
  return from_shapes(std::move(out), lmax, false);
}

std::vector<std::int64_t> ContourCatalog::counts() const { return count_by_length(shapes_, lmax_); }

const std::vector<std::int32_t>& ContourCatalog::ids_of_length(int length) const {
  static const std::vector<std::int32_t> none;
  if (length < 0 || length > lmax_) return none;
  return by_length_[static_cast<std::size_t>(length)];
}

std::vector<int> ContourCatalog::lengths() const {
  std::vector<int> r;
  for (int l = 0; l <= lmax_; ++l)
    if (!by_length_[static_cast<std::size_t>(l)].empty()) r.push_back(l);
  return r;
}

std::optional<ShapeId> ContourCatalog::find(const ContourShape& s) const {
  for (auto id : ids_of_length(s.length()))
    if (shapes_[static_cast<std::size_t>(id)] == s) return ShapeId{id};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Spins and contours

SpinSquare SpinSquare::from_bits(int n, std::uint64_t bits) {
  SpinSquare s(n);
  for (int k = 0; k < n * n; ++k)
    if (bits & (std::uint64_t{1} << k)) s.spins[static_cast<std::size_t>(k)] = -1;
  return s;
}

std::int8_t SpinSquare::at(int x, int y) const {
  if (x < 0 || y < 0 || x >= n || y >= n) return 1;
  return spins[static_cast<std::size_t>(x * n + y)];
}

namespace {

std::vector<std::vector<DualEdge>> components(const std::vector<DualEdge>& edges) {
  if (edges.empty()) return {};
  auto verts = vertices_of(edges);
  UnionFind uf(verts.size());
  for (const auto& e : edges)
    uf.unite(static_cast<int>(index_of(verts, e.from)), static_cast<int>(index_of(verts, e.to())));
  std::map<int, std::vector<DualEdge>> groups;
  for (const auto& e : edges) groups[uf.find(static_cast<int>(index_of(verts, e.from)))].push_back(e);
  std::vector<std::vector<DualEdge>> out;
  for (auto& [k, g] : groups) {
    std::sort(g.begin(), g.end());
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

ContourSet spins_to_contours(const SpinSquare& sigma) {
  const int n = sigma.n;
  std::vector<DualEdge> edges;
  // bond (a,b)-(a+1,b) is crossed by the vertical dual edge (a,b-1)-(a,b)
  for (int a = -1; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (sigma.at(a, b) != sigma.at(a + 1, b)) edges.push_back({{a, b - 1}, false});
  // bond (a,b)-(a,b+1) is crossed by the horizontal dual edge (a-1,b)-(a,b)
  for (int a = 0; a < n; ++a)
    for (int b = -1; b < n; ++b)
      if (sigma.at(a, b) != sigma.at(a, b + 1)) edges.push_back({{a - 1, b}, true});
  return ContourSet{n, components(edges)};
}

SpinSquare contours_to_spins(const ContourSet& gamma) {
  const int n = gamma.n;
  std::vector<DualVertex> used;
  std::vector<DualEdge> all;
  for (const auto& c : gamma.contours) {
    if (!is_contour(c)) throw Error(ErrorCode::kNotRealizable, "edge set is not a closed contour");
    for (const auto& e : c) {
      auto t = e.to();
      if (e.from.x < -1 || e.from.y < -1 || t.x > n - 1 || t.y > n - 1)
        throw Error(ErrorCode::kNotRealizable, "edge outside the dual block");
      all.push_back(e);
    }
    auto v = vertices_of(c);
    used.insert(used.end(), v.begin(), v.end());
  }
  std::sort(used.begin(), used.end());
  if (std::adjacent_find(used.begin(), used.end()) != used.end())
    throw Error(ErrorCode::kNotRealizable, "contours share a vertex");

  // parity of vertical dual edges crossed by the horizontal ray to the left
  SpinSquare sigma(n);
  std::vector<int> crossings(static_cast<std::size_t>((n + 1) * n), 0);
  for (const auto& e : all)
    if (!e.horizontal && e.from.y + 1 >= 0 && e.from.y + 1 < n)
      ++crossings[static_cast<std::size_t>((e.from.x + 1) * n + e.from.y + 1)];
  for (int y = 0; y < n; ++y) {
    int parity = 0;
    for (int x = 0; x < n; ++x) {
      parity += crossings[static_cast<std::size_t>(x * n + y)];  // edge at dual x-1
      sigma.set(x, y, (parity % 2) ? -1 : 1);
    }
  }
  ContourSet check = spins_to_contours(sigma);
  ContourSet normalized{n, components(all)};
  if (!(check == normalized))
    throw Error(ErrorCode::kNotRealizable, "edge sets are not the contours of any spin assignment");
  return sigma;
}

// ---------------------------------------------------------------------------
// Series

namespace {

PeierlsSeries finish_series(const std::vector<double>& terms, int lmax, bool complete) {
  PeierlsSeries s;
  s.lmax = lmax;
  double last = 0.0, prev = 0.0;
  for (double t : terms) {
    s.value += t;
    if (t > 0) {
      prev = last;
      last = t;
    }
  }
  if (complete && prev > 0) {
    s.growth_ratio = last / prev;
    if (s.growth_ratio < 1.0) {
      s.tail_conclusive = true;
      s.tail_estimate = last * s.growth_ratio / (1.0 - s.growth_ratio);
    }
  }
  return s;
}

}  // namespace

PeierlsSeries peierls_lhs(double beta, const ContourCatalog& catalog) {
  auto n = catalog.counts();
  std::vector<double> terms;
  for (int l = 4; l <= catalog.lmax(); l += 2)
    terms.push_back(l * static_cast<double>(n[static_cast<std::size_t>(l)]) * std::exp(-2.0 * beta * l));
  return finish_series(terms, catalog.lmax(), catalog.complete());
}

PeierlsSeries peierls_alpha_series(double beta, const ContourCatalog& catalog) {
  std::vector<double> terms;
  for (int l = 4; l <= catalog.lmax(); l += 2) {
    double m = 0;
    for (auto id : catalog.ids_of_length(l)) m += static_cast<double>(catalog.shape(ShapeId{id}).vertices.size());
    terms.push_back(l * m * std::exp(-2.0 * beta * l));
  }
  return finish_series(terms, catalog.lmax(), catalog.complete());
}

}  // namespace clansim
