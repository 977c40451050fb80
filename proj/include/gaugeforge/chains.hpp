#pragma once

// Polyhedral k-chains with rational vertices: boundary, mass, weighted
// Gaussian image, anisotropic energy, unit cube chains, boundary
// comparison and ellipticity instances of test pairs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gaugeforge/integrands.hpp"
#include "gaugeforge/rational_grassmannian.hpp"

namespace gaugeforge {

using PointQ = std::vector<Rational>;

inline constexpr double kAtomTolerance = 1e-12;
inline constexpr int kFormCount = 40;
inline constexpr int kFormDegree = 3;

inline Rational factorial_q(int k) {
  Rational f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

/// W = s * W_c with the first nonzero coordinate of W_c equal to 1.
struct DirectionClass {
  KVectorQ unit_lead;  // W_c
  Rational scale;      // s
};

inline DirectionClass direction_class(const KVectorQ& w) {
  std::size_t r = 0;
  while (r < w.size() && sgn(w[r]) == 0) ++r;
  if (r == w.size()) throw DegeneracyError("zero orientation k-vector");
  Rational s = w[r];
  KVectorQ c = w;
  c *= Rational(1 / s);
  return {std::move(c), s};
}

/// [[u_0, ..., u_k]] with rational vertices.
class OrientedSimplex {
 public:
  OrientedSimplex() = default;
  explicit OrientedSimplex(std::vector<PointQ> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.empty()) throw ArgumentError("a simplex needs at least one vertex");
    n_ = static_cast<int>(vertices_[0].size());
    int k = static_cast<int>(vertices_.size()) - 1;
    if (n_ < 1 || k > n_) throw ArgumentError("simplex has more than n+1 vertices");
    for (const auto& v : vertices_)
      if (static_cast<int>(v.size()) != n_) throw ArgumentError("simplex vertices of mixed dimension");
    std::vector<PointQ> edges;
    for (int i = 1; i <= k; ++i) {
      PointQ e(n_);
      for (int t = 0; t < n_; ++t) e[t] = vertices_[i][t] - vertices_[i - 1][t];
      edges.push_back(std::move(e));
    }
    wedge_ = wedge_all<Rational>(n_, edges);
    if (wedge_.is_zero()) throw DegeneracyError("simplex vertices are affinely dependent");
    auto dc = direction_class(wedge_);
    lead_ = std::move(dc.unit_lead);
    scale_ = dc.scale;
    gram_ = inner(lead_, lead_);
  }

  const std::vector<PointQ>& vertices() const { return vertices_; }
  int n() const { return n_; }
  int k() const { return static_cast<int>(vertices_.size()) - 1; }
  /// (u_1 - u_0) ^ ... ^ (u_k - u_{k-1}).
  const KVectorQ& edge_wedge() const { return wedge_; }
  const KVectorQ& direction() const { return lead_; }
  const Rational& scale() const { return scale_; }
  const Rational& gram() const { return gram_; }
  int orientation_sign() const { return sgn(scale_); }

  /// H^k of the convex hull: |W| / k!.
  SqrtSum volume_exact() const {
    SqrtSum v;
    v.add(abs(scale_) / factorial_q(k()), gram_);
    return v;
  }
  double volume() const { return volume_exact().to_double(); }

  GrassmannPoint tau() const { return unit_orientation(wedge_); }

  /// The unit k-vector W / |W|, exact when |W| is rational.
  static GrassmannPoint unit_orientation(const KVectorQ& w) {
    Rational len;
    if (rational_sqrt(inner(w, w), len)) {
      KVectorQ u = w;
      u *= Rational(1 / len);
      return GrassmannPoint::from_exact(u);
    }
    return GrassmannPoint::normalized(to_double(w));
  }

  /// Swaps the last two vertices (the first two when k = 1).
  OrientedSimplex flipped() const {
    auto v = vertices_;
    if (v.size() < 2) throw ArgumentError("a 0-simplex has no orientation to flip");
    std::swap(v[v.size() - 1], v[v.size() - 2]);
    return OrientedSimplex(std::move(v));
  }

  /// The face opposite to vertex i.
  OrientedSimplex face(int i) const {
    auto v = vertices_;
    v.erase(v.begin() + i);
    return OrientedSimplex(std::move(v));
  }

  friend bool operator==(const OrientedSimplex& a, const OrientedSimplex& b) {
    return a.vertices_ == b.vertices_;
  }

 private:
  std::vector<PointQ> vertices_;
  int n_ = 0;
  KVectorQ wedge_, lead_;
  Rational scale_, gram_;
};

inline OrientedSimplex make_simplex(std::vector<PointQ> vertices) { return OrientedSimplex(std::move(vertices)); }

class PolyhedralChain {
 public:
  struct Term {
    Rational a;
    OrientedSimplex simplex;
  };

  PolyhedralChain() = default;
  PolyhedralChain(int n, int k) : n_(n), k_(k) { check_degree(n, k); }

  int n() const { return n_; }
  int k() const { return k_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add(Rational a, OrientedSimplex s) {
    if (s.n() != n_ || s.k() != k_) throw ArgumentError("simplex does not match the chain's (n, k)");
    if (sgn(a) == 0) return;
    terms_.push_back({std::move(a), std::move(s)});
  }

  PolyhedralChain& operator+=(const PolyhedralChain& o) {
    check_same(o);
    for (const auto& t : o.terms_) terms_.push_back(t);
    return *this;
  }
  PolyhedralChain scaled(const Rational& c) const {
    PolyhedralChain out(n_, k_);
    for (const auto& t : terms_) out.add(t.a * c, t.simplex);
    return out;
  }
  friend PolyhedralChain operator+(PolyhedralChain a, const PolyhedralChain& b) { return a += b; }
  friend PolyhedralChain operator-(PolyhedralChain a, const PolyhedralChain& b) { return a += b.scaled(-1); }

  void check_same(const PolyhedralChain& o) const {
    if (n_ != o.n_ || k_ != o.k_) throw ArgumentError("chains of different (n, k)");
  }

 private:
  int n_ = 0, k_ = 0;
  std::vector<Term> terms_;
};

/// Canonical presentation: vertices sorted (coefficient carries the
/// permutation sign), identical simplices merged, zero terms dropped and,
/// for k >= 1, negative coefficients absorbed by a vertex swap.
inline PolyhedralChain normal_form(const PolyhedralChain& t) {
  std::map<std::vector<PointQ>, Rational> merged;
  for (const auto& term : t.terms()) {
    auto v = term.simplex.vertices();
    // Insertion sort counting transpositions.
    int parity = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
      for (std::size_t j = i; j > 0 && v[j] < v[j - 1]; --j) {
        std::swap(v[j], v[j - 1]);
        parity ^= 1;
      }
    merged[v] += parity ? Rational(-term.a) : term.a;
  }
  PolyhedralChain out(t.n(), t.k());
  for (auto& [v, a] : merged) {
    if (sgn(a) == 0) continue;
    OrientedSimplex s(v);
    if (sgn(a) < 0 && t.k() >= 1) out.add(-a, s.flipped());
    else out.add(a, s);
  }
  return out;
}

inline PolyhedralChain boundary(const PolyhedralChain& t) {
  if (t.k() < 1) throw ArgumentError("boundary of a 0-chain");
  PolyhedralChain out(t.n(), t.k() - 1);
  for (const auto& term : t.terms())
    for (int i = 0; i <= t.k(); ++i) out.add(i % 2 ? Rational(-term.a) : term.a, term.simplex.face(i));
  return normal_form(out);
}

// ---------------------------------------------------------------------------
// Affine hulls

/// Identifies the oriented-up-to-sign affine hull of a simplex: (W_c, u_0 ^ W_c).
struct HullKey {
  std::vector<Rational> direction;
  std::vector<Rational> anchor;
  friend bool operator<(const HullKey& a, const HullKey& b) {
    return std::tie(a.direction, a.anchor) < std::tie(b.direction, b.anchor);
  }
  friend bool operator==(const HullKey& a, const HullKey& b) {
    return a.direction == b.direction && a.anchor == b.anchor;
  }
};

inline HullKey hull_key(const OrientedSimplex& s) {
  HullKey key;
  if (s.k() == 0) {
    key.anchor = s.vertices()[0];
    return key;
  }
  key.direction = s.direction().coords();
  if (s.k() < s.n()) key.anchor = wedge(KVectorQ::vector(s.vertices()[0]), s.direction()).coords();
  return key;
}

/// Coordinates (0-based) on which the hull projects injectively: the
/// first Plucker coordinate where W_c = 1.
inline std::vector<int> projection_axes(const OrientedSimplex& s) {
  const auto& d = s.direction();
  for (std::size_t r = 0; r < d.size(); ++r)
    if (sgn(d[r]) != 0) {
      auto e = d.index(r).entries();
      for (auto& x : e) --x;
      return e;
    }
  return {};
}

inline PointQ project(const PointQ& p, const std::vector<int>& axes) {
  PointQ q;
  for (int a : axes) q.push_back(p[a]);
  return q;
}

struct HullGroup {
  HullKey key;
  std::vector<std::size_t> terms;  // indices into the chain
};

inline std::vector<HullGroup> hull_groups(const PolyhedralChain& t) {
  std::map<HullKey, std::size_t> where;
  std::vector<HullGroup> groups;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto key = hull_key(t.terms()[i].simplex);
    auto it = where.find(key);
    if (it == where.end()) {
      where.emplace(key, groups.size());
      groups.push_back({std::move(key), {i}});
    } else {
      groups[it->second].terms.push_back(i);
    }
  }
  return groups;
}

inline PolyhedralChain sub_chain(const PolyhedralChain& t, const HullGroup& g) {
  PolyhedralChain out(t.n(), t.k());
  for (auto i : g.terms) out.add(t.terms()[i].a, t.terms()[i].simplex);
  return out;
}

// ---------------------------------------------------------------------------
// Exact integration of |density| over a hull, in projected coordinates.

namespace detail {

struct Cell {
  Rational w;
  std::vector<PointQ> verts;  // in R^dim
};

struct PosNeg {
  Rational pos = 0;
  Rational neg = 0;
  PosNeg& operator+=(const PosNeg& o) {
    pos += o.pos;
    neg += o.neg;
    return *this;
  }
  PosNeg scaled(const Rational& c) const { return {pos * c, neg * c}; }
};

inline void sort_unique(std::vector<Rational>& xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
}

/// Weighted intervals [lo, hi] on the line.
inline PosNeg density_1d(const std::vector<std::pair<Rational, std::array<Rational, 2>>>& intervals) {
  std::vector<std::pair<Rational, Rational>> events;
  for (const auto& [w, iv] : intervals) {
    Rational lo = std::min(iv[0], iv[1]), hi = std::max(iv[0], iv[1]);
    if (lo == hi) continue;
    events.emplace_back(lo, w);
    events.emplace_back(hi, -w);
  }
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  PosNeg out;
  Rational cur = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i > 0) {
      Rational dx = events[i].first - events[i - 1].first;
      if (sgn(cur) > 0) out.pos += cur * dx;
      if (sgn(cur) < 0) out.neg -= cur * dx;
    }
    cur += events[i].second;
  }
  return out;
}

inline Rational cross2(const PointQ& a, const PointQ& b, const PointQ& o) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

/// Weighted triangles in the plane. Breaks the x-axis at vertices and edge
/// crossings; inside a slab the section length is linear in x, so the
/// midpoint value is exact.
inline PosNeg density_2d(const std::vector<Cell>& tris) {
  std::vector<Rational> xs;
  std::vector<std::pair<PointQ, PointQ>> edges;
  for (const auto& c : tris)
    for (int i = 0; i < 3; ++i) {
      xs.push_back(c.verts[i][0]);
      edges.emplace_back(c.verts[i], c.verts[(i + 1) % 3]);
    }
  for (std::size_t i = 0; i < edges.size(); ++i)
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      const auto& [p, q] = edges[i];
      const auto& [r, s] = edges[j];
      Rational d0 = q[0] - p[0], d1 = q[1] - p[1], e0 = s[0] - r[0], e1 = s[1] - r[1];
      Rational den = d0 * e1 - d1 * e0;
      if (sgn(den) == 0) continue;
      Rational t = ((r[0] - p[0]) * e1 - (r[1] - p[1]) * e0) / den;
      Rational u = ((r[0] - p[0]) * d1 - (r[1] - p[1]) * d0) / den;
      if (sgn(t) < 0 || t > 1 || sgn(u) < 0 || u > 1) continue;
      xs.push_back(p[0] + t * d0);
    }
  sort_unique(xs);
  PosNeg out;
  for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
    Rational xm = (xs[s] + xs[s + 1]) / 2, width = xs[s + 1] - xs[s];
    std::vector<std::pair<Rational, std::array<Rational, 2>>> sections;
    for (const auto& c : tris) {
      std::vector<Rational> ys;
      for (int i = 0; i < 3; ++i) {
        const auto& a = c.verts[i];
        const auto& b = c.verts[(i + 1) % 3];
        if ((a[0] < xm && xm < b[0]) || (b[0] < xm && xm < a[0]))
          ys.push_back(a[1] + (b[1] - a[1]) * (xm - a[0]) / (b[0] - a[0]));
      }
      if (ys.size() == 2) sections.push_back({c.w, {ys[0], ys[1]}});
    }
    out += density_1d(sections).scaled(width);
  }
  return out;
}

/// Convex hull (counterclockwise) of planar points, exact.
inline std::vector<PointQ> convex_hull_2d(std::vector<PointQ> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<PointQ> hull(2 * pts.size());
  std::size_t m = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (m >= 2 && sgn(cross2(hull[m - 1], pts[i], hull[m - 2])) <= 0) --m;
    hull[m++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lo = m + 1; i-- > 0;) {
    while (m >= lo && sgn(cross2(hull[m - 1], pts[i], hull[m - 2])) <= 0) --m;
    hull[m++] = pts[i];
  }
  hull.resize(m - 1);
  return hull;
}

inline Rational det3(const std::array<std::array<Rational, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Weighted tetrahedra in space. Breaks the x-axis where the arrangement
/// of cross-sections can change; inside a slab the section areas are
/// quadratic in x and Milne's rule on three interior nodes is exact.
inline PosNeg density_3d(const std::vector<Cell>& tets) {
  struct Plane {
    std::array<Rational, 3> normal;
    Rational offset;
  };
  std::vector<Rational> xs;
  std::vector<Plane> planes;
  static constexpr int kFaces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (const auto& c : tets) {
    for (const auto& v : c.verts) xs.push_back(v[0]);
    for (const auto& f : kFaces) {
      const auto &a = c.verts[f[0]], &b = c.verts[f[1]], &d = c.verts[f[2]];
      std::array<Rational, 3> u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
      std::array<Rational, 3> w{d[0] - a[0], d[1] - a[1], d[2] - a[2]};
      Plane p;
      p.normal = {u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]};
      Rational lead = sgn(p.normal[0]) != 0 ? p.normal[0] : sgn(p.normal[1]) != 0 ? p.normal[1] : p.normal[2];
      for (auto& x : p.normal) x /= lead;
      p.offset = p.normal[0] * a[0] + p.normal[1] * a[1] + p.normal[2] * a[2];
      planes.push_back(std::move(p));
    }
  }
  // Tetrahedra of a triangulation share most face planes.
  std::sort(planes.begin(), planes.end(), [](const Plane& x, const Plane& y) {
    return std::tie(x.normal, x.offset) < std::tie(y.normal, y.offset);
  });
  planes.erase(std::unique(planes.begin(), planes.end(),
                           [](const Plane& x, const Plane& y) { return x.normal == y.normal && x.offset == y.offset; }),
               planes.end());
  Rational xmin = *std::min_element(xs.begin(), xs.end()), xmax = *std::max_element(xs.begin(), xs.end());
  auto keep = [&](const Rational& x) {
    if (x > xmin && x < xmax) xs.push_back(x);
  };
  for (std::size_t i = 0; i < planes.size(); ++i)
    for (std::size_t j = i + 1; j < planes.size(); ++j) {
      const auto &p = planes[i].normal, &q = planes[j].normal;
      Rational dx = p[1] * q[2] - p[2] * q[1];
      Rational dy = p[2] * q[0] - p[0] * q[2];
      Rational dz = p[0] * q[1] - p[1] * q[0];
      if (sgn(dx) == 0 && (sgn(dy) != 0 || sgn(dz) != 0)) {
        // The intersection line lies in a plane x = const.
        if (sgn(p[1]) != 0 || sgn(p[2]) != 0) {
          Rational kappa = sgn(p[1]) != 0 ? q[1] / p[1] : q[2] / p[2];
          Rational den = q[0] - kappa * p[0];
          if (sgn(den) != 0) keep((planes[j].offset - kappa * planes[i].offset) / den);
        }
      }
      for (std::size_t l = j + 1; l < planes.size(); ++l) {
        const auto& r = planes[l].normal;
        std::array<std::array<Rational, 3>, 3> m{{{p[0], p[1], p[2]}, {q[0], q[1], q[2]}, {r[0], r[1], r[2]}}};
        Rational det = det3(m);
        if (sgn(det) == 0) continue;
        auto mx = m;
        mx[0][0] = planes[i].offset;
        mx[1][0] = planes[j].offset;
        mx[2][0] = planes[l].offset;
        keep(det3(mx) / det);
      }
    }
  sort_unique(xs);

  auto section = [&](const Rational& x) {
    std::vector<Cell> tris;
    for (const auto& c : tets) {
      std::vector<PointQ> pts;
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
          const auto &a = c.verts[i], &b = c.verts[j];
          if ((a[0] < x && x < b[0]) || (b[0] < x && x < a[0])) {
            Rational t = (x - a[0]) / (b[0] - a[0]);
            pts.push_back({a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])});
          }
        }
      auto hull = convex_hull_2d(std::move(pts));
      for (std::size_t i = 1; i + 1 < hull.size(); ++i) tris.push_back({c.w, {hull[0], hull[i], hull[i + 1]}});
    }
    return density_2d(tris);
  };

  PosNeg out;
  for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
    Rational h = (xs[s + 1] - xs[s]) / 4;
    PosNeg a = section(xs[s] + h), b = section(xs[s] + 2 * h), c = section(xs[s] + 3 * h);
    Rational f = (xs[s + 1] - xs[s]) / 3;
    out.pos += f * (2 * a.pos - b.pos + 2 * c.pos);
    out.neg += f * (2 * a.neg - b.neg + 2 * c.neg);
  }
  return out;
}

/// Integral of the positive and negative parts of the density of a group
/// of same-hull terms, measured in the projected coordinates.
inline PosNeg hull_density(const PolyhedralChain& t, const HullGroup& g) {
  int k = t.k();
  if (k == 0) {
    Rational net = 0;
    for (auto i : g.terms) net += t.terms()[i].a;
    return sgn(net) > 0 ? PosNeg{net, 0} : PosNeg{0, -net};
  }
  auto axes = projection_axes(t.terms()[g.terms[0]].simplex);
  std::vector<Cell> cells;
  for (auto i : g.terms) {
    const auto& term = t.terms()[i];
    Cell c{term.a * term.simplex.orientation_sign(), {}};
    for (const auto& v : term.simplex.vertices()) c.verts.push_back(project(v, axes));
    cells.push_back(std::move(c));
  }
  if (k == 1) {
    std::vector<std::pair<Rational, std::array<Rational, 2>>> iv;
    for (const auto& c : cells) iv.push_back({c.w, {c.verts[0][0], c.verts[1][0]}});
    return density_1d(iv);
  }
  if (k == 2) return density_2d(cells);
  if (k == 3) return density_3d(cells);
  throw ReductionUnsupportedError("exact reduction is implemented for k <= 3 only");
}

/// Separating-axis test for simplices in R^k, k <= 3: face normals of
/// both, plus cross products of edge pairs in R^3. Touching counts as
/// separated.
inline bool separated_by_axis(const std::vector<PointQ>& p, const std::vector<PointQ>& q) {
  int k = static_cast<int>(p[0].size());
  std::vector<PointQ> axes;
  auto edges = [](const std::vector<PointQ>& v) {
    std::vector<PointQ> e;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j) {
        PointQ d(v[i].size());
        for (std::size_t t = 0; t < d.size(); ++t) d[t] = v[j][t] - v[i][t];
        e.push_back(std::move(d));
      }
    return e;
  };
  auto cross3 = [](const PointQ& a, const PointQ& b) {
    return PointQ{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  };
  if (k == 1) {
    axes.push_back({Rational(1)});
  } else if (k == 2) {
    for (const auto* v : {&p, &q})
      for (const auto& e : edges(*v)) axes.push_back({-e[1], e[0]});
  } else {
    auto ep = edges(p), eq = edges(q);
    for (const auto* es : {&ep, &eq})
      for (std::size_t i = 0; i < es->size(); ++i)
        for (std::size_t j = i + 1; j < es->size(); ++j) axes.push_back(cross3((*es)[i], (*es)[j]));
    for (const auto& a : ep)
      for (const auto& b : eq) axes.push_back(cross3(a, b));
  }
  for (const auto& ax : axes) {
    bool zero = true;
    for (const auto& x : ax) zero = zero && sgn(x) == 0;
    if (zero) continue;
    auto range = [&](const std::vector<PointQ>& v) {
      Rational lo, hi;
      for (std::size_t i = 0; i < v.size(); ++i) {
        Rational d = 0;
        for (int t = 0; t < k; ++t) d += ax[t] * v[i][t];
        if (i == 0 || d < lo) lo = d;
        if (i == 0 || d > hi) hi = d;
      }
      return std::pair{lo, hi};
    };
    auto [alo, ahi] = range(p);
    auto [blo, bhi] = range(q);
    if (ahi <= blo || bhi <= alo) return true;
  }
  return false;
}

/// Do the relative interiors of two same-hull simplices meet? Exact
/// separating axes for k <= 3, an exact LP above.
inline bool interiors_overlap(const OrientedSimplex& a, const OrientedSimplex& b) {
  int k = a.k();
  if (k == 0) return a.vertices() == b.vertices();
  auto axes = projection_axes(a);
  std::vector<PointQ> p, q;
  for (const auto& v : a.vertices()) p.push_back(project(v, axes));
  for (const auto& v : b.vertices()) q.push_back(project(v, axes));
  for (int d = 0; d < k; ++d) {
    Rational alo = p[0][d], ahi = p[0][d], blo = q[0][d], bhi = q[0][d];
    for (const auto& v : p) alo = std::min(alo, v[d]), ahi = std::max(ahi, v[d]);
    for (const auto& v : q) blo = std::min(blo, v[d]), bhi = std::max(bhi, v[d]);
    if (ahi <= blo || bhi <= alo) return false;
  }
  if (k <= 3) return !separated_by_axis(p, q);
  // Variables: lambda_0..k, mu_0..k, t. Maximize t with lambda, mu >= t.
  int nv = 2 * (k + 1) + 1, tv = nv - 1;
  LinearProgram<Rational> lp;
  lp.cost.assign(nv, Rational(0));
  lp.cost[tv] = -1;
  for (int d = 0; d < k; ++d) {
    std::vector<Rational> row(nv, Rational(0));
    for (int i = 0; i <= k; ++i) {
      row[i] = p[i][d];
      row[k + 1 + i] = -q[i][d];
    }
    lp.a_eq.push_back(row);
    lp.b_eq.push_back(0);
  }
  for (int side = 0; side < 2; ++side) {
    std::vector<Rational> row(nv, Rational(0));
    for (int i = 0; i <= k; ++i) row[side * (k + 1) + i] = 1;
    lp.a_eq.push_back(row);
    lp.b_eq.push_back(1);
  }
  for (int i = 0; i < 2 * (k + 1); ++i) {
    std::vector<Rational> row(nv, Rational(0));
    row[tv] = 1;
    row[i] = -1;
    lp.a_le.push_back(row);
    lp.b_le.push_back(0);
  }
  auto sol = solve_lp(lp);
  return sol.status == LpStatus::optimal && sgn(sol.objective) < 0;
}

}  // namespace detail

/// True when every coefficient is positive and no two simplices in the
/// same affine hull have overlapping relative interiors.
inline bool is_reduced(const PolyhedralChain& t) {
  for (const auto& term : t.terms())
    if (sgn(term.a) <= 0 && t.k() >= 1) return false;
  for (const auto& g : hull_groups(t))
    for (std::size_t i = 0; i < g.terms.size(); ++i)
      for (std::size_t j = i + 1; j < g.terms.size(); ++j)
        if (detail::interiors_overlap(t.terms()[g.terms[i]].simplex, t.terms()[g.terms[j]].simplex)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Gaussian image, mass, energy

struct AtomicGrassmannMeasure {
  struct Atom {
    double weight;
    GrassmannPoint point;
  };
  std::vector<Atom> atoms;

  void add(double w, GrassmannPoint p) { atoms.push_back({w, std::move(p)}); }

  double total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.weight;
    return s;
  }

  /// Atoms within tol of an earlier atom are merged into it.
  AtomicGrassmannMeasure merged(double tol = kAtomTolerance) const {
    AtomicGrassmannMeasure out;
    for (const auto& a : atoms) {
      bool done = false;
      for (auto& b : out.atoms)
        if (distance(a.point.vec(), b.point.vec()) <= tol) {
          b.weight += a.weight;
          done = true;
          break;
        }
      if (!done) out.atoms.push_back(a);
    }
    return out;
  }

  double total_variation(double tol = kAtomTolerance) const {
    double s = 0.0;
    for (const auto& a : merged(tol).atoms) s += std::fabs(a.weight);
    return s;
  }

  double integrate(const Integrand& f) const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.weight * f(a.point);
    return s;
  }

  friend AtomicGrassmannMeasure operator-(const AtomicGrassmannMeasure& a, const AtomicGrassmannMeasure& b) {
    AtomicGrassmannMeasure out = a;
    for (const auto& x : b.atoms) out.add(-x.weight, x.point);
    return out;
  }
};

/// ||a - b||_TV of atomic measures.
inline double tv_distance(const AtomicGrassmannMeasure& a, const AtomicGrassmannMeasure& b,
                          double tol = kAtomTolerance) {
  return (a - b).total_variation(tol);
}

struct GaussianAtom {
  KVectorQ direction;  // +-W_c
  SqrtSum weight;
  GrassmannPoint point;
};

struct GaussianMeasure {
  std::vector<GaussianAtom> atoms;
  bool reduced_input = true;  // false when overlaps were resolved by integration

  SqrtSum total_variation_exact() const {
    SqrtSum s;
    for (const auto& a : atoms) s += a.weight;
    return s;
  }
  AtomicGrassmannMeasure to_atomic() const {
    AtomicGrassmannMeasure m;
    for (const auto& a : atoms) m.add(a.weight.to_double(), a.point);
    return m;
  }
};

/// gamma_T: one atom per orientation. Chains in reduced form sum
/// a_i H^k(Delta_i); otherwise each hull's density is integrated exactly
/// (k <= 3) and the positive and negative parts land on +-W_c.
inline GaussianMeasure gaussian_measure(const PolyhedralChain& t) {
  PolyhedralChain nf = normal_form(t);
  GaussianMeasure out;
  std::map<std::vector<Rational>, std::pair<KVectorQ, SqrtSum>> acc;
  auto deposit = [&](const KVectorQ& dir, const Rational& coeff, const Rational& radicand) {
    auto& slot = acc[dir.coords()];
    if (slot.first.size() == 0) slot.first = dir;
    slot.second.add(coeff, radicand);
  };
  if (t.k() >= 1 && is_reduced(nf)) {
    for (const auto& term : nf.terms()) {
      const auto& s = term.simplex;
      KVectorQ dir = s.direction();
      if (s.orientation_sign() < 0) dir = -dir;
      deposit(dir, term.a * abs(s.scale()) / factorial_q(s.k()), s.gram());
    }
  } else {
    if (t.k() > 3) throw ReductionUnsupportedError("chain is not reduced and k > 3");
    out.reduced_input = t.k() == 0 || is_reduced(nf);
    for (const auto& g : hull_groups(nf)) {
      auto pn = detail::hull_density(nf, g);
      const auto& s = nf.terms()[g.terms[0]].simplex;
      KVectorQ dir = s.direction();
      if (sgn(pn.pos) > 0) deposit(dir, pn.pos, s.gram());
      if (sgn(pn.neg) > 0) deposit(-dir, pn.neg, s.gram());
    }
  }
  for (auto& [key, slot] : acc) {
    if (slot.second.terms().empty()) continue;
    out.atoms.push_back({slot.first, slot.second, OrientedSimplex::unit_orientation(slot.first)});
  }
  return out;
}

/// M(T) = sum a_i H^k(Delta_i) in reduced form, exactly.
inline SqrtSum mass_exact(const PolyhedralChain& t) {
  PolyhedralChain nf = normal_form(t);
  if (t.k() >= 1 && is_reduced(nf)) {
    SqrtSum m;
    for (const auto& term : nf.terms()) {
      SqrtSum v = term.simplex.volume_exact();
      for (const auto& [q, r] : v.terms()) m.add(term.a * r, q);
    }
    return m;
  }
  return gaussian_measure(nf).total_variation_exact();
}

/// M(T) as a double: the sum of Gaussian atom weights in atom order.
inline double mass(const PolyhedralChain& t) {
  double s = 0.0;
  for (const auto& a : gaussian_measure(t).atoms) s += a.weight.to_double();
  return s;
}

/// Phi_F(T) = integral of F against gamma_T.
inline double energy(const Integrand& f, const PolyhedralChain& t) {
  if (f.n() != t.n() || f.k() != t.k()) throw ArgumentError("integrand and chain differ in (n, k)");
  double s = 0.0;
  for (const auto& a : gaussian_measure(t).atoms) s += a.weight.to_double() * f(a.point);
  return s;
}

// ---------------------------------------------------------------------------
// Cubes and refinements

/// (p^*)_# of the Kuhn triangulation of [0,1]^k. The rows of p must be
/// exactly orthonormal (p p^T = I).
inline PolyhedralChain unit_cube_chain(const MatrixQ& p) {
  int k = p.rows(), n = p.cols();
  if (k < 1 || k > n) throw ArgumentError("projection must map R^n onto R^k with 1 <= k <= n");
  if (!(p * p.transposed() == MatrixQ::identity(k))) throw ArgumentError("p p^* is not the identity");
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  PolyhedralChain out(n, k);
  do {
    std::vector<PointQ> verts;
    PointQ cur(k, Rational(0));
    verts.push_back(cur);
    for (int j = 0; j < k; ++j) {
      cur[perm[j]] += 1;
      verts.push_back(cur);
    }
    int inversions = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if (perm[i] > perm[j]) ++inversions;
    if (inversions % 2) std::swap(verts[k], verts[k - 1]);
    std::vector<PointQ> pushed;
    for (const auto& v : verts) {
      PointQ x(n, Rational(0));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) x[i] += p(j, i) * v[j];
      pushed.push_back(std::move(x));
    }
    out.add(1, OrientedSimplex(std::move(pushed)));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

inline PolyhedralChain unit_cube_chain(const RationalSimpleVector& plane) {
  return unit_cube_chain(MatrixQ::from_rows(plane.factors(), plane.n()));
}

/// Barycentric subdivision; every piece keeps the parent's orientation.
inline PolyhedralChain barycentric_subdivision(const PolyhedralChain& t) {
  PolyhedralChain out(t.n(), t.k());
  int k = t.k(), n = t.n();
  for (const auto& term : t.terms()) {
    const auto& v = term.simplex.vertices();
    std::vector<int> perm(k + 1);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::vector<PointQ> verts;
      PointQ sum(n, Rational(0));
      for (int j = 0; j <= k; ++j) {
        for (int t2 = 0; t2 < n; ++t2) sum[t2] += v[perm[j]][t2];
        PointQ b = sum;
        for (auto& x : b) x /= (j + 1);
        verts.push_back(std::move(b));
      }
      OrientedSimplex piece(std::move(verts));
      if (k >= 1 && piece.orientation_sign() != term.simplex.orientation_sign()) piece = piece.flipped();
      out.add(term.a, std::move(piece));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Boundary comparison

struct BoundaryComparison {
  bool equal = false;
  bool exact = false;        // decided by exact overlay
  bool downgraded = false;   // exact path unavailable, randomized used
  int forms = 0;
  int degree = 0;
  std::string method;
};

namespace detail {

/// h_d(y_0, ..., y_j), the complete homogeneous symmetric polynomial.
inline Rational complete_homogeneous(const std::vector<Rational>& y, int d) {
  std::vector<Rational> h(d + 1, Rational(0));
  h[0] = 1;
  for (const auto& v : y)
    for (int e = 1; e <= d; ++e) h[e] += v * h[e - 1];
  return h[d];
}

inline Rational binomial_q(int n, int k) { return Rational(static_cast<long>(binomial(n, k))); }

/// A polynomial j-form sum_lambda sum_t c * l(x)^d dx_lambda with affine l.
struct PolyForm {
  struct Term {
    Rational c;
    std::vector<Rational> lin;  // l(x) = lin[0] + sum lin[i+1] x_i
    int d;
  };
  std::vector<std::vector<Term>> per_index;

  static PolyForm random(int n, int j, int max_degree, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coef(-50, 50), deg(0, max_degree);
    PolyForm w;
    w.per_index.resize(static_cast<std::size_t>(binomial(n, j)));
    for (auto& terms : w.per_index)
      for (int t = 0; t < 2; ++t) {
        Term term{coef(rng), std::vector<Rational>(n + 1), deg(rng)};
        for (auto& x : term.lin) x = coef(rng);
        terms.push_back(std::move(term));
      }
    return w;
  }

  /// Integral over an oriented simplex: sum W[lambda] / j! * mean(P_lambda).
  Rational integrate(const OrientedSimplex& s) const {
    int j = s.k();
    const auto& w = s.edge_wedge();
    Rational total = 0;
    for (std::size_t r = 0; r < per_index.size(); ++r) {
      if (sgn(w[r]) == 0) continue;
      Rational mean = 0;
      for (const auto& term : per_index[r]) {
        std::vector<Rational> vals;
        for (const auto& v : s.vertices()) {
          Rational l = term.lin[0];
          for (std::size_t i = 0; i < v.size(); ++i) l += term.lin[i + 1] * v[i];
          vals.push_back(l);
        }
        mean += term.c * complete_homogeneous(vals, term.d) / binomial_q(j + term.d, term.d);
      }
      total += w[r] * mean;
    }
    return total / factorial_q(j);
  }
};

}  // namespace detail

/// del A == del B. Exact overlay for boundaries of degree <= 2; otherwise
/// exact evaluation on random polynomial forms ("probably equal").
inline BoundaryComparison boundary_equal(const PolyhedralChain& a, const PolyhedralChain& b, std::uint64_t seed = 0,
                                         int forms = kFormCount, int degree = kFormDegree) {
  a.check_same(b);
  BoundaryComparison out;
  PolyhedralChain z = normal_form(boundary(a) - boundary(b));
  int j = a.k() - 1;
  if (z.empty()) {
    out.equal = true;
    out.exact = true;
    out.method = "normal-form";
    return out;
  }
  if (j <= 2) {
    out.exact = true;
    out.method = "overlay";
    out.equal = true;
    for (const auto& g : hull_groups(z)) {
      auto pn = detail::hull_density(z, g);
      if (sgn(pn.pos) != 0 || sgn(pn.neg) != 0) {
        out.equal = false;
        break;
      }
    }
    return out;
  }
  out.downgraded = true;
  out.method = "random-forms";
  out.forms = forms;
  out.degree = degree;
  std::mt19937_64 rng(seed);
  out.equal = true;
  for (int f = 0; f < forms && out.equal; ++f) {
    auto w = detail::PolyForm::random(a.n(), j, degree, rng);
    Rational v = 0;
    for (const auto& term : z.terms()) v += term.a * w.integrate(term.simplex);
    if (sgn(v) != 0) out.equal = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ellipticity instances

struct EllipticityReport {
  double c = 0;
  double energy_s = 0, energy_d = 0, mass_s = 0, mass_d = 0;
  double lhs = 0, rhs = 0, margin = 0;
  bool holds = false;
  bool degenerate = false;  // S = D as currents: the strict inequality cannot hold
  BoundaryComparison boundary;
};

/// Phi_F(S) - Phi_F(D) > c (M(S) - M(D)) for a test pair (S, D).
inline EllipticityReport check_ellipticity_instance(const Integrand& f, double c, const PolyhedralChain& s,
                                                    const PolyhedralChain& d) {
  s.check_same(d);
  EllipticityReport rep;
  rep.c = c;
  rep.boundary = boundary_equal(s, d);
  if (!rep.boundary.equal) throw TestPairError("boundaries of S and D differ");
  auto gd = gaussian_measure(d);
  if (gd.atoms.size() != 1 || !(gd.total_variation_exact() == SqrtSum(Rational(1))))
    throw TestPairError("D is not a unit cube chain");
  rep.energy_s = energy(f, s);
  rep.energy_d = energy(f, d);
  rep.mass_s = mass(s);
  rep.mass_d = mass(d);
  rep.lhs = rep.energy_s - rep.energy_d;
  rep.rhs = c * (rep.mass_s - rep.mass_d);
  rep.margin = rep.lhs - rep.rhs;
  PolyhedralChain diff = normal_form(s - d);
  rep.degenerate = diff.empty() || (s.k() <= 3 && mass_exact(diff).terms().empty());
  rep.holds = !rep.degenerate && rep.margin > 0;
  return rep;
}

}  // namespace gaugeforge
