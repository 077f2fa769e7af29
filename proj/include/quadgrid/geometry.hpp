#pragma once

// Internal boundary model: alignment curves (IAC), spanning curves (SIAC),
// quadrilateral curves (QIAC) and conformal groups of them (IQIAC), plus the
// operations that reduce everything to a set of spanning curves.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quadgrid/error.hpp"
#include "quadgrid/point.hpp"

namespace quadgrid {

enum class Orientation { Horizontal, Vertical };

constexpr std::string_view to_string(Orientation o) noexcept {
  return o == Orientation::Horizontal ? "horizontal" : "vertical";
}

/// Coordinate in which a curve of orientation `o` must grow.
constexpr double growth_coord(Point p, Orientation o) noexcept {
  return o == Orientation::Horizontal ? p.x : p.y;
}
/// The other coordinate.
constexpr double cross_coord(Point p, Orientation o) noexcept {
  return o == Orientation::Horizontal ? p.y : p.x;
}

struct Polyline {
  std::vector<Point> vertices;

  std::size_t size() const noexcept { return vertices.size(); }

  void validate(double eps) const {
    if (vertices.size() < 2) fail(ErrorKind::DegeneratePolyline, "a polyline needs at least two vertices");
    for (std::size_t k = 0; k < vertices.size(); ++k) {
      if (!std::isfinite(vertices[k].x) || !std::isfinite(vertices[k].y))
        fail(ErrorKind::DegeneratePolyline, "vertex " + std::to_string(k) + " is not finite");
      if (k > 0 && distance(vertices[k], vertices[k - 1]) <= eps)
        fail(ErrorKind::DegeneratePolyline, "vertices " + std::to_string(k - 1) + " and " + std::to_string(k) +
                                                " coincide (zero-length segment)");
    }
  }
};

struct Iac {
  Polyline polyline;
  std::string name;
};

/// Spanning, growing alignment curve. Vertices run left to right
/// (horizontal) or bottom to top (vertical).
struct Siac {
  Orientation orientation = Orientation::Horizontal;
  std::vector<Point> vertices;
  std::string name;
};

/// Convex quadrilateral internal boundary. Corners are stored in canonical
/// order: bottom-left, bottom-right, top-right, top-left.
struct Qiac {
  std::array<Point, 4> corners{};
  std::string name;

  std::vector<Point> bottom() const { return {corners[0], corners[1]}; }
  std::vector<Point> top() const { return {corners[3], corners[2]}; }
  std::vector<Point> left() const { return {corners[0], corners[3]}; }
  std::vector<Point> right() const { return {corners[1], corners[2]}; }
};

/// Conformal complex assembled from associated QIAC. The complex is a
/// logical `rows x cols` lattice of points; row k is the k-th horizontal
/// line (bottom to top), column l the l-th vertical line (left to right).
struct Iqiac {
  std::vector<Qiac> members;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Point> lattice;  ///< row-major, index k * cols + l
  std::vector<Point> artificial_vertices;
  std::vector<std::array<std::size_t, 4>> quads;  ///< counter-clockwise lattice indices
  std::string name;

  Point at(std::size_t k, std::size_t l) const { return lattice[k * cols + l]; }
  std::vector<Point> horizontal_line(std::size_t k) const {
    return {lattice.begin() + static_cast<std::ptrdiff_t>(k * cols),
            lattice.begin() + static_cast<std::ptrdiff_t>((k + 1) * cols)};
  }
  std::vector<Point> vertical_line(std::size_t l) const {
    std::vector<Point> out;
    for (std::size_t k = 0; k < rows; ++k) out.push_back(at(k, l));
    return out;
  }
};

struct BoundarySet {
  std::vector<Iac> iacs;
  std::vector<Siac> siacs;
  std::vector<Qiac> qiacs;
  std::vector<std::vector<Qiac>> iqiac_groups;
  std::vector<Point> wells;

  bool empty() const noexcept {
    return iacs.empty() && siacs.empty() && qiacs.empty() && iqiac_groups.empty() && wells.empty();
  }
};

namespace detail {

inline std::string label(std::string_view kind, const std::string& name) {
  return name.empty() ? std::string(kind) : std::string(kind) + " '" + name + "'";
}

inline void require_growing(const std::vector<Point>& pts, Orientation o, double eps, const std::string& who) {
  for (std::size_t k = 1; k < pts.size(); ++k) {
    if (!(growth_coord(pts[k], o) > growth_coord(pts[k - 1], o) + eps))
      fail(ErrorKind::NotGrowing, who + ": " + std::string(o == Orientation::Horizontal ? "abscissa" : "ordinate") +
                                      " of vertex " + std::to_string(k) + " does not exceed that of vertex " +
                                      std::to_string(k - 1));
  }
}

/// Point where the ray from `origin` along `dir` reaches the low (x=a or y=c)
/// or high side crossed by orientation `o`.
inline Point ray_to_side(Point origin, Point dir, const Domain& dom, Orientation o, bool high, double eps,
                         const std::string& who) {
  const double target = o == Orientation::Horizontal ? (high ? dom.b : dom.a) : (high ? dom.d : dom.c);
  const double along = growth_coord(dir, o);
  const double t = (target - growth_coord(origin, o)) / along;
  const double other = cross_coord(origin, o) + t * cross_coord(dir, o);
  const double lo = o == Orientation::Horizontal ? dom.c : dom.a;
  const double hi = o == Orientation::Horizontal ? dom.d : dom.b;
  if (!std::isfinite(other) || other < lo - eps || other > hi + eps)
    fail(ErrorKind::ExtensionEscapesDomain,
         who + ": extending the " + (high ? "last" : "first") + " segment leaves the domain through the " +
             (o == Orientation::Horizontal ? (other > hi ? "top" : "bottom") : (other > hi ? "right" : "left")) +
             " side instead of reaching the opposite " + (o == Orientation::Horizontal ? "vertical" : "horizontal") +
             " side");
  const double clamped = std::clamp(other, lo, hi);
  return o == Orientation::Horizontal ? Point{target, clamped} : Point{clamped, target};
}

/// Extends a growing chain of interior points to both sides of the domain.
inline std::vector<Point> extend_chain(std::vector<Point> pts, const Domain& dom, Orientation o, double eps,
                                       const std::string& who) {
  require_growing(pts, o, eps, who);
  const std::size_t n = pts.size();
  const Point first = ray_to_side(pts[0], pts[0] - pts[1], dom, o, false, eps, who);
  const Point last = ray_to_side(pts[n - 1], pts[n - 1] - pts[n - 2], dom, o, true, eps, who);
  pts.insert(pts.begin(), first);
  pts.push_back(last);
  return pts;
}

inline bool polyline_self_intersects(const std::vector<Point>& v, double eps) {
  const std::size_t ns = v.size() - 1;
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t t = s + 1; t < ns; ++t) {
      if (segments_overlap(v[s], v[s + 1], v[t], v[t + 1], eps)) return true;
      if (t == s + 1) continue;  // adjacent segments share a vertex
      if (segment_intersection(v[s], v[s + 1], v[t], v[t + 1], eps)) return true;
    }
  }
  return false;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace detail

/// Orientation heuristic for curves that do not say: horizontal when the
/// total horizontal travel is at least the total vertical travel.
inline Orientation detect_orientation(const Polyline& p) {
  double dx = 0.0;
  double dy = 0.0;
  for (std::size_t k = 1; k < p.vertices.size(); ++k) {
    dx += std::abs(p.vertices[k].x - p.vertices[k - 1].x);
    dy += std::abs(p.vertices[k].y - p.vertices[k - 1].y);
  }
  return dx >= dy ? Orientation::Horizontal : Orientation::Vertical;
}

/// Validates a user-supplied spanning curve and returns it with its detected
/// orientation, re-enumerated left-to-right or bottom-to-top.
inline Siac validate_siac(const Polyline& polyline, const Domain& dom, double eps, std::string name = {}) {
  const std::string who = detail::label("SIAC", name);
  polyline.validate(eps);
  for (const Point& p : polyline.vertices)
    if (!dom.contains(p, eps)) fail(ErrorKind::NotSpanning, who + ": vertex " + to_string(p) + " lies outside the domain");

  const Point p0 = polyline.vertices.front();
  const Point p1 = polyline.vertices.back();
  auto side_of = [&](Point p) {
    struct Sides {
      bool left, right, bottom, top;
    };
    return Sides{dom.on_left(p, eps), dom.on_right(p, eps), dom.on_bottom(p, eps), dom.on_top(p, eps)};
  };
  const auto s0 = side_of(p0);
  const auto s1 = side_of(p1);
  if (!(s0.left || s0.right || s0.bottom || s0.top) || !(s1.left || s1.right || s1.bottom || s1.top))
    fail(ErrorKind::NotSpanning, who + ": both ends must lie on the external boundary");

  const bool can_h = (s0.left && s1.right) || (s0.right && s1.left);
  const bool can_v = (s0.bottom && s1.top) || (s0.top && s1.bottom);
  if (!can_h && !can_v)
    fail(ErrorKind::MalformedSiac,
         who + ": ends do not lie on opposite sides (a SIAC never runs from a horizontal side to a vertical one)");

  Orientation o = can_h ? Orientation::Horizontal : Orientation::Vertical;
  if (can_h && can_v) o = detect_orientation(polyline);  // corner to corner

  Siac s{o, polyline.vertices, std::move(name)};
  if (growth_coord(s.vertices.back(), o) < growth_coord(s.vertices.front(), o))
    std::reverse(s.vertices.begin(), s.vertices.end());
  detail::require_growing(s.vertices, o, eps, who);
  for (std::size_t k = 1; k + 1 < s.vertices.size(); ++k)
    if (!dom.strictly_inside(s.vertices[k], eps))
      fail(ErrorKind::MalformedSiac, who + ": interior vertex " + to_string(s.vertices[k]) +
                                         " touches the external boundary");
  return s;
}

inline Siac validate_siac(const Polyline& polyline, const Domain& dom) {
  return validate_siac(polyline, dom, dom.eps());
}

/// Extends an interior alignment curve along its end segments to the two
/// sides of the domain crossed in `orientation`.
inline Siac extend_iac_to_siac(const Iac& iac, const Domain& dom, Orientation orientation, double eps) {
  const std::string who = detail::label("IAC", iac.name);
  iac.polyline.validate(eps);
  for (const Point& p : iac.polyline.vertices)
    if (!dom.strictly_inside(p, eps))
      fail(ErrorKind::InvalidIac, who + ": vertex " + to_string(p) + " touches or leaves the external boundary");
  if (detail::polyline_self_intersects(iac.polyline.vertices, eps))
    fail(ErrorKind::InvalidIac, who + ": segments intersect each other");

  std::vector<Point> pts = iac.polyline.vertices;
  if (growth_coord(pts.back(), orientation) < growth_coord(pts.front(), orientation))
    std::reverse(pts.begin(), pts.end());
  return Siac{orientation, detail::extend_chain(std::move(pts), dom, orientation, eps, who), iac.name};
}

inline Siac extend_iac_to_siac(const Iac& iac, const Domain& dom, Orientation orientation) {
  return extend_iac_to_siac(iac, dom, orientation, dom.eps());
}

/// Builds a QIAC from four corners in any rotational order. Rejects
/// non-convex, degenerate, and self-intersecting quadrilaterals, and ones whose
/// edges cannot be split into two growing horizontal and two growing vertical
/// lines.
inline Qiac make_qiac(std::array<Point, 4> pts, double eps, std::string name = {}) {
  const std::string who = detail::label("QIAC", name);
  for (const Point& p : pts)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) fail(ErrorKind::InvalidQiac, who + ": corner is not finite");
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j)
      if (distance(pts[i], pts[j]) <= eps) fail(ErrorKind::InvalidQiac, who + ": repeated corner");

  double area2 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) area2 += cross(pts[i], pts[(i + 1) % 4]);
  if (area2 < 0.0) std::reverse(pts.begin(), pts.end());
  double scale = 0.0;
  for (std::size_t i = 0; i < 4; ++i) scale = std::max(scale, distance(pts[i], pts[(i + 1) % 4]));
  for (std::size_t i = 0; i < 4; ++i) {
    if (orient(pts[i], pts[(i + 1) % 4], pts[(i + 2) % 4]) <= eps * scale)
      fail(ErrorKind::InvalidQiac, who + ": non-convex (corner " + to_string(pts[(i + 1) % 4]) +
                                       " is reflex or collinear)");
  }

  std::optional<std::size_t> best;
  for (std::size_t s = 0; s < 4; ++s) {
    const Point bl = pts[s], br = pts[(s + 1) % 4], tr = pts[(s + 2) % 4], tl = pts[(s + 3) % 4];
    const bool ok = br.x > bl.x + eps && tr.x > tl.x + eps && tl.y > bl.y + eps && tr.y > br.y + eps;
    if (!ok) continue;
    if (!best || bl.x + bl.y < pts[*best].x + pts[*best].y) best = s;
  }
  if (!best)
    fail(ErrorKind::InvalidQiac, who + ": edges cannot be split into growing horizontal and vertical pairs");
  Qiac q;
  for (std::size_t i = 0; i < 4; ++i) q.corners[i] = pts[(*best + i) % 4];
  q.name = std::move(name);
  return q;
}

inline void require_interior(const Qiac& q, const Domain& dom, double eps) {
  for (const Point& p : q.corners)
    if (!dom.strictly_inside(p, eps))
      fail(ErrorKind::InvalidQiac, detail::label("QIAC", q.name) + ": corner " + to_string(p) +
                                       " touches or leaves the external boundary");
}

inline Rect bounding_rect(std::span<const Point> pts) {
  Rect r{pts[0].x, pts[0].x, pts[0].y, pts[0].y};
  for (const Point& p : pts) {
    r.xmin = std::min(r.xmin, p.x);
    r.xmax = std::max(r.xmax, p.x);
    r.ymin = std::min(r.ymin, p.y);
    r.ymax = std::max(r.ymax, p.y);
  }
  return r;
}

/// Smallest axis-aligned rectangle containing the QIAC.
inline Rect minimal_rectangle(const Qiac& q) { return bounding_rect(q.corners); }
inline Rect minimal_rectangle(const Iqiac& q) { return bounding_rect(q.lattice); }

/// True when the closed rectangle and the closed convex polygon share a point.
inline bool rect_meets_polygon(const Rect& r, std::span<const Point> poly, double tol = 0.0) {
  for (const Point& p : poly)
    if (r.contains(p, tol)) return true;
  const std::array<Point, 4> rc{Point{r.xmin, r.ymin}, Point{r.xmax, r.ymin}, Point{r.xmax, r.ymax},
                                Point{r.xmin, r.ymax}};
  double sign = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) sign += cross(poly[i], poly[(i + 1) % poly.size()]);
  for (const Point& c : rc) {
    bool inside = true;
    for (std::size_t i = 0; i < poly.size() && inside; ++i)
      inside = orient(poly[i], poly[(i + 1) % poly.size()], c) * sign >= -tol;
    if (inside) return true;
  }
  for (std::size_t i = 0; i < poly.size(); ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (segment_intersection(poly[i], poly[(i + 1) % poly.size()], rc[j], rc[(j + 1) % 4], tol)) return true;
  return false;
}

/// Two QIAC are associated when their minimal rectangles meet, or when the
/// minimal rectangle of one meets the other QIAC.
inline bool are_associated(const Qiac& q1, const Qiac& q2, double tol = 0.0) {
  const Rect r1 = minimal_rectangle(q1);
  const Rect r2 = minimal_rectangle(q2);
  if (r1.intersects(r2, tol)) return true;
  return rect_meets_polygon(r1, q2.corners, tol) || rect_meets_polygon(r2, q1.corners, tol);
}

/// Unique crossing point of a horizontal and a vertical spanning curve.
inline Point intersect_siacs(const Siac& h, const Siac& v, double eps) {
  if (h.orientation != Orientation::Horizontal || v.orientation != Orientation::Vertical)
    fail(ErrorKind::InvalidArgument, "intersect_siacs expects a horizontal and a vertical SIAC");
  const std::string who = detail::label("SIAC", h.name) + " and " + detail::label("SIAC", v.name);
  std::vector<Point> hits;
  for (std::size_t s = 0; s + 1 < h.vertices.size(); ++s) {
    for (std::size_t t = 0; t + 1 < v.vertices.size(); ++t) {
      const Point a0 = h.vertices[s], a1 = h.vertices[s + 1], b0 = v.vertices[t], b1 = v.vertices[t + 1];
      // segments whose spans cannot overlap are skipped (both curves are monotone)
      if (std::max(b0.x, b1.x) < a0.x - eps || std::min(b0.x, b1.x) > a1.x + eps) continue;
      if (std::max(a0.y, a1.y) < b0.y - eps || std::min(a0.y, a1.y) > b1.y + eps) continue;
      if (segments_overlap(a0, a1, b0, b1, eps))
        fail(ErrorKind::MultipleIntersections, who + " share a segment");
      if (auto p = segment_intersection(a0, a1, b0, b1, eps)) {
        const bool known = std::any_of(hits.begin(), hits.end(), [&](Point q) { return distance(q, *p) <= 10 * eps; });
        if (!known) hits.push_back(*p);
      }
    }
  }
  if (hits.empty())
    fail(ErrorKind::NoIntersection, who + " do not intersect (a horizontal and a vertical SIAC must cross exactly once)");
  if (hits.size() > 1)
    fail(ErrorKind::MultipleIntersections,
         who + " intersect " + std::to_string(hits.size()) + " times (they must cross exactly once)");
  return hits.front();
}

inline Point intersect_siacs(const Siac& h, const Siac& v) {
  double scale = 0.0;
  for (const Point& p : h.vertices) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
  return intersect_siacs(h, v, 1e-9 * std::max(scale, 1.0));
}

/// True when two curves share at least one point.
inline bool curves_touch(const std::vector<Point>& p, const std::vector<Point>& q, double eps) {
  for (std::size_t s = 0; s + 1 < p.size(); ++s)
    for (std::size_t t = 0; t + 1 < q.size(); ++t)
      if (segments_overlap(p[s], p[s + 1], q[t], q[t + 1], eps) ||
          segment_intersection(p[s], p[s + 1], q[t], q[t + 1], eps))
        return true;
  return false;
}

/// Assembles associated QIAC into a conformal complex.
///
/// Edges of the members are merged into lines: horizontal edges that chain
/// end to end or coincide form one horizontal line, likewise vertical edges.
/// Every line is extended along its end segments, and the complex is the
/// lattice of crossings of the horizontal lines with the vertical lines.
/// Crossings that are not member corners become artificial vertices. Every
/// lattice cell must be a strictly convex quadrilateral and no two members may
/// overlap; otherwise the group is rejected as NonConformable.
inline Iqiac build_iqiac(const std::vector<Qiac>& qs, const Domain& dom, double eps, std::string name = {}) {
  const std::string who = detail::label("IQIAC", name);
  if (qs.empty()) fail(ErrorKind::InvalidArgument, who + ": group has no QIAC");
  for (const Qiac& q : qs) require_interior(q, dom, eps);

  {
    detail::UnionFind groups(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i)
      for (std::size_t j = i + 1; j < qs.size(); ++j)
        if (are_associated(qs[i], qs[j], eps)) groups.unite(i, j);
    for (std::size_t i = 1; i < qs.size(); ++i)
      if (groups.find(i) != groups.find(0))
        fail(ErrorKind::NotAssociated, who + ": " + detail::label("QIAC", qs[i].name) +
                                           " is not associated with the rest of the group");
  }

  struct Edge {
    Point lo, hi;
  };
  auto merge_lines = [&](Orientation o) {
    std::vector<Edge> edges;
    for (const Qiac& q : qs) {
      const auto e0 = o == Orientation::Horizontal ? q.bottom() : q.left();
      const auto e1 = o == Orientation::Horizontal ? q.top() : q.right();
      edges.push_back({e0[0], e0[1]});
      edges.push_back({e1[0], e1[1]});
    }
    detail::UnionFind uf(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i)
      for (std::size_t j = i + 1; j < edges.size(); ++j) {
        const Edge& a = edges[i];
        const Edge& b = edges[j];
        const bool chain = distance(a.hi, b.lo) <= eps || distance(b.hi, a.lo) <= eps;
        const bool same = distance(a.lo, b.lo) <= eps && distance(a.hi, b.hi) <= eps;
        if (chain || same || segments_overlap(a.lo, a.hi, b.lo, b.hi, eps)) uf.unite(i, j);
      }
    std::vector<std::vector<Point>> lines;
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const std::size_t r = uf.find(i);
      auto it = std::find(roots.begin(), roots.end(), r);
      std::size_t slot = static_cast<std::size_t>(it - roots.begin());
      if (it == roots.end()) {
        roots.push_back(r);
        lines.emplace_back();
      }
      for (Point p : {edges[i].lo, edges[i].hi}) {
        auto& line = lines[slot];
        if (std::none_of(line.begin(), line.end(), [&](Point q) { return distance(p, q) <= eps; }))
          line.push_back(p);
      }
    }
    for (std::size_t li = 0; li < lines.size(); ++li) {
      auto& line = lines[li];
      std::sort(line.begin(), line.end(),
                [o](Point p, Point q) { return growth_coord(p, o) < growth_coord(q, o); });
      for (std::size_t k = 1; k < line.size(); ++k)
        if (growth_coord(line[k], o) <= growth_coord(line[k - 1], o) + eps)
          fail(ErrorKind::NonConformable, who + ": member edges fork along a " + std::string(to_string(o)) + " line");
      for (std::size_t i = 0; i < edges.size(); ++i) {
        if (uf.find(i) != roots[li]) continue;
        for (const Point& p : line) {
          const double g = growth_coord(p, o);
          if (g <= growth_coord(edges[i].lo, o) + eps || g >= growth_coord(edges[i].hi, o) - eps) continue;
          if (std::abs(orient(edges[i].lo, edges[i].hi, p)) > eps * distance(edges[i].lo, edges[i].hi))
            fail(ErrorKind::NonConformable, who + ": member edges overlap without being collinear");
        }
      }
    }
    std::vector<std::vector<Point>> extended;
    for (const auto& line : lines) extended.push_back(detail::extend_chain(line, dom, o, eps, who));
    std::vector<std::size_t> order(lines.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return cross_coord(extended[i].front(), o) < cross_coord(extended[j].front(), o);
    });
    std::vector<Siac> sorted;
    for (std::size_t i : order) sorted.push_back(Siac{o, extended[i], {}});
    for (std::size_t i = 0; i < sorted.size(); ++i)
      for (std::size_t j = i + 1; j < sorted.size(); ++j)
        if (curves_touch(sorted[i].vertices, sorted[j].vertices, eps))
          fail(ErrorKind::NonConformable, who + ": two extended " + std::string(to_string(o)) + " lines cross");
    return sorted;
  };

  const std::vector<Siac> hs = merge_lines(Orientation::Horizontal);
  const std::vector<Siac> vs = merge_lines(Orientation::Vertical);

  Iqiac out;
  out.members = qs;
  out.name = std::move(name);
  out.rows = hs.size();
  out.cols = vs.size();
  for (const Siac& h : hs) {
    for (const Siac& v : vs) {
      try {
        out.lattice.push_back(intersect_siacs(h, v, eps));
      } catch (const Error& e) {
        fail(ErrorKind::NonConformable, who + ": lines do not form a lattice (" + e.what() + ")");
      }
    }
  }

  // original vertices must all be lattice points
  for (const Qiac& q : qs)
    for (const Point& c : q.corners)
      if (std::none_of(out.lattice.begin(), out.lattice.end(), [&](Point p) { return distance(p, c) <= 10 * eps; }))
        fail(ErrorKind::NonConformable, who + ": corner " + to_string(c) + " is not a lattice vertex");

  for (std::size_t k = 0; k + 1 < out.rows; ++k) {
    for (std::size_t l = 0; l + 1 < out.cols; ++l) {
      const std::array<std::size_t, 4> quad{k * out.cols + l, k * out.cols + l + 1, (k + 1) * out.cols + l + 1,
                                            (k + 1) * out.cols + l};
      for (std::size_t c = 0; c < 4; ++c) {
        if (orient(out.lattice[quad[c]], out.lattice[quad[(c + 1) % 4]], out.lattice[quad[(c + 2) % 4]]) <= 0.0)
          fail(ErrorKind::NonConformable, who + ": lattice cell (" + std::to_string(k) + ", " + std::to_string(l) +
                                              ") is not a convex quadrilateral");
      }
      out.quads.push_back(quad);
    }
  }

  // a cell may belong to at most one member
  std::vector<int> owner(out.quads.size(), -1);
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    auto index_of = [&](Point c) {
      for (std::size_t i = 0; i < out.lattice.size(); ++i)
        if (distance(out.lattice[i], c) <= 10 * eps) return i;
      return out.lattice.size();
    };
    const std::size_t bl = index_of(qs[qi].corners[0]);
    const std::size_t tr = index_of(qs[qi].corners[2]);
    const std::size_t k0 = bl / out.cols, l0 = bl % out.cols, k1 = tr / out.cols, l1 = tr % out.cols;
    for (std::size_t k = k0; k < k1; ++k)
      for (std::size_t l = l0; l < l1; ++l) {
        int& o = owner[k * (out.cols - 1) + l];
        if (o >= 0) fail(ErrorKind::NonConformable, who + ": member QIAC overlap");
        o = static_cast<int>(qi);
      }
  }

  for (const Point& p : out.lattice) {
    const bool original = std::any_of(qs.begin(), qs.end(), [&](const Qiac& q) {
      return std::any_of(q.corners.begin(), q.corners.end(), [&](Point c) { return distance(p, c) <= 10 * eps; });
    });
    if (!original) out.artificial_vertices.push_back(p);
    if (!dom.strictly_inside(p, eps))
      fail(ErrorKind::NonConformable, who + ": artificial vertex " + to_string(p) + " reaches the external boundary");
  }
  return out;
}

inline Iqiac build_iqiac(const std::vector<Qiac>& qs, const Domain& dom) { return build_iqiac(qs, dom, dom.eps()); }

/// Splits an IQIAC into spanning curves: each horizontal line becomes a
/// horizontal SIAC and each vertical line a vertical SIAC. Horizontal curves
/// come first, bottom to top, then vertical ones, left to right.
inline std::vector<Siac> decompose_to_siacs(const Iqiac& q, const Domain& dom, double eps) {
  const std::string who = detail::label("IQIAC", q.name);
  for (const Point& p : q.lattice)
    if (!dom.strictly_inside(p, eps))
      fail(ErrorKind::InvalidQiac, who + ": vertex " + to_string(p) + " touches or leaves the external boundary");
  std::vector<Siac> out;
  const std::string base = q.name.empty() ? "iqiac" : q.name;
  for (std::size_t k = 0; k < q.rows; ++k)
    out.push_back(Siac{Orientation::Horizontal,
                       detail::extend_chain(q.horizontal_line(k), dom, Orientation::Horizontal, eps, who),
                       base + ".h" + std::to_string(k)});
  for (std::size_t l = 0; l < q.cols; ++l)
    out.push_back(Siac{Orientation::Vertical,
                       detail::extend_chain(q.vertical_line(l), dom, Orientation::Vertical, eps, who),
                       base + ".v" + std::to_string(l)});
  return out;
}

inline std::vector<Siac> decompose_to_siacs(const Qiac& q, const Domain& dom, double eps) {
  const std::string who = detail::label("QIAC", q.name);
  require_interior(q, dom, eps);
  const std::string base = q.name.empty() ? "qiac" : q.name;
  auto ext = [&](std::vector<Point> line, Orientation o) { return detail::extend_chain(std::move(line), dom, o, eps, who); };
  return {Siac{Orientation::Horizontal, ext(q.bottom(), Orientation::Horizontal), base + ".bottom"},
          Siac{Orientation::Horizontal, ext(q.top(), Orientation::Horizontal), base + ".top"},
          Siac{Orientation::Vertical, ext(q.left(), Orientation::Vertical), base + ".left"},
          Siac{Orientation::Vertical, ext(q.right(), Orientation::Vertical), base + ".right"}};
}

/// Checks the arrangement assumed by the mesher: curves of the same
/// orientation never meet, and every horizontal curve crosses every vertical
/// curve exactly once. Returns the crossing table indexed [h][v].
inline std::vector<std::vector<Point>> check_arrangement(const std::vector<Siac>& hs, const std::vector<Siac>& vs,
                                                         double eps) {
  auto check_family = [&](const std::vector<Siac>& fam) {
    for (std::size_t i = 0; i < fam.size(); ++i)
      for (std::size_t j = i + 1; j < fam.size(); ++j)
        if (curves_touch(fam[i].vertices, fam[j].vertices, eps))
          fail(ErrorKind::CrossingCurves,
               std::string(to_string(fam[i].orientation)) + " SIAC '" + fam[i].name + "' and '" + fam[j].name +
                   "' intersect; any two " + std::string(to_string(fam[i].orientation)) +
                   " SIAC must never intersect each other");
  };
  check_family(hs);
  check_family(vs);
  std::vector<std::vector<Point>> table(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (const Siac& v : vs) table[i].push_back(intersect_siacs(hs[i], v, eps));
  return table;
}

}  // namespace quadgrid
