#pragma once

// Overlap mesh construction: the initial Cartesian grid, association of grid
// lines to spanning curves, proportional redistribution of nodes onto the
// curves and the external boundary, well snapping, and fixed-node labelling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quadgrid/error.hpp"
#include "quadgrid/geometry.hpp"
#include "quadgrid/point.hpp"

namespace quadgrid {

struct GridIndex {
  std::size_t i = 0;  ///< column, 0..m-1
  std::size_t j = 0;  ///< row, 0..n-1
  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

/// Logical m x n grid of physical node positions with a fixed-node mask.
/// Storage is row-major: node (i, j) lives at j * m + i.
struct OverlapMesh {
  std::size_t m = 0;
  std::size_t n = 0;
  Domain domain;
  std::vector<Point> coords;
  std::vector<std::uint8_t> fixed;

  std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * m + i; }
  Point& at(std::size_t i, std::size_t j) { return coords[index(i, j)]; }
  Point at(std::size_t i, std::size_t j) const { return coords[index(i, j)]; }
  bool is_fixed(std::size_t i, std::size_t j) const { return fixed[index(i, j)] != 0; }
  void fix(std::size_t i, std::size_t j) { fixed[index(i, j)] = 1; }
  bool on_boundary(std::size_t i, std::size_t j) const noexcept { return i == 0 || j == 0 || i + 1 == m || j + 1 == n; }
  std::size_t fixed_count() const { return static_cast<std::size_t>(std::count(fixed.begin(), fixed.end(), 1)); }

  /// Cartesian position of node (i, j) before any deformation.
  Point cartesian(std::size_t i, std::size_t j) const noexcept {
    const double x = i + 1 == m ? domain.b : domain.a + domain.width() * static_cast<double>(i) / static_cast<double>(m - 1);
    const double y = j + 1 == n ? domain.d : domain.c + domain.height() * static_cast<double>(j) / static_cast<double>(n - 1);
    return {x, y};
  }

  /// Uniform grid over the domain with only the external boundary fixed.
  static OverlapMesh uniform(const Domain& dom, std::size_t m, std::size_t n) {
    dom.validate();
    if (m < 2 || n < 2) fail(ErrorKind::InvalidArgument, "a grid needs at least 2 nodes per direction");
    OverlapMesh mesh{m, n, dom, std::vector<Point>(m * n), std::vector<std::uint8_t>(m * n, 0)};
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < m; ++i) {
        mesh.at(i, j) = mesh.cartesian(i, j);
        if (mesh.on_boundary(i, j)) mesh.fix(i, j);
      }
    return mesh;
  }
};

/// Grid line assigned to a spanning curve and the node each curve vertex
/// was mapped to.
struct LineAssociation {
  std::size_t siac_id = 0;
  Orientation orientation = Orientation::Horizontal;
  std::size_t line = 0;  ///< row j (horizontal) or column i (vertical)
  std::vector<GridIndex> vertex_to_node;
};

/// Curve vertex pinned in advance to a node (crossings of two curves).
struct Crossing {
  std::size_t vertex = 0;
  GridIndex node;
};

/// Lines already taken by a curve.
struct LineClaims {
  std::vector<bool> rows;
  std::vector<bool> cols;
  explicit LineClaims(const OverlapMesh& mesh) : rows(mesh.n, false), cols(mesh.m, false) {}
};

constexpr std::size_t max_grid_nodes = 4'000'000;

namespace detail {

/// Minimal gap between consecutive boundary hits, corners included.
inline double minimal_gap(std::vector<double> hits, double lo, double hi) {
  hits.push_back(lo);
  hits.push_back(hi);
  std::sort(hits.begin(), hits.end());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < hits.size(); ++k) gap = std::min(gap, hits[k] - hits[k - 1]);
  return gap;
}

inline std::vector<double> arc_lengths(const std::vector<Point>& v) {
  std::vector<double> s(v.size(), 0.0);
  for (std::size_t k = 1; k < v.size(); ++k) s[k] = s[k - 1] + distance(v[k], v[k - 1]);
  return s;
}

/// Point at arc length `s` along vertices [first, last] of `v`.
inline Point point_at(const std::vector<Point>& v, const std::vector<double>& cum, std::size_t first, std::size_t last,
                      double s) {
  std::size_t q = first;
  while (q + 1 < last && cum[q + 1] < s) ++q;
  const double len = cum[q + 1] - cum[q];
  const double t = len > 0.0 ? std::clamp((s - cum[q]) / len, 0.0, 1.0) : 0.0;
  return v[q] + t * (v[q + 1] - v[q]);
}

inline std::size_t line_length(const OverlapMesh& mesh, Orientation o) { return o == Orientation::Horizontal ? mesh.m : mesh.n; }

inline GridIndex line_node(Orientation o, std::size_t line, std::size_t k) {
  return o == Orientation::Horizontal ? GridIndex{k, line} : GridIndex{line, k};
}

}  // namespace detail

/// Uniform Cartesian grid whose spacing in each direction is `fraction` of
/// the smallest gap between curve hits on the sides crossed by that direction.
inline OverlapMesh initial_grid(const Domain& dom, std::span<const Siac> siacs, double fraction, double eps) {
  dom.validate();
  if (!(fraction > 0.0 && fraction <= 1.0)) fail(ErrorKind::InvalidArgument, "fraction must lie in (0, 1]");
  std::vector<double> xs;  // vertical curves hit bottom and top
  std::vector<double> xs_top;
  std::vector<double> ys;  // horizontal curves hit left and right
  std::vector<double> ys_right;
  for (const Siac& s : siacs) {
    if (s.orientation == Orientation::Vertical) {
      xs.push_back(s.vertices.front().x);
      xs_top.push_back(s.vertices.back().x);
    } else {
      ys.push_back(s.vertices.front().y);
      ys_right.push_back(s.vertices.back().y);
    }
  }
  const double gap_x = std::min(detail::minimal_gap(xs, dom.a, dom.b), detail::minimal_gap(xs_top, dom.a, dom.b));
  const double gap_y = std::min(detail::minimal_gap(ys, dom.c, dom.d), detail::minimal_gap(ys_right, dom.c, dom.d));
  if (gap_x <= eps || gap_y <= eps)
    fail(ErrorKind::DegenerateSpacing, "two curve ends (or a curve end and a corner) coincide on the external boundary");
  const double hx = fraction * gap_x;
  const double hy = fraction * gap_y;
  const double mx = std::round(dom.width() / hx) + 1.0;
  const double ny = std::round(dom.height() / hy) + 1.0;
  if (mx * ny > static_cast<double>(max_grid_nodes))
    fail(ErrorKind::DegenerateSpacing, "minimal gap yields a grid of " + std::to_string(static_cast<long long>(mx)) + " x " +
                                           std::to_string(static_cast<long long>(ny)) + " nodes; increase the fraction");
  return OverlapMesh::uniform(dom, std::max<std::size_t>(2, static_cast<std::size_t>(mx)),
                              std::max<std::size_t>(2, static_cast<std::size_t>(ny)));
}

/// Chooses the interior grid line closest to the mean cross coordinate of
/// `anchor` (the curve's own vertices when empty). Ties go to the lower index;
/// a claimed line yields to the nearest unclaimed one.
inline LineAssociation associate_line(const OverlapMesh& mesh, const Siac& s, const LineClaims& claims,
                                      std::span<const Point> anchor = {}, std::size_t siac_id = 0) {
  const Orientation o = s.orientation;
  const std::span<const Point> pts = anchor.empty() ? std::span<const Point>(s.vertices) : anchor;
  double mean = 0.0;
  for (const Point& p : pts) mean += cross_coord(p, o);
  mean /= static_cast<double>(pts.size());

  const std::size_t count = o == Orientation::Horizontal ? mesh.n : mesh.m;
  const std::vector<bool>& taken = o == Orientation::Horizontal ? claims.rows : claims.cols;
  const double tie = mesh.domain.eps();
  std::optional<std::size_t> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < count; ++k) {
    if (taken[k]) continue;
    const Point c = o == Orientation::Horizontal ? mesh.cartesian(0, k) : mesh.cartesian(k, 0);
    const double d = std::abs(cross_coord(c, o) - mean);
    if (d < best_d - tie) {
      best_d = d;
      best = k;
    }
  }
  if (!best)
    fail(ErrorKind::LineConflict, "no free " + std::string(o == Orientation::Horizontal ? "row" : "column") +
                                      " left for SIAC '" + s.name + "'; use a smaller fraction or a finer grid");
  return LineAssociation{siac_id, o, *best, {}};
}

/// Maps curve vertices to nodes of the associated line and places the
/// remaining line nodes along the curve in proportion to their index. Every
/// node of the line becomes fixed.
inline void redistribute_line(OverlapMesh& mesh, LineAssociation& assoc, const Siac& s,
                              std::span<const Crossing> crossings) {
  const Orientation o = s.orientation;
  const std::size_t count = detail::line_length(mesh, o);
  const std::size_t k = s.vertices.size();
  const std::string who = "SIAC '" + s.name + "'";
  if (assoc.orientation != o) fail(ErrorKind::InvalidArgument, who + ": association orientation mismatch");

  std::vector<std::optional<std::size_t>> slot(k);
  std::vector<bool> pinned(count, false);
  slot[0] = 0;
  slot[k - 1] = count - 1;
  pinned[0] = pinned[count - 1] = true;
  for (const Crossing& c : crossings) {
    if (c.vertex >= k) fail(ErrorKind::InvalidArgument, who + ": crossing vertex out of range");
    const GridIndex expect = detail::line_node(o, assoc.line, o == Orientation::Horizontal ? c.node.i : c.node.j);
    if (!(expect == c.node)) fail(ErrorKind::InvalidArgument, who + ": crossing node is not on the associated line");
    const std::size_t pos = o == Orientation::Horizontal ? c.node.i : c.node.j;
    if (pinned[pos] && slot[c.vertex] != pos)
      fail(ErrorKind::VertexCollision, who + ": two crossings share node " + std::to_string(pos));
    slot[c.vertex] = pos;
    pinned[pos] = true;
  }

  // remaining interior vertices go to the nearest unpinned interior node
  std::vector<std::optional<std::size_t>> owner(count);
  for (std::size_t v = 1; v + 1 < k; ++v) {
    if (slot[v]) continue;
    const double target = growth_coord(s.vertices[v], o);
    std::optional<std::size_t> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t q = 1; q + 1 < count; ++q) {
      if (pinned[q]) continue;
      const GridIndex g = detail::line_node(o, assoc.line, q);
      const double d = std::abs(growth_coord(mesh.cartesian(g.i, g.j), o) - target);
      if (d < best_d - mesh.domain.eps()) {
        best_d = d;
        best = q;
      }
    }
    if (!best) fail(ErrorKind::VertexCollision, who + ": no free node left for vertex " + std::to_string(v));
    if (owner[*best])
      fail(ErrorKind::VertexCollision, who + ": vertices " + std::to_string(*owner[*best]) + " and " +
                                           std::to_string(v) + " snap to the same node; refine the grid");
    owner[*best] = v;
    slot[v] = *best;
  }
  for (std::size_t v = 1; v < k; ++v)
    if (*slot[v] <= *slot[v - 1])
      fail(ErrorKind::OrderViolation, who + ": vertex " + std::to_string(v) + " maps before vertex " +
                                          std::to_string(v - 1) + " on the associated line; refine the grid");

  const std::vector<double> cum = detail::arc_lengths(s.vertices);
  assoc.vertex_to_node.clear();
  for (std::size_t v = 0; v < k; ++v) {
    const GridIndex g = detail::line_node(o, assoc.line, *slot[v]);
    assoc.vertex_to_node.push_back(g);
    mesh.at(g.i, g.j) = s.vertices[v];
    mesh.fix(g.i, g.j);
  }
  for (std::size_t v = 0; v + 1 < k; ++v) {
    const std::size_t q0 = *slot[v];
    const std::size_t q1 = *slot[v + 1];
    for (std::size_t q = q0 + 1; q < q1; ++q) {
      const double t = static_cast<double>(q - q0) / static_cast<double>(q1 - q0);
      const double arc = cum[v] + (cum[v + 1] - cum[v]) * t;
      const GridIndex g = detail::line_node(o, assoc.line, q);
      mesh.at(g.i, g.j) = detail::point_at(s.vertices, cum, v, v + 1, arc);
      mesh.fix(g.i, g.j);
    }
  }
}

/// Re-spaces the nodes of each side uniformly between consecutive curve ends
/// on that side. Corners never move.
inline void redistribute_external_boundary(OverlapMesh& mesh, std::span<const LineAssociation> assocs) {
  auto respace = [&](bool horizontal_side, std::size_t fixed_index, std::vector<std::size_t> pins) {
    const std::size_t count = horizontal_side ? mesh.m : mesh.n;
    pins.push_back(0);
    pins.push_back(count - 1);
    std::sort(pins.begin(), pins.end());
    pins.erase(std::unique(pins.begin(), pins.end()), pins.end());
    auto node = [&](std::size_t q) -> Point& { return horizontal_side ? mesh.at(q, fixed_index) : mesh.at(fixed_index, q); };
    for (std::size_t p = 0; p + 1 < pins.size(); ++p) {
      const std::size_t q0 = pins[p];
      const std::size_t q1 = pins[p + 1];
      const Point lo = node(q0);
      const Point hi = node(q1);
      for (std::size_t q = q0 + 1; q < q1; ++q) {
        const double t = static_cast<double>(q - q0) / static_cast<double>(q1 - q0);
        Point& pt = node(q);
        if (horizontal_side)
          pt.x = lo.x + (hi.x - lo.x) * t;
        else
          pt.y = lo.y + (hi.y - lo.y) * t;
      }
    }
  };
  std::vector<std::size_t> cols;
  std::vector<std::size_t> rows;
  for (const LineAssociation& a : assocs) (a.orientation == Orientation::Vertical ? cols : rows).push_back(a.line);
  respace(true, 0, cols);
  respace(true, mesh.n - 1, cols);
  respace(false, 0, rows);
  respace(false, mesh.m - 1, rows);
}

/// Moves the nearest free node (among the four nearest nodes) onto each well
/// and fixes it. Equidistant candidates resolve to the lowest (i, j).
inline void snap_wells(OverlapMesh& mesh, std::span<const Point> wells) {
  const double eps = mesh.domain.eps();
  for (const Point& w : wells) {
    if (!mesh.domain.strictly_inside(w, eps))
      fail(ErrorKind::InvalidArgument, "well " + to_string(w) + " is not strictly inside the domain");
    std::vector<std::size_t> order(mesh.coords.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t take = std::min<std::size_t>(4, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t p, std::size_t q) {
                        const double dp = distance(mesh.coords[p], w);
                        const double dq = distance(mesh.coords[q], w);
                        return dp < dq || (dp == dq && p < q);
                      });
    std::vector<GridIndex> cand;
    for (std::size_t c = 0; c < take; ++c) cand.push_back({order[c] % mesh.m, order[c] / mesh.m});
    std::sort(cand.begin(), cand.end(), [](GridIndex p, GridIndex q) { return p.i < q.i || (p.i == q.i && p.j < q.j); });
    std::optional<GridIndex> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (const GridIndex& g : cand) {
      if (mesh.is_fixed(g.i, g.j)) continue;
      const double d = distance(mesh.at(g.i, g.j), w);
      if (d < best_d - eps) {
        best_d = d;
        best = g;
      }
    }
    if (!best) fail(ErrorKind::NoFreeNode, "all nodes near well " + to_string(w) + " are already fixed");
    mesh.at(best->i, best->j) = w;
    mesh.fix(best->i, best->j);
  }
}

enum class CurveSource { Qiac, Iqiac, Iac, Siac };

constexpr std::string_view to_string(CurveSource s) noexcept {
  switch (s) {
    case CurveSource::Qiac: return "QIAC";
    case CurveSource::Iqiac: return "IQIAC";
    case CurveSource::Iac: return "IAC";
    case CurveSource::Siac: return "SIAC";
  }
  return "?";
}

/// A spanning curve as processed by the mesher.
struct ProcessedCurve {
  Siac siac;
  CurveSource source = CurveSource::Siac;
  std::vector<Point> anchor;  ///< vertices used for line association
  LineAssociation association;
};

struct GridOptions {
  double fraction = 1.0 / 3.0;
  std::optional<std::size_t> m;  ///< explicit node counts override the fraction rule
  std::optional<std::size_t> n;
};

struct OverlapResult {
  OverlapMesh mesh;
  std::vector<ProcessedCurve> curves;  ///< in processing order
  std::vector<Iqiac> iqiacs;
};

/// Full overlap-mesh pipeline: decompose QIAC and IQIAC, extend IAC, build
/// the initial grid, associate and redistribute every curve, redistribute the
/// external boundary, and snap wells.
inline OverlapResult build_overlap(const Domain& dom, const BoundarySet& boundaries, const GridOptions& opts = {}) {
  dom.validate();
  const double eps = dom.eps();
  OverlapResult out;
  auto& curves = out.curves;

  for (const Qiac& q : boundaries.qiacs) {
    const auto parts = decompose_to_siacs(q, dom, eps);
    const std::array<std::vector<Point>, 4> edges{q.bottom(), q.top(), q.left(), q.right()};
    for (std::size_t k = 0; k < parts.size(); ++k) curves.push_back({parts[k], CurveSource::Qiac, edges[k], {}});
  }
  for (std::size_t g = 0; g < boundaries.iqiac_groups.size(); ++g) {
    Iqiac iq = build_iqiac(boundaries.iqiac_groups[g], dom, eps, "iqiac" + std::to_string(g + 1));
    const auto parts = decompose_to_siacs(iq, dom, eps);
    for (std::size_t k = 0; k < parts.size(); ++k) {
      auto anchor = k < iq.rows ? iq.horizontal_line(k) : iq.vertical_line(k - iq.rows);
      curves.push_back({parts[k], CurveSource::Iqiac, std::move(anchor), {}});
    }
    out.iqiacs.push_back(std::move(iq));
  }
  for (const Iac& iac : boundaries.iacs) {
    Siac s = extend_iac_to_siac(iac, dom, detect_orientation(iac.polyline), eps);
    curves.push_back({s, CurveSource::Iac, s.vertices, {}});
  }
  for (const Siac& raw : boundaries.siacs) {
    Siac s = validate_siac(Polyline{raw.vertices}, dom, eps, raw.name);
    curves.push_back({s, CurveSource::Siac, s.vertices, {}});
  }

  const std::array<Point, 4> corners{Point{dom.a, dom.c}, Point{dom.b, dom.c}, Point{dom.b, dom.d}, Point{dom.a, dom.d}};
  for (const ProcessedCurve& c : curves)
    for (const Point& end : {c.siac.vertices.front(), c.siac.vertices.back()})
      for (const Point& corner : corners)
        if (distance(end, corner) <= eps)
          fail(ErrorKind::DegenerateSpacing, std::string(to_string(c.source)) + " curve '" + c.siac.name +
                                                 "' ends at a domain corner");

  std::vector<std::size_t> hid;
  std::vector<std::size_t> vid;
  for (std::size_t k = 0; k < curves.size(); ++k)
    (curves[k].siac.orientation == Orientation::Horizontal ? hid : vid).push_back(k);
  std::vector<Siac> hs;
  std::vector<Siac> vs;
  for (std::size_t k : hid) hs.push_back(curves[k].siac);
  for (std::size_t k : vid) vs.push_back(curves[k].siac);
  const auto table = check_arrangement(hs, vs, eps);

  // crossings become vertices of both curves, bit-identical in each
  auto insert_vertex = [&](std::vector<Point>& v, Orientation o, Point p) -> Point {
    for (const Point& q : v)
      if (distance(q, p) <= 10 * eps) return q;
    auto pos = std::upper_bound(v.begin(), v.end(), growth_coord(p, o),
                                [o](double g, const Point& q) { return g < growth_coord(q, o); });
    v.insert(pos, p);
    return p;
  };
  std::vector<std::vector<Point>> cross_pts(hid.size(), std::vector<Point>(vid.size()));
  for (std::size_t a = 0; a < hid.size(); ++a)
    for (std::size_t b = 0; b < vid.size(); ++b) {
      auto& hv = curves[hid[a]].siac.vertices;
      auto& vv = curves[vid[b]].siac.vertices;
      Point p = insert_vertex(hv, Orientation::Horizontal, table[a][b]);
      const Point q = insert_vertex(vv, Orientation::Vertical, p);
      if (!(q == p)) {
        // the vertical curve already had a vertex here; use it in both curves
        for (Point& h : hv)
          if (h == p) h = q;
        p = q;
      }
      cross_pts[a][b] = p;
    }

  std::vector<Siac> all;
  for (const ProcessedCurve& c : curves) all.push_back(c.siac);
  out.mesh = (opts.m && opts.n) ? OverlapMesh::uniform(dom, *opts.m, *opts.n) : initial_grid(dom, all, opts.fraction, eps);
  OverlapMesh& mesh = out.mesh;

  LineClaims claims(mesh);
  for (std::size_t k = 0; k < curves.size(); ++k) {
    ProcessedCurve& c = curves[k];
    c.association = associate_line(mesh, c.siac, claims, c.anchor, k);
    (c.siac.orientation == Orientation::Horizontal ? claims.rows : claims.cols)[c.association.line] = true;
  }
  auto check_order = [&](const std::vector<std::size_t>& ids, Orientation o) {
    std::vector<std::size_t> sorted = ids;
    std::sort(sorted.begin(), sorted.end(), [&](std::size_t p, std::size_t q) {
      return cross_coord(curves[p].siac.vertices.front(), o) < cross_coord(curves[q].siac.vertices.front(), o);
    });
    for (std::size_t k = 1; k < sorted.size(); ++k)
      if (curves[sorted[k]].association.line <= curves[sorted[k - 1]].association.line)
        fail(ErrorKind::OrderViolation, std::string(to_string(o)) + " SIAC '" + curves[sorted[k - 1]].siac.name +
                                            "' and '" + curves[sorted[k]].siac.name +
                                            "' were associated to grid lines in reverse order; refine the grid");
  };
  check_order(hid, Orientation::Horizontal);
  check_order(vid, Orientation::Vertical);

  auto vertex_index = [](const std::vector<Point>& v, Point p) {
    return static_cast<std::size_t>(std::find(v.begin(), v.end(), p) - v.begin());
  };
  for (std::size_t k = 0; k < curves.size(); ++k) {
    ProcessedCurve& c = curves[k];
    std::vector<Crossing> crossings;
    if (c.siac.orientation == Orientation::Horizontal) {
      const std::size_t a = static_cast<std::size_t>(std::find(hid.begin(), hid.end(), k) - hid.begin());
      for (std::size_t b = 0; b < vid.size(); ++b)
        crossings.push_back({vertex_index(c.siac.vertices, cross_pts[a][b]),
                             GridIndex{curves[vid[b]].association.line, c.association.line}});
    } else {
      const std::size_t b = static_cast<std::size_t>(std::find(vid.begin(), vid.end(), k) - vid.begin());
      for (std::size_t a = 0; a < hid.size(); ++a)
        crossings.push_back({vertex_index(c.siac.vertices, cross_pts[a][b]),
                             GridIndex{c.association.line, curves[hid[a]].association.line}});
    }
    try {
      redistribute_line(mesh, c.association, c.siac, crossings);
    } catch (const Error& e) {
      fail(e.kind(), std::string(to_string(c.source)) + " curve: " + e.what());
    }
  }

  std::vector<LineAssociation> assocs;
  for (const ProcessedCurve& c : curves) assocs.push_back(c.association);
  redistribute_external_boundary(mesh, assocs);

  for (const Point& w : boundaries.wells)
    for (const ProcessedCurve& c : curves)
      for (std::size_t s = 0; s + 1 < c.siac.vertices.size(); ++s) {
        const Point p0 = c.siac.vertices[s], p1 = c.siac.vertices[s + 1];
        const double len = distance(p0, p1);
        const double t = std::clamp(dot(w - p0, p1 - p0) / (len * len), 0.0, 1.0);
        if (distance(w, p0 + t * (p1 - p0)) <= eps)
          fail(ErrorKind::InvalidArgument, "well " + to_string(w) + " lies on curve '" + c.siac.name + "'");
      }
  snap_wells(mesh, boundaries.wells);
  return out;
}

}  // namespace quadgrid
