#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "quadgrid/error.hpp"

namespace quadgrid {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point p, Point q) noexcept { return {p.x + q.x, p.y + q.y}; }
  friend constexpr Point operator-(Point p, Point q) noexcept { return {p.x - q.x, p.y - q.y}; }
  friend constexpr Point operator*(double s, Point p) noexcept { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point p, Point q) noexcept = default;
};

constexpr double dot(Point p, Point q) noexcept { return p.x * q.x + p.y * q.y; }
constexpr double cross(Point p, Point q) noexcept { return p.x * q.y - p.y * q.x; }
inline double norm(Point p) noexcept { return std::hypot(p.x, p.y); }
inline double distance(Point p, Point q) noexcept { return norm(p - q); }

/// Twice the signed area of triangle (a, b, c); positive when counter-clockwise.
constexpr double orient(Point a, Point b, Point c) noexcept { return cross(b - a, c - a); }

inline std::string to_string(Point p) {
  return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
}

/// The rectangle [a,b] x [c,d].
struct Domain {
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;
  double d = 1.0;

  double width() const noexcept { return b - a; }
  double height() const noexcept { return d - c; }
  double diagonal() const noexcept { return std::hypot(width(), height()); }
  /// Side length used to normalise mesh differences.
  double side_length() const noexcept { return std::max(width(), height()); }

  /// Absolute geometric tolerance; 1e-9 of the diagonal unless overridden.
  double eps(double relative = 1e-9) const noexcept { return relative * diagonal(); }

  void validate() const {
    if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d)))
      fail(ErrorKind::InvalidArgument, "domain bounds must be finite");
    if (!(a < b) || !(c < d))
      fail(ErrorKind::InvalidArgument, "domain requires a < b and c < d");
  }

  bool contains(Point p, double tol) const noexcept {
    return p.x >= a - tol && p.x <= b + tol && p.y >= c - tol && p.y <= d + tol;
  }
  bool strictly_inside(Point p, double tol) const noexcept {
    return p.x > a + tol && p.x < b - tol && p.y > c + tol && p.y < d - tol;
  }
  bool on_left(Point p, double tol) const noexcept { return std::abs(p.x - a) <= tol; }
  bool on_right(Point p, double tol) const noexcept { return std::abs(p.x - b) <= tol; }
  bool on_bottom(Point p, double tol) const noexcept { return std::abs(p.y - c) <= tol; }
  bool on_top(Point p, double tol) const noexcept { return std::abs(p.y - d) <= tol; }
  bool on_boundary(Point p, double tol) const noexcept {
    return contains(p, tol) && (on_left(p, tol) || on_right(p, tol) || on_bottom(p, tol) || on_top(p, tol));
  }
};

/// Axis-aligned rectangle.
struct Rect {
  double xmin = 0.0;
  double xmax = 0.0;
  double ymin = 0.0;
  double ymax = 0.0;

  bool contains(Point p, double tol = 0.0) const noexcept {
    return p.x >= xmin - tol && p.x <= xmax + tol && p.y >= ymin - tol && p.y <= ymax + tol;
  }
  /// Closed-set intersection: touching edges or corners count.
  bool intersects(const Rect& o, double tol = 0.0) const noexcept {
    return xmin <= o.xmax + tol && o.xmin <= xmax + tol && ymin <= o.ymax + tol && o.ymin <= ymax + tol;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Intersection of closed segments [p0,p1] and [q0,q1]. Returns nullopt when
/// they are disjoint or collinear-overlapping (the caller treats overlaps as
/// degenerate separately through `segments_overlap`).
inline std::optional<Point> segment_intersection(Point p0, Point p1, Point q0, Point q1, double tol) {
  const Point r = p1 - p0;
  const Point s = q1 - q0;
  const double denom = cross(r, s);
  const double lr = norm(r);
  const double ls = norm(s);
  if (std::abs(denom) <= 1e-14 * lr * ls) return std::nullopt;
  const double t = cross(q0 - p0, s) / denom;
  const double u = cross(q0 - p0, r) / denom;
  const double tt = lr > 0 ? tol / lr : 0.0;
  const double tu = ls > 0 ? tol / ls : 0.0;
  if (t < -tt || t > 1.0 + tt || u < -tu || u > 1.0 + tu) return std::nullopt;
  return p0 + std::clamp(t, 0.0, 1.0) * r;
}

/// True when the segments are collinear and share more than a single point.
inline bool segments_overlap(Point p0, Point p1, Point q0, Point q1, double tol) {
  const Point r = p1 - p0;
  const double lr = norm(r);
  if (lr == 0.0) return false;
  if (std::abs(orient(p0, p1, q0)) > tol * lr || std::abs(orient(p0, p1, q1)) > tol * lr) return false;
  const double t0 = dot(q0 - p0, r) / (lr * lr);
  const double t1 = dot(q1 - p0, r) / (lr * lr);
  const double lo = std::max(0.0, std::min(t0, t1));
  const double hi = std::min(1.0, std::max(t0, t1));
  return (hi - lo) * lr > tol;
}

}  // namespace quadgrid
