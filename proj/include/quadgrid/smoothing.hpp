#pragma once

// Discrete inverted elliptic system over the free nodes of an overlap mesh,
// the finite-difference operators it is built from, and metric diagnostics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "quadgrid/error.hpp"
#include "quadgrid/gridgen.hpp"
#include "quadgrid/point.hpp"

namespace quadgrid {

/// 3 x 3 neighbourhood of a node with logical spacings.
struct Stencil {
  std::array<Point, 9> nodes{};
  double dxi = 1.0;
  double deta = 1.0;

  /// Neighbour at logical offset (di, dj), each in {-1, 0, 1}.
  Point at(int di, int dj) const noexcept { return nodes[static_cast<std::size_t>((dj + 1) * 3 + (di + 1))]; }
  Point& at(int di, int dj) noexcept { return nodes[static_cast<std::size_t>((dj + 1) * 3 + (di + 1))]; }

  static Stencil of(const OverlapMesh& mesh, std::size_t i, std::size_t j) {
    if (i == 0 || j == 0 || i + 1 >= mesh.m || j + 1 >= mesh.n)
      fail(ErrorKind::InvalidArgument, "stencil requires an interior node");
    Stencil s;
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di)
        s.at(di, dj) = mesh.at(static_cast<std::size_t>(static_cast<long>(i) + di),
                               static_cast<std::size_t>(static_cast<long>(j) + dj));
    return s;
  }

  /// Samples a mapping f(xi, eta) at (xi0 + di*dxi, eta0 + dj*deta).
  template <class F>
  static Stencil sample(F&& f, double xi0, double eta0, double dxi = 1.0, double deta = 1.0) {
    Stencil s;
    s.dxi = dxi;
    s.deta = deta;
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) s.at(di, dj) = f(xi0 + di * dxi, eta0 + dj * deta);
    return s;
  }
};

enum class Direction { Xi, Eta };
enum class SecondDerivative { XiXi, EtaEta, XiEta };

/// Central first difference of (x, y).
inline Point fd_first(const Stencil& s, Direction d) noexcept {
  if (d == Direction::Xi) return (1.0 / (2.0 * s.dxi)) * (s.at(1, 0) - s.at(-1, 0));
  return (1.0 / (2.0 * s.deta)) * (s.at(0, 1) - s.at(0, -1));
}

/// Central second differences and the cross difference of (x, y).
inline Point fd_second(const Stencil& s, SecondDerivative d) noexcept {
  const Point c = s.at(0, 0);
  switch (d) {
    case SecondDerivative::XiXi: return (1.0 / (s.dxi * s.dxi)) * (s.at(1, 0) - 2.0 * c + s.at(-1, 0));
    case SecondDerivative::EtaEta: return (1.0 / (s.deta * s.deta)) * (s.at(0, 1) - 2.0 * c + s.at(0, -1));
    case SecondDerivative::XiEta:
      break;
  }
  return (1.0 / (4.0 * s.dxi * s.deta)) * (s.at(1, 1) - s.at(1, -1) + s.at(-1, -1) - s.at(-1, 1));
}

struct Coefficients {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

inline Coefficients coefficients(const Stencil& s) noexcept {
  const Point xi = fd_first(s, Direction::Xi);
  const Point eta = fd_first(s, Direction::Eta);
  return {dot(eta, eta), dot(xi, eta), dot(xi, xi)};
}

/// L_h applied to both coordinates: alpha*f_xixi - 2*beta*f_xieta + gamma*f_etaeta.
inline Point elliptic_operator(const Stencil& s) noexcept {
  const Coefficients k = coefficients(s);
  return k.alpha * fd_second(s, SecondDerivative::XiXi) - 2.0 * k.beta * fd_second(s, SecondDerivative::XiEta) +
         k.gamma * fd_second(s, SecondDerivative::EtaEta);
}

struct MetricSample {
  double g11 = 0.0;
  double g12 = 0.0;
  double g22 = 0.0;
  double g = 0.0;
  double J = 0.0;
};

inline MetricSample metric_tensor(const Stencil& s) noexcept {
  const Point xi = fd_first(s, Direction::Xi);
  const Point eta = fd_first(s, Direction::Eta);
  MetricSample m;
  m.g11 = dot(xi, xi);
  m.g12 = dot(xi, eta);
  m.g22 = dot(eta, eta);
  m.g = m.g11 * m.g22 - m.g12 * m.g12;
  m.J = cross(xi, eta);
  return m;
}

/// Residual of the discrete system at one node, unit logical spacing.
/// Equals 8 * L_h applied to (x, y).
inline Point node_residual(const Stencil& s) noexcept {
  const Point c = s.at(0, 0);
  const Point e = s.at(0, 1) - s.at(0, -1);  // eta difference
  const Point x = s.at(1, 0) - s.at(-1, 0);  // xi difference
  const Point sxx = s.at(1, 0) - 2.0 * c + s.at(-1, 0);
  const Point syy = s.at(0, 1) - 2.0 * c + s.at(0, -1);
  const Point sxy = s.at(1, 1) - s.at(1, -1) + s.at(-1, -1) - s.at(-1, 1);
  const double ee = e.x * e.x + e.y * e.y;
  const double xe = x.x * e.x + x.y * e.y;
  const double xx = x.x * x.x + x.y * x.y;
  return {2.0 * sxx.x * ee - sxy.x * xe + 2.0 * syy.x * xx, 2.0 * sxx.y * ee - sxy.y * xe + 2.0 * syy.y * xx};
}

/// The nonlinear system F(v) = 0 over the unfixed nodes of a mesh snapshot.
/// Unknowns are ordered row-major over (j, i) with x before y.
class ResidualSystem {
 public:
  explicit ResidualSystem(OverlapMesh mesh) : mesh_(std::move(mesh)), slot_(mesh_.m * mesh_.n, npos) {
    for (std::size_t j = 0; j < mesh_.n; ++j)
      for (std::size_t i = 0; i < mesh_.m; ++i) {
        if (mesh_.is_fixed(i, j)) continue;
        if (mesh_.on_boundary(i, j))
          fail(ErrorKind::InvalidArgument, "free node on the external boundary at (" + std::to_string(i) + ", " +
                                               std::to_string(j) + ")");
        slot_[mesh_.index(i, j)] = free_.size();
        free_.push_back(mesh_.index(i, j));
      }
  }

  const OverlapMesh& mesh() const noexcept { return mesh_; }
  /// Number of equations r = 2 (mn - p).
  std::size_t size() const noexcept { return 2 * free_.size(); }
  std::size_t free_count() const noexcept { return free_.size(); }
  std::span<const std::size_t> free_nodes() const noexcept { return free_; }

  std::vector<double> initial_vector() const {
    std::vector<double> v(size());
    for (std::size_t k = 0; k < free_.size(); ++k) {
      v[2 * k] = mesh_.coords[free_[k]].x;
      v[2 * k + 1] = mesh_.coords[free_[k]].y;
    }
    return v;
  }

  /// Mesh snapshot with the free nodes replaced by `v`.
  OverlapMesh apply(std::span<const double> v) const {
    check(v);
    OverlapMesh out = mesh_;
    for (std::size_t k = 0; k < free_.size(); ++k) out.coords[free_[k]] = {v[2 * k], v[2 * k + 1]};
    return out;
  }

  std::vector<double> residual(std::span<const double> v) const {
    check(v);
    std::vector<Point> xy = mesh_.coords;
    for (std::size_t k = 0; k < free_.size(); ++k) xy[free_[k]] = {v[2 * k], v[2 * k + 1]};
    const std::size_t m = mesh_.m;
    std::vector<double> f(size());
    Stencil s;
    for (std::size_t k = 0; k < free_.size(); ++k) {
      const std::size_t c = free_[k];
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di)
          s.at(di, dj) = xy[static_cast<std::size_t>(static_cast<long>(c) + dj * static_cast<long>(m) + di)];
      const Point r = node_residual(s);
      f[2 * k] = r.x;
      f[2 * k + 1] = r.y;
    }
    return f;
  }

  /// Forward-difference directional derivative J(v) w.
  std::vector<double> jacobian_vec(std::span<const double> v, std::span<const double> w) const {
    return jacobian_vec(v, w, residual(v));
  }

  /// As above, reusing an already evaluated F(v).
  std::vector<double> jacobian_vec(std::span<const double> v, std::span<const double> w,
                                   std::span<const double> fv) const {
    check(v);
    check(w);
    return directional_derivative([this](std::span<const double> u) { return residual(u); }, v, w, fv);
  }

  /// Finite-difference J(v) w for any residual oracle. An exactly zero
  /// direction returns the zero vector.
  template <class F>
  static std::vector<double> directional_derivative(F&& f, std::span<const double> v, std::span<const double> w,
                                                    std::span<const double> fv) {
    double vmax = 0.0;
    double wmax = 0.0;
    for (double a : v) vmax = std::max(vmax, std::abs(a));
    for (double a : w) wmax = std::max(wmax, std::abs(a));
    std::vector<double> out(fv.size(), 0.0);
    if (wmax == 0.0) return out;
    const double delta = std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + vmax) /
                         std::max(wmax, std::numeric_limits<double>::min());
    std::vector<double> u(v.begin(), v.end());
    for (std::size_t k = 0; k < u.size(); ++k) u[k] += delta * w[k];
    const std::vector<double> fu = f(std::span<const double>(u));
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (fu[k] - fv[k]) / delta;
    return out;
  }

 private:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  void check(std::span<const double> v) const {
    if (v.size() != size())
      fail(ErrorKind::InconsistentLength, "vector has " + std::to_string(v.size()) + " entries, system has " +
                                              std::to_string(size()));
  }

  OverlapMesh mesh_;
  std::vector<std::size_t> slot_;
  std::vector<std::size_t> free_;
};

inline std::vector<double> residual(std::span<const double> v, const ResidualSystem& sys) { return sys.residual(v); }

inline std::vector<double> jacobian_vec(std::span<const double> v, std::span<const double> w,
                                        const ResidualSystem& sys) {
  return sys.jacobian_vec(v, w);
}

struct QualityReport {
  double min_J = 0.0;
  double max_J = 0.0;
  std::size_t negative_J = 0;    ///< interior nodes with J <= 0
  std::size_t folded_cells = 0;  ///< cells with a non-positive corner triangle
  double min_triangle_area = 0.0;
  double max_metric_defect = 0.0;  ///< max |g - J^2| / max(g11 g22, tiny)

  bool valid() const noexcept { return negative_J == 0 && folded_cells == 0 && min_J > 0.0; }
};

/// Nodal Jacobians at interior nodes and corner-triangle areas of every cell.
inline QualityReport mesh_quality(const OverlapMesh& mesh) {
  QualityReport q;
  q.min_J = std::numeric_limits<double>::infinity();
  q.max_J = -std::numeric_limits<double>::infinity();
  q.min_triangle_area = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j + 1 < mesh.n; ++j)
    for (std::size_t i = 1; i + 1 < mesh.m; ++i) {
      const MetricSample s = metric_tensor(Stencil::of(mesh, i, j));
      q.min_J = std::min(q.min_J, s.J);
      q.max_J = std::max(q.max_J, s.J);
      if (s.J <= 0.0) ++q.negative_J;
      const double scale = std::max(s.g11 * s.g22, std::numeric_limits<double>::min());
      q.max_metric_defect = std::max(q.max_metric_defect, std::abs(s.g - s.J * s.J) / scale);
    }
  for (std::size_t j = 0; j + 1 < mesh.n; ++j)
    for (std::size_t i = 0; i + 1 < mesh.m; ++i) {
      const Point p00 = mesh.at(i, j), p10 = mesh.at(i + 1, j), p11 = mesh.at(i + 1, j + 1), p01 = mesh.at(i, j + 1);
      const std::array<double, 4> areas{0.5 * orient(p00, p10, p11), 0.5 * orient(p10, p11, p01),
                                        0.5 * orient(p11, p01, p00), 0.5 * orient(p01, p00, p10)};
      const double lo = *std::min_element(areas.begin(), areas.end());
      q.min_triangle_area = std::min(q.min_triangle_area, lo);
      if (lo <= 0.0) ++q.folded_cells;
    }
  if (mesh.m < 3 || mesh.n < 3) q.min_J = q.max_J = 0.0;
  return q;
}

}  // namespace quadgrid
