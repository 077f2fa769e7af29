#include <catch_amalgamated.hpp>

#include <random>

#include "quadgrid/gridgen.hpp"
#include "quadgrid/io.hpp"

using namespace quadgrid;
using Catch::Matchers::WithinAbs;

namespace {

const Domain unit{0, 1, 0, 1};
const double eps = unit.eps();

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

Siac siac(std::vector<Point> pts, std::string name = {}) {
  return validate_siac(Polyline{std::move(pts)}, unit, eps, std::move(name));
}

double distance_to_polyline(Point p, const std::vector<Point>& v) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s + 1 < v.size(); ++s) {
    const Point d = v[s + 1] - v[s];
    const double t = std::clamp(dot(p - v[s], d) / dot(d, d), 0.0, 1.0);
    best = std::min(best, distance(p, v[s] + t * d));
  }
  return best;
}

ProblemSpec sample(const char* file) {
  return read_spec_file(std::string(QUADGRID_SAMPLES_DIR) + "/" + file);
}

}  // namespace

TEST_CASE("initial_grid without curves uses the full side as the gap", "[gridgen]") {
  const OverlapMesh g = initial_grid(unit, {}, 0.1, eps);
  CHECK(g.m == 11);
  CHECK(g.n == 11);
  CHECK(g.at(3, 0).x == 0.3);
  CHECK(g.at(10, 10) == Point{1, 1});
  CHECK(g.fixed_count() == 40);
  CHECK_FALSE(g.is_fixed(5, 5));
}

TEST_CASE("initial_grid spacing comes from the smallest boundary gap", "[gridgen]") {
  // gaps {0.3, 0.7}: h = 0.15, round(1 / 0.15) + 1 = 8 columns, spacing 1/7
  const std::vector<Siac> one{siac({{0.3, 0}, {0.3, 1}})};
  const OverlapMesh g = initial_grid(unit, one, 0.5, eps);
  CHECK(g.m == 8);
  CHECK(g.n == 3);
  CHECK_THAT(g.at(1, 0).x, WithinAbs(1.0 / 7.0, 1e-15));
  CHECK(kind_of([&] { initial_grid(unit, one, 0.0, eps); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { initial_grid(unit, one, 1.5, eps); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("initial_grid rejects coincident boundary hits", "[gridgen]") {
  const std::vector<Siac> two{siac({{0.3, 0}, {0.3, 1}}), siac({{0.3, 0}, {0.6, 1}})};
  CHECK(kind_of([&] { initial_grid(unit, two, 0.5, eps); }) == ErrorKind::DegenerateSpacing);
  BoundarySet corner;
  corner.siacs.push_back(Siac{Orientation::Horizontal, {{0, 0}, {1, 0.4}}, "corner"});
  CHECK(kind_of([&] { build_overlap(unit, corner); }) == ErrorKind::DegenerateSpacing);
}

TEST_CASE("associate_line picks the nearest interior line", "[gridgen]") {
  const OverlapMesh g = OverlapMesh::uniform(unit, 11, 11);
  LineClaims claims(g);
  CHECK(associate_line(g, siac({{0, 0.5}, {1, 0.5}}), claims).line == 5);
  // mean of {0.2, 0.8, 0.3} is 0.4333
  CHECK(associate_line(g, siac({{0, 0.2}, {0.5, 0.8}, {1, 0.3}}), claims).line == 4);
  // mean 0.45 is equidistant from rows 4 and 5
  CHECK(associate_line(g, siac({{0, 0.4}, {1, 0.5}}), claims).line == 4);
  CHECK(associate_line(g, siac({{0.62, 0}, {0.62, 1}}), claims).line == 6);
  // boundary rows are never chosen
  CHECK(associate_line(g, siac({{0, 0.01}, {1, 0.02}}), claims).line == 1);
}

TEST_CASE("associate_line resolves conflicts to the nearest unclaimed line", "[gridgen]") {
  const OverlapMesh g = OverlapMesh::uniform(unit, 5, 5);
  LineClaims claims(g);
  claims.rows[2] = true;
  CHECK(associate_line(g, siac({{0, 0.5}, {1, 0.5}}), claims).line == 1);
  claims.rows[1] = true;
  CHECK(associate_line(g, siac({{0, 0.5}, {1, 0.5}}), claims).line == 3);
  claims.rows[3] = true;
  CHECK(kind_of([&] { associate_line(g, siac({{0, 0.5}, {1, 0.5}}), claims); }) == ErrorKind::LineConflict);
}

TEST_CASE("redistribute_line places nodes proportionally along a tent", "[gridgen]") {
  OverlapMesh g = OverlapMesh::uniform(unit, 11, 11);
  const Siac tent{Orientation::Horizontal, {{0, 0}, {0.5, 0.4}, {1, 0}}, "tent"};
  LineAssociation a{0, Orientation::Horizontal, 5, {}};
  redistribute_line(g, a, tent, {});
  REQUIRE(a.vertex_to_node.size() == 3);
  CHECK(a.vertex_to_node[1] == GridIndex{5, 5});
  CHECK(g.at(5, 5) == Point{0.5, 0.4});
  for (std::size_t i = 0; i <= 10; ++i) {
    const double t = i <= 5 ? i / 5.0 : (i - 5) / 5.0;
    const Point expect = i <= 5 ? Point{0.5 * t, 0.4 * t} : Point{0.5 + 0.5 * t, 0.4 - 0.4 * t};
    CHECK_THAT(g.at(i, 5).x, WithinAbs(expect.x, 1e-15));
    CHECK_THAT(g.at(i, 5).y, WithinAbs(expect.y, 1e-15));
    CHECK(g.is_fixed(i, 5));
  }
  CHECK_FALSE(g.is_fixed(5, 4));
}

TEST_CASE("redistribute_line on a straight grid line is the identity", "[gridgen]") {
  OverlapMesh g = OverlapMesh::uniform(unit, 11, 11);
  const OverlapMesh before = g;
  LineAssociation a{0, Orientation::Horizontal, 5, {}};
  redistribute_line(g, a, siac({{0, 0.5}, {1, 0.5}}), {});
  CHECK(g.coords == before.coords);
  for (std::size_t i = 0; i < 11; ++i) CHECK(g.is_fixed(i, 5));
}

TEST_CASE("redistribute_line detects collisions and order violations", "[gridgen]") {
  OverlapMesh g = OverlapMesh::uniform(unit, 11, 11);
  LineAssociation a{0, Orientation::Horizontal, 5, {}};
  const Siac twin = siac({{0, 0.5}, {0.49, 0.5}, {0.51, 0.52}, {1, 0.5}});
  CHECK(kind_of([&] { redistribute_line(g, a, twin, {}); }) == ErrorKind::VertexCollision);

  const Siac s = siac({{0, 0.5}, {0.3, 0.5}, {0.6, 0.55}, {1, 0.5}});
  const std::vector<Crossing> pin{{1, GridIndex{7, 5}}};
  CHECK(kind_of([&] { redistribute_line(g, a, s, pin); }) == ErrorKind::OrderViolation);
}

TEST_CASE("redistribute_external_boundary re-spaces each side between hits", "[gridgen]") {
  OverlapMesh g = OverlapMesh::uniform(unit, 11, 11);
  const OverlapMesh before = g;
  redistribute_external_boundary(g, {});
  CHECK(g.coords == before.coords);

  g.at(4, 0) = {0.3, 0};
  const std::vector<LineAssociation> a{{0, Orientation::Vertical, 4, {}}};
  redistribute_external_boundary(g, a);
  for (std::size_t i = 0; i <= 4; ++i) CHECK_THAT(g.at(i, 0).x, WithinAbs(0.3 * i / 4.0, 1e-15));
  for (std::size_t i = 4; i <= 10; ++i) CHECK_THAT(g.at(i, 0).x, WithinAbs(0.3 + 0.7 * (i - 4) / 6.0, 1e-15));
  CHECK(g.at(0, 0) == Point{0, 0});
  CHECK(g.at(10, 0) == Point{1, 0});
  CHECK(g.at(0, 3) == before.at(0, 3));
}

TEST_CASE("snap_wells moves the nearest free node", "[gridgen]") {
  OverlapMesh g = OverlapMesh::uniform(unit, 11, 11);
  const Point on_node = g.at(3, 7);
  snap_wells(g, std::vector<Point>{on_node});
  CHECK(g.is_fixed(3, 7));
  CHECK(g.at(3, 7) == on_node);

  // four equidistant candidates; the lowest (i, j) wins
  snap_wells(g, std::vector<Point>{{0.55, 0.55}});
  CHECK(g.is_fixed(5, 5));
  CHECK(g.at(5, 5) == Point{0.55, 0.55});
  CHECK_FALSE(g.is_fixed(6, 6));

  // (5, 5) is taken now; the next equidistant candidate is (5, 6)
  snap_wells(g, std::vector<Point>{{0.55, 0.55 + 1e-3}});
  CHECK(g.is_fixed(5, 6));

  OverlapMesh full = OverlapMesh::uniform(unit, 11, 11);
  std::fill(full.fixed.begin(), full.fixed.end(), 1);
  CHECK(kind_of([&] { snap_wells(full, std::vector<Point>{{0.42, 0.42}}); }) == ErrorKind::NoFreeNode);
  CHECK(kind_of([&] { snap_wells(g, std::vector<Point>{{0.0, 0.5}}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("build_overlap of an empty boundary set is the uniform grid", "[gridgen]") {
  const OverlapResult r = build_overlap(unit, {}, GridOptions{0.1, {}, {}});
  const OverlapMesh u = OverlapMesh::uniform(unit, 11, 11);
  CHECK(r.mesh.coords == u.coords);
  CHECK(r.mesh.fixed == u.fixed);
}

TEST_CASE("build_overlap pins crossings identically in both curves", "[gridgen]") {
  BoundarySet b;
  b.siacs = {siac({{0, 0.3}, {0.5, 0.38}, {1, 0.32}}, "h"), siac({{0.4, 0}, {0.45, 0.6}, {0.42, 1}}, "v")};
  const OverlapResult r = build_overlap(unit, b);
  const auto& h = r.curves[0];
  const auto& v = r.curves[1];
  const Point cross_pt = r.mesh.at(v.association.line, h.association.line);
  CHECK(std::find(h.siac.vertices.begin(), h.siac.vertices.end(), cross_pt) != h.siac.vertices.end());
  CHECK(std::find(v.siac.vertices.begin(), v.siac.vertices.end(), cross_pt) != v.siac.vertices.end());
  CHECK(distance(cross_pt, intersect_siacs(b.siacs[0], b.siacs[1])) < 1e-12);
}

TEST_CASE("build_overlap invariants on the bundled examples", "[gridgen]") {
  for (const char* file : {"ex1_three_siac.qg", "ex2_one_qiac.qg", "ex3_three_qiac.qg", "ex4_siac_qiac_iqiac.qg",
                           "ex5_channel_two_qiac.qg", "ex6_circumference.qg"}) {
    INFO(file);
    const ProblemSpec spec = sample(file);
    const OverlapResult r = build_overlap(spec.domain, spec.boundaries, spec.grid);
    const OverlapMesh& g = r.mesh;
    const OverlapMesh cart = OverlapMesh::uniform(spec.domain, g.m, g.n);
    std::vector<Point> wells = spec.boundaries.wells;

    for (std::size_t j = 0; j < g.n; ++j)
      for (std::size_t i = 0; i < g.m; ++i) {
        const Point p = g.at(i, j);
        if (g.on_boundary(i, j)) {
          CHECK(g.is_fixed(i, j));
          CHECK(spec.domain.on_boundary(p, 1e-12));
          continue;
        }
        if (!g.is_fixed(i, j)) {
          CHECK(p == cart.at(i, j));
          continue;
        }
        double d = std::numeric_limits<double>::infinity();
        for (const ProcessedCurve& c : r.curves) d = std::min(d, distance_to_polyline(p, c.siac.vertices));
        for (const Point& w : wells) d = std::min(d, distance(p, w));
        CHECK(d < 1e-12);
      }

    for (const ProcessedCurve& c : r.curves) {
      const LineAssociation& a = c.association;
      for (std::size_t k = 1; k < a.vertex_to_node.size(); ++k) {
        const GridIndex p = a.vertex_to_node[k - 1];
        const GridIndex q = a.vertex_to_node[k];
        CHECK((a.orientation == Orientation::Horizontal ? p.i < q.i : p.j < q.j));
      }
      // node positions along the line advance monotonically along the curve
      const std::size_t len = a.orientation == Orientation::Horizontal ? g.m : g.n;
      for (std::size_t k = 1; k < len; ++k) {
        const Point p0 = a.orientation == Orientation::Horizontal ? g.at(k - 1, a.line) : g.at(a.line, k - 1);
        const Point p1 = a.orientation == Orientation::Horizontal ? g.at(k, a.line) : g.at(a.line, k);
        CHECK(growth_coord(p1, a.orientation) > growth_coord(p0, a.orientation));
      }
    }
  }
}

TEST_CASE("Example 1 overlap mesh fixes two rows and one column", "[gridgen]") {
  const ProblemSpec spec = sample("ex1_three_siac.qg");
  const OverlapResult r = build_overlap(spec.domain, spec.boundaries, spec.grid);
  std::size_t full_rows = 0, full_cols = 0;
  for (std::size_t j = 1; j + 1 < r.mesh.n; ++j) {
    bool all = true;
    for (std::size_t i = 0; i < r.mesh.m; ++i) all = all && r.mesh.is_fixed(i, j);
    full_rows += all;
  }
  for (std::size_t i = 1; i + 1 < r.mesh.m; ++i) {
    bool all = true;
    for (std::size_t j = 0; j < r.mesh.n; ++j) all = all && r.mesh.is_fixed(i, j);
    full_cols += all;
  }
  CHECK(full_rows == 2);
  CHECK(full_cols == 1);
}

TEST_CASE("adding a curve never unfixes a node", "[gridgen]") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.15, 0.85);
  for (int t = 0; t < 20; ++t) {
    BoundarySet b;
    b.siacs.push_back(siac({{0, u(rng)}, {1, u(rng)}}, "a"));
    const GridOptions opt{1.0 / 3.0, 41, 41};
    const OverlapResult before = build_overlap(unit, b, opt);
    const double x = u(rng);
    b.siacs.push_back(siac({{x, 0}, {x, 1}}, "b"));
    const OverlapResult after = build_overlap(unit, b, opt);
    for (std::size_t k = 0; k < before.mesh.fixed.size(); ++k)
      if (before.mesh.fixed[k]) CHECK(after.mesh.fixed[k]);
  }
}

TEST_CASE("build_overlap processes QIAC, IQIAC, IAC and SIAC in that order", "[gridgen]") {
  const ProblemSpec spec = sample("ex4_siac_qiac_iqiac.qg");
  BoundarySet b = spec.boundaries;
  b.iacs.push_back(Iac{Polyline{{{0.3, 0.46}, {0.7, 0.47}}}, "iac"});
  const OverlapResult r = build_overlap(spec.domain, b, spec.grid);
  std::vector<CurveSource> order;
  for (const ProcessedCurve& c : r.curves) order.push_back(c.source);
  CHECK(std::is_sorted(order.begin(), order.end()));
  CHECK(order.front() == CurveSource::Qiac);
  CHECK(order.back() == CurveSource::Siac);
  CHECK(std::count(order.begin(), order.end(), CurveSource::Iac) == 1);
  CHECK(std::count(order.begin(), order.end(), CurveSource::Iqiac) == 5);
}
