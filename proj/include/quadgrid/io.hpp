#pragma once

// Problem-spec parsing and the mesh, VTK, SVG and report writers.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "quadgrid/error.hpp"
#include "quadgrid/geometry.hpp"
#include "quadgrid/gridgen.hpp"
#include "quadgrid/solvers.hpp"

namespace quadgrid {

enum class SolverKind { Sane, NewtonGmres, Both };

constexpr std::string_view to_string(SolverKind k) noexcept {
  switch (k) {
    case SolverKind::Sane: return "sane";
    case SolverKind::NewtonGmres: return "newton-gmres";
    case SolverKind::Both: return "both";
  }
  return "?";
}

inline std::optional<SolverKind> parse_solver_kind(std::string_view s) {
  if (s == "sane") return SolverKind::Sane;
  if (s == "newton-gmres") return SolverKind::NewtonGmres;
  if (s == "both") return SolverKind::Both;
  return std::nullopt;
}

struct SolverSpec {
  SolverKind kind = SolverKind::Sane;
  SaneParams sane;
  GmresParams gmres;
};

/// Output paths; relative paths resolve against the output directory.
struct OutputSpec {
  std::optional<std::string> mesh;
  std::optional<std::string> vtk;
  std::optional<std::string> svg;
  std::optional<std::string> report;

  bool empty() const noexcept { return !mesh && !vtk && !svg && !report; }
};

struct ProblemSpec {
  std::string name;
  Domain domain;
  BoundarySet boundaries;
  GridOptions grid;
  SolverSpec solver;
  OutputSpec outputs;
};

// ---------------------------------------------------------------- numbers

/// Shortest decimal form that reads back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<std::size_t> parse_count(std::string_view s) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < s.size()) {
    while (k < s.size() && (s[k] == ' ' || s[k] == '\t' || s[k] == ',')) ++k;
    const std::size_t b = k;
    while (k < s.size() && s[k] != ' ' && s[k] != '\t' && s[k] != ',') ++k;
    if (k > b) out.push_back(s.substr(b, k - b));
  }
  return out;
}

[[noreturn]] inline void syntax(std::size_t line, const std::string& msg) {
  fail(ErrorKind::SyntaxError, "line " + std::to_string(line) + ": " + msg);
}

[[noreturn]] inline void invalid(std::size_t line, const std::string& msg) {
  fail(ErrorKind::ValidationError, "line " + std::to_string(line) + ": " + msg);
}

}  // namespace detail

// ---------------------------------------------------------------- spec parser

/// Parses and validates a problem spec. The format is documented in
/// docs/spec-format.md. With `check_overlap` the overlap mesh is also built
/// once so that arrangement and grid errors surface here.
inline ProblemSpec parse_spec(std::string_view text, bool check_overlap = true) {
  ProblemSpec spec;
  struct Section {
    std::string kind;
    std::size_t line = 0;
    std::string name;
    std::vector<Point> points;
    std::vector<std::array<Point, 4>> quads;
    std::vector<std::size_t> quad_lines;
    std::map<std::string, std::pair<std::string, std::size_t>> keys;
  };
  std::vector<Section> sections;
  Section top{"", 0, {}, {}, {}, {}, {}};
  Section* cur = &top;
  static const std::vector<std::string> known{"domain", "siac", "iac", "qiac", "iqiac-group",
                                              "well", "grid", "solver", "output"};
  static const std::vector<std::string> keyed{"domain", "grid", "solver", "output"};
  auto is_keyed = [](const std::string& k) { return k.empty() || std::find(keyed.begin(), keyed.end(), k) != keyed.end(); };

  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view line = detail::trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') detail::syntax(lineno, "unterminated section header");
      std::string kind(detail::trim(line.substr(1, line.size() - 2)));
      if (std::find(known.begin(), known.end(), kind) == known.end())
        detail::syntax(lineno, "unknown section [" + kind + "]");
      if (is_keyed(kind))
        for (const Section& s : sections)
          if (s.kind == kind) detail::syntax(lineno, "section [" + kind + "] appears twice");
      sections.push_back(Section{kind, lineno, {}, {}, {}, {}, {}});
      cur = &sections.back();
      continue;
    }

    if (const auto eq = line.find('='); eq != std::string_view::npos) {
      const std::string key(detail::trim(line.substr(0, eq)));
      const std::string value(detail::trim(line.substr(eq + 1)));
      if (key.empty()) detail::syntax(lineno, "missing key before '='");
      if (key == "name") {
        cur->name = value;
        continue;
      }
      if (!is_keyed(cur->kind)) detail::syntax(lineno, "unexpected key '" + key + "' in [" + cur->kind + "]");
      if (cur->keys.count(key)) detail::syntax(lineno, "duplicate key '" + key + "'");
      cur->keys[key] = {value, lineno};
      continue;
    }

    if (is_keyed(cur->kind))
      detail::syntax(lineno, cur->kind.empty() ? "data outside any section" : "expected 'key = value' in [" + cur->kind + "]");
    std::vector<double> nums;
    for (std::string_view f : detail::split_fields(line)) {
      const auto v = parse_number(f);
      if (!v) detail::syntax(lineno, "'" + std::string(f) + "' is not a finite number");
      nums.push_back(*v);
    }
    if (cur->kind == "iqiac-group") {
      if (nums.size() != 8) detail::syntax(lineno, "an [iqiac-group] line holds one QIAC as 8 numbers");
      cur->quads.push_back({Point{nums[0], nums[1]}, Point{nums[2], nums[3]}, Point{nums[4], nums[5]}, Point{nums[6], nums[7]}});
      cur->quad_lines.push_back(lineno);
    } else {
      if (nums.size() != 2) detail::syntax(lineno, "a vertex line holds exactly two numbers");
      cur->points.push_back({nums[0], nums[1]});
    }
  }

  for (const auto& [key, value] : top.keys) detail::syntax(value.second, "unexpected key '" + key + "' outside a section");
  spec.name = top.name;

  auto take = [](Section& s, const std::string& key) -> std::optional<std::pair<std::string, std::size_t>> {
    auto it = s.keys.find(key);
    if (it == s.keys.end()) return std::nullopt;
    auto out = it->second;
    s.keys.erase(it);
    return out;
  };
  auto number = [&](Section& s, const std::string& key) -> std::optional<double> {
    const auto kv = take(s, key);
    if (!kv) return std::nullopt;
    const auto v = parse_number(kv->first);
    if (!v) detail::syntax(kv->second, "'" + key + "' must be a finite number");
    return v;
  };
  auto count = [&](Section& s, const std::string& key) -> std::optional<std::size_t> {
    const auto kv = take(s, key);
    if (!kv) return std::nullopt;
    const auto v = parse_count(kv->first);
    if (!v) detail::syntax(kv->second, "'" + key + "' must be a non-negative integer");
    return v;
  };
  auto leftovers = [](const Section& s) {
    if (!s.keys.empty())
      detail::syntax(s.keys.begin()->second.second, "unknown key '" + s.keys.begin()->first + "' in [" + s.kind + "]");
  };

  // domain first: everything else is validated against it
  Section* dom_sec = nullptr;
  for (Section& s : sections)
    if (s.kind == "domain") dom_sec = &s;
  if (!dom_sec) detail::invalid(lineno, "missing [domain] section");
  {
    Section& s = *dom_sec;
    const auto a = number(s, "a"), b = number(s, "b"), c = number(s, "c"), d = number(s, "d");
    if (!a || !b || !c || !d) detail::invalid(s.line, "[domain] needs a, b, c and d");
    leftovers(s);
    spec.domain = Domain{*a, *b, *c, *d};
    try {
      spec.domain.validate();
    } catch (const Error& e) {
      detail::invalid(s.line, e.what());
    }
  }
  const Domain& dom = spec.domain;
  const double eps = dom.eps();
  std::size_t counter[4] = {0, 0, 0, 0};

  for (Section& s : sections) {
    try {
      if (s.kind == "siac") {
        const std::string nm = s.name.empty() ? "siac" + std::to_string(++counter[0]) : s.name;
        spec.boundaries.siacs.push_back(validate_siac(Polyline{s.points}, dom, eps, nm));
      } else if (s.kind == "iac") {
        const std::string nm = s.name.empty() ? "iac" + std::to_string(++counter[1]) : s.name;
        Iac iac{Polyline{s.points}, nm};
        extend_iac_to_siac(iac, dom, detect_orientation(iac.polyline), eps);
        spec.boundaries.iacs.push_back(std::move(iac));
      } else if (s.kind == "qiac") {
        if (s.points.size() != 4) detail::invalid(s.line, "a [qiac] section needs exactly 4 corner lines");
        const std::string nm = s.name.empty() ? "qiac" + std::to_string(++counter[2]) : s.name;
        Qiac q = make_qiac({s.points[0], s.points[1], s.points[2], s.points[3]}, eps, nm);
        require_interior(q, dom, eps);
        spec.boundaries.qiacs.push_back(std::move(q));
      } else if (s.kind == "iqiac-group") {
        if (s.quads.empty()) detail::invalid(s.line, "an [iqiac-group] needs at least one QIAC line");
        const std::string base = s.name.empty() ? "iqiac" + std::to_string(++counter[3]) : s.name;
        std::vector<Qiac> group;
        for (std::size_t k = 0; k < s.quads.size(); ++k) {
          try {
            group.push_back(make_qiac(s.quads[k], eps, base + ".q" + std::to_string(k + 1)));
          } catch (const Error& e) {
            detail::invalid(s.quad_lines[k], e.what());
          }
        }
        build_iqiac(group, dom, eps, base);
        spec.boundaries.iqiac_groups.push_back(std::move(group));
      } else if (s.kind == "well") {
        if (s.points.empty()) detail::invalid(s.line, "a [well] section needs at least one point");
        for (const Point& w : s.points) {
          if (!dom.strictly_inside(w, eps)) detail::invalid(s.line, "well " + to_string(w) + " is not strictly inside the domain");
          spec.boundaries.wells.push_back(w);
        }
      } else if (s.kind == "grid") {
        if (const auto f = number(s, "fraction")) spec.grid.fraction = *f;
        spec.grid.m = count(s, "m");
        spec.grid.n = count(s, "n");
        leftovers(s);
        if (!(spec.grid.fraction > 0.0 && spec.grid.fraction <= 1.0)) detail::invalid(s.line, "fraction must lie in (0, 1]");
        if (spec.grid.m.has_value() != spec.grid.n.has_value()) detail::invalid(s.line, "give both m and n or neither");
        if (spec.grid.m && (*spec.grid.m < 2 || *spec.grid.n < 2)) detail::invalid(s.line, "m and n must be at least 2");
      } else if (s.kind == "solver") {
        if (const auto kv = take(s, "kind")) {
          const auto k = parse_solver_kind(kv->first);
          if (!k) detail::syntax(kv->second, "solver kind must be sane, newton-gmres or both");
          spec.solver.kind = *k;
        }
        SaneParams& sp = spec.solver.sane;
        GmresParams& gp = spec.solver.gmres;
        if (const auto v = number(s, "tol")) sp.tol = gp.tol = *v;
        if (const auto v = count(s, "max_iters")) sp.max_iters = *v;
        if (const auto v = number(s, "alpha0")) sp.alpha0 = *v;
        if (const auto v = count(s, "M")) sp.M = *v;
        if (const auto v = number(s, "gamma")) sp.gamma = gp.gamma = *v;
        if (const auto v = number(s, "sigma1")) sp.sigma1 = gp.sigma1 = *v;
        if (const auto v = number(s, "sigma2")) sp.sigma2 = gp.sigma2 = *v;
        if (const auto v = number(s, "eps")) sp.eps = *v;
        if (const auto v = number(s, "delta")) sp.delta = *v;
        if (const auto v = count(s, "restart")) gp.restart = *v;
        if (const auto v = number(s, "forcing")) gp.forcing = *v;
        if (const auto v = count(s, "max_newton")) gp.max_newton = *v;
        leftovers(s);
        sp.validate();
        gp.validate();
      } else if (s.kind == "output") {
        for (const char* key : {"mesh", "vtk", "svg", "report"}) {
          const auto kv = take(s, key);
          if (!kv) continue;
          if (kv->first.empty()) detail::syntax(kv->second, std::string("empty path for '") + key + "'");
          std::optional<std::string>& slot = std::string_view(key) == "mesh"  ? spec.outputs.mesh
                                             : std::string_view(key) == "vtk" ? spec.outputs.vtk
                                             : std::string_view(key) == "svg" ? spec.outputs.svg
                                                                              : spec.outputs.report;
          slot = kv->first;
        }
        leftovers(s);
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SyntaxError || e.kind() == ErrorKind::ValidationError) throw;
      detail::invalid(s.line, e.what());
    }
  }
  if (spec.outputs.empty()) detail::invalid(lineno, "missing [output] section with at least one path");

  if (check_overlap) {
    try {
      build_overlap(spec.domain, spec.boundaries, spec.grid);
    } catch (const Error& e) {
      fail(ErrorKind::ValidationError, e.what());
    }
  }
  return spec;
}

inline ProblemSpec read_spec_file(const std::filesystem::path& path, bool check_overlap = true) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open spec file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str(), check_overlap);
}

// ---------------------------------------------------------------- writers

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) fail(ErrorKind::IoError, "failed writing '" + path.string() + "'");
}

inline std::string mesh_to_string(const OverlapMesh& mesh) {
  std::string s = "QGMESH 1\n";
  s += std::to_string(mesh.m) + " " + std::to_string(mesh.n) + " " + format_number(mesh.domain.a) + " " +
       format_number(mesh.domain.b) + " " + format_number(mesh.domain.c) + " " + format_number(mesh.domain.d) + "\n";
  for (std::size_t j = 0; j < mesh.n; ++j)
    for (std::size_t i = 0; i < mesh.m; ++i) {
      const Point p = mesh.at(i, j);
      s += std::to_string(i) + " " + std::to_string(j) + " " + format_number(p.x) + " " + format_number(p.y) + " " +
           (mesh.is_fixed(i, j) ? "1" : "0") + "\n";
    }
  return s;
}

inline OverlapMesh mesh_from_string(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    lines.push_back(detail::trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos)));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0] != "QGMESH 1") fail(ErrorKind::SyntaxError, "line 1: expected 'QGMESH 1'");
  if (lines.size() < 2) fail(ErrorKind::SyntaxError, "line 2: missing header");
  const auto head = detail::split_fields(lines[1]);
  if (head.size() != 6) fail(ErrorKind::SyntaxError, "line 2: expected 'm n a b c d'");
  const auto m = parse_count(head[0]), n = parse_count(head[1]);
  const auto a = parse_number(head[2]), b = parse_number(head[3]), c = parse_number(head[4]), d = parse_number(head[5]);
  if (!m || !n || !a || !b || !c || !d || *m < 2 || *n < 2) fail(ErrorKind::SyntaxError, "line 2: bad header values");
  const Domain dom{*a, *b, *c, *d};
  dom.validate();
  OverlapMesh mesh{*m, *n, dom, std::vector<Point>(*m * *n), std::vector<std::uint8_t>(*m * *n, 0)};
  if (lines.size() != 2 + *m * *n)
    fail(ErrorKind::SyntaxError, "expected " + std::to_string(*m * *n) + " node records, found " +
                                     std::to_string(lines.size() - 2));
  for (std::size_t k = 0; k < *m * *n; ++k) {
    const std::size_t ln = k + 3;
    const auto f = detail::split_fields(lines[k + 2]);
    if (f.size() != 5) detail::syntax(ln, "expected 'i j x y fixed'");
    const auto i = parse_count(f[0]), j = parse_count(f[1]);
    const auto x = parse_number(f[2]), y = parse_number(f[3]);
    if (!i || !j || !x || !y || (f[4] != "0" && f[4] != "1")) detail::syntax(ln, "bad node record");
    if (*i != k % *m || *j != k / *m) detail::syntax(ln, "node records must be in row-major order");
    mesh.coords[k] = {*x, *y};
    mesh.fixed[k] = f[4] == "1" ? 1 : 0;
  }
  return mesh;
}

inline void write_mesh(const OverlapMesh& mesh, const std::filesystem::path& path) {
  write_text_file(path, mesh_to_string(mesh));
}

inline OverlapMesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open mesh file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return mesh_from_string(ss.str());
}

/// Legacy ASCII VTK structured grid with a point-data "fixed" flag.
inline std::string vtk_to_string(const OverlapMesh& mesh, std::string_view title = "quadgrid mesh") {
  std::string s = "# vtk DataFile Version 3.0\n";
  s += std::string(title.empty() ? "quadgrid mesh" : title) + "\nASCII\nDATASET STRUCTURED_GRID\n";
  s += "DIMENSIONS " + std::to_string(mesh.m) + " " + std::to_string(mesh.n) + " 1\n";
  s += "POINTS " + std::to_string(mesh.m * mesh.n) + " double\n";
  for (const Point& p : mesh.coords) s += format_number(p.x) + " " + format_number(p.y) + " 0\n";
  s += "POINT_DATA " + std::to_string(mesh.m * mesh.n) + "\nSCALARS fixed int 1\nLOOKUP_TABLE default\n";
  for (std::uint8_t f : mesh.fixed) s += f ? "1\n" : "0\n";
  return s;
}

inline void write_vtk(const OverlapMesh& mesh, const std::filesystem::path& path, std::string_view title = {}) {
  write_text_file(path, vtk_to_string(mesh, title));
}

/// Quads as thin polygons, alignment curves as thick paths, fixed nodes as dots.
inline std::string svg_to_string(const OverlapMesh& mesh, std::span<const Siac> curves) {
  const Domain& dom = mesh.domain;
  const double size = 800.0;
  const double scale = size / dom.side_length();
  const double margin = 10.0;
  const double w = dom.width() * scale + 2 * margin;
  const double h = dom.height() * scale + 2 * margin;
  auto X = [&](double x) { return format_number(std::round(((x - dom.a) * scale + margin) * 1000.0) / 1000.0); };
  auto Y = [&](double y) { return format_number(std::round(((dom.d - y) * scale + margin) * 1000.0) / 1000.0); };
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_number(w) + "\" height=\"" + format_number(h) +
       "\" viewBox=\"0 0 " + format_number(w) + " " + format_number(h) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + format_number(w) + "\" height=\"" + format_number(h) + "\" fill=\"white\"/>\n";
  s += "<g fill=\"none\" stroke=\"#555\" stroke-width=\"0.5\">\n";
  for (std::size_t j = 0; j + 1 < mesh.n; ++j)
    for (std::size_t i = 0; i + 1 < mesh.m; ++i) {
      const Point c[4] = {mesh.at(i, j), mesh.at(i + 1, j), mesh.at(i + 1, j + 1), mesh.at(i, j + 1)};
      s += "<polygon points=\"";
      for (int k = 0; k < 4; ++k) s += (k ? " " : "") + X(c[k].x) + "," + Y(c[k].y);
      s += "\"/>\n";
    }
  s += "</g>\n<g fill=\"none\" stroke=\"#000\" stroke-width=\"2.5\">\n";
  for (const Siac& c : curves) {
    s += "<path d=\"";
    for (std::size_t k = 0; k < c.vertices.size(); ++k)
      s += (k ? " L " : "M ") + X(c.vertices[k].x) + " " + Y(c.vertices[k].y);
    s += "\"/>\n";
  }
  s += "</g>\n<g fill=\"#c00\">\n";
  for (std::size_t j = 0; j < mesh.n; ++j)
    for (std::size_t i = 0; i < mesh.m; ++i)
      if (mesh.is_fixed(i, j)) s += "<circle cx=\"" + X(mesh.at(i, j).x) + "\" cy=\"" + Y(mesh.at(i, j).y) + "\" r=\"1.5\"/>\n";
  s += "</g>\n</svg>\n";
  return s;
}

inline void write_svg(const OverlapMesh& mesh, std::span<const Siac> curves, const std::filesystem::path& path) {
  write_text_file(path, svg_to_string(mesh, curves));
}

// ---------------------------------------------------------------- report

namespace detail {

inline std::string sci(double v, int digits = 4) {
  std::ostringstream ss;
  ss << std::scientific << std::setprecision(digits) << v;
  return ss.str();
}

inline std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

inline std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace detail

/// Comparison table with the columns method, residual norm, normalised mesh
/// difference, time and iterations.
inline std::string report_to_string(const ComparisonRow& row, std::string_view title = {}) {
  const std::string diff = row.normalized_difference ? detail::sci(*row.normalized_difference) : "-";
  std::vector<std::array<std::string, 6>> rows;
  rows.push_back({"Method", "||F||2", "||M1-M2||inf/L", "Time", "Iterations", "Status"});
  for (const MethodRow* m : {&row.sane, &row.gmres}) {
    if (!m->result && m->failure.empty()) continue;
    if (m->result) {
      const SolveReport& r = m->result->report;
      rows.push_back({m->method, detail::sci(r.final_residual()), diff, detail::fixed(r.wall_time, 4) + " sec",
                      r.iteration_summary(), std::string(to_string(r.reason))});
    } else {
      rows.push_back({m->method, "-", diff, "-", "-", "error: " + m->failure});
    }
  }
  std::array<std::size_t, 6> width{};
  for (const auto& r : rows)
    for (std::size_t c = 0; c < 6; ++c) width[c] = std::max(width[c], r[c].size());
  std::string s;
  if (!title.empty()) s += std::string(title) + "\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t c = 0; c < 6; ++c) s += c + 1 < 6 ? detail::pad(rows[k][c], width[c] + 2) : rows[k][c];
    s += "\n";
    if (k == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < 6; ++c) total += width[c] + (c + 1 < 6 ? 2 : 0);
      s += std::string(total, '-') + "\n";
    }
  }
  return s;
}

inline std::string report_to_csv(const ComparisonRow& row) {
  std::string s = "method,residual_norm,normalized_difference,time_s,outer_iterations,inner_iterations,converged,reason\n";
  const std::string diff = row.normalized_difference ? format_number(*row.normalized_difference) : "";
  for (const MethodRow* m : {&row.sane, &row.gmres}) {
    if (!m->result && m->failure.empty()) continue;
    if (!m->result) {
      s += m->method + ",,,,,,0,error\n";
      continue;
    }
    const SolveReport& r = m->result->report;
    std::size_t inner = 0;
    for (std::size_t c : r.inner_iters) inner += c;
    s += m->method + "," + format_number(r.final_residual()) + "," + diff + "," + format_number(r.wall_time) + "," +
         std::to_string(r.iters) + "," + (r.inner_iters.empty() ? "" : std::to_string(inner)) + "," +
         (r.converged ? "1" : "0") + "," + std::string(to_string(r.reason)) + "\n";
  }
  return s;
}

/// Writes the text table to `path` and the CSV twin next to it.
inline void write_report(const ComparisonRow& row, const std::filesystem::path& path, std::string_view title = {}) {
  write_text_file(path, report_to_string(row, title));
  std::filesystem::path csv = path;
  csv.replace_extension(".csv");
  if (csv == path) csv += ".csv";
  write_text_file(csv, report_to_csv(row));
}

}  // namespace quadgrid
