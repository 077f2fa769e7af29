#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "oracles.hpp"
#include "quadgrid/quadgrid.hpp"

using namespace quadgrid;
namespace fs = std::filesystem;

namespace {

const char* const minimal = R"(# one straight horizon
[domain]
a = 0
b = 1
c = 0
d = 1

[siac]
0 0.5
1 0.5

[output]
mesh = out.qgmesh
)";

Error error_of(std::string_view text) {
  try {
    parse_spec(text);
  } catch (const Error& e) {
    return e;
  }
  FAIL("spec accepted");
  return Error(ErrorKind::InvalidArgument, "");
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("quadgrid_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QUADGRID_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("parse_spec reads a minimal spec", "[io]") {
  const ProblemSpec spec = parse_spec(minimal);
  CHECK(spec.domain.b == 1.0);
  REQUIRE(spec.boundaries.siacs.size() == 1);
  CHECK(spec.boundaries.siacs[0].name == "siac1");
  CHECK(spec.boundaries.siacs[0].orientation == Orientation::Horizontal);
  CHECK(spec.outputs.mesh == "out.qgmesh");
  CHECK_FALSE(spec.outputs.vtk);
  CHECK(spec.solver.kind == SolverKind::Sane);
}

TEST_CASE("parse_spec reads every bundled example", "[io]") {
  for (const auto& entry : fs::directory_iterator(QUADGRID_SAMPLES_DIR)) {
    if (entry.path().extension() != ".qg") continue;
    INFO(entry.path().string());
    const ProblemSpec spec = read_spec_file(entry.path());
    CHECK_FALSE(spec.name.empty());
    CHECK_FALSE(spec.outputs.empty());
  }
  const ProblemSpec ex4 = read_spec_file(fs::path(QUADGRID_SAMPLES_DIR) / "ex4_siac_qiac_iqiac.qg");
  CHECK(ex4.boundaries.siacs.size() == 3);
  CHECK(ex4.boundaries.qiacs.size() == 1);
  CHECK(ex4.boundaries.iqiac_groups.size() == 1);
}

TEST_CASE("parse_spec reports syntax errors with line numbers", "[io]") {
  const Error a = error_of("[domain]\na = 0\nb = one\n");
  CHECK(a.kind() == ErrorKind::SyntaxError);
  CHECK(std::string(a.what()).find("line 3:") != std::string::npos);

  const Error b = error_of("[domain]\na = 0\n[bogus]\n");
  CHECK(b.kind() == ErrorKind::SyntaxError);
  CHECK(std::string(b.what()).find("line 3:") != std::string::npos);

  const Error c = error_of(std::string(minimal) + "[siac]\n0 0.2 0.3\n");
  CHECK(c.kind() == ErrorKind::SyntaxError);
  CHECK(std::string(c.what()).find("line 15:") != std::string::npos);
}

TEST_CASE("parse_spec reports geometry errors as validation errors", "[io]") {
  const std::string reflex = std::string(minimal) + "[qiac]\nname = dent\n0.3 0.3\n0.6 0.3\n0.45 0.35\n0.3 0.6\n";
  const Error q = error_of(reflex);
  CHECK(q.kind() == ErrorKind::ValidationError);
  CHECK(std::string(q.what()).find("line 14:") != std::string::npos);
  CHECK(std::string(q.what()).find("convex") != std::string::npos);

  const std::string crossing = std::string(minimal) + "[siac]\nname = other\n0 0.3\n1 0.7\n";
  const Error x = error_of(crossing);
  CHECK(x.kind() == ErrorKind::ValidationError);
  CHECK(std::string(x.what()).find("must never intersect") != std::string::npos);

  CHECK(error_of("[domain]\na = 1\nb = 0\nc = 0\nd = 1\n[output]\nmesh = m\n").kind() == ErrorKind::ValidationError);
  CHECK(error_of("[domain]\na = 0\nb = 1\nc = 0\nd = 1\n").kind() == ErrorKind::ValidationError);
}

TEST_CASE("mesh files round-trip bit-identically", "[io]") {
  OverlapMesh g = qg_test::random_mesh(17, 7, 5, 0.4);
  g.fix(3, 2);
  g.at(2, 2) = {1.0 / 3.0, 2.0 / 7.0};
  const OverlapMesh back = mesh_from_string(mesh_to_string(g));
  CHECK(back.m == g.m);
  CHECK(back.n == g.n);
  CHECK(back.coords == g.coords);
  CHECK(back.fixed == g.fixed);
  CHECK(mesh_to_string(back) == mesh_to_string(g));
}

TEST_CASE("a 2 x 2 mesh has four node records", "[io]") {
  const OverlapMesh g = OverlapMesh::uniform(Domain{0, 2, 0, 1}, 2, 2);
  const std::string s = mesh_to_string(g);
  CHECK(s == "QGMESH 1\n2 2 0 2 0 1\n0 0 0 0 1\n1 0 2 0 1\n0 1 0 1 1\n1 1 2 1 1\n");
  CHECK_THROWS_AS(mesh_from_string("QGMESH 1\n2 2 0 2 0 1\n1 0 2 0 1\n0 0 0 0 1\n0 1 0 1 1\n1 1 2 1 1\n"), Error);
  CHECK_THROWS_AS(mesh_from_string("QGMESH 1\n2 2 0 2 0 1\n0 0 0 0 1\n"), Error);
}

TEST_CASE("VTK output is a legacy structured grid", "[io]") {
  const OverlapMesh g = OverlapMesh::uniform(Domain{0, 1, 0, 1}, 4, 3);
  const std::string s = vtk_to_string(g);
  CHECK(s.starts_with("# vtk DataFile Version 3.0\n"));
  CHECK(s.find("DATASET STRUCTURED_GRID\nDIMENSIONS 4 3 1\nPOINTS 12 double\n") != std::string::npos);
  CHECK(s.find("POINT_DATA 12\nSCALARS fixed int 1") != std::string::npos);
}

TEST_CASE("SVG has one polygon per cell and one path per curve", "[io]") {
  const ProblemSpec spec = read_spec_file(fs::path(QUADGRID_SAMPLES_DIR) / "ex2_one_qiac.qg");
  const OverlapResult r = build_overlap(spec.domain, spec.boundaries, spec.grid);
  std::vector<Siac> curves;
  for (const ProcessedCurve& c : r.curves) curves.push_back(c.siac);
  const std::string s = svg_to_string(r.mesh, curves);
  CHECK(count_of(s, "<polygon") == (r.mesh.m - 1) * (r.mesh.n - 1));
  CHECK(count_of(s, "<path") == 4);
  CHECK(count_of(s, "<circle") == r.mesh.fixed_count());
}

TEST_CASE("report lists the comparison columns", "[io]") {
  const ResidualSystem sys(qg_test::random_mesh(7, 5, 5, 0.3));
  const ComparisonRow row = compare_solvers(residual_fn(sys), jacobian_vec_fn(sys), sys.initial_vector(), {}, {}, 1.0);
  const std::string t = report_to_string(row);
  for (const char* col : {"Method", "||F||2", "||M1-M2||inf/L", "Time", "Iterations"}) CHECK(t.find(col) != std::string::npos);
  CHECK(t.find("SANE") != std::string::npos);
  CHECK(std::regex_search(t, std::regex(R"(N-GMRES .*\d+N / \d+ GMRES)")));

  const std::string csv = report_to_csv(row);
  CHECK(count_of(csv, "\n") == 3);
  CHECK(csv.starts_with("method,residual_norm,normalized_difference,time_s,"));
}

TEST_CASE("run_pipeline on an empty boundary set needs no iterations", "[io]") {
  const fs::path dir = scratch_dir("empty");
  const ProblemSpec spec = parse_spec(
      "[domain]\na = 0\nb = 1\nc = 0\nd = 1\n[grid]\nfraction = 0.1\n[solver]\nkind = both\n"
      "[output]\nmesh = m.qgmesh\nreport = r.txt\n");
  const PipelineResult r = run_pipeline(spec, dir);
  CHECK(r.exit_code == ExitConverged);
  CHECK(r.comparison.sane.result->report.iters == 0);
  CHECK(r.comparison.gmres.result->report.iters == 0);
  CHECK(r.comparison.sane.result->report.final_residual() < 1e-15);
  CHECK(fs::exists(dir / "m.qgmesh"));
  CHECK(fs::exists(dir / "r.txt"));
  CHECK(fs::exists(dir / "r.csv"));
  CHECK(read_mesh(dir / "m.qgmesh").coords == OverlapMesh::uniform(spec.domain, 11, 11).coords);
}

TEST_CASE("run_pipeline smooths Example 2 without folding", "[io]") {
  const ProblemSpec spec = read_spec_file(fs::path(QUADGRID_SAMPLES_DIR) / "ex2_one_qiac.qg");
  const PipelineResult r = solve_spec(spec);
  CHECK(r.exit_code == ExitConverged);
  CHECK(r.quality.min_J > 0.0);
  CHECK(r.quality.folded_cells == 0);
}

TEST_CASE("CLI exit codes", "[io][cli]") {
  const fs::path dir = scratch_dir("cli");
  const fs::path good = dir / "good.qg";
  const fs::path bad = dir / "bad.qg";
  std::ofstream(good) << minimal;
  std::ofstream(bad) << std::string(minimal) + "[siac]\n0 0.3\n1 0.7\n";

  CHECK(run_cli("generate " + good.string() + " --out-dir " + (dir / "a").string()) == 0);
  CHECK(fs::exists(dir / "a" / "out.qgmesh"));
  CHECK(run_cli("generate " + bad.string() + " --out-dir " + (dir / "b").string()) == 1);
  CHECK(run_cli("generate " + (dir / "missing.qg").string()) == 1);
  CHECK(run_cli("generate " + good.string() + " --seed-grid 7 --out-dir " + dir.string()) == 1);
  // one iteration is not enough on a curved spec; artifacts are still written
  const fs::path ex1 = fs::path(QUADGRID_SAMPLES_DIR) / "ex1_three_siac.qg";
  CHECK(run_cli("generate " + ex1.string() + " --solver sane --max-iters 1 --out-dir " + (dir / "c").string()) == 2);
  CHECK(fs::exists(dir / "c" / "ex1.qgmesh"));
}

TEST_CASE("CLI flags override spec values", "[io][cli]") {
  const fs::path dir = scratch_dir("flags");
  const fs::path good = dir / "good.qg";
  std::ofstream(good) << minimal;
  REQUIRE(run_cli("generate " + good.string() + " --seed-grid 9x6 --solver newton-gmres --tol 1e-12 --out-dir " +
                  dir.string()) == 0);
  const OverlapMesh g = read_mesh(dir / "out.qgmesh");
  CHECK(g.m == 9);
  CHECK(g.n == 6);
}
