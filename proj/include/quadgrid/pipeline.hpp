#pragma once

// End-to-end mesh generation: geometry, overlap mesh, smoothing solve,
// quality check and artifact emission.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "quadgrid/gridgen.hpp"
#include "quadgrid/io.hpp"
#include "quadgrid/smoothing.hpp"
#include "quadgrid/solvers.hpp"

namespace quadgrid {

enum ExitCode : int { ExitConverged = 0, ExitValidation = 1, ExitNotConverged = 2 };

struct PipelineResult {
  OverlapResult overlap;
  OverlapMesh mesh;  ///< smoothed mesh of the primary solver
  ComparisonRow comparison;
  QualityReport quality;
  bool converged = false;
  int exit_code = ExitNotConverged;
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> written;

  std::vector<Siac> curves() const {
    std::vector<Siac> out;
    for (const ProcessedCurve& c : overlap.curves) out.push_back(c.siac);
    return out;
  }
};

/// Builds the overlap mesh and solves for the free nodes. No files are
/// written. The primary mesh is the SANE one unless only Newton-GMRES runs.
inline PipelineResult solve_spec(const ProblemSpec& spec) {
  PipelineResult out;
  out.overlap = build_overlap(spec.domain, spec.boundaries, spec.grid);
  const ResidualSystem sys(out.overlap.mesh);
  const Vector v0 = sys.initial_vector();
  const ResidualFn F = residual_fn(sys);
  const JacobianVecFn Jv = jacobian_vec_fn(sys);
  const double L = spec.domain.side_length();
  const SolverKind kind = spec.solver.kind;

  ComparisonRow& row = out.comparison;
  if (kind == SolverKind::Both) {
    row = compare_solvers(F, Jv, v0, spec.solver.sane, spec.solver.gmres, L);
  } else {
    row.sane.method = "SANE";
    row.gmres.method = "N-GMRES";
    if (kind == SolverKind::Sane)
      row.sane.result = sane_solve(F, Jv, v0, spec.solver.sane);
    else
      row.gmres.result = newton_gmres_solve(F, Jv, v0, spec.solver.gmres);
  }
  const MethodRow& primary = row.sane.result || !row.sane.failure.empty() ? row.sane : row.gmres;
  out.converged = true;
  for (const MethodRow* m : {&row.sane, &row.gmres}) {
    if (!m->failure.empty()) {
      out.converged = false;
      out.warnings.push_back(m->method + " failed: " + m->failure);
    } else if (m->result && !m->result->report.converged) {
      out.converged = false;
      out.warnings.push_back(m->method + " did not converge (" + std::string(to_string(m->result->report.reason)) +
                             ", ||F|| = " + detail::sci(m->result->report.final_residual()) + ")");
    }
  }
  out.mesh = primary.result ? sys.apply(primary.result->v) : out.overlap.mesh;
  out.quality = mesh_quality(out.mesh);
  if (out.quality.folded_cells > 0)
    out.warnings.push_back(std::to_string(out.quality.folded_cells) + " folded cells in the final mesh");
  out.exit_code = out.converged ? ExitConverged : ExitNotConverged;
  return out;
}

/// Runs the whole pipeline and writes every requested artifact under
/// `out_dir`. Artifacts are written even when a solver does not converge.
inline PipelineResult run_pipeline(const ProblemSpec& spec, const std::filesystem::path& out_dir = ".",
                                   std::ostream* log = nullptr) {
  PipelineResult out = solve_spec(spec);
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : out_dir / path;
  };
  const auto curves = out.curves();
  if (spec.outputs.mesh) {
    write_mesh(out.mesh, resolve(*spec.outputs.mesh));
    out.written.push_back(resolve(*spec.outputs.mesh));
  }
  if (spec.outputs.vtk) {
    write_vtk(out.mesh, resolve(*spec.outputs.vtk), spec.name);
    out.written.push_back(resolve(*spec.outputs.vtk));
  }
  if (spec.outputs.svg) {
    write_svg(out.mesh, curves, resolve(*spec.outputs.svg));
    out.written.push_back(resolve(*spec.outputs.svg));
  }
  if (spec.outputs.report) {
    write_report(out.comparison, resolve(*spec.outputs.report), spec.name);
    out.written.push_back(resolve(*spec.outputs.report));
  }
  if (log) {
    *log << "grid " << out.mesh.m << " x " << out.mesh.n << ", " << out.mesh.fixed_count() << " fixed nodes, "
         << 2 * (out.mesh.m * out.mesh.n - out.mesh.fixed_count()) << " unknowns\n";
    *log << report_to_string(out.comparison);
    *log << "min J " << detail::sci(out.quality.min_J) << ", folded cells " << out.quality.folded_cells << "\n";
    for (const auto& p : out.written) *log << "wrote " << p.string() << "\n";
  }
  return out;
}

}  // namespace quadgrid
