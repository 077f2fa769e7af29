// quadgrid command-line front end.
//
//   quadgrid generate <spec-file> [--solver sane|newton-gmres|both]
//            [--fraction F] [--tol T] [--max-iters N] [--seed-grid MxN]
//            [--out-dir DIR] [-v]
//
// Exit status: 0 converged, 1 invalid input, 2 solver did not converge
// (artifacts are still written).

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "quadgrid/quadgrid.hpp"

namespace {

std::optional<std::pair<std::size_t, std::size_t>> parse_seed_grid(const std::string& s) {
  const auto x = s.find_first_of("xX");
  if (x == std::string::npos) return std::nullopt;
  const auto m = quadgrid::parse_count(std::string_view(s).substr(0, x));
  const auto n = quadgrid::parse_count(std::string_view(s).substr(x + 1));
  if (!m || !n || *m < 2 || *n < 2) return std::nullopt;
  return std::pair{*m, *n};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured quadrilateral meshes aligned to internal boundaries"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string solver;
  std::optional<double> fraction;
  std::optional<double> tol;
  std::optional<std::size_t> max_iters;
  std::string seed_grid;
  std::string out_dir = ".";
  bool verbose = false;

  CLI::App* gen = app.add_subcommand("generate", "Build, smooth and write a mesh from a spec file");
  gen->add_option("spec", spec_path, "Problem spec file")->required();
  gen->add_option("--solver", solver, "Solver: sane, newton-gmres or both")
      ->check(CLI::IsMember({"sane", "newton-gmres", "both"}));
  gen->add_option("--fraction", fraction, "Grid spacing as a fraction of the smallest boundary gap")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--tol", tol, "Stopping tolerance on ||F||")->check(CLI::NonNegativeNumber);
  gen->add_option("--max-iters", max_iters, "Iteration limit for SANE and for Newton");
  gen->add_option("--seed-grid", seed_grid, "Explicit grid size MxN instead of the fraction rule");
  gen->add_option("--out-dir", out_dir, "Directory for relative output paths");
  gen->add_flag("-v,--verbose", verbose, "Print grid size, solver table and written files");

  CLI11_PARSE(app, argc, argv);

  try {
    quadgrid::ProblemSpec spec = quadgrid::read_spec_file(spec_path, false);
    if (!solver.empty()) spec.solver.kind = *quadgrid::parse_solver_kind(solver);
    if (fraction) {
      if (!(*fraction > 0.0)) throw quadgrid::Error(quadgrid::ErrorKind::ValidationError, "--fraction must be positive");
      spec.grid.fraction = *fraction;
    }
    if (tol) spec.solver.sane.tol = spec.solver.gmres.tol = *tol;
    if (max_iters) spec.solver.sane.max_iters = spec.solver.gmres.max_newton = *max_iters;
    if (!seed_grid.empty()) {
      const auto mn = parse_seed_grid(seed_grid);
      if (!mn) throw quadgrid::Error(quadgrid::ErrorKind::ValidationError, "--seed-grid expects MxN with M, N >= 2");
      spec.grid.m = mn->first;
      spec.grid.n = mn->second;
    }

    const quadgrid::PipelineResult result = quadgrid::run_pipeline(spec, out_dir, verbose ? &std::cout : nullptr);
    for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
    return result.exit_code;
  } catch (const quadgrid::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return quadgrid::ExitValidation;
  }
}
