#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "quadgrid/solvers.hpp"

using namespace quadgrid;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

JacobianVecFn fd_jv(const ResidualFn& F) {
  return [F](std::span<const double> v, std::span<const double> w, std::span<const double> fv) {
    return ResidualSystem::directional_derivative(F, v, w, fv);
  };
}

struct Linear {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  ResidualFn F() const {
    return [this](std::span<const double> v) { return qg_test::from_eigen(A * qg_test::to_eigen(v) - b); };
  }
  JacobianVecFn Jv() const {
    return [this](std::span<const double>, std::span<const double> w, std::span<const double>) {
      return qg_test::from_eigen(A * qg_test::to_eigen(w));
    };
  }
};

Linear random_spd(std::uint32_t seed, int n) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd B(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) B(r, c) = nd(rng);
  Linear L;
  L.A = B.transpose() * B + n * Eigen::MatrixXd::Identity(n, n);
  L.b.resize(n);
  for (int r = 0; r < n; ++r) L.b[r] = nd(rng);
  return L;
}

const ResidualFn quadratic = [](std::span<const double> v) { return Vector{v[0] * v[0] - 1.0, v[1] - 1.0}; };

void check_audit(const SolveReport& rep) {
  REQUIRE(rep.steps.size() == rep.iters);
  REQUIRE(rep.residual_history.size() == rep.iters + 1);
  for (const SaneStep& s : rep.steps) {
    CHECK(s.nonmonotone_ok());
    CHECK(s.FtJd < 0.0);
    CHECK(s.lambda > 0.0);
    CHECK(s.lambda <= 1.0 / s.alpha);
  }
}

}  // namespace

TEST_CASE("backtrack minimises the quadratic interpolant", "[solvers]") {
  // phi(t) = (t - c)^2 along a ray with lambda = 1
  auto sigma = [](double c) { return backtrack(1.0, 0.1, 0.5, c * c, -2.0 * c, (1.0 - c) * (1.0 - c)); };
  CHECK_THAT(sigma(0.3), WithinAbs(0.3, 1e-15));
  CHECK(sigma(0.02) == 0.1);
  CHECK(sigma(0.9) == 0.5);
  CHECK_THAT(backtrack(0.5, 0.1, 0.5, 0.09, -0.6 * 1.0, 0.04), WithinAbs(0.5 * 0.5, 1e-15));
  CHECK(backtrack(1.0, 0.1, 0.5, 1.0, -1.0, std::numeric_limits<double>::infinity()) == 0.1);
}

TEST_CASE("SANE on the identity map takes one full step", "[solvers]") {
  const ResidualFn F = [](std::span<const double> v) { return Vector(v.begin(), v.end()); };
  const SolveResult r = sane_solve(F, fd_jv(F), Vector(6, 1.0));
  CHECK(r.report.converged);
  CHECK(r.report.reason == Termination::ResidualZero);
  CHECK(r.report.iters == 1);
  CHECK(r.report.backtrack_counts.at(0) == 0);
  for (double x : r.v) CHECK(std::abs(x) < 1e-8);
  check_audit(r.report);
}

TEST_CASE("SANE and Newton-GMRES find the analytic root", "[solvers]") {
  // with alpha0 = 1 the first step -F(2, 2) lands exactly on the other root
  const SolveResult first = sane_solve(quadratic, fd_jv(quadratic), {2.0, 2.0});
  CHECK(first.report.iters == 1);
  CHECK(first.v == Vector{-1.0, 1.0});

  const SolveResult s = sane_solve(quadratic, fd_jv(quadratic), {2.0, 2.0}, SaneParams{.alpha0 = 4.0, .tol = 1e-12});
  CHECK(s.report.converged);
  CHECK_THAT(s.v[0], WithinAbs(1.0, 1e-10));
  CHECK_THAT(s.v[1], WithinAbs(1.0, 1e-10));
  check_audit(s.report);

  const SolveResult n = newton_gmres_solve(quadratic, fd_jv(quadratic), {2.0, 2.0}, GmresParams{.tol = 1e-12});
  CHECK(n.report.converged);
  CHECK_THAT(n.v[0], WithinAbs(1.0, 1e-10));
  CHECK_THAT(n.v[1], WithinAbs(1.0, 1e-10));
  CHECK(n.report.iteration_summary().find("N / ") != std::string::npos);
}

TEST_CASE("SANE stops on zero curvature", "[solvers]") {
  // rotation: F' J F = 0 for every F
  const ResidualFn F = [](std::span<const double> v) { return Vector{-v[1], v[0]}; };
  const SolveResult r = sane_solve(F, fd_jv(F), {1.0, 0.0});
  CHECK_FALSE(r.report.converged);
  CHECK(r.report.reason == Termination::SmallCurvature);
}

TEST_CASE("SANE reports non-finite residuals and rejects bad parameters", "[solvers]") {
  const ResidualFn F = [](std::span<const double> v) { return Vector{std::log(v[0])}; };
  const SolveResult r = sane_solve(F, fd_jv(F), {-1.0});
  CHECK(r.report.reason == Termination::NonFinite);
  CHECK_THROWS_AS(sane_solve(quadratic, fd_jv(quadratic), {2, 2}, SaneParams{.sigma1 = 0.6}), Error);
  CHECK_THROWS_AS(newton_gmres_solve(quadratic, fd_jv(quadratic), {2, 2}, GmresParams{.restart = 0}), Error);
}

TEST_CASE("SANE respects the iteration limit", "[solvers]") {
  const Linear L = random_spd(5, 10);
  const SolveResult r = sane_solve(L.F(), L.Jv(), Vector(10, 0.0), SaneParams{.max_iters = 2});
  CHECK(r.report.reason == Termination::MaxIters);
  CHECK(r.report.iters == 2);
  CHECK(r.report.residual_history.size() == 3);
}

TEST_CASE("Newton-GMRES solves an SPD system in one step", "[solvers]") {
  Linear L;
  L.A.resize(4, 4);
  L.A << 4, 1, 0, 0, 1, 3, 1, 0, 0, 1, 2, 0.5, 0, 0, 0.5, 1;
  L.b.resize(4);
  L.b << 1, 2, 3, 4;
  const SolveResult r = newton_gmres_solve(L.F(), L.Jv(), Vector(4, 0.0));
  CHECK(r.report.converged);
  CHECK(r.report.iters == 1);
  CHECK(r.report.inner_iters.at(0) <= 4);
  CHECK(r.report.iteration_summary() == "1N / 1 GMRES");
  const Eigen::VectorXd exact = L.A.ldlt().solve(L.b);
  for (int k = 0; k < 4; ++k) CHECK_THAT(r.v[k], WithinAbs(exact[k], 1e-10));

  const SolveResult z = newton_gmres_solve(L.F(), L.Jv(), Vector(4, 0.0), GmresParams{.forcing = 0.0});
  CHECK(z.report.iters == 1);
}

TEST_CASE("GMRES with a small restart still converges", "[solvers]") {
  const Linear L = random_spd(9, 12);
  const Vector b = qg_test::from_eigen(L.b);
  const GmresResult g = gmres([&](std::span<const double> x) { return qg_test::from_eigen(L.A * qg_test::to_eigen(x)); },
                              b, 1e-10, 3, 200);
  CHECK(g.residual <= 1e-10 * L.b.norm());
  CHECK(g.cycles > 1);
}

TEST_CASE("SANE converges on random SPD systems", "[solvers]") {
  int converged = 0;
  for (std::uint32_t seed = 0; seed < 100; ++seed) {
    const Linear L = random_spd(seed, 10);
    std::mt19937 rng(seed + 1000);
    std::normal_distribution<double> nd;
    Vector v0(10);
    for (double& x : v0) x = nd(rng);
    const SolveResult r = sane_solve(L.F(), L.Jv(), v0);
    converged += r.report.converged;
    check_audit(r.report);
  }
  CHECK(converged == 100);
}

TEST_CASE("both solvers match the dense Newton oracle on a perturbed mesh", "[solvers]") {
  const ResidualSystem sys(qg_test::random_mesh(42, 5, 5, 0.3));
  const auto F = residual_fn(sys);
  const auto oracle = qg_test::dense_newton(F, sys.initial_vector());
  REQUIRE(oracle.converged);

  const SolveResult s = sane_solve(F, jacobian_vec_fn(sys), sys.initial_vector(), SaneParams{.tol = 1e-13});
  const SolveResult n = newton_gmres_solve(F, jacobian_vec_fn(sys), sys.initial_vector(), GmresParams{.tol = 1e-13});
  REQUIRE(s.report.converged);
  REQUIRE(n.report.converged);
  CHECK(max_abs_difference(s.v, oracle.v) <= 1e-6);
  CHECK(max_abs_difference(n.v, oracle.v) <= 1e-6);
  check_audit(s.report);

  const OverlapMesh out = sys.apply(s.v);
  for (std::size_t k = 0; k < out.coords.size(); ++k)
    if (sys.mesh().fixed[k]) CHECK(out.coords[k] == sys.mesh().coords[k]);
}

TEST_CASE("compare_solvers fills every column", "[solvers]") {
  const ResidualSystem sys(qg_test::random_mesh(7, 6, 6, 0.3));
  const ComparisonRow row =
      compare_solvers(residual_fn(sys), jacobian_vec_fn(sys), sys.initial_vector(), {}, {}, 1.0);
  REQUIRE(row.sane.result);
  REQUIRE(row.gmres.result);
  REQUIRE(row.normalized_difference);
  CHECK(*row.normalized_difference <= 0.1);
  CHECK(row.sane.result->report.wall_time >= 0.0);

  const OverlapMesh flat = OverlapMesh::uniform(Domain{0, 1, 0, 1}, 6, 6);
  const ResidualSystem triv(flat);
  const ComparisonRow zero = compare_solvers(residual_fn(triv), jacobian_vec_fn(triv), triv.initial_vector(), {}, {}, 1.0);
  CHECK(*zero.normalized_difference == 0.0);
  CHECK(zero.sane.result->report.iters == 0);

  const ResidualFn bad = [](std::span<const double> v) { return Vector(v.size() + 1, 0.0); };
  const ComparisonRow fail = compare_solvers(bad, fd_jv(bad), Vector(2, 0.0), {}, {}, 1.0);
  CHECK_FALSE(fail.sane.failure.empty());
  CHECK_FALSE(fail.gmres.failure.empty());
  CHECK_FALSE(fail.normalized_difference);
}
