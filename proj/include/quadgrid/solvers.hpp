#pragma once

// Nonlinear solvers for F(v) = 0: the spectral residual method SANE and a
// matrix-free Newton-GMRES baseline, plus a side-by-side comparison.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quadgrid/error.hpp"
#include "quadgrid/smoothing.hpp"

namespace quadgrid {

using Vector = std::vector<double>;
/// F(v).
using ResidualFn = std::function<Vector(std::span<const double>)>;
/// J(v) w, given v, w and the already evaluated F(v).
using JacobianVecFn = std::function<Vector(std::span<const double>, std::span<const double>, std::span<const double>)>;

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}
inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }
inline bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace detail

enum class Termination { ResidualZero, SmallCurvature, MaxIters, LineSearchFail, NonFinite, GmresBreakdown };

constexpr std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::ResidualZero: return "ResidualZero";
    case Termination::SmallCurvature: return "SmallCurvature";
    case Termination::MaxIters: return "MaxIters";
    case Termination::LineSearchFail: return "LineSearchFail";
    case Termination::NonFinite: return "NonFinite";
    case Termination::GmresBreakdown: return "GmresBreakdown";
  }
  return "?";
}

/// Quantities logged for each accepted SANE step.
struct SaneStep {
  double f_new = 0.0;        ///< f(v_k + lambda d_k)
  double f_ref = 0.0;        ///< max of the last min(k, M) + 1 values of f
  double lambda = 0.0;
  double alpha = 0.0;        ///< safeguarded alpha_k
  double FtJd = 0.0;         ///< F_k' J_k d_k, also d_k' J_k' F_k
  double gamma = 0.0;

  bool nonmonotone_ok() const noexcept { return f_new <= f_ref + 2.0 * gamma * lambda * FtJd; }
};

struct SolveReport {
  bool converged = false;
  Termination reason = Termination::MaxIters;
  std::size_t iters = 0;
  Vector residual_history;                   ///< ||F||_2 per iterate, iters + 1 entries
  std::vector<std::size_t> backtrack_counts;  ///< per outer iteration
  std::vector<std::size_t> inner_iters;       ///< GMRES iterations per Newton step
  std::vector<std::size_t> inner_cycles;      ///< GMRES restart cycles per Newton step
  std::vector<SaneStep> steps;                ///< SANE audit log
  std::size_t residual_evals = 0;
  double wall_time = 0.0;                     ///< seconds

  double final_residual() const { return residual_history.empty() ? 0.0 : residual_history.back(); }

  /// "123" for SANE, "8N / 8 GMRES" for Newton-GMRES.
  std::string iteration_summary() const {
    if (inner_cycles.empty() && inner_iters.empty()) return std::to_string(iters);
    std::size_t cycles = 0;
    for (std::size_t c : inner_cycles) cycles += c;
    return std::to_string(iters) + "N / " + std::to_string(cycles) + " GMRES";
  }
};

struct SolveResult {
  Vector v;
  SolveReport report;
};

struct SaneParams {
  double alpha0 = 1.0;
  std::size_t M = 10;
  double gamma = 1e-4;
  double sigma1 = 0.1;
  double sigma2 = 0.5;
  double eps = 1e-10;
  double delta = 1.0;
  std::optional<double> tol;  ///< default 1e-8 * sqrt(r)
  std::size_t max_iters = 5000;
  double lambda_min = 1e-14;

  void validate() const {
    if (!(gamma > 0.0)) fail(ErrorKind::InvalidArgument, "SANE gamma must be positive");
    if (!(sigma1 > 0.0 && sigma1 < sigma2 && sigma2 < 1.0))
      fail(ErrorKind::InvalidArgument, "SANE requires 0 < sigma1 < sigma2 < 1");
    if (!(eps > 0.0 && eps < 1.0)) fail(ErrorKind::InvalidArgument, "SANE requires 0 < eps < 1");
    if (!(delta >= eps && delta <= 1.0 / eps)) fail(ErrorKind::InvalidArgument, "SANE delta must lie in [eps, 1/eps]");
    if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) fail(ErrorKind::InvalidArgument, "SANE alpha0 must be positive");
    if (tol && !(*tol >= 0.0)) fail(ErrorKind::InvalidArgument, "tolerance must be non-negative");
    if (!(lambda_min > 0.0)) fail(ErrorKind::InvalidArgument, "lambda_min must be positive");
  }
  double tolerance(std::size_t r) const { return tol ? *tol : 1e-8 * std::sqrt(static_cast<double>(r)); }
};

/// Backtracking step: sigma * lambda, where sigma minimises the quadratic
/// through phi(0), phi'(0) and phi(lambda), clamped to [sigma1, sigma2].
inline double backtrack(double lambda, double sigma1, double sigma2, double phi0, double dphi0, double phi_lambda) {
  if (!std::isfinite(phi_lambda)) return sigma1 * lambda;
  const double curvature = phi_lambda - phi0 - dphi0 * lambda;
  if (!(curvature > 0.0)) return sigma2 * lambda;
  const double t = -dphi0 * lambda * lambda / (2.0 * curvature);
  return std::clamp(t / lambda, sigma1, sigma2) * lambda;
}

/// Spectral residual method for F(v) = 0.
inline SolveResult sane_solve(const ResidualFn& F, const JacobianVecFn& Jv, Vector v0, const SaneParams& p = {}) {
  p.validate();
  if (!detail::all_finite(v0)) fail(ErrorKind::InvalidArgument, "initial vector is not finite");
  const auto start = std::chrono::steady_clock::now();
  SolveResult out{std::move(v0), {}};
  SolveReport& rep = out.report;
  Vector& v = out.v;
  const double tol = p.tolerance(v.size());

  Vector Fk = F(v);
  ++rep.residual_evals;
  if (Fk.size() != v.size()) fail(ErrorKind::InconsistentLength, "residual size differs from unknown count");
  double f = detail::dot(Fk, Fk);
  rep.residual_history.push_back(std::sqrt(f));
  std::deque<double> memory{f};
  double alpha = p.alpha0;

  auto finish = [&](Termination t, bool ok) {
    rep.reason = t;
    rep.converged = ok;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  };

  for (std::size_t k = 0;; ++k) {
    if (!std::isfinite(f)) return finish(Termination::NonFinite, false);
    if (std::sqrt(f) <= tol) return finish(Termination::ResidualZero, true);
    if (k >= p.max_iters) return finish(Termination::MaxIters, false);

    const Vector JF = Jv(v, Fk, Fk);
    ++rep.residual_evals;
    const double FJF = detail::dot(Fk, JF);
    if (!std::isfinite(FJF)) return finish(Termination::NonFinite, false);
    if (std::abs(FJF) / f < p.eps) return finish(Termination::SmallCurvature, false);

    if (alpha <= p.eps || alpha >= 1.0 / p.eps) alpha = p.delta;
    const double sgn = FJF > 0.0 ? 1.0 : -1.0;
    Vector d(Fk.size());
    for (std::size_t q = 0; q < d.size(); ++q) d[q] = -sgn * Fk[q];
    const double FtJd = -sgn * FJF;
    double lambda = 1.0 / alpha;
    const double f_ref = *std::max_element(memory.begin(), memory.end());

    Vector vt(v.size());
    Vector Ft;
    double ft = 0.0;
    std::size_t backtracks = 0;
    for (;;) {
      for (std::size_t q = 0; q < v.size(); ++q) vt[q] = v[q] + lambda * d[q];
      Ft = F(vt);
      ++rep.residual_evals;
      ft = detail::dot(Ft, Ft);
      if (std::isfinite(ft) && ft <= f_ref + 2.0 * p.gamma * lambda * FtJd) break;
      lambda = backtrack(lambda, p.sigma1, p.sigma2, f, 2.0 * FtJd, ft);
      ++backtracks;
      if (lambda < p.lambda_min) {
        rep.backtrack_counts.push_back(backtracks);
        return finish(Termination::LineSearchFail, false);
      }
    }
    rep.steps.push_back({ft, f_ref, lambda, alpha, FtJd, p.gamma});
    rep.backtrack_counts.push_back(backtracks);

    double dw = 0.0;
    double dd = 0.0;
    for (std::size_t q = 0; q < d.size(); ++q) {
      dw += d[q] * (Ft[q] - Fk[q]);
      dd += d[q] * d[q];
    }
    alpha = sgn * dw / (lambda * dd);
    if (!std::isfinite(alpha)) alpha = p.delta;

    v.swap(vt);
    Fk.swap(Ft);
    f = ft;
    ++rep.iters;
    rep.residual_history.push_back(std::sqrt(f));
    memory.push_back(f);
    while (memory.size() > p.M + 1) memory.pop_front();
  }
}

struct GmresParams {
  std::size_t restart = 50;       ///< capped at r
  double forcing = 1e-4;          ///< relative inner tolerance
  std::size_t max_cycles = 20;    ///< restart cycles per Newton step
  std::size_t max_newton = 200;
  std::optional<double> tol;      ///< default 1e-8 * sqrt(r)
  double gamma = 1e-4;
  double sigma1 = 0.1;
  double sigma2 = 0.5;
  double lambda_min = 1e-14;

  void validate() const {
    if (restart < 1) fail(ErrorKind::InvalidArgument, "GMRES restart must be at least 1");
    if (!(forcing >= 0.0 && forcing < 1.0)) fail(ErrorKind::InvalidArgument, "GMRES forcing term must lie in [0, 1)");
    if (max_cycles < 1) fail(ErrorKind::InvalidArgument, "GMRES needs at least one cycle");
    if (!(sigma1 > 0.0 && sigma1 < sigma2 && sigma2 < 1.0))
      fail(ErrorKind::InvalidArgument, "backtracking requires 0 < sigma1 < sigma2 < 1");
    if (tol && !(*tol >= 0.0)) fail(ErrorKind::InvalidArgument, "tolerance must be non-negative");
  }
  double tolerance(std::size_t r) const { return tol ? *tol : 1e-8 * std::sqrt(static_cast<double>(r)); }
};

struct GmresResult {
  Vector x;
  double residual = 0.0;  ///< ||b - A x||
  std::size_t iterations = 0;
  std::size_t cycles = 0;
  bool breakdown = false;
};

/// Restarted GMRES for A x = b from x = 0; Arnoldi with modified
/// Gram-Schmidt and Givens rotations.
inline GmresResult gmres(const std::function<Vector(std::span<const double>)>& A, std::span<const double> b,
                         double rel_tol, std::size_t restart, std::size_t max_cycles) {
  const std::size_t r = b.size();
  restart = std::max<std::size_t>(1, std::min(restart, r));
  GmresResult out{Vector(r, 0.0), detail::norm2(b), 0, 0, false};
  const double bnorm = out.residual;
  if (bnorm == 0.0) return out;
  const double target = rel_tol * bnorm;

  for (std::size_t cycle = 0; cycle < max_cycles && out.residual > target; ++cycle) {
    ++out.cycles;
    Vector r0(b.begin(), b.end());
    if (cycle > 0) {
      const Vector Ax = A(out.x);
      for (std::size_t q = 0; q < r; ++q) r0[q] -= Ax[q];
    }
    const double beta = detail::norm2(r0);
    if (!std::isfinite(beta)) {
      out.breakdown = true;
      return out;
    }
    if (beta <= target) {
      out.residual = beta;
      break;
    }
    std::vector<Vector> V{r0};
    for (double& a : V[0]) a /= beta;
    std::vector<Vector> H(restart + 1, Vector(restart, 0.0));
    Vector cs(restart, 0.0), sn(restart, 0.0), g(restart + 1, 0.0);
    g[0] = beta;
    std::size_t used = 0;
    bool happy = false;
    for (std::size_t j = 0; j < restart; ++j) {
      Vector w = A(V[j]);
      if (!detail::all_finite(w)) {
        out.breakdown = true;
        return out;
      }
      const double wnorm0 = detail::norm2(w);
      for (std::size_t i = 0; i <= j; ++i) {
        H[i][j] = detail::dot(w, V[i]);
        for (std::size_t q = 0; q < r; ++q) w[q] -= H[i][j] * V[i][q];
      }
      H[j + 1][j] = detail::norm2(w);
      for (std::size_t i = 0; i < j; ++i) {
        const double t = cs[i] * H[i][j] + sn[i] * H[i + 1][j];
        H[i + 1][j] = -sn[i] * H[i][j] + cs[i] * H[i + 1][j];
        H[i][j] = t;
      }
      const double h1 = H[j][j];
      const double h2 = H[j + 1][j];
      const double rho = std::hypot(h1, h2);
      if (rho == 0.0) {
        out.breakdown = true;
        break;
      }
      cs[j] = h1 / rho;
      sn[j] = h2 / rho;
      const double wnext = h2;
      H[j][j] = rho;
      H[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      used = j + 1;
      ++out.iterations;
      out.residual = std::abs(g[j + 1]);
      if (wnext <= 1e-14 * std::max(wnorm0, std::numeric_limits<double>::min())) happy = true;
      if (out.residual <= target || happy) break;
      Vector next = std::move(w);
      for (double& a : next) a /= wnext;
      V.push_back(std::move(next));
    }
    // back substitution on the triangularised Hessenberg matrix
    Vector y(used, 0.0);
    for (std::size_t i = used; i-- > 0;) {
      double s = g[i];
      for (std::size_t l = i + 1; l < used; ++l) s -= H[i][l] * y[l];
      y[i] = s / H[i][i];
    }
    for (std::size_t i = 0; i < used; ++i)
      for (std::size_t q = 0; q < r; ++q) out.x[q] += y[i] * V[i][q];
    if (out.breakdown || happy) break;
  }
  return out;
}

/// Newton's method with matrix-free restarted GMRES inner solves and
/// backtracking on ||F||^2.
inline SolveResult newton_gmres_solve(const ResidualFn& F, const JacobianVecFn& Jv, Vector v0,
                                      const GmresParams& p = {}) {
  p.validate();
  if (!detail::all_finite(v0)) fail(ErrorKind::InvalidArgument, "initial vector is not finite");
  const auto start = std::chrono::steady_clock::now();
  SolveResult out{std::move(v0), {}};
  SolveReport& rep = out.report;
  Vector& v = out.v;
  const double tol = p.tolerance(v.size());

  Vector Fk = F(v);
  ++rep.residual_evals;
  if (Fk.size() != v.size()) fail(ErrorKind::InconsistentLength, "residual size differs from unknown count");
  double f = detail::dot(Fk, Fk);
  rep.residual_history.push_back(std::sqrt(f));

  auto finish = [&](Termination t, bool ok) {
    rep.reason = t;
    rep.converged = ok;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  };

  for (std::size_t k = 0;; ++k) {
    if (!std::isfinite(f)) return finish(Termination::NonFinite, false);
    if (std::sqrt(f) <= tol) return finish(Termination::ResidualZero, true);
    if (k >= p.max_newton) return finish(Termination::MaxIters, false);

    Vector rhs(Fk.size());
    for (std::size_t q = 0; q < rhs.size(); ++q) rhs[q] = -Fk[q];
    std::size_t evals = 0;
    const GmresResult lin = gmres(
        [&](std::span<const double> w) {
          ++evals;
          return Jv(v, w, Fk);
        },
        rhs, p.forcing, p.restart, p.max_cycles);
    rep.residual_evals += evals;
    rep.inner_iters.push_back(lin.iterations);
    rep.inner_cycles.push_back(lin.cycles);
    if (!detail::all_finite(lin.x) || lin.residual >= std::sqrt(f) || (lin.breakdown && lin.iterations == 0))
      return finish(Termination::GmresBreakdown, false);

    double lambda = 1.0;
    Vector vt(v.size());
    Vector Ft;
    double ft = 0.0;
    std::size_t backtracks = 0;
    for (;;) {
      for (std::size_t q = 0; q < v.size(); ++q) vt[q] = v[q] + lambda * lin.x[q];
      Ft = F(vt);
      ++rep.residual_evals;
      ft = detail::dot(Ft, Ft);
      if (std::isfinite(ft) && ft <= (1.0 - 2.0 * p.gamma * lambda) * f) break;
      lambda = backtrack(lambda, p.sigma1, p.sigma2, f, -2.0 * f, ft);
      ++backtracks;
      if (lambda < p.lambda_min) {
        rep.backtrack_counts.push_back(backtracks);
        return finish(Termination::LineSearchFail, false);
      }
    }
    rep.backtrack_counts.push_back(backtracks);
    v.swap(vt);
    Fk.swap(Ft);
    f = ft;
    ++rep.iters;
    rep.residual_history.push_back(std::sqrt(f));
  }
}

/// Oracles bound to a mesh residual system.
inline ResidualFn residual_fn(const ResidualSystem& sys) {
  return [&sys](std::span<const double> v) { return sys.residual(v); };
}
inline JacobianVecFn jacobian_vec_fn(const ResidualSystem& sys) {
  return [&sys](std::span<const double> v, std::span<const double> w, std::span<const double> fv) {
    return sys.jacobian_vec(v, w, fv);
  };
}

/// Solver outcome for one row of the comparison table.
struct MethodRow {
  std::string method;
  std::optional<SolveResult> result;
  std::string failure;  ///< set when the solver raised instead of returning
};

struct ComparisonRow {
  MethodRow sane;
  MethodRow gmres;
  std::optional<double> normalized_difference;  ///< ||M1 - M2||_inf / L
};

inline double max_abs_difference(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t q = 0; q < a.size(); ++q) d = std::max(d, std::abs(a[q] - b[q]));
  return d;
}

/// Runs both solvers from the same start and reports the normalised
/// infinity-norm difference of their meshes. `L` is the domain side length.
inline ComparisonRow compare_solvers(const ResidualFn& F, const JacobianVecFn& Jv, const Vector& v0,
                                     const SaneParams& sp, const GmresParams& gp, double L) {
  ComparisonRow row;
  row.sane.method = "SANE";
  row.gmres.method = "N-GMRES";
  try {
    row.sane.result = sane_solve(F, Jv, v0, sp);
  } catch (const Error& e) {
    row.sane.failure = e.what();
  }
  try {
    row.gmres.result = newton_gmres_solve(F, Jv, v0, gp);
  } catch (const Error& e) {
    row.gmres.failure = e.what();
  }
  if (row.sane.result && row.gmres.result)
    row.normalized_difference = max_abs_difference(row.sane.result->v, row.gmres.result->v) / L;
  return row;
}

}  // namespace quadgrid
