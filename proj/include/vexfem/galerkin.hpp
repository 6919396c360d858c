#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vexfem/assembly.hpp"
#include "vexfem/exponent_field.hpp"
#include "vexfem/kernel.hpp"
#include "vexfem/mesh.hpp"
#include "vexfem/modular.hpp"

namespace vexfem {

struct NonConvergenceError : std::runtime_error {
  NonConvergenceError(const std::string& what, double residual, int level)
      : std::runtime_error(what), last_residual(residual), level(level) {}
  double last_residual;
  int level;
};

struct SolverSettings {
  double tolerance = 1e-10;  // scaled by (1 + max|<f, phi_i>|)
  int max_iterations = 100;
  int max_halvings = 30;
  double fd_step = 0.0;  // 0 selects the assembly default
};

struct SolveStats {
  int iterations = 0;
  double residual_norm = 0.0;
  int halvings = 0;
  bool forced_steps = false;  // a stalled line search took the least-bad step
};

/// Closed-form reference solution for manufactured problems.
struct ExactReference {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> gradient;
};

/// A(u) = f on the Dirichlet space over a nested P1 hierarchy of depth
/// `levels` (level k has 2^k elements).
struct GalerkinProblem {
  Domain domain;
  ExponentField p;
  CaratheodoryKernel kernel;
  std::function<double(double)> rhs;
  std::string rhs_label;
  int levels = 2;
  std::optional<ExactReference> exact;
  SolverSettings solver;
  QuadratureRule rule = gauss_legendre(5);
  double pairing_tolerance = 1e-4;

  void validate() const {
    if (p.p_minus() <= 1.0 + 1e-12)
      throw std::invalid_argument("GalerkinProblem: p_minus > 1 required");
    if (levels < 2)
      throw std::invalid_argument("GalerkinProblem: levels >= 2 required");
    validate_kernel_growth(kernel, p);
  }
};

namespace detail {
inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
}  // namespace detail

/// Damped Newton on the weak-form residual with the finite-difference
/// tridiagonal Jacobian. The step is halved until the residual max-norm
/// decreases; if max_halvings halvings never produce a decrease, the
/// least-residual candidate is accepted so the iteration can leave regions
/// with a degenerate Jacobian (|xi|^{p-2} kernels at the zero guess).
inline MeshedFunction solve_level(const GalerkinProblem& prob, const Mesh& mesh,
                                  const MeshedFunction& initial, SolveStats& stats) {
  if (!(initial.mesh() == mesh))
    throw MeshMismatchError("solve_level: initial guess lives on another mesh");
  if (initial.tag() != BoundaryTag::dirichlet_zero)
    throw std::invalid_argument("solve_level: Dirichlet space required");
  const BoundaryTag tag = BoundaryTag::dirichlet_zero;
  const std::size_t n = free_node_count(mesh, tag);
  stats = SolveStats{};
  MeshedFunction u = initial;
  if (n == 0) return u;

  const std::vector<double> load = assemble_load(mesh, tag, prob.rhs, prob.rule);
  const double tol = prob.solver.tolerance * (1.0 + detail::max_abs(load));

  std::vector<double> residual = assemble_residual(u, prob.kernel, prob.p, load, prob.rule);
  double residual_norm = detail::max_abs(residual);
  for (int iter = 0; iter < prob.solver.max_iterations; ++iter) {
    if (residual_norm <= tol) {
      stats.residual_norm = residual_norm;
      return u;
    }
    const TriDiag jac =
        assemble_jacobian_fd(u, prob.kernel, prob.p, prob.rule, prob.solver.fd_step);
    std::vector<double> neg(residual.size());
    for (std::size_t i = 0; i < residual.size(); ++i) neg[i] = -residual[i];
    const std::vector<double> direction = jac.solve(std::move(neg));

    double alpha = 1.0;
    bool decreased = false;
    MeshedFunction best = u;
    std::vector<double> best_residual;
    double best_norm = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= prob.solver.max_halvings; ++k) {
      MeshedFunction candidate = u;
      for (std::size_t r = 0; r < n; ++r) {
        const std::size_t g = node_of_row(r, tag);
        candidate.set_coefficient(g, u.coefficient(g) + alpha * direction[r]);
      }
      std::vector<double> cand_residual =
          assemble_residual(candidate, prob.kernel, prob.p, load, prob.rule);
      const double cand_norm = detail::max_abs(cand_residual);
      if (cand_norm < best_norm) {
        best_norm = cand_norm;
        best = candidate;
        best_residual = std::move(cand_residual);
      }
      if (cand_norm < residual_norm) {
        decreased = true;
        stats.halvings += k;
        break;
      }
      alpha *= 0.5;
    }
    if (!decreased) stats.forced_steps = true;
    u = std::move(best);
    residual = std::move(best_residual);
    residual_norm = best_norm;
    ++stats.iterations;
  }
  if (residual_norm <= tol) {
    stats.residual_norm = residual_norm;
    return u;
  }
  throw NonConvergenceError("solve_level: no convergence within max iterations",
                            residual_norm, mesh.level());
}

/// Warm-started solve chain over levels 0..levels; level 0 starts from zero,
/// each later level from the prolonged coarser solution.
inline std::vector<MeshedFunction> solve_hierarchy(const GalerkinProblem& prob,
                                                   std::vector<SolveStats>* stats_out) {
  prob.validate();
  std::vector<MeshedFunction> solutions;
  solutions.reserve(std::size_t(prob.levels) + 1);
  if (stats_out) stats_out->clear();
  Mesh mesh = Mesh::initial(prob.domain);
  for (int level = 0; level <= prob.levels; ++level) {
    const MeshedFunction guess =
        level == 0 ? MeshedFunction::zero(mesh, BoundaryTag::dirichlet_zero)
                   : prolong(solutions.back(), mesh);
    SolveStats stats;
    MeshedFunction u = [&] {
      try {
        return solve_level(prob, mesh, guess, stats);
      } catch (NonConvergenceError& err) {
        throw NonConvergenceError(err.what(), err.last_residual, level);
      }
    }();
    solutions.push_back(std::move(u));
    if (stats_out) stats_out->push_back(stats);
    if (level < prob.levels) mesh = mesh.refine();
  }
  return solutions;
}

struct LevelRecord {
  int level = 0;
  int solve_iterations = 0;
  double residual_norm = 0.0;
  double w1p_error = 0.0;          // ||u_n - u_ref||_{W^{1,p(.)}}
  double grad_modular_error = 0.0; // rho(grad u_n - grad u_ref)
  double pairing = 0.0;            // <A(u_n), u_n - u_ref>
  double lp_error = 0.0;           // ||u_n - u_ref||_{L^{p(.)}}
};

struct ConvergenceReport {
  std::vector<LevelRecord> rows;
  bool exact_reference = false;
  // Verdicts are computed over rows 0..last_asserted; with a finest-level
  // reference the row adjacent to the reference is reported but not asserted.
  int last_asserted = 0;
  bool error_decreasing = false;
  bool pairing_small = false;
  double pairing_tolerance = 0.0;
};

/// Solves the hierarchy and measures every level against the reference (the
/// supplied exact solution, else the finest-level solve).
inline ConvergenceReport convergence_study(const GalerkinProblem& prob) {
  std::vector<SolveStats> stats;
  const std::vector<MeshedFunction> solutions = solve_hierarchy(prob, &stats);
  const Mesh ref_mesh = solutions.back().mesh();
  const bool exact = prob.exact.has_value();

  ConvergenceReport report;
  report.exact_reference = exact;
  report.pairing_tolerance = prob.pairing_tolerance;
  const int row_count = exact ? prob.levels + 1 : prob.levels;
  for (int level = 0; level < row_count; ++level) {
    const MeshedFunction lifted = prolong(solutions[std::size_t(level)], ref_mesh);
    const GradientField lifted_grad(lifted);
    LevelRecord rec;
    rec.level = level;
    rec.solve_iterations = stats[std::size_t(level)].iterations;
    rec.residual_norm = stats[std::size_t(level)].residual_norm;
    if (exact) {
      const auto& ex = *prob.exact;
      const auto dv = [&](double z) { return lifted.value(z) - ex.value(z); };
      const auto dg = [&](double z) { return lifted_grad.value(z) - ex.gradient(z); };
      rec.w1p_error =
          sobolev_luxemburg_over(ref_mesh, dv, dg, prob.p, prob.rule).value;
      rec.grad_modular_error = modular_over(ref_mesh, dg, prob.p, prob.rule);
      rec.lp_error = luxemburg_over(ref_mesh, dv, prob.p, prob.rule).value;
      rec.pairing = pairing_vs_gradient(lifted, dg, prob.kernel, prob.p, prob.rule);
    } else {
      const MeshedFunction diff = difference(lifted, solutions.back());
      const GradientField diff_grad(diff);
      rec.w1p_error = sobolev_norm(diff, prob.p, prob.rule).value;
      rec.grad_modular_error = modular(diff_grad, prob.p, prob.rule);
      rec.lp_error = luxemburg_norm(diff, prob.p, prob.rule).value;
      rec.pairing = pairing(lifted, diff, prob.kernel, prob.p, prob.rule);
    }
    report.rows.push_back(rec);
  }

  report.last_asserted =
      exact ? int(report.rows.size()) - 1 : int(report.rows.size()) - 2;
  if (report.last_asserted < 1) report.last_asserted = int(report.rows.size()) - 1;
  report.error_decreasing = true;
  for (int i = 0; i < report.last_asserted; ++i)
    if (!(report.rows[std::size_t(i) + 1].w1p_error <
          report.rows[std::size_t(i)].w1p_error))
      report.error_decreasing = false;
  report.pairing_small =
      std::abs(report.rows.back().pairing) <= prob.pairing_tolerance;
  return report;
}

}  // namespace vexfem
