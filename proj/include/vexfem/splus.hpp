#pragma once

#include <algorithm>
#include <array>
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
#include "vexfem/galerkin.hpp"
#include "vexfem/kernel.hpp"
#include "vexfem/mesh.hpp"
#include "vexfem/modular.hpp"

namespace vexfem {

struct AliasingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProbeTolerances {
  // A finite window cannot evaluate a limsup; the surrogate takes the max of
  // the pairing over the last half of the window.
  double limsup_tolerance = 1e-6;
  // Strong-convergence verdict: final gradient Luxemburg error at or under
  // this floor and decreasing over the window (10x a 1e-10 solver tolerance).
  double strong_error_floor = 1e-9;
};

enum class ProbeVerdict {
  consistent,           // limsup surrogate met and strong convergence observed
  hypothesis_violated,  // limsup surrogate fails; no strong-convergence claim
  inconsistent          // limsup surrogate met but strong convergence absent
};

inline const char* to_string(ProbeVerdict v) {
  switch (v) {
    case ProbeVerdict::consistent: return "consistent-with-splus";
    case ProbeVerdict::hypothesis_violated: return "hypothesis-violated";
    case ProbeVerdict::inconsistent: return "inconsistent-with-splus";
  }
  return "unknown";
}

inline constexpr std::size_t kWeakFunctionalCount = 8;

/// Fixed family of smooth test functionals (polynomials and sinusoids in the
/// normalized coordinate), paired in L^2. A finite family is necessarily an
/// incomplete surrogate for weak convergence; reports carry all eight values.
inline std::array<std::function<double(double)>, kWeakFunctionalCount>
weak_test_functionals(const Domain& dom) {
  const double pi = 3.14159265358979323846;
  const double left = dom.left;
  const double width = dom.measure();
  const auto zn = [left, width](double z) { return (z - left) / width; };
  return {
      std::function<double(double)>([](double) { return 1.0; }),
      std::function<double(double)>([zn](double z) { return zn(z); }),
      std::function<double(double)>([zn](double z) { const double t = zn(z); return t * t; }),
      std::function<double(double)>([zn](double z) { const double t = zn(z); return t * t * t; }),
      std::function<double(double)>([zn, pi](double z) { return std::sin(pi * zn(z)); }),
      std::function<double(double)>([zn, pi](double z) { return std::cos(pi * zn(z)); }),
      std::function<double(double)>([zn, pi](double z) { return std::sin(2.0 * pi * zn(z)); }),
      std::function<double(double)>([zn, pi](double z) { return std::cos(2.0 * pi * zn(z)); }),
  };
}

struct ThetaDecomposition {
  double theta1 = 0.0;  // frozen-s monotone part, nonnegative under A2
  double theta2 = 0.0;  // frozen-gradient continuity part
  std::vector<double> theta1_per_element;
  std::vector<double> theta2_per_element;
};

/// Splits <A(u_n) - A(u), u_n - u> into the monotone part
/// theta1 = (a(z, u_n, grad u_n) - a(z, u_n, grad u)) . (grad u_n - grad u)
/// and the frozen-gradient part
/// theta2 = (a(z, u_n, grad u) - a(z, u, grad u)) . (grad u_n - grad u).
inline ThetaDecomposition theta_decomposition(const MeshedFunction& u_n,
                                              const MeshedFunction& u,
                                              const CaratheodoryKernel& kernel,
                                              const ExponentField& p,
                                              const QuadratureRule& rule) {
  (void)p;
  if (!(u_n.mesh() == u.mesh()))
    throw MeshMismatchError("theta_decomposition: same mesh required");
  const Mesh& mesh = u_n.mesh();
  ThetaDecomposition out;
  out.theta1_per_element.resize(mesh.element_count(), 0.0);
  out.theta2_per_element.resize(mesh.element_count(), 0.0);
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double a = mesh.node(e);
    const double h = mesh.element_width(e);
    const Vec1 grad_n{u_n.gradient_on_element(e)};
    const Vec1 grad_u{u.gradient_on_element(e)};
    const Vec1 d{grad_n[0] - grad_u[0]};
    double t1 = 0.0, t2 = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = rule.points[q];
      const double z = a + h * t;
      const double sn = u_n.coefficient(e) + t * (u_n.coefficient(e + 1) - u_n.coefficient(e));
      const double su = u.coefficient(e) + t * (u.coefficient(e + 1) - u.coefficient(e));
      const double a_full = kernel.a(z, sn, grad_n)[0];
      const double a_frozen_grad = kernel.a(z, sn, grad_u)[0];
      const double a_limit = kernel.a(z, su, grad_u)[0];
      t1 += h * rule.weights[q] * (a_full - a_frozen_grad) * d[0];
      t2 += h * rule.weights[q] * (a_frozen_grad - a_limit) * d[0];
    }
    out.theta1_per_element[e] = t1;
    out.theta2_per_element[e] = t2;
    out.theta1 += t1;
    out.theta2 += t2;
  }
  return out;
}

struct SPlusRecord {
  double index = 0.0;  // oscillation frequency or Galerkin level
  double pairing = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double lp_error = 0.0;
  double grad_lp_error = 0.0;
  std::array<double, kWeakFunctionalCount> weak{};
};

struct SPlusProbeReport {
  std::vector<SPlusRecord> rows;
  bool limsup_ok = false;
  bool strong_ok = false;
  ProbeVerdict verdict = ProbeVerdict::hypothesis_violated;
  ProbeTolerances tolerances;
  // Observable shadow of the L^1 dominating function: per element, the max
  // over the sequence of the pointwise |xi_n(z)| at quadrature nodes.
  std::vector<double> xi_shadow_per_element;
};

namespace detail {
inline double weak_pairing(const Mesh& mesh, const std::function<double(double)>& g,
                           const MeshedFunction& d, const QuadratureRule& rule) {
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double a = mesh.node(e);
    const double h = mesh.element_width(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double z = a + h * rule.points[q];
      sum += h * rule.weights[q] * g(z) * d.value(z);
    }
  }
  return sum;
}
}  // namespace detail

/// Core probe over an explicit sequence (members and limit on one mesh).
inline SPlusProbeReport run_probe(const std::vector<MeshedFunction>& members,
                                  const std::vector<double>& indices,
                                  const MeshedFunction& limit,
                                  const CaratheodoryKernel& kernel,
                                  const ExponentField& p, const QuadratureRule& rule,
                                  const ProbeTolerances& tols = {}) {
  if (members.empty())
    throw std::invalid_argument("run_probe: empty sequence");
  if (indices.size() != members.size())
    throw std::invalid_argument("run_probe: index/member count mismatch");
  const Mesh& mesh = limit.mesh();
  const auto weak = weak_test_functionals(mesh.domain());

  SPlusProbeReport report;
  report.tolerances = tols;
  report.xi_shadow_per_element.assign(mesh.element_count(), 0.0);
  for (std::size_t m = 0; m < members.size(); ++m) {
    const MeshedFunction& u_n = members[m];
    if (!(u_n.mesh() == mesh))
      throw MeshMismatchError("run_probe: member on a different mesh (prolong first)");
    const MeshedFunction d = difference(u_n, limit);
    SPlusRecord rec;
    rec.index = indices[m];
    rec.pairing = pairing(u_n, d, kernel, p, rule);
    const ThetaDecomposition theta = theta_decomposition(u_n, limit, kernel, p, rule);
    rec.theta1 = theta.theta1;
    rec.theta2 = theta.theta2;
    rec.lp_error = luxemburg_norm(d, p, rule).value;
    rec.grad_lp_error = luxemburg_norm(GradientField(d), p, rule).value;
    for (std::size_t j = 0; j < kWeakFunctionalCount; ++j)
      rec.weak[j] = detail::weak_pairing(mesh, weak[j], d, rule);
    report.rows.push_back(rec);

    // xi_n(z) = (a(z,u_n,grad u_n) - a(z,u,grad u)) . (grad u_n - grad u)
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
      const double a = mesh.node(e);
      const double h = mesh.element_width(e);
      const Vec1 grad_n{u_n.gradient_on_element(e)};
      const Vec1 grad_u{limit.gradient_on_element(e)};
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double t = rule.points[q];
        const double z = a + h * t;
        const double sn = u_n.coefficient(e) + t * (u_n.coefficient(e + 1) - u_n.coefficient(e));
        const double su = limit.coefficient(e) + t * (limit.coefficient(e + 1) - limit.coefficient(e));
        const double xi_n = (kernel.a(z, sn, grad_n)[0] - kernel.a(z, su, grad_u)[0]) *
                            (grad_n[0] - grad_u[0]);
        report.xi_shadow_per_element[e] =
            std::max(report.xi_shadow_per_element[e], std::abs(xi_n));
      }
    }
  }

  const std::size_t count = report.rows.size();
  const std::size_t tail_start = count / 2;
  double tail_max_pairing = -std::numeric_limits<double>::infinity();
  for (std::size_t i = tail_start; i < count; ++i)
    tail_max_pairing = std::max(tail_max_pairing, report.rows[i].pairing);
  report.limsup_ok = tail_max_pairing <= tols.limsup_tolerance;

  bool strong = report.rows.back().grad_lp_error <= tols.strong_error_floor;
  for (std::size_t i = 0; i + 1 < count && strong; ++i) {
    const double e0 = report.rows[i].grad_lp_error;
    const double e1 = report.rows[i + 1].grad_lp_error;
    if (!(e1 < e0) && e0 > tols.strong_error_floor) strong = false;
  }
  report.strong_ok = strong;

  if (!report.limsup_ok)
    report.verdict = ProbeVerdict::hypothesis_violated;
  else
    report.verdict =
        report.strong_ok ? ProbeVerdict::consistent : ProbeVerdict::inconsistent;
  return report;
}

/// A concrete sequence with its limit candidate, all on one mesh.
struct ProbeSequence {
  std::vector<MeshedFunction> members;
  std::vector<double> indices;
  MeshedFunction limit;
};

/// Oscillation counter-sequence u_n = sin(n pi zhat)/(n pi / width) with limit
/// 0: the contrapositive probe (gradient norms stay bounded away from zero
/// while the functions vanish in L^{p(.)}). Frequencies above elements/4 alias
/// on the mesh and are rejected.
inline ProbeSequence build_oscillation_sequence(const std::vector<int>& frequencies,
                                                const Mesh& mesh) {
  if (frequencies.empty())
    throw std::invalid_argument("build_oscillation_sequence: empty frequency schedule");
  const double pi = 3.14159265358979323846;
  const Domain& dom = mesh.domain();
  const double width = dom.measure();
  ProbeSequence seq{{}, {}, MeshedFunction::zero(mesh, BoundaryTag::dirichlet_zero)};
  for (int n : frequencies) {
    if (n < 1)
      throw std::invalid_argument("build_oscillation_sequence: frequency >= 1");
    if (std::size_t(n) > mesh.element_count() / 4)
      throw AliasingError("build_oscillation_sequence: frequency " +
                          std::to_string(n) + " exceeds elements/4 on this mesh");
    const double omega = double(n) * pi / width;
    seq.members.push_back(interpolate(
        [omega, dom](double z) { return std::sin(omega * (z - dom.left)) / omega; },
        mesh, BoundaryTag::dirichlet_zero));
    seq.indices.push_back(double(n));
  }
  return seq;
}

/// Galerkin sequence: solves the hierarchy, prolongs every level to the finest
/// mesh and takes the finest solution as the limit candidate.
inline ProbeSequence build_galerkin_sequence(const GalerkinProblem& prob) {
  std::vector<SolveStats> stats;
  std::vector<MeshedFunction> solutions = solve_hierarchy(prob, &stats);
  const Mesh mesh = solutions.back().mesh();
  ProbeSequence seq{{}, {}, solutions.back()};
  for (std::size_t level = 0; level < solutions.size(); ++level) {
    seq.members.push_back(prolong(solutions[level], mesh));
    seq.indices.push_back(double(level));
  }
  return seq;
}

inline SPlusProbeReport run_probe(const ProbeSequence& seq,
                                  const CaratheodoryKernel& kernel,
                                  const ExponentField& p, const QuadratureRule& rule,
                                  const ProbeTolerances& tols = {}) {
  return run_probe(seq.members, seq.indices, seq.limit, kernel, p, rule, tols);
}

inline SPlusProbeReport run_oscillation_probe(const std::vector<int>& frequencies,
                                              const CaratheodoryKernel& kernel,
                                              const ExponentField& p, const Mesh& mesh,
                                              const QuadratureRule& rule,
                                              const ProbeTolerances& tols = {}) {
  return run_probe(build_oscillation_sequence(frequencies, mesh), kernel, p, rule,
                   tols);
}

inline SPlusProbeReport run_galerkin_probe(const GalerkinProblem& prob,
                                           const ProbeTolerances& tols = {}) {
  return run_probe(build_galerkin_sequence(prob), prob.kernel, prob.p, prob.rule,
                   tols);
}

struct UniformIntegrabilityProfile {
  std::vector<double> window_sizes;
  std::vector<double> suprema;  // sup over members and sliding windows
};

namespace detail {
/// Integral of |grad u|^{p(z)} over [a, b] (clipped per element).
inline double windowed_gradient_modular(const MeshedFunction& u,
                                        const ExponentField& p, double a, double b,
                                        const QuadratureRule& rule) {
  const Mesh& mesh = u.mesh();
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double lo = std::max(a, mesh.node(e));
    const double hi = std::min(b, mesh.node(e + 1));
    if (hi <= lo) continue;
    const double g = std::abs(u.gradient_on_element(e));
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double z = lo + (hi - lo) * rule.points[q];
      sum += (hi - lo) * rule.weights[q] * std::pow(g, p(z));
    }
  }
  return sum;
}
}  // namespace detail

/// Numerical uniform-integrability signature: for each window size delta, the
/// sup over the sequence and over sliding windows E with |E| = delta of the
/// gradient modular on E. A profile decreasing to 0 as delta -> 0 is the
/// Vitali-hypothesis fingerprint.
inline UniformIntegrabilityProfile uniform_integrability_profile(
    const std::vector<MeshedFunction>& members, const ExponentField& p,
    const std::vector<double>& window_sizes, const QuadratureRule& rule,
    std::size_t window_starts = 129) {
  if (members.empty())
    throw std::invalid_argument("uniform_integrability_profile: empty sequence");
  const Domain& dom = members.front().mesh().domain();
  UniformIntegrabilityProfile out;
  for (double delta : window_sizes) {
    if (!(delta > 0.0) || !(delta < dom.measure()))
      throw std::invalid_argument(
          "uniform_integrability_profile: window size outside (0, measure)");
    double sup = 0.0;
    for (const MeshedFunction& u : members) {
      for (std::size_t j = 0; j < window_starts; ++j) {
        const double t =
            dom.left + (dom.measure() - delta) * double(j) / double(window_starts - 1);
        sup = std::max(sup,
                       detail::windowed_gradient_modular(u, p, t, t + delta, rule));
      }
    }
    out.window_sizes.push_back(delta);
    out.suprema.push_back(sup);
  }
  return out;
}

}  // namespace vexfem
