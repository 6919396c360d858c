#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>

#include "vexfem/exponent_field.hpp"
#include "vexfem/mesh.hpp"

namespace vexfem {

/// Modulars below this threshold define the zero function; avoids bisecting a
/// flat map.
inline constexpr double kZeroModularThreshold = 1e-15;

/// Elementwise Gauss-Legendre approximation of the semimodular
/// rho(f) = integral of |f(z)|^{p(z)} over the mesh. Elements are reduced in
/// fixed order (bitwise reproducible).
template <class F>
double modular_over(const Mesh& mesh, const F& f, const ExponentField& p,
                    const QuadratureRule& rule) {
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double a = mesh.node(e);
    const double h = mesh.element_width(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double z = a + h * rule.points[q];
      sum += h * rule.weights[q] * std::pow(std::abs(f(z)), p(z));
    }
  }
  return sum;
}

inline double modular(const MeshedFunction& u, const ExponentField& p,
                      const QuadratureRule& rule) {
  return modular_over(u.mesh(), [&](double z) { return u.value(z); }, p, rule);
}

inline double modular(const GradientField& g, const ExponentField& p,
                      const QuadratureRule& rule) {
  return modular_over(g.mesh(), [&](double z) { return g.value(z); }, p, rule);
}

struct LuxemburgNorm {
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;   // rho(u/value) - 1 at the returned value
  bool is_zero = false;    // modular below the zero threshold
};

/// Luxemburg norm by bisection on the decreasing map lambda -> rho(u/lambda).
/// The initial bracket comes from the two-sided norm-modular bounds
/// (rho >= 1: [rho^{1/p+}, rho^{1/p-}], reversed below 1) and is then repaired
/// by geometric expansion (factor 4) until rho(u/hi) <= 1 < rho(u/lo).
/// Terminates when the bracket width drops under
/// min(1e-11 * max(1, hi), 2e-11 * hi / max(1, p_plus)), which keeps the
/// returned midpoint inside the 1e-10 unit-modular band.
template <class Rho>
LuxemburgNorm luxemburg_from_modular(const Rho& rho_scaled, double rho_unscaled,
                                     double p_minus, double p_plus) {
  LuxemburgNorm out;
  if (rho_unscaled < kZeroModularThreshold) {
    out.is_zero = true;
    return out;
  }
  double lo, hi;
  if (rho_unscaled >= 1.0) {
    lo = std::pow(rho_unscaled, 1.0 / p_plus);
    hi = std::pow(rho_unscaled, 1.0 / p_minus);
  } else {
    lo = std::pow(rho_unscaled, 1.0 / p_minus);
    hi = std::pow(rho_unscaled, 1.0 / p_plus);
  }
  int iters = 0;
  while (rho_scaled(hi) > 1.0) {
    lo = hi;
    hi *= 4.0;
    if (++iters > 2000) throw std::runtime_error("luxemburg: bracket expansion failed");
  }
  while (lo > 0.0 && rho_scaled(lo) <= 1.0) {
    hi = lo;
    lo *= 0.25;
    ++iters;
    if (lo < 1e-300 || iters > 2000) {
      lo = 0.0;
      break;
    }
  }
  const auto tolerance = [p_plus](double h) {
    return std::min(1e-11 * std::max(1.0, h), 2e-11 * h / std::max(1.0, p_plus));
  };
  while (hi - lo >= tolerance(hi)) {
    const double mid = 0.5 * (lo + hi);
    if (rho_scaled(mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
    if (++iters > 5000) break;
  }
  out.value = 0.5 * (lo + hi);
  out.iterations = iters;
  out.residual = rho_scaled(out.value) - 1.0;
  return out;
}

/// Luxemburg norm of an arbitrary field integrated over the given mesh.
template <class F>
LuxemburgNorm luxemburg_over(const Mesh& mesh, const F& f, const ExponentField& p,
                             const QuadratureRule& rule) {
  const double rho1 = modular_over(mesh, f, p, rule);
  return luxemburg_from_modular(
      [&](double lambda) {
        return modular_over(mesh, [&](double z) { return f(z) / lambda; }, p, rule);
      },
      rho1, p.p_minus(), p.p_plus());
}

inline LuxemburgNorm luxemburg_norm(const MeshedFunction& u, const ExponentField& p,
                                    const QuadratureRule& rule) {
  return luxemburg_over(u.mesh(), [&](double z) { return u.value(z); }, p, rule);
}

inline LuxemburgNorm luxemburg_norm(const GradientField& g, const ExponentField& p,
                                    const QuadratureRule& rule) {
  return luxemburg_over(g.mesh(), [&](double z) { return g.value(z); }, p, rule);
}

/// W^{1,p(.)} Luxemburg norm of a pair (value field, gradient field): the norm
/// induced by the summed semimodular rho(u) + rho(grad u).
template <class FV, class FG>
LuxemburgNorm sobolev_luxemburg_over(const Mesh& mesh, const FV& fv, const FG& fg,
                                     const ExponentField& p,
                                     const QuadratureRule& rule) {
  const auto rho = [&](double lambda) {
    return modular_over(mesh, [&](double z) { return fv(z) / lambda; }, p, rule) +
           modular_over(mesh, [&](double z) { return fg(z) / lambda; }, p, rule);
  };
  return luxemburg_from_modular(rho, rho(1.0), p.p_minus(), p.p_plus());
}

inline LuxemburgNorm sobolev_norm(const MeshedFunction& u, const ExponentField& p,
                                  const QuadratureRule& rule) {
  const GradientField g(u);
  return sobolev_luxemburg_over(
      u.mesh(), [&](double z) { return u.value(z); },
      [&](double z) { return g.value(z); }, p, rule);
}

struct HolderPairingReport {
  double lhs = 0.0;   // integral of |u||v|
  double rhs = 0.0;   // 2 ||u||_p ||v||_q
  double slack = 0.0; // rhs - lhs
  bool holds = false;
};

/// Checks the modular-space Holder inequality with constant 2 against the
/// conjugate exponent.
inline HolderPairingReport holder_pairing_bound(const MeshedFunction& u,
                                                const MeshedFunction& v,
                                                const ExponentField& p,
                                                const QuadratureRule& rule) {
  if (!(u.mesh().domain() == v.mesh().domain()))
    throw MeshMismatchError("holder_pairing_bound: domain mismatch");
  const ExponentField q = conjugate(p);
  // Integrate on the finer of the two meshes so same-mesh P1 pairs stay exact.
  const Mesh& mesh =
      u.mesh().node_count() >= v.mesh().node_count() ? u.mesh() : v.mesh();
  double lhs = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double a = mesh.node(e);
    const double h = mesh.element_width(e);
    for (std::size_t qn = 0; qn < rule.size(); ++qn) {
      const double z = a + h * rule.points[qn];
      lhs += h * rule.weights[qn] * std::abs(u.value(z)) * std::abs(v.value(z));
    }
  }
  HolderPairingReport rep;
  rep.lhs = lhs;
  rep.rhs = 2.0 * luxemburg_norm(u, p, rule).value * luxemburg_norm(v, q, rule).value;
  rep.slack = rep.rhs - rep.lhs;
  rep.holds = rep.lhs <= rep.rhs + 1e-9;
  return rep;
}

struct NormModularReport {
  double norm = 0.0;
  double modular = 0.0;
  bool norm_at_least_one = false;
  // Slack of the applicable branch of the norm-modular bounds; both are
  // nonnegative when the inequalities hold.
  double lower_slack = 0.0;
  double upper_slack = 0.0;
};

/// Evaluates the two-sided norm-modular inequality for the branch selected by
/// the norm (powers p_minus/p_plus swap below norm 1).
inline NormModularReport norm_modular_relations(const MeshedFunction& u,
                                                const ExponentField& p,
                                                const QuadratureRule& rule) {
  NormModularReport rep;
  rep.modular = modular(u, p, rule);
  const LuxemburgNorm n = luxemburg_norm(u, p, rule);
  rep.norm = n.value;
  if (n.is_zero) {
    rep.norm_at_least_one = false;
    return rep;
  }
  rep.norm_at_least_one = rep.norm >= 1.0;
  if (rep.norm_at_least_one) {
    rep.lower_slack = rep.modular - std::pow(rep.norm, p.p_minus());
    rep.upper_slack = std::pow(rep.norm, p.p_plus()) - rep.modular;
  } else {
    rep.lower_slack = rep.modular - std::pow(rep.norm, p.p_plus());
    rep.upper_slack = std::pow(rep.norm, p.p_minus()) - rep.modular;
  }
  return rep;
}

}  // namespace vexfem
