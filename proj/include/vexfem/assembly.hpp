#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "vexfem/exponent_field.hpp"
#include "vexfem/kernel.hpp"
#include "vexfem/mesh.hpp"

namespace vexfem {

struct SingularJacobianError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::size_t free_node_count(const Mesh& mesh, BoundaryTag tag) {
  return tag == BoundaryTag::dirichlet_zero ? mesh.node_count() - 2
                                            : mesh.node_count();
}

inline std::size_t node_of_row(std::size_t row, BoundaryTag tag) {
  return tag == BoundaryTag::dirichlet_zero ? row + 1 : row;
}

/// Tridiagonal matrix with Thomas-algorithm solve. lower[i] multiplies
/// x[i-1], upper[i] multiplies x[i+1].
struct TriDiag {
  std::vector<double> lower, diag, upper;

  explicit TriDiag(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

  std::size_t size() const { return diag.size(); }

  std::vector<double> solve(std::vector<double> rhs) const {
    const std::size_t n = size();
    if (rhs.size() != n) throw std::invalid_argument("TriDiag::solve: size mismatch");
    std::vector<double> c(n, 0.0);
    double pivot = diag[0];
    if (std::abs(pivot) < 1e-14)
      throw SingularJacobianError("tridiagonal solve: pivot below 1e-14");
    c[0] = upper[0] / pivot;
    rhs[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
      pivot = diag[i] - lower[i] * c[i - 1];
      if (std::abs(pivot) < 1e-14)
        throw SingularJacobianError("tridiagonal solve: pivot below 1e-14");
      c[i] = upper[i] / pivot;
      rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
    return rhs;
  }
};

/// Load vector <f, phi_i> over the free nodes.
inline std::vector<double> assemble_load(const Mesh& mesh, BoundaryTag tag,
                                         const std::function<double(double)>& f,
                                         const QuadratureRule& rule) {
  std::vector<double> full(mesh.node_count(), 0.0);
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double a = mesh.node(e);
    const double h = mesh.element_width(e);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = rule.points[q];
      const double z = a + h * t;
      const double w = h * rule.weights[q];
      const double fz = f(z);
      full[e] += w * fz * (1.0 - t);
      full[e + 1] += w * fz * t;
    }
  }
  const std::size_t n = free_node_count(mesh, tag);
  std::vector<double> out(n);
  for (std::size_t r = 0; r < n; ++r) out[r] = full[node_of_row(r, tag)];
  return out;
}

namespace detail {
/// <A(u), phi_i> for all nodes: per-element quadrature of
/// a(z, u, grad u) . phi_i'.
inline std::vector<double> operator_apply_full(const MeshedFunction& u,
                                               const CaratheodoryKernel& kernel,
                                               [[maybe_unused]] const ExponentField& p,
                                               const QuadratureRule& rule) {
  const Mesh& mesh = u.mesh();
  std::vector<double> full(mesh.node_count(), 0.0);
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double a = mesh.node(e);
    const double h = mesh.element_width(e);
    const Vec1 grad{u.gradient_on_element(e)};
    double flux = 0.0;  // integral of a(z, u, grad u) over the element
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = rule.points[q];
      const double z = a + h * t;
      const double s = u.coefficient(e) + t * (u.coefficient(e + 1) - u.coefficient(e));
      flux += h * rule.weights[q] * kernel.a(z, s, grad)[0];
    }
    full[e] -= flux / h;      // phi_e'     = -1/h on the element
    full[e + 1] += flux / h;  // phi_{e+1}' = +1/h
  }
  return full;
}

/// Contributions of elements g-1 and g to rows g-1, g, g+1 of the operator
/// part; everything else is unaffected by coefficient g, so finite
/// differences of these three entries give the Jacobian column g.
inline std::array<double, 3> operator_rows_near(const MeshedFunction& u,
                                                std::size_t g,
                                                const CaratheodoryKernel& kernel,
                                                const QuadratureRule& rule) {
  const Mesh& mesh = u.mesh();
  std::array<double, 3> rows{0.0, 0.0, 0.0};  // nodes g-1, g, g+1
  const std::size_t e_first = g == 0 ? 0 : g - 1;
  const std::size_t e_last = std::min(g, mesh.element_count() - 1);
  for (std::size_t e = e_first; e <= e_last; ++e) {
    const double a = mesh.node(e);
    const double h = mesh.element_width(e);
    const Vec1 grad{u.gradient_on_element(e)};
    double flux = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = rule.points[q];
      const double z = a + h * t;
      const double s = u.coefficient(e) + t * (u.coefficient(e + 1) - u.coefficient(e));
      flux += h * rule.weights[q] * kernel.a(z, s, grad)[0];
    }
    // element e touches nodes e and e+1; map onto the local window g-1..g+1
    const std::size_t local_left = e + 1 - g;
    rows[local_left] -= flux / h;
    rows[local_left + 1] += flux / h;
  }
  return rows;
}
}  // namespace detail

/// Weak-form residual F_i = <A(u), phi_i> - <f, phi_i> over the free nodes.
inline std::vector<double> assemble_residual(const MeshedFunction& u,
                                             const CaratheodoryKernel& kernel,
                                             const ExponentField& p,
                                             const std::vector<double>& load,
                                             const QuadratureRule& rule) {
  const std::size_t n = free_node_count(u.mesh(), u.tag());
  if (load.size() != n)
    throw std::invalid_argument("assemble_residual: load length mismatch");
  const std::vector<double> full = detail::operator_apply_full(u, kernel, p, rule);
  std::vector<double> out(n);
  for (std::size_t r = 0; r < n; ++r)
    out[r] = full[node_of_row(r, u.tag())] - load[r];
  return out;
}

inline std::vector<double> assemble_residual(const MeshedFunction& u,
                                             const CaratheodoryKernel& kernel,
                                             const ExponentField& p,
                                             const std::function<double(double)>& f,
                                             const QuadratureRule& rule) {
  return assemble_residual(u, kernel, p, assemble_load(u.mesh(), u.tag(), f, rule),
                           rule);
}

/// Central finite-difference Jacobian of the operator part, exploiting the P1
/// tridiagonal coupling: column j only touches rows j-1, j, j+1 through the
/// two elements adjacent to node j. step = 0 selects the default
/// 1e-7 (1 + max|coefficients|).
inline TriDiag assemble_jacobian_fd(const MeshedFunction& u,
                                    const CaratheodoryKernel& kernel,
                                    const ExponentField& p,
                                    const QuadratureRule& rule, double step = 0.0) {
  (void)p;
  const Mesh& mesh = u.mesh();
  const BoundaryTag tag = u.tag();
  const std::size_t n = free_node_count(mesh, tag);
  TriDiag jac(n);
  if (n == 0) return jac;
  const double delta =
      step > 0.0 ? step : 1e-7 * (1.0 + u.max_abs_coefficient());
  MeshedFunction work = u;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t g = node_of_row(j, tag);
    const double saved = work.coefficient(g);
    work.set_coefficient(g, saved + delta);
    const std::array<double, 3> plus = detail::operator_rows_near(work, g, kernel, rule);
    work.set_coefficient(g, saved - delta);
    const std::array<double, 3> minus = detail::operator_rows_near(work, g, kernel, rule);
    work.set_coefficient(g, saved);
    for (int k = 0; k < 3; ++k) {
      if (g == 0 && k == 0) continue;
      const std::size_t node = g - 1 + std::size_t(k);
      if (node >= mesh.node_count()) continue;
      if (tag == BoundaryTag::dirichlet_zero &&
          (node == 0 || node == mesh.node_count() - 1))
        continue;
      const std::size_t row =
          tag == BoundaryTag::dirichlet_zero ? node - 1 : node;
      const double d = (plus[k] - minus[k]) / (2.0 * delta);
      if (row + 1 == j)
        jac.upper[row] = d;
      else if (row == j)
        jac.diag[row] = d;
      else if (row == j + 1)
        jac.lower[row] = d;
    }
  }
  return jac;
}

/// <A(uA), v> = integral of a(z, uA, grad uA) . grad v.
inline double pairing(const MeshedFunction& uA, const MeshedFunction& v,
                      const CaratheodoryKernel& kernel, const ExponentField& p,
                      const QuadratureRule& rule) {
  (void)p;
  if (!(uA.mesh() == v.mesh()))
    throw MeshMismatchError("pairing: same mesh required (prolong first)");
  const Mesh& mesh = uA.mesh();
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double a = mesh.node(e);
    const double h = mesh.element_width(e);
    const Vec1 grad{uA.gradient_on_element(e)};
    const Vec1 grad_v{v.gradient_on_element(e)};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = rule.points[q];
      const double z = a + h * t;
      const double s = uA.coefficient(e) + t * (uA.coefficient(e + 1) - uA.coefficient(e));
      sum += h * rule.weights[q] * dot(kernel.a(z, s, grad), grad_v);
    }
  }
  return sum;
}

/// Same pairing against an arbitrary gradient field (used for differences
/// against closed-form references).
inline double pairing_vs_gradient(const MeshedFunction& uA,
                                  const std::function<double(double)>& grad_v,
                                  const CaratheodoryKernel& kernel,
                                  const ExponentField& p,
                                  const QuadratureRule& rule) {
  (void)p;
  const Mesh& mesh = uA.mesh();
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const double a = mesh.node(e);
    const double h = mesh.element_width(e);
    const Vec1 grad{uA.gradient_on_element(e)};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = rule.points[q];
      const double z = a + h * t;
      const double s = uA.coefficient(e) + t * (uA.coefficient(e + 1) - uA.coefficient(e));
      sum += h * rule.weights[q] * kernel.a(z, s, grad)[0] * grad_v(z);
    }
  }
  return sum;
}

}  // namespace vexfem
