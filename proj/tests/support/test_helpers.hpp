#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "vexfem/assembly.hpp"
#include "vexfem/kernel.hpp"
#include "vexfem/mesh.hpp"
#include "vexfem/sampling.hpp"

namespace vexfem::testing {

/// Random P1 function with coefficients uniform in [-1, 1].
inline MeshedFunction random_p1(Rng& rng, const Mesh& mesh,
                                BoundaryTag tag = BoundaryTag::free) {
  std::vector<double> c(mesh.node_count());
  for (double& v : c) v = rng.uniform(-1.0, 1.0);
  if (tag == BoundaryTag::dirichlet_zero) {
    c.front() = 0.0;
    c.back() = 0.0;
  }
  return MeshedFunction(mesh, std::move(c), tag);
}

/// Interpolant of a random low-order polynomial plus a low-frequency sine;
/// gradients stay O(1) so kernel magnitudes cannot drown the theta identity
/// tolerances in round-off.
inline MeshedFunction random_smooth(Rng& rng, const Mesh& mesh,
                                    BoundaryTag tag = BoundaryTag::free) {
  const double a0 = rng.uniform(-1.0, 1.0);
  const double a1 = rng.uniform(-1.0, 1.0);
  const double a2 = rng.uniform(-1.0, 1.0);
  const double amp = rng.uniform(-0.5, 0.5);
  const int freq = rng.uniform_int(1, 3);
  const double pi = 3.14159265358979323846;
  return interpolate(
      [=](double z) {
        return a0 + a1 * z + a2 * z * z + amp * std::sin(freq * pi * z);
      },
      mesh, tag);
}

/// Brute-force dense FD Jacobian: full residual reassembly per perturbed
/// column, no tridiagonal shortcut. Independent oracle for
/// assemble_jacobian_fd.
inline std::vector<std::vector<double>> dense_fd_jacobian(
    const MeshedFunction& u, const CaratheodoryKernel& kernel,
    const ExponentField& p, const std::function<double(double)>& f,
    const QuadratureRule& rule, double step) {
  const std::size_t n = free_node_count(u.mesh(), u.tag());
  std::vector<std::vector<double>> jac(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t g = node_of_row(j, u.tag());
    MeshedFunction plus = u, minus = u;
    plus.set_coefficient(g, u.coefficient(g) + step);
    minus.set_coefficient(g, u.coefficient(g) - step);
    const std::vector<double> fp = assemble_residual(plus, kernel, p, f, rule);
    const std::vector<double> fm = assemble_residual(minus, kernel, p, f, rule);
    for (std::size_t i = 0; i < n; ++i) jac[i][j] = (fp[i] - fm[i]) / (2.0 * step);
  }
  return jac;
}

/// Gaussian elimination with partial pivoting; oracle for the Thomas solve.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double sum = b[i];
    for (std::size_t c = i + 1; c < n; ++c) sum -= a[i][c] * x[c];
    x[i] = sum / a[i][i];
  }
  return x;
}

}  // namespace vexfem::testing
