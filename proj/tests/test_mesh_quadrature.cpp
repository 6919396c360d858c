#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "vexfem/mesh.hpp"
#include "vexfem/modular.hpp"
#include "vexfem/sampling.hpp"

using namespace vexfem;

namespace {
const Domain unit(0.0, 1.0);
}

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
  for (int n = 2; n <= 10; ++n) {
    const QuadratureRule rule = gauss_legendre(n);
    double weight_sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      CHECK(rule.weights[q] > 0.0);
      CHECK(rule.points[q] > 0.0);
      CHECK(rule.points[q] < 1.0);
      weight_sum += rule.weights[q];
    }
    CHECK(weight_sum == Catch::Approx(1.0).margin(1e-14));
    // exact through degree 2n - 1: integral of x^k over [0,1] is 1/(k+1)
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double integral = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q)
        integral += rule.weights[q] * std::pow(rule.points[q], k);
      REQUIRE(integral == Catch::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(gauss_legendre(1), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(11), std::invalid_argument);
}

TEST_CASE("refinement bisects every element") {
  const Mesh base = Mesh::initial(unit);
  CHECK(base.nodes() == std::vector<double>{0.0, 1.0});

  const Mesh once = base.refine();
  CHECK(once.nodes() == std::vector<double>{0.0, 0.5, 1.0});

  const Mesh twice = once.refine();
  CHECK(twice.nodes() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});

  for (int k = 0; k <= 8; ++k) {
    const Mesh m = Mesh::at_level(unit, k);
    CHECK(m.element_count() == std::size_t(1) << k);
    CHECK(m.level() == k);
  }

  // parent nodes are a subset of child nodes
  const Mesh parent = Mesh::at_level(unit, 4);
  const Mesh child = parent.refine();
  for (std::size_t i = 0; i < parent.node_count(); ++i)
    CHECK(child.node(2 * i) == parent.node(i));
}

TEST_CASE("interpolate takes nodal values") {
  const Mesh mesh = Mesh::at_level(unit, 1);
  const auto u = interpolate([](double z) { return z * (1.0 - z); }, mesh,
                             BoundaryTag::dirichlet_zero);
  CHECK(u.coefficients() == std::vector<double>{0.0, 0.25, 0.0});

  const auto ones = interpolate([](double) { return 1.0; }, mesh, BoundaryTag::free);
  CHECK(ones.coefficients() == std::vector<double>{1.0, 1.0, 1.0});

  const double pi = 3.14159265358979323846;
  const auto s = interpolate([pi](double z) { return std::sin(pi * z); }, mesh,
                             BoundaryTag::dirichlet_zero);
  CHECK(s.coefficient(0) == 0.0);
  CHECK(s.coefficient(1) == Catch::Approx(1.0));
  CHECK(s.coefficient(2) == 0.0);
}

TEST_CASE("dirichlet tag requires zero endpoints") {
  const Mesh mesh = Mesh::at_level(unit, 1);
  CHECK_THROWS_AS(MeshedFunction(mesh, {0.1, 0.5, 0.0}, BoundaryTag::dirichlet_zero),
                  std::invalid_argument);
  CHECK_NOTHROW(MeshedFunction(mesh, {0.1, 0.5, 0.0}, BoundaryTag::free));
}

TEST_CASE("gradient of a linear interpolant is the slope on every element") {
  const Mesh mesh = Mesh::at_level(unit, 3);
  const auto u = interpolate([](double z) { return 3.0 * z - 1.0; }, mesh,
                             BoundaryTag::free);
  for (std::size_t e = 0; e < mesh.element_count(); ++e)
    CHECK(u.gradient_on_element(e) == Catch::Approx(3.0).margin(1e-13));
}

TEST_CASE("prolong embeds exactly") {
  const Mesh coarse = Mesh::at_level(unit, 1);
  const Mesh fine = coarse.refine();
  const MeshedFunction u(coarse, {0.0, 0.25, 0.0}, BoundaryTag::dirichlet_zero);
  const MeshedFunction up = prolong(u, fine);
  CHECK(up.coefficients() ==
        std::vector<double>{0.0, 0.125, 0.25, 0.125, 0.0});

  const auto c = interpolate([](double) { return 0.7; }, coarse, BoundaryTag::free);
  const auto cp = prolong(c, Mesh::at_level(unit, 5));
  for (double v : cp.coefficients()) CHECK(v == 0.7);

  // pointwise preservation
  Rng rng(7);
  const Mesh from = Mesh::at_level(unit, 3);
  const Mesh to = Mesh::at_level(unit, 7);
  std::vector<double> coeffs(from.node_count());
  for (double& v : coeffs) v = rng.uniform(-2.0, 2.0);
  const MeshedFunction w(from, coeffs, BoundaryTag::free);
  const MeshedFunction wp = prolong(w, to);
  for (int i = 0; i <= 1000; ++i) {
    const double z = i / 1000.0;
    REQUIRE(std::abs(wp.value(z) - w.value(z)) <= 1e-13);
  }

  const Mesh other(Mesh::at_level(Domain(0.0, 2.0), 4));
  CHECK_THROWS_AS(prolong(u, other), MeshMismatchError);
  CHECK_THROWS_AS(prolong(up, coarse), MeshMismatchError);
}

TEST_CASE("modular and luxemburg norm are invariant under prolongation") {
  const QuadratureRule rule = gauss_legendre(5);
  const auto p = ExponentField::affine(unit, 2.0, 1.0);
  const Mesh coarse = Mesh::at_level(unit, 3);
  const Mesh fine = Mesh::at_level(unit, 6);
  // positive and endpoint-vanishing samples keep the integrand kink-free
  // inside elements, where the quadrature comparison is meaningful
  const auto u1 = interpolate([](double z) { return 0.5 + z * (1.0 - z); }, coarse,
                              BoundaryTag::free);
  const double pi = 3.14159265358979323846;
  const auto u2 = interpolate([pi](double z) { return std::sin(pi * z); }, coarse,
                              BoundaryTag::dirichlet_zero);
  for (const auto& u : {u1, u2}) {
    const MeshedFunction up = prolong(u, fine);
    CHECK(std::abs(modular(u, p, rule) - modular(up, p, rule)) <= 1e-12);
    CHECK(std::abs(luxemburg_norm(u, p, rule).value -
                   luxemburg_norm(up, p, rule).value) <= 1e-12);
  }
}
