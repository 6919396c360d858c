#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "vexfem/kernel.hpp"
#include "vexfem/sampling.hpp"

using namespace vexfem;

namespace {
const Domain unit(0.0, 1.0);
const ExponentField p2 = ExponentField::constant(unit, 2.0);
const ExponentField paffine = ExponentField::affine(unit, 2.0, 1.0);
}

TEST_CASE("registration accepts the built-in kernels") {
  CHECK_NOTHROW(validate_kernel_growth(make_p_laplacian(unit, 2.0), p2));
  CHECK_NOTHROW(validate_kernel_growth(make_p_laplacian(unit, 4.0),
                                       ExponentField::constant(unit, 4.0)));
  CHECK_NOTHROW(validate_kernel_growth(make_pz_laplacian(paffine), paffine));
  CHECK_NOTHROW(
      validate_kernel_growth(make_perturbed_pz_laplacian(paffine), paffine));
}

TEST_CASE("registration rejects over-declared growth exponents in dim 3") {
  // with p = 2 and dim = 3: p* = 6, q = 2, so r1 < 3 and r2 < 6
  CaratheodoryKernel k = make_p_laplacian(unit, 2.0);
  k.r1 = ExponentField::constant(unit, 4.0);
  CHECK_THROWS_AS(validate_kernel_growth(k, p2, 3), KernelValidationError);
  k.r1 = ExponentField::constant(unit, 1.0);
  k.r2 = ExponentField::constant(unit, 7.0);
  CHECK_THROWS_AS(validate_kernel_growth(k, p2, 3), KernelValidationError);
  k.r2 = ExponentField::constant(unit, 1.0);
  CHECK_NOTHROW(validate_kernel_growth(k, p2, 3));
}

TEST_CASE("A1 growth check") {
  Rng rng(1);
  // |xi| <= |s| + |xi| termwise
  const auto lap = make_p_laplacian(unit, 2.0);
  CHECK(check_A1(lap, p2, rng, 2000).pass());

  // xi^3 outgrows the declared p = 2 budget
  const auto cubic = make_cubic_kernel(unit);
  const KernelCheckReport bad = check_A1(cubic, p2, rng, 2000);
  CHECK_FALSE(bad.pass());
  CHECK(bad.condition == "A1");
  for (const auto& v : bad.violations) REQUIRE(v.slack < -1e-9);

  const auto pz = make_pz_laplacian(paffine);
  CHECK(check_A1(pz, paffine, rng, 10000).pass());
}

TEST_CASE("A2 monotonicity check") {
  Rng rng(2);
  const auto four = make_p_laplacian(unit, 4.0);
  CHECK(check_A2(four, rng, 2000).pass());

  const auto neg = make_negated_gradient_kernel(unit);
  const KernelCheckReport bad = check_A2(neg, rng, 2000);
  CHECK_FALSE(bad.pass());
  for (const auto& v : bad.violations) REQUIRE(v.xi_prime.has_value());

  const auto perturbed = make_perturbed_pz_laplacian(paffine);
  CHECK(check_A2(perturbed, rng, 10000).pass());
}

TEST_CASE("A3 coercivity check") {
  Rng rng(3);
  // a . xi = |xi|^p exactly: equality passes
  const auto lap = make_p_laplacian(unit, 2.0);
  CHECK(check_A3(lap, p2, rng, 2000).pass());

  const auto zero = make_zero_kernel(unit);
  const KernelCheckReport bad = check_A3(zero, p2, rng, 2000);
  CHECK_FALSE(bad.pass());

  // prefactor >= 1 keeps c1 = 1 valid
  const auto perturbed = make_perturbed_pz_laplacian(paffine);
  CHECK(check_A3(perturbed, paffine, rng, 10000).pass());
}

TEST_CASE("all built-in kernels pass every condition") {
  Rng rng(4);
  const CaratheodoryKernel kernels[] = {make_p_laplacian(unit, 3.0),
                                        make_pz_laplacian(paffine),
                                        make_perturbed_pz_laplacian(paffine)};
  const ExponentField* fields[] = {nullptr, &paffine, &paffine};
  const ExponentField p3 = ExponentField::constant(unit, 3.0);
  for (int i = 0; i < 3; ++i) {
    const ExponentField& p = fields[i] ? *fields[i] : p3;
    CHECK(check_A1(kernels[i], p, rng, 10000).pass());
    CHECK(check_A2(kernels[i], rng, 10000).pass());
    CHECK(check_A3(kernels[i], p, rng, 10000).pass());
  }
}

TEST_CASE("checkers validate their sample count") {
  Rng rng(5);
  const auto lap = make_p_laplacian(unit, 2.0);
  CHECK_THROWS_AS(check_A1(lap, p2, rng, 0), std::invalid_argument);
  CHECK_THROWS_AS(check_A2(lap, rng, -1), std::invalid_argument);
  CHECK_THROWS_AS(check_A3(lap, p2, rng, 0), std::invalid_argument);
}
