#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "support/test_helpers.hpp"
#include "vexfem/splus.hpp"

using namespace vexfem;
using vexfem::testing::random_smooth;

namespace {
const Domain unit(0.0, 1.0);
const QuadratureRule rule5 = gauss_legendre(5);
const double pi = 3.14159265358979323846;

GalerkinProblem poisson_problem(int levels) {
  return GalerkinProblem{unit,
                         ExponentField::constant(unit, 2.0),
                         make_p_laplacian(unit, 2.0),
                         [](double) { return 2.0; },
                         "constant-2",
                         levels,
                         std::nullopt,
                         SolverSettings{},
                         rule5,
                         1e-4};
}
}  // namespace

TEST_CASE("theta decomposition vanishes on identical arguments") {
  const Mesh mesh = Mesh::at_level(unit, 4);
  const auto p = ExponentField::affine(unit, 2.0, 1.0);
  const auto kernel = make_perturbed_pz_laplacian(p);
  Rng rng(5);
  const auto u = random_smooth(rng, mesh);
  const ThetaDecomposition theta = theta_decomposition(u, u, kernel, p, rule5);
  CHECK(theta.theta1 == 0.0);
  CHECK(theta.theta2 == 0.0);
}

TEST_CASE("theta2 vanishes identically for s-independent kernels") {
  const Mesh mesh = Mesh::at_level(unit, 4);
  const auto p = ExponentField::affine(unit, 2.0, 1.0);
  const auto kernel = make_pz_laplacian(p);
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u_n = random_smooth(rng, mesh);
    const auto u = random_smooth(rng, mesh);
    const ThetaDecomposition theta = theta_decomposition(u_n, u, kernel, p, rule5);
    REQUIRE(theta.theta2 == 0.0);
  }
}

TEST_CASE("theta identity reconstructs the pairing difference") {
  const Mesh mesh = Mesh::at_level(unit, 5);
  const auto paffine = ExponentField::affine(unit, 2.0, 1.0);
  const auto p3 = ExponentField::constant(unit, 3.0);
  struct Case {
    CaratheodoryKernel kernel;
    const ExponentField* p;
  };
  const Case cases[] = {{make_p_laplacian(unit, 3.0), &p3},
                        {make_pz_laplacian(paffine), &paffine},
                        {make_perturbed_pz_laplacian(paffine), &paffine}};
  Rng rng(7);
  for (const auto& c : cases) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto u_n = random_smooth(rng, mesh);
      const auto u = random_smooth(rng, mesh);
      const auto d = difference(u_n, u);
      const ThetaDecomposition theta =
          theta_decomposition(u_n, u, c.kernel, *c.p, rule5);
      REQUIRE(theta.theta1 >= -1e-9);
      const double lhs = pairing(u_n, d, c.kernel, *c.p, rule5) -
                         pairing(u, d, c.kernel, *c.p, rule5);
      REQUIRE(std::abs(lhs - (theta.theta1 + theta.theta2)) <= 1e-9);
    }
  }
}

TEST_CASE("oscillation probe violates the limsup hypothesis quantitatively") {
  const Mesh mesh = Mesh::at_level(unit, 8);
  const auto p2 = ExponentField::constant(unit, 2.0);
  const auto lap = make_p_laplacian(unit, 2.0);
  const SPlusProbeReport report =
      run_oscillation_probe({4, 8, 16, 32}, lap, p2, mesh, rule5);
  REQUIRE(report.rows.size() == 4);
  for (const auto& row : report.rows) {
    const double n = row.index;
    // pairing = integral of cos^2(n pi z) = 1/2 up to interpolation loss
    REQUIRE(row.pairing == Catch::Approx(0.5).margin(0.01));
    // L2 norm of u_n is 1/(n pi sqrt 2); gradient norm stays at sqrt(1/2)
    REQUIRE(row.lp_error ==
            Catch::Approx(1.0 / (n * pi * std::sqrt(2.0))).epsilon(0.10));
    REQUIRE(row.grad_lp_error ==
            Catch::Approx(std::sqrt(0.5)).epsilon(0.01));
  }
  CHECK_FALSE(report.limsup_ok);
  CHECK(report.verdict == ProbeVerdict::hypothesis_violated);
  // gradient error does not decay: no strong convergence in sight
  CHECK(report.rows.back().grad_lp_error > 0.1);
}

TEST_CASE("oscillation frequencies above elements/4 alias and are rejected") {
  const Mesh mesh = Mesh::at_level(unit, 6);  // 64 elements
  CHECK_THROWS_AS(build_oscillation_sequence({17}, mesh), AliasingError);
  CHECK_NOTHROW(build_oscillation_sequence({16}, mesh));
}

TEST_CASE("galerkin sequence probe is consistent with the S+ property") {
  const SPlusProbeReport report = run_galerkin_probe(poisson_problem(5));
  REQUIRE(report.rows.size() == 6);
  CHECK(report.limsup_ok);
  CHECK(report.strong_ok);
  CHECK(report.verdict == ProbeVerdict::consistent);
  // weak surrogate values decrease along the sequence
  for (std::size_t i = 1; i + 1 < report.rows.size(); ++i) {
    double w0 = 0.0, w1 = 0.0;
    for (std::size_t j = 0; j < kWeakFunctionalCount; ++j) {
      w0 = std::max(w0, std::abs(report.rows[i].weak[j]));
      w1 = std::max(w1, std::abs(report.rows[i + 1].weak[j]));
    }
    REQUIRE(w1 < w0 + 1e-15);
  }
}

TEST_CASE("constant sequence is consistent") {
  const Mesh mesh = Mesh::at_level(unit, 4);
  const auto p2 = ExponentField::constant(unit, 2.0);
  const auto lap = make_p_laplacian(unit, 2.0);
  const auto u = interpolate([](double z) { return z * (1.0 - z); }, mesh,
                             BoundaryTag::dirichlet_zero);
  const std::vector<MeshedFunction> members = {u, u, u};
  const SPlusProbeReport report =
      run_probe(members, {1.0, 2.0, 3.0}, u, lap, p2, rule5);
  for (const auto& row : report.rows) {
    CHECK(row.pairing == 0.0);
    CHECK(row.lp_error == 0.0);
    CHECK(row.grad_lp_error == 0.0);
  }
  CHECK(report.verdict == ProbeVerdict::consistent);
}

TEST_CASE("uniform integrability profile") {
  const Mesh mesh = Mesh::at_level(unit, 8);
  const auto p2 = ExponentField::constant(unit, 2.0);
  const std::vector<double> windows = {0.25, 0.125, 0.0625};

  // zero sequence: all zeros
  const std::vector<MeshedFunction> zeros = {
      MeshedFunction::zero(mesh, BoundaryTag::dirichlet_zero)};
  const auto zp = uniform_integrability_profile(zeros, p2, windows, rule5);
  for (double v : zp.suprema) CHECK(v == 0.0);

  // oscillation sequence: cos^2 averages to 1/2, so the profile sits near
  // delta/2 with an O(1/n) boundary term from the slowest member
  const ProbeSequence seq = build_oscillation_sequence({4, 8, 16, 32}, mesh);
  const auto op = uniform_integrability_profile(seq.members, p2, windows, rule5);
  for (std::size_t i = 0; i < windows.size(); ++i)
    REQUIRE(op.suprema[i] == Catch::Approx(windows[i] / 2.0).margin(0.05));
  for (std::size_t i = 0; i + 1 < op.suprema.size(); ++i)
    REQUIRE(op.suprema[i + 1] < op.suprema[i]);

  // galerkin sequence of the poisson study: gradients bounded by max|u'| = 1
  const ProbeSequence gal = build_galerkin_sequence(poisson_problem(4));
  const auto gp = uniform_integrability_profile(gal.members, p2, windows, rule5);
  for (std::size_t i = 0; i < windows.size(); ++i)
    REQUIRE(gp.suprema[i] <= windows[i] * 1.0 + 1e-9);
  for (std::size_t i = 0; i + 1 < gp.suprema.size(); ++i)
    REQUIRE(gp.suprema[i + 1] < gp.suprema[i]);

  CHECK_THROWS_AS(uniform_integrability_profile(zeros, p2, {2.0}, rule5),
                  std::invalid_argument);
}

TEST_CASE("probe rejects mismatched sequences") {
  const Mesh mesh = Mesh::at_level(unit, 4);
  const auto p2 = ExponentField::constant(unit, 2.0);
  const auto lap = make_p_laplacian(unit, 2.0);
  const auto u = MeshedFunction::zero(mesh, BoundaryTag::dirichlet_zero);
  CHECK_THROWS_AS(run_probe({}, {}, u, lap, p2, rule5), std::invalid_argument);
  const auto other = MeshedFunction::zero(Mesh::at_level(unit, 5), BoundaryTag::dirichlet_zero);
  CHECK_THROWS_AS(run_probe({other}, {1.0}, u, lap, p2, rule5), MeshMismatchError);
}
