#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vexfem/exponent_field.hpp"
#include "vexfem/sampling.hpp"

namespace vexfem {

/// Gradient-valued quantities keep the N-dimensional contract visible even
/// though this artifact discretizes N = 1.
using Vec1 = std::array<double, 1>;

inline double dot(const Vec1& a, const Vec1& b) { return a[0] * b[0]; }
inline double norm(const Vec1& a) { return std::abs(a[0]); }

struct KernelValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Caratheodory map a(z, s, xi) together with its declared growth and
/// coercivity data. The declarations are the kernel author's claims; the
/// check_A* samplers can only falsify them, never prove them.
struct CaratheodoryKernel {
  std::string label;
  std::function<Vec1(double z, double s, const Vec1& xi)> a;

  // Growth bound: |a(z,s,xi)| <= |k0(z)| + c0 (|s|^{r1(z)} + |xi|^{p(z)-1}).
  double c0 = 1.0;
  std::function<double(double)> k0;
  ExponentField r1;

  // Coercivity: a(z,s,xi).xi >= c1 |xi|^{p(z)} - c2 |s|^{r2(z)} - |k1(z)|.
  double c1 = 1.0;
  double c2 = 1.0;
  ExponentField r2;
  std::function<double(double)> k1;
};

/// Registration check: the declared lower-order exponents must sit strictly
/// under the Sobolev-conjugate bounds (r1 < p*/q, r2 < p*).
inline void validate_kernel_growth(const CaratheodoryKernel& kernel,
                                   const ExponentField& p, int dim = 1) {
  const ExtendedExponentField p_star = sobolev_conjugate(p, dim);
  const BoundCheck r1_check = strict_bound_check(kernel.r1, divide(p_star, conjugate(p)));
  if (!r1_check.holds) {
    std::ostringstream msg;
    msg << "kernel '" << kernel.label << "': declared r1 violates r1 < p*/q";
    if (r1_check.witness) msg << " at z = " << *r1_check.witness;
    throw KernelValidationError(msg.str());
  }
  const BoundCheck r2_check = strict_bound_check(kernel.r2, p_star);
  if (!r2_check.holds) {
    std::ostringstream msg;
    msg << "kernel '" << kernel.label << "': declared r2 violates r2 < p*";
    if (r2_check.witness) msg << " at z = " << *r2_check.witness;
    throw KernelValidationError(msg.str());
  }
}

struct KernelViolation {
  double z = 0.0;
  double s = 0.0;
  double xi = 0.0;
  std::optional<double> xi_prime;  // only for A2
  double slack = 0.0;
};

struct KernelCheckReport {
  std::string condition;
  int samples = 0;
  std::vector<KernelViolation> violations;
  bool pass() const { return violations.empty(); }
};

namespace detail {
inline constexpr double kGrowthSlackTolerance = 1e-9;
inline constexpr double kMonotoneScale = 1e-12;
inline constexpr double kZeroProbability = 1.0 / 16.0;

inline double sample_argument(Rng& rng) {
  return rng.signed_log_uniform(1e-3, 1e3, kZeroProbability);
}
}  // namespace detail

/// Samples the growth inequality A1 at random (z, s, xi); slack = rhs - lhs.
inline KernelCheckReport check_A1(const CaratheodoryKernel& kernel,
                                  const ExponentField& p, Rng& rng, int n) {
  if (n < 1) throw std::invalid_argument("check_A1: n >= 1 required");
  KernelCheckReport rep;
  rep.condition = "A1";
  rep.samples = n;
  const Domain& dom = p.domain();
  for (int i = 0; i < n; ++i) {
    const double z = rng.uniform_in(dom);
    const double s = detail::sample_argument(rng);
    const double xi = detail::sample_argument(rng);
    const double lhs = norm(kernel.a(z, s, Vec1{xi}));
    const double rhs = std::abs(kernel.k0(z)) +
                       kernel.c0 * (std::pow(std::abs(s), kernel.r1(z)) +
                                    std::pow(std::abs(xi), p(z) - 1.0));
    const double slack = rhs - lhs;
    if (slack < -detail::kGrowthSlackTolerance)
      rep.violations.push_back({z, s, xi, std::nullopt, slack});
  }
  return rep;
}

/// Samples strict monotonicity in xi at frozen (z, s); a violation is a
/// product at or below the round-off floor 1e-12 |xi - xi'|^2.
inline KernelCheckReport check_A2(const CaratheodoryKernel& kernel, Rng& rng,
                                  int n) {
  if (n < 1) throw std::invalid_argument("check_A2: n >= 1 required");
  KernelCheckReport rep;
  rep.condition = "A2";
  rep.samples = n;
  const Domain& dom = kernel.r1.domain();
  for (int i = 0; i < n; ++i) {
    const double z = rng.uniform_in(dom);
    const double s = detail::sample_argument(rng);
    const double xi = detail::sample_argument(rng);
    double xi_prime = detail::sample_argument(rng);
    int guard = 0;
    while (std::abs(xi - xi_prime) < 1e-8 && guard++ < 100)
      xi_prime = detail::sample_argument(rng);
    if (std::abs(xi - xi_prime) < 1e-8) continue;
    const Vec1 d{xi - xi_prime};
    const double product =
        dot(Vec1{kernel.a(z, s, Vec1{xi})[0] - kernel.a(z, s, Vec1{xi_prime})[0]}, d);
    if (product <= detail::kMonotoneScale * dot(d, d))
      rep.violations.push_back({z, s, xi, xi_prime, product});
  }
  return rep;
}

/// Samples the coercivity bound A3; slack = lhs - rhs.
inline KernelCheckReport check_A3(const CaratheodoryKernel& kernel,
                                  const ExponentField& p, Rng& rng, int n) {
  if (n < 1) throw std::invalid_argument("check_A3: n >= 1 required");
  KernelCheckReport rep;
  rep.condition = "A3";
  rep.samples = n;
  const Domain& dom = p.domain();
  for (int i = 0; i < n; ++i) {
    const double z = rng.uniform_in(dom);
    const double s = detail::sample_argument(rng);
    const double xi = detail::sample_argument(rng);
    const double lhs = dot(kernel.a(z, s, Vec1{xi}), Vec1{xi});
    const double rhs = kernel.c1 * std::pow(std::abs(xi), p(z)) -
                       kernel.c2 * std::pow(std::abs(s), kernel.r2(z)) -
                       std::abs(kernel.k1(z));
    const double slack = lhs - rhs;
    if (slack < -detail::kGrowthSlackTolerance)
      rep.violations.push_back({z, s, xi, std::nullopt, slack});
  }
  return rep;
}

namespace detail {
inline double power_law(double exponent_minus_two, double x) {
  const double m = std::abs(x);
  return m == 0.0 ? 0.0 : std::pow(m, exponent_minus_two) * x;
}

inline std::function<double(double)> zero_density() {
  return [](double) { return 0.0; };
}
}  // namespace detail

/// |xi|^{p-2} xi with a constant exponent.
inline CaratheodoryKernel make_p_laplacian(const Domain& dom, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("make_p_laplacian: p > 1 required");
  return CaratheodoryKernel{
      "p-laplacian",
      [p](double, double, const Vec1& xi) {
        return Vec1{detail::power_law(p - 2.0, xi[0])};
      },
      1.0,
      detail::zero_density(),
      ExponentField::constant(dom, 1.0),
      1.0,
      1.0,
      ExponentField::constant(dom, 1.0),
      detail::zero_density()};
}

/// |xi|^{p(z)-2} xi with the variable exponent of the space.
inline CaratheodoryKernel make_pz_laplacian(const ExponentField& p) {
  return CaratheodoryKernel{
      "pz-laplacian",
      [p](double z, double, const Vec1& xi) {
        return Vec1{detail::power_law(p(z) - 2.0, xi[0])};
      },
      1.0,
      detail::zero_density(),
      ExponentField::constant(p.domain(), 1.0),
      1.0,
      1.0,
      ExponentField::constant(p.domain(), 1.0),
      detail::zero_density()};
}

/// (1 + 1/(1+s^2)) |xi|^{p(z)-2} xi: a genuinely s-dependent kernel; the
/// positive prefactor lies in (1, 2], so c0 = 2 and c1 = 1.
inline CaratheodoryKernel make_perturbed_pz_laplacian(const ExponentField& p) {
  return CaratheodoryKernel{
      "perturbed-pz-laplacian",
      [p](double z, double s, const Vec1& xi) {
        const double factor = 1.0 + 1.0 / (1.0 + s * s);
        return Vec1{factor * detail::power_law(p(z) - 2.0, xi[0])};
      },
      2.0,
      detail::zero_density(),
      ExponentField::constant(p.domain(), 1.0),
      1.0,
      1.0,
      ExponentField::constant(p.domain(), 1.0),
      detail::zero_density()};
}

/// a = xi^3 declared against p = 2 growth; violates A1 at large |xi|.
inline CaratheodoryKernel make_cubic_kernel(const Domain& dom) {
  return CaratheodoryKernel{
      "cubic",
      [](double, double, const Vec1& xi) { return Vec1{xi[0] * xi[0] * xi[0]}; },
      1.0,
      detail::zero_density(),
      ExponentField::constant(dom, 1.0),
      1.0,
      1.0,
      ExponentField::constant(dom, 1.0),
      detail::zero_density()};
}

/// a = -xi; violates the strict monotonicity A2.
inline CaratheodoryKernel make_negated_gradient_kernel(const Domain& dom) {
  return CaratheodoryKernel{
      "negated-gradient",
      [](double, double, const Vec1& xi) { return Vec1{-xi[0]}; },
      1.0,
      detail::zero_density(),
      ExponentField::constant(dom, 1.0),
      1.0,
      1.0,
      ExponentField::constant(dom, 1.0),
      detail::zero_density()};
}

/// a = 0 declared with c1 = 1; violates the coercivity A3.
inline CaratheodoryKernel make_zero_kernel(const Domain& dom) {
  return CaratheodoryKernel{
      "zero",
      [](double, double, const Vec1&) { return Vec1{0.0}; },
      1.0,
      detail::zero_density(),
      ExponentField::constant(dom, 1.0),
      1.0,
      1.0,
      ExponentField::constant(dom, 1.0),
      detail::zero_density()};
}

}  // namespace vexfem
