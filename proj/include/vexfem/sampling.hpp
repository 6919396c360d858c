#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "vexfem/exponent_field.hpp"

namespace vexfem {

/// Seeded generator with platform-independent uniform draws (the raw 53-bit
/// mantissa path, not distribution objects), so a seed fixes every sample
/// byte-for-byte.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform01() { return double(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double uniform_in(const Domain& dom) { return uniform(dom.left, dom.right); }

  int uniform_int(int lo, int hi) {
    return lo + int(double(hi - lo + 1) * uniform01());
  }

  /// Log-uniform magnitude in [lo_mag, hi_mag] with a random sign, mixed with
  /// exact zeros at the given probability; growth violations live at the
  /// extremes and at zero.
  double signed_log_uniform(double lo_mag, double hi_mag, double zero_probability) {
    if (uniform01() < zero_probability) return 0.0;
    const double mag =
        std::pow(10.0, uniform(std::log10(lo_mag), std::log10(hi_mag)));
    return uniform01() < 0.5 ? mag : -mag;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace vexfem
