#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vexfem {

/// Open interval (left, right) carrying the Lebesgue measure.
struct Domain {
  double left;
  double right;

  Domain(double l, double r) : left(l), right(r) {
    if (!(l < r) || !std::isfinite(l) || !std::isfinite(r))
      throw std::invalid_argument("Domain: requires finite left < right");
  }

  double measure() const { return right - left; }
  bool contains(double z) const { return z >= left && z <= right; }
};

inline bool operator==(const Domain& a, const Domain& b) {
  return a.left == b.left && a.right == b.right;
}

/// Extended real admitting +infinity as a tagged value (never a float sentinel).
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr ExtReal(double v) : value_(v) {}

  static constexpr ExtReal infinity() {
    ExtReal e;
    e.infinite_ = true;
    return e;
  }

  bool is_infinite() const { return infinite_; }

  double finite_value() const {
    if (infinite_) throw std::logic_error("ExtReal: finite_value() on +inf");
    return value_;
  }

  friend bool operator<(const ExtReal& a, const ExtReal& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator>(const ExtReal& a, const ExtReal& b) { return b < a; }
  friend bool operator<=(const ExtReal& a, const ExtReal& b) { return !(b < a); }
  friend bool operator>=(const ExtReal& a, const ExtReal& b) { return !(a < b); }
  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

enum class ExponentKind { constant, affine, tabulated, derived };

/// A continuous variable exponent p on the closure of a Domain with cached
/// essential bounds p_minus, p_plus. Declared kinds are constant, affine and
/// tabulated-on-grid; algebraic results (conjugates) use the derived kind.
class ExponentField {
 public:
  static ExponentField constant(const Domain& dom, double p) {
    check_bounds(p, p);
    return ExponentField(dom, [p](double) { return p; }, p, p,
                         ExponentKind::constant);
  }

  /// p(z) = intercept + slope * z; bounds are attained at the endpoints.
  static ExponentField affine(const Domain& dom, double intercept, double slope) {
    const double a = intercept + slope * dom.left;
    const double b = intercept + slope * dom.right;
    check_bounds(std::min(a, b), std::max(a, b));
    return ExponentField(
        dom, [intercept, slope](double z) { return intercept + slope * z; },
        std::min(a, b), std::max(a, b), ExponentKind::affine);
  }

  /// Piecewise-linear interpolation of values on a strictly increasing grid
  /// spanning the domain; extrema sit at grid nodes.
  static ExponentField tabulated(const Domain& dom, std::vector<double> nodes,
                                 std::vector<double> values) {
    if (nodes.size() != values.size() || nodes.size() < 2)
      throw std::invalid_argument("ExponentField: grid/value size mismatch");
    if (nodes.front() != dom.left || nodes.back() != dom.right)
      throw std::invalid_argument("ExponentField: grid must span the domain");
    if (!std::is_sorted(nodes.begin(), nodes.end()) ||
        std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
      throw std::invalid_argument("ExponentField: grid must be strictly increasing");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    check_bounds(*lo, *hi);
    const double pm = *lo, pp = *hi;
    auto eval = [nodes = std::move(nodes), values = std::move(values)](double z) {
      auto it = std::upper_bound(nodes.begin(), nodes.end(), z);
      std::size_t e = it == nodes.begin() ? 0 : std::size_t(it - nodes.begin()) - 1;
      e = std::min(e, nodes.size() - 2);
      const double t = (z - nodes[e]) / (nodes[e + 1] - nodes[e]);
      return values[e] + t * (values[e + 1] - values[e]);
    };
    return ExponentField(dom, std::move(eval), pm, pp, ExponentKind::tabulated);
  }

  /// Wrap an arbitrary evaluator with caller-supplied exact bounds.
  static ExponentField derived(const Domain& dom, std::function<double(double)> eval,
                               double p_minus, double p_plus) {
    check_bounds(p_minus, p_plus);
    return ExponentField(dom, std::move(eval), p_minus, p_plus,
                         ExponentKind::derived);
  }

  double operator()(double z) const { return eval_(z); }
  double p_minus() const { return p_minus_; }
  double p_plus() const { return p_plus_; }
  const Domain& domain() const { return domain_; }
  ExponentKind kind() const { return kind_; }

 private:
  ExponentField(const Domain& dom, std::function<double(double)> eval, double pm,
                double pp, ExponentKind kind)
      : domain_(dom), eval_(std::move(eval)), p_minus_(pm), p_plus_(pp), kind_(kind) {}

  static void check_bounds(double pm, double pp) {
    // Growth exponents r may touch 1; spaces that need p_minus > 1 check it
    // at their own entry points.
    if (!(pm >= 1.0) || !(pp >= pm) || !std::isfinite(pp))
      throw std::invalid_argument("ExponentField: requires 1 <= p_minus <= p_plus < inf");
  }

  Domain domain_;
  std::function<double(double)> eval_;
  double p_minus_;
  double p_plus_;
  ExponentKind kind_;
};

/// Exponent-like field that may take the value +inf at some or all points.
class ExtendedExponentField {
 public:
  ExtendedExponentField(const Domain& dom, std::function<ExtReal(double)> eval)
      : domain_(dom), eval_(std::move(eval)) {}

  static ExtendedExponentField finite(const ExponentField& p) {
    return ExtendedExponentField(p.domain(),
                                 [p](double z) { return ExtReal(p(z)); });
  }

  static ExtendedExponentField constant_infinity(const Domain& dom) {
    return ExtendedExponentField(dom, [](double) { return ExtReal::infinity(); });
  }

  ExtReal operator()(double z) const { return eval_(z); }
  const Domain& domain() const { return domain_; }

 private:
  Domain domain_;
  std::function<ExtReal(double)> eval_;
};

/// Pointwise conjugate q with 1/p(z) + 1/q(z) = 1. Rejects p_minus near 1,
/// where q would be unbounded.
inline ExponentField conjugate(const ExponentField& p) {
  if (p.p_minus() <= 1.0 + 1e-12)
    throw std::invalid_argument("conjugate: p_minus too close to 1, q unbounded");
  const double q_minus = p.p_plus() / (p.p_plus() - 1.0);
  const double q_plus = p.p_minus() / (p.p_minus() - 1.0);
  return ExponentField::derived(
      p.domain(), [p](double z) { const double v = p(z); return v / (v - 1.0); },
      q_minus, q_plus);
}

/// Sobolev conjugate: p*(z) = dim*p(z)/(dim - p(z)) where p(z) < dim, else +inf.
inline ExtendedExponentField sobolev_conjugate(const ExponentField& p, int dim) {
  if (dim < 1) throw std::invalid_argument("sobolev_conjugate: dim >= 1 required");
  const double n = static_cast<double>(dim);
  return ExtendedExponentField(p.domain(), [p, n](double z) {
    const double v = p(z);
    if (v < n) return ExtReal(n * v / (n - v));
    return ExtReal::infinity();
  });
}

/// Pointwise quotient num(z)/den(z); +inf divided by a finite exponent stays +inf.
inline ExtendedExponentField divide(const ExtendedExponentField& num,
                                    const ExponentField& den) {
  if (!(num.domain() == den.domain()))
    throw std::invalid_argument("divide: domain mismatch");
  return ExtendedExponentField(num.domain(), [num, den](double z) {
    const ExtReal top = num(z);
    if (top.is_infinite()) return ExtReal::infinity();
    return ExtReal(top.finite_value() / den(z));
  });
}

struct BoundCheck {
  bool holds = false;
  ExtReal margin;                  // min over the grid of bound - r; +inf if bound is
                                   // infinite everywhere
  std::optional<double> witness;   // grid point of minimal margin, set on failure
};

/// Margin below which a pointwise inequality is treated as a round-off tie
/// rather than a genuine strict inequality.
inline constexpr double kStrictBoundMargin = 1e-9;

/// Checks r(z) < bound(z) uniformly on a closed sampling grid.
inline BoundCheck strict_bound_check(const ExponentField& r,
                                     const ExtendedExponentField& bound,
                                     std::size_t grid_points = 10001) {
  if (!(r.domain() == bound.domain()))
    throw std::invalid_argument("strict_bound_check: domain mismatch");
  if (grid_points < 2) grid_points = 2;
  const Domain& dom = r.domain();
  bool any_finite = false;
  double min_margin = std::numeric_limits<double>::infinity();
  double min_point = dom.left;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double z =
        dom.left + (dom.right - dom.left) * double(i) / double(grid_points - 1);
    const ExtReal b = bound(z);
    if (b.is_infinite()) continue;
    any_finite = true;
    const double m = b.finite_value() - r(z);
    if (m < min_margin) {
      min_margin = m;
      min_point = z;
    }
  }
  BoundCheck out;
  if (!any_finite) {
    out.holds = true;
    out.margin = ExtReal::infinity();
    return out;
  }
  out.margin = ExtReal(min_margin);
  out.holds = min_margin > kStrictBoundMargin;
  if (!out.holds) out.witness = min_point;
  return out;
}

}  // namespace vexfem
