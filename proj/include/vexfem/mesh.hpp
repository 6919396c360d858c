#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vexfem/exponent_field.hpp"

namespace vexfem {

struct MeshMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Gauss-Legendre rule on the reference element [0, 1]; weights are positive
/// and sum to 1.
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
  std::size_t size() const { return points.size(); }
};

/// Nodes and weights by Newton iteration on the Legendre polynomial; n in [2, 10].
inline QuadratureRule gauss_legendre(int n) {
  if (n < 2 || n > 10)
    throw std::invalid_argument("gauss_legendre: node count must be in [2, 10]");
  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence: evaluates P_n and P_n' at x.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.points[i] = 0.5 * (1.0 + x);
    rule.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  // The cosine seeds run right-to-left; keep nodes ascending.
  std::vector<std::size_t> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rule.points[a] < rule.points[b];
  });
  QuadratureRule sorted;
  sorted.points.reserve(n);
  sorted.weights.reserve(n);
  for (auto idx : order) {
    sorted.points.push_back(rule.points[idx]);
    sorted.weights.push_back(rule.weights[idx]);
  }
  return sorted;
}

/// Uniform 1-D mesh produced from the single-element base by midpoint
/// bisection; level k has 2^k elements and parent nodes are a subset of the
/// child nodes.
class Mesh {
 public:
  static Mesh initial(const Domain& dom) {
    return Mesh(dom, {dom.left, dom.right}, 0);
  }

  static Mesh at_level(const Domain& dom, int level) {
    if (level < 0) throw std::invalid_argument("Mesh: level must be >= 0");
    Mesh m = initial(dom);
    for (int k = 0; k < level; ++k) m = m.refine();
    return m;
  }

  Mesh refine() const {
    std::vector<double> finer;
    finer.reserve(2 * nodes_.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
      finer.push_back(nodes_[i]);
      finer.push_back(0.5 * (nodes_[i] + nodes_[i + 1]));
    }
    finer.push_back(nodes_.back());
    return Mesh(domain_, std::move(finer), level_ + 1);
  }

  const Domain& domain() const { return domain_; }
  int level() const { return level_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t element_count() const { return nodes_.size() - 1; }
  double node(std::size_t i) const { return nodes_[i]; }
  const std::vector<double>& nodes() const { return nodes_; }
  double element_width(std::size_t e) const { return nodes_[e + 1] - nodes_[e]; }

  std::size_t element_of(double z) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), z);
    if (it == nodes_.begin()) return 0;
    std::size_t e = std::size_t(it - nodes_.begin()) - 1;
    return std::min(e, element_count() - 1);
  }

  friend bool operator==(const Mesh& a, const Mesh& b) {
    return a.domain_ == b.domain_ && a.nodes_ == b.nodes_;
  }

 private:
  Mesh(const Domain& dom, std::vector<double> nodes, int level)
      : domain_(dom), nodes_(std::move(nodes)), level_(level) {}

  Domain domain_;
  std::vector<double> nodes_;
  int level_;
};

enum class BoundaryTag { free, dirichlet_zero };

/// P1 finite-element function: nodal coefficients on a mesh. The broken
/// gradient is piecewise constant. Value-semantic snapshot, safe to share.
class MeshedFunction {
 public:
  MeshedFunction(Mesh mesh, std::vector<double> coefficients, BoundaryTag tag)
      : mesh_(std::move(mesh)), coeffs_(std::move(coefficients)), tag_(tag) {
    if (coeffs_.size() != mesh_.node_count())
      throw std::invalid_argument("MeshedFunction: coefficient/node count mismatch");
    if (tag_ == BoundaryTag::dirichlet_zero &&
        (coeffs_.front() != 0.0 || coeffs_.back() != 0.0))
      throw std::invalid_argument(
          "MeshedFunction: dirichlet-zero requires zero endpoint coefficients");
  }

  static MeshedFunction zero(const Mesh& mesh, BoundaryTag tag) {
    return MeshedFunction(mesh, std::vector<double>(mesh.node_count(), 0.0), tag);
  }

  const Mesh& mesh() const { return mesh_; }
  BoundaryTag tag() const { return tag_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  double coefficient(std::size_t i) const { return coeffs_[i]; }
  void set_coefficient(std::size_t i, double v) { coeffs_[i] = v; }

  double value(double z) const {
    const std::size_t e = mesh_.element_of(z);
    const double t = (z - mesh_.node(e)) / mesh_.element_width(e);
    return coeffs_[e] + t * (coeffs_[e + 1] - coeffs_[e]);
  }

  double gradient_on_element(std::size_t e) const {
    return (coeffs_[e + 1] - coeffs_[e]) / mesh_.element_width(e);
  }

  double max_abs_coefficient() const {
    double m = 0.0;
    for (double c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  Mesh mesh_;
  std::vector<double> coeffs_;
  BoundaryTag tag_;
};

/// Piecewise-constant view of a MeshedFunction's broken gradient.
class GradientField {
 public:
  explicit GradientField(MeshedFunction u) : u_(std::move(u)) {}

  const Mesh& mesh() const { return u_.mesh(); }
  double value(double z) const {
    return u_.gradient_on_element(u_.mesh().element_of(z));
  }
  double operator()(double z) const { return value(z); }

 private:
  MeshedFunction u_;
};

inline MeshedFunction interpolate(const std::function<double(double)>& f,
                                  const Mesh& mesh, BoundaryTag tag) {
  std::vector<double> c(mesh.node_count());
  for (std::size_t i = 0; i < mesh.node_count(); ++i) c[i] = f(mesh.node(i));
  if (tag == BoundaryTag::dirichlet_zero) {
    c.front() = 0.0;
    c.back() = 0.0;
  }
  return MeshedFunction(mesh, std::move(c), tag);
}

/// Exact P1 embedding into a refinement descendant; midpoint coefficients are
/// endpoint averages at each bisection step.
inline MeshedFunction prolong(const MeshedFunction& u, const Mesh& finer) {
  if (!(u.mesh().domain() == finer.domain()) || finer.level() < u.mesh().level())
    throw MeshMismatchError("prolong: target is not a refinement descendant");
  Mesh mesh = u.mesh();
  std::vector<double> c = u.coefficients();
  for (int lvl = u.mesh().level(); lvl < finer.level(); ++lvl) {
    std::vector<double> cf;
    cf.reserve(2 * c.size() - 1);
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
      cf.push_back(c[i]);
      cf.push_back(0.5 * (c[i] + c[i + 1]));
    }
    cf.push_back(c.back());
    c = std::move(cf);
    mesh = mesh.refine();
  }
  if (!(mesh == finer))
    throw MeshMismatchError("prolong: refinement chain does not reach the target mesh");
  return MeshedFunction(finer, std::move(c), u.tag());
}

inline MeshedFunction difference(const MeshedFunction& a, const MeshedFunction& b) {
  if (!(a.mesh() == b.mesh()))
    throw MeshMismatchError("difference: functions live on different meshes");
  std::vector<double> c(a.coefficients());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b.coefficient(i);
  const BoundaryTag tag = (a.tag() == BoundaryTag::dirichlet_zero &&
                           b.tag() == BoundaryTag::dirichlet_zero)
                              ? BoundaryTag::dirichlet_zero
                              : BoundaryTag::free;
  return MeshedFunction(a.mesh(), std::move(c), tag);
}

inline MeshedFunction scaled(const MeshedFunction& u, double alpha) {
  std::vector<double> c(u.coefficients());
  for (double& v : c) v *= alpha;
  return MeshedFunction(u.mesh(), std::move(c), u.tag());
}

}  // namespace vexfem
