#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rieszcap/ball_kernels.hpp"
#include "rieszcap/rng.hpp"
#include "rieszcap/vec.hpp"

namespace rieszcap {

class Shape;

struct BallPrimitive {
  Vec center;
  double radius;
};

struct BoxPrimitive {
  Vec lower;
  Vec upper;
};

// Solid cylinder: all points within `radius` of the segment [start, end]
// measured perpendicular to the axis, with flat end caps.
struct CylinderPrimitive {
  Vec start;
  Vec end;
  double radius;
};

struct UnionNode {
  std::vector<Shape> children;
};

/// Axis-aligned bounding box.
struct Aabb {
  Vec lower;
  Vec upper;

  bool interiors_overlap(const Aabb& o) const {
    for (int i = 0; i < lower.dim(); ++i) {
      if (upper[i] <= o.lower[i] || o.upper[i] <= lower[i]) return false;
    }
    return true;
  }
  double volume() const {
    double v = 1.0;
    for (int i = 0; i < lower.dim(); ++i) v *= upper[i] - lower[i];
    return v;
  }
};

/// Volume of a shape; `exact` is false when a Monte Carlo fallback was used,
/// in which case `relative_error` is its estimated standard error.
struct VolumeEstimate {
  double value = 0.0;
  double relative_error = 0.0;
  bool exact = true;
};

inline double unit_ball_volume(int dim) {
  return std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

/// Compact target set K: an immutable tree of primitives.
class Shape {
 public:
  using Node = std::variant<BallPrimitive, BoxPrimitive, CylinderPrimitive, UnionNode>;

  static Shape ball(Vec center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
    const int d = center.dim();
    return Shape(BallPrimitive{std::move(center), radius}, d);
  }

  static Shape box(Vec lower, Vec upper) {
    if (lower.dim() != upper.dim()) throw std::invalid_argument("box corners have different dimensions");
    for (int i = 0; i < lower.dim(); ++i) {
      if (!(lower[i] < upper[i])) throw std::invalid_argument("box corners must satisfy min < max componentwise");
    }
    const int d = lower.dim();
    return Shape(BoxPrimitive{std::move(lower), std::move(upper)}, d);
  }

  static Shape cylinder(Vec start, Vec end, double radius) {
    if (start.dim() != end.dim()) throw std::invalid_argument("cylinder endpoints have different dimensions");
    if (!(radius > 0.0)) throw std::invalid_argument("cylinder radius must be positive");
    if (!(rieszcap::distance(start, end) > 0.0)) throw std::invalid_argument("cylinder axis must have positive length");
    const int d = start.dim();
    return Shape(CylinderPrimitive{std::move(start), std::move(end), radius}, d);
  }

  static Shape make_union(std::vector<Shape> children) {
    if (children.empty()) throw std::invalid_argument("union needs at least one child");
    const int d = children.front().dim();
    for (const auto& c : children) {
      if (c.dim() != d) throw std::invalid_argument("union children have different dimensions");
    }
    return Shape(UnionNode{std::move(children)}, d);
  }

  int dim() const { return dim_; }
  const Node& node() const { return node_; }

  /// Euclidean distance from x to the solid set (0 inside).
  double distance(const Vec& x) const {
    require_same_dim(x, dim_, "Shape::distance");
    return distance_unchecked(x);
  }

  double distance_unchecked(const Vec& x) const {
    return std::visit([&](const auto& n) { return primitive_distance(n, x); }, node_);
  }

  /// Radius of the smallest origin-centred ball containing the shape.
  double bounding_radius() const {
    return std::visit([&](const auto& n) { return primitive_bounding_radius(n); }, node_);
  }

  Aabb bounding_box() const {
    return std::visit([&](const auto& n) { return primitive_aabb(n); }, node_);
  }

  /// Exact for disjoint unions of primitives; otherwise a seeded Monte Carlo
  /// estimate over the bounding box.
  VolumeEstimate volume(std::int64_t mc_points = 10'000'000) const {
    if (auto v = exact_volume()) return {*v, 0.0, true};
    const Aabb box = bounding_box();
    RngStream rng(0x5eed0f5a9e5ULL);
    std::int64_t inside = 0;
    Vec x(dim_);
    for (std::int64_t k = 0; k < mc_points; ++k) {
      for (int i = 0; i < dim_; ++i) x[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * rng.uniform();
      if (distance_unchecked(x) == 0.0) ++inside;
    }
    const double frac = static_cast<double>(inside) / static_cast<double>(mc_points);
    const double value = frac * box.volume();
    const double rel = frac > 0.0 ? std::sqrt((1.0 - frac) / (frac * static_cast<double>(mc_points))) : 1.0;
    return {value, rel, false};
  }

 private:
  Shape(Node node, int dim) : node_(std::move(node)), dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("shape dimension out of range");
  }

  static double primitive_distance(const BallPrimitive& b, const Vec& x) {
    return std::max(rieszcap::distance(x, b.center) - b.radius, 0.0);
  }

  static double primitive_distance(const BoxPrimitive& b, const Vec& x) {
    double s = 0.0;
    for (int i = 0; i < x.dim(); ++i) {
      const double e = std::max({b.lower[i] - x[i], 0.0, x[i] - b.upper[i]});
      s += e * e;
    }
    return std::sqrt(s);
  }

  static double primitive_distance(const CylinderPrimitive& c, const Vec& x) {
    const Vec axis = c.end - c.start;
    const double len = axis.norm();
    const Vec rel = x - c.start;
    const double t = dot(rel, axis) / len;  // coordinate along the axis
    const double radial2 = std::max(rel.norm2() - t * t, 0.0);
    const double axial_out = std::max({-t, 0.0, t - len});
    const double radial_out = std::max(std::sqrt(radial2) - c.radius, 0.0);
    return std::hypot(axial_out, radial_out);
  }

  static double primitive_distance(const UnionNode& u, const Vec& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& child : u.children) {
      best = std::min(best, child.distance_unchecked(x));
      if (best == 0.0) break;
    }
    return best;
  }

  static double primitive_bounding_radius(const BallPrimitive& b) { return b.center.norm() + b.radius; }

  static double primitive_bounding_radius(const BoxPrimitive& b) {
    double s = 0.0;
    for (int i = 0; i < b.lower.dim(); ++i) {
      const double m = std::max(std::fabs(b.lower[i]), std::fabs(b.upper[i]));
      s += m * m;
    }
    return std::sqrt(s);
  }

  // Farthest point of each end cap: a (d-1)-disk of radius R around e with
  // normal u reaches sqrt(|e|^2 + 2 R |e_perp| + R^2).
  static double primitive_bounding_radius(const CylinderPrimitive& c) {
    const Vec axis = c.end - c.start;
    const Vec u = axis / axis.norm();
    double best = 0.0;
    for (const Vec* e : {&c.start, &c.end}) {
      const Vec perp = *e - u * dot(*e, u);
      best = std::max(best, std::sqrt(e->norm2() + 2.0 * c.radius * perp.norm() + c.radius * c.radius));
    }
    return best;
  }

  static double primitive_bounding_radius(const UnionNode& u) {
    double best = 0.0;
    for (const auto& child : u.children) best = std::max(best, child.bounding_radius());
    return best;
  }

  static Aabb primitive_aabb(const BallPrimitive& b) {
    Aabb box{b.center, b.center};
    for (int i = 0; i < b.center.dim(); ++i) {
      box.lower[i] -= b.radius;
      box.upper[i] += b.radius;
    }
    return box;
  }

  static Aabb primitive_aabb(const BoxPrimitive& b) { return {b.lower, b.upper}; }

  static Aabb primitive_aabb(const CylinderPrimitive& c) {
    const Vec axis = c.end - c.start;
    const double len2 = axis.norm2();
    Aabb box{c.start, c.start};
    for (int i = 0; i < axis.dim(); ++i) {
      // Extent of a cap disk along coordinate i is R * sqrt(1 - u_i^2).
      const double ext = c.radius * std::sqrt(std::max(1.0 - axis[i] * axis[i] / len2, 0.0));
      box.lower[i] = std::min(c.start[i], c.end[i]) - ext;
      box.upper[i] = std::max(c.start[i], c.end[i]) + ext;
    }
    return box;
  }

  static Aabb primitive_aabb(const UnionNode& u) {
    Aabb box = u.children.front().bounding_box();
    for (const auto& child : u.children) {
      const Aabb b = child.bounding_box();
      for (int i = 0; i < box.lower.dim(); ++i) {
        box.lower[i] = std::min(box.lower[i], b.lower[i]);
        box.upper[i] = std::max(box.upper[i], b.upper[i]);
      }
    }
    return box;
  }

  std::optional<double> exact_volume() const {
    if (const auto* b = std::get_if<BallPrimitive>(&node_)) {
      return unit_ball_volume(dim_) * std::pow(b->radius, dim_);
    }
    if (const auto* b = std::get_if<BoxPrimitive>(&node_)) {
      return Aabb{b->lower, b->upper}.volume();
    }
    if (const auto* c = std::get_if<CylinderPrimitive>(&node_)) {
      return unit_ball_volume(dim_ - 1) * std::pow(c->radius, dim_ - 1) * rieszcap::distance(c->start, c->end);
    }
    const auto& u = std::get<UnionNode>(node_);
    // Pairwise-disjoint bounding boxes make the volume additive.
    std::vector<Aabb> boxes;
    boxes.reserve(u.children.size());
    for (const auto& child : u.children) boxes.push_back(child.bounding_box());
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      for (std::size_t j = i + 1; j < boxes.size(); ++j) {
        if (boxes[i].interiors_overlap(boxes[j])) return std::nullopt;
      }
    }
    double total = 0.0;
    for (const auto& child : u.children) {
      auto v = child.exact_volume();
      if (!v) return std::nullopt;
      total += *v;
    }
    return total;
  }

  Node node_;
  int dim_;
};

inline double distance(const Shape& shape, const Vec& x) { return shape.distance(x); }

inline bool is_hit(const Shape& shape, const Vec& x, double epsilon) {
  return shape.distance(x) <= epsilon;
}

inline double bounding_radius(const Shape& shape) { return shape.bounding_radius(); }

inline VolumeEstimate volume(const Shape& shape) { return shape.volume(); }

/// Origin-centred ball with the same volume as the shape.
inline BallGeometry ball_same_volume(const Shape& shape, int dim) {
  if (shape.dim() != dim) throw std::invalid_argument("ball_same_volume: dimension mismatch");
  const double v = shape.volume().value;
  if (!(v > 0.0)) throw std::invalid_argument("ball_same_volume: shape has zero volume");
  return BallGeometry(Vec::zeros(dim), std::pow(v / unit_ball_volume(dim), 1.0 / dim));
}

// Builders for the shapes used throughout the experiments.
namespace shapes {

inline Shape centered_ball(int dim, double radius = 1.0) { return Shape::ball(Vec::zeros(dim), radius); }

inline Shape centered_cube(int dim, double side = 1.0) {
  Vec lo(dim), hi(dim);
  for (int i = 0; i < dim; ++i) {
    lo[i] = -side / 2.0;
    hi[i] = side / 2.0;
  }
  return Shape::box(lo, hi);
}

/// [-half_length, half_length] x [-1, 1]^2 in R^3.
inline Shape bar(double half_length) {
  return Shape::box(Vec{-half_length, -1.0, -1.0}, Vec{half_length, 1.0, 1.0});
}

/// Square [-h, h]^2 with a hole, built from four disjoint wall slabs.
inline Shape hollow_square(double half_side, double wall) {
  if (!(wall > 0.0 && wall < half_side)) throw std::invalid_argument("wall must lie in (0, half_side)");
  const double h = half_side;
  const double in = h - wall;
  std::vector<Shape> walls;
  walls.push_back(Shape::box(Vec{-h, in}, Vec{h, h}));      // top
  walls.push_back(Shape::box(Vec{-h, -h}, Vec{h, -in}));    // bottom
  walls.push_back(Shape::box(Vec{-h, -in}, Vec{-in, in}));  // left
  walls.push_back(Shape::box(Vec{in, -in}, Vec{h, in}));    // right
  return Shape::make_union(std::move(walls));
}

/// Thin disk {|x_1| <= half_thickness, x_2^2 + ... <= radius^2} in R^d.
inline Shape coin(int dim, double half_thickness, double radius = 1.0) {
  return Shape::cylinder(Vec::axis(dim, 0, -half_thickness), Vec::axis(dim, 0, half_thickness), radius);
}

}  // namespace shapes

}  // namespace rieszcap
