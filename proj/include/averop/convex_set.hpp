#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "averop/types.hpp"

namespace averop {

// Closed halfspace {x : <normal, x> >= offset}.
struct HalfspaceData {
  Vector normal;
  double offset = 0.0;
};

namespace sets {

struct Box {
  Vector lower, upper;
};
struct Ball {
  Vector center;
  double radius = 0.0;
};
struct Halfspace {
  HalfspaceData h;
};
// Orthonormal basis columns; 0 <= cols < rows so the subspace is proper.
struct LinearSubspace {
  Matrix basis;
};
struct AffineSubspace {
  Matrix basis;
  Vector anchor;
};
struct Singleton {
  Vector point;
};
// Projected iteratively with Dykstra's alternating scheme.
struct HalfspaceIntersection {
  std::vector<HalfspaceData> parts;
  double tol = 1e-10;
  long max_sweeps = 100000;
};

}  // namespace sets

// A nonempty closed convex subset of R^n with an exact or iterative
// projector. Constructors reject encodings of the whole space, so every
// representable set is a proper subset of its ambient space.
class ConvexSet {
 public:
  using Node = std::variant<sets::Box, sets::Ball, sets::Halfspace, sets::LinearSubspace,
                            sets::AffineSubspace, sets::Singleton, sets::HalfspaceIntersection>;

  static ConvexSet box(Vector lower, Vector upper);
  static ConvexSet ball(Vector center, double radius);
  static ConvexSet halfspace(Vector normal, double offset);
  static ConvexSet linear_subspace(Matrix basis);
  static ConvexSet affine_subspace(Matrix basis, Vector anchor);
  static ConvexSet singleton(Vector point);
  static ConvexSet halfspace_intersection(std::vector<HalfspaceData> parts, double tol = 1e-10,
                                          long max_sweeps = 100000);

  Vector project(const Vector& x) const;
  double distance(const Vector& x) const;
  bool contains(const Vector& x, double tol) const;

  int dim() const { return dim_; }
  bool is_singleton() const;  // structural detection only
  const Node& node() const { return *node_; }

 private:
  ConvexSet(std::shared_ptr<const Node> node, int dim) : node_(std::move(node)), dim_(dim) {}

  std::shared_ptr<const Node> node_;
  int dim_ = 0;
};

Vector project_halfspace(const HalfspaceData& h, const Vector& x);

}  // namespace averop
