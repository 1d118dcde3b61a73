#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dualscheme/common.hpp"

namespace dualscheme {

/// Elementary closed convex cones. Every kind has its polar in the list, so
/// polar() is closed over this set and polar(polar(K)) == K holds exactly.
enum class ConeKind {
  Zero,                 // {0}
  Free,                 // R^d, polar of Zero
  NonpositiveOrthant,   // R^d_-
  NonnegativeOrthant,   // R^d_+, polar of R^d_-
  SecondOrder,          // {(x, t) : |x| <= t}, t is the last coordinate
  NegativeSecondOrder,  // {(x, t) : |x| <= -t}, polar of SecondOrder
};

/// A product of elementary cones in R^k with the Euclidean inner product.
///
/// A single cone is a product with one factor. Products of products are
/// flattened on construction.
class Cone {
 public:
  struct Factor {
    ConeKind kind;
    int dim;
    bool operator==(const Factor&) const = default;
  };

  static Cone zero(int dim);
  static Cone free(int dim);
  static Cone nonpositive_orthant(int dim);
  static Cone nonnegative_orthant(int dim);
  static Cone second_order(int dim);
  static Cone negative_second_order(int dim);
  static Cone product(const std::vector<Cone>& factors);

  /// Parses a product expression such as "zero:1 x orthant-:2 x soc:3".
  ///
  /// Factor names: zero, free, orthant-, orthant+, soc, -soc.
  static Cone parse(std::string_view text);

  int dim() const { return dim_; }
  const std::vector<Factor>& factors() const { return factors_; }
  std::string to_string() const;

  bool operator==(const Cone&) const = default;

 private:
  explicit Cone(std::vector<Factor> factors);

  std::vector<Factor> factors_;
  int dim_ = 0;
};

/// K* = {y : <y, v> <= 0 for all v in K}.
Cone polar(const Cone& cone);

/// Euclidean projection onto the cone.
Vec project(const Cone& cone, const Vec& y);

/// Projection onto the polar cone, computed as y - project(cone, y).
Vec project_polar(const Cone& cone, const Vec& y);

/// dist(y, K) = |y - project(K, y)|.
double distance(const Cone& cone, const Vec& y);

bool contains(const Cone& cone, const Vec& y, double tolerance = 0.0);

/// Projection onto K intersected with the origin-centred ball of the given radius.
///
/// For a cone this is the radial shrink of the cone projection.
Vec project_onto_bounded(const Cone& cone, const Vec& y, double radius);

}  // namespace dualscheme
