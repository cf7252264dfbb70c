#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kakeya/tube.hpp"

namespace kakeya {

// Box with arbitrary orthonormal axes; the test sets for the linear
// containment functional.
struct OrientedBox {
  Vec center;
  std::vector<Vec> axes;     // orthonormal
  std::vector<double> half;  // half-extents along the axes
  double volume() const;
  bool contains(const Vec& x) const;
};

// Exact containment of a tube in an oriented box via the tube's support
// function along each box axis.
bool tube_in_box(const Tube& t, const OrientedBox& box);

// Membership-oracle shape with exact volume; the test sets for the
// fraction-based functional.
struct Shape {
  std::string desc;
  int complexity = 1;  // semialgebraic description size (number of polynomial conditions)
  double volume = 0;
  std::function<bool(const Vec&)> member;
};

struct ShapeCatalog {
  int n = 0;
  std::vector<Shape> shapes;
};

// Shape builders (exact volumes).
Shape shape_axis_box(const Box& b);
Shape shape_oriented_box(const OrientedBox& b);
Shape shape_ball(const Ball& b, int n);
Shape shape_axis_ellipsoid(const Vec& center, const Vec& semi);
Shape shape_annulus(const Vec& center, double r_inner, double r_outer, int n);

// Deterministic mixed catalog: axis boxes, rotated slabs, balls, ellipsoids,
// and annuli at assorted scales around the unit ball.
ShapeCatalog builtin_catalog(int n, std::uint64_t seed, int size);

// Seeded oriented test boxes with random centers, orientations, and extents.
std::vector<OrientedBox> sample_boxes(int n, std::uint64_t seed, int count);

struct WolffReport {
  double value = 0;          // the extremal functional value
  int witness_shape = -1;    // index of the maximizing set
  double witness_lambda = 0; // occupancy fraction at the maximum (1 for containment)
  long witness_count = 0;    // tubes counted at the maximum
  std::string witness_desc;
};

// sup over test boxes of (#tubes contained in E) * delta^{n-1} / |E|.
WolffReport linear_wolff_N(const TubeFamily& f, const std::vector<OrientedBox>& boxes);

// sup over shapes and occupancy thresholds lambda of
// #{T : |T cap E| >= lambda |T|} * delta^{n-1} * lambda^n / |E|,
// with |T cap E| estimated by a seeded stratified sample of each tube.
WolffReport poly_wolff_N(const TubeFamily& f, const ShapeCatalog& catalog,
                         const std::vector<double>& lambdas, int samples_per_tube,
                         std::uint64_t seed);

// Fraction of the tube inside the shape by stratified sampling.
double tube_shape_fraction(const Tube& t, const Shape& s, int samples, std::uint64_t seed);

}  // namespace kakeya
