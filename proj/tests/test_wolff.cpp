#include <doctest.h>

#include <cmath>
#include <vector>

#include "kakeya/generators.hpp"
#include "kakeya/rng.hpp"
#include "kakeya/wolff.hpp"

using namespace kakeya;

namespace {

Tube make_tube(const Vec& center, const Vec& dir, double radius) {
  Tube t;
  t.center = center;
  t.dir = dir.normalized();
  t.radius = radius;
  return t;
}

// Snug oriented box around a tube: the tube itself as a box.
OrientedBox snug_box(const Tube& t) {
  OrientedBox b;
  b.center = t.center;
  if (t.center.dim() == 2) {
    b.axes = {t.dir, t.dir.perp()};
    b.half = {0.5, t.radius};
  } else {
    Vec v = std::abs(t.dir[0]) < 0.9 ? Vec(1.0, 0.0, 0.0) : Vec(0.0, 1.0, 0.0);
    v -= v.dot(t.dir) * t.dir;
    v = v.normalized();
    b.axes = {t.dir, v, t.dir.cross(v)};
    b.half = {0.5, t.radius, t.radius};
  }
  return b;
}

}  // namespace

TEST_CASE("tube containment in oriented boxes is exact") {
  const double delta = 0.05;
  const Tube t = make_tube(Vec(0.2, -0.1), Vec(std::cos(0.7), std::sin(0.7)), delta);
  OrientedBox snug = snug_box(t);
  CHECK(tube_in_box(t, snug));

  // Shrinking any half extent below the support function breaks containment.
  OrientedBox shorter = snug;
  shorter.half[0] = 0.49;
  CHECK_FALSE(tube_in_box(t, shorter));
  OrientedBox thinner = snug;
  thinner.half[1] = 0.9 * delta;
  CHECK_FALSE(tube_in_box(t, thinner));

  // Monte Carlo agreement: every sampled tube point lies in the snug box.
  Rng rng(17);
  for (int s = 0; s < 2000; ++s) {
    const double along = rng.uniform(-0.5, 0.5);
    const double across = rng.uniform(-delta, delta);
    const Vec x = t.center + along * t.dir + across * t.dir.perp();
    CHECK(snug.contains(x));
  }

  OrientedBox bad = snug;
  bad.axes[1] = snug.axes[0];  // not orthogonal
  CHECK_THROWS(linear_wolff_N(TubeFamily{2, delta, {t}}, {bad}));
}

TEST_CASE("linear functional: snug boxes give the exact box constant") {
  const double delta = 0.02;
  const Tube t2 = make_tube(Vec(0.0, 0.0), Vec(1.0, 0.0), delta);
  const TubeFamily f2{2, delta, {t2}};
  // One tube in its own box: delta^{n-1} / (1 * 2delta) = 1/2 in the plane.
  const WolffReport r2 = linear_wolff_N(f2, {snug_box(t2)});
  CHECK(r2.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r2.witness_count == 1);
  CHECK(r2.witness_lambda == 1.0);

  const Tube t3 = make_tube(Vec(0.0, 0.0, 0.0), Vec(0.0, 0.0, 1.0), delta);
  const TubeFamily f3{3, delta, {t3}};
  // delta^2 / (2delta)^2 = 1/4 in space.
  const WolffReport r3 = linear_wolff_N(f3, {snug_box(t3)});
  CHECK(r3.value == doctest::Approx(0.25).epsilon(1e-12));

  CHECK(linear_wolff_N(TubeFamily{2, delta, {}}, {snug_box(t2)}).value == 0.0);
  CHECK(linear_wolff_N(f2, sample_boxes(2, 5, 100)).witness_lambda <= 1.0);
}

TEST_CASE("separated families keep the linear functional small") {
  GeneratorSpec spec;
  spec.kind = FamilyKind::RandomSeparated;
  spec.n = 2;
  spec.delta = 0.02;
  spec.count = 50;
  spec.seed = 12;
  const TubeFamily f = generate(spec);
  std::vector<OrientedBox> boxes = sample_boxes(2, 77, 10000);
  for (const Tube& t : f.tubes) boxes.push_back(snug_box(t));  // guarantee a witness
  const WolffReport r = linear_wolff_N(f, boxes);
  CHECK(r.value > 0);
  CHECK(r.value <= 10.0);
  CHECK(r.witness_shape >= 0);

  // Same inputs, same report.
  const WolffReport again = linear_wolff_N(f, boxes);
  CHECK(again.value == r.value);
  CHECK(again.witness_shape == r.witness_shape);
}

TEST_CASE("tube shape fractions are exact at the extremes") {
  const double delta = 0.01;
  const Tube t = make_tube(Vec(0.0, 0.0), Vec(1.0, 0.0), delta);
  const Shape big = shape_ball(Ball{Vec(0.0, 0.0), 2.0}, 2);
  CHECK(tube_shape_fraction(t, big, 500, 3) == 1.0);
  const Shape far = shape_ball(Ball{Vec(5.0, 5.0), 0.5}, 2);
  CHECK(tube_shape_fraction(t, far, 500, 3) == 0.0);

  // Half-plane style box covering the right half of the tube.
  const Shape half = shape_axis_box(Box{Vec(0.0, -1.0), Vec(2.0, 1.0)});
  CHECK(tube_shape_fraction(t, half, 4000, 3) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("shape volumes agree with their membership oracles") {
  Rng rng(41);
  const ShapeCatalog cat = builtin_catalog(2, 8, 10);
  REQUIRE(cat.shapes.size() == 10);
  for (size_t s = 0; s < cat.shapes.size(); ++s) {
    CAPTURE(s);
    const Shape& shape = cat.shapes[s];
    // Sample the [-1.6, 1.6]^2 box that contains every builtin shape.
    const double side = 3.2, vol = side * side;
    long hits = 0;
    const long n_samples = 200000;
    for (long i = 0; i < n_samples; ++i) {
      const Vec x(rng.uniform(-1.6, 1.6), rng.uniform(-1.6, 1.6));
      if (shape.member(x)) ++hits;
    }
    const double mc = vol * static_cast<double>(hits) / static_cast<double>(n_samples);
    CHECK(mc == doctest::Approx(shape.volume).epsilon(0.05));
    CHECK(shape.volume > 0);
    CHECK(shape.complexity >= 1);
  }
}

TEST_CASE("bush families maximize the occupancy functional at the apex ball") {
  GeneratorSpec spec;
  spec.kind = FamilyKind::Bush;
  spec.n = 2;
  spec.delta = 0.01;
  spec.count = 60;
  spec.seed = 19;
  const TubeFamily f = generate(spec);
  const Vec apex = f.tubes[0].center;

  // Every tube crosses the apex ball of radius rho along a full chord, so its
  // occupancy fraction is 2 rho and the functional at lambda just below that
  // is M delta lambda^2 / (pi rho^2).
  const double rho = 0.1, lambda = 1.9 * rho;
  ShapeCatalog cat;
  cat.n = 2;
  cat.shapes.push_back(shape_ball(Ball{apex, rho}, 2));
  const WolffReport r = poly_wolff_N(f, cat, {lambda}, 1000, 23);
  const double M = static_cast<double>(f.tubes.size());
  const double predicted = M * f.delta * lambda * lambda / (kPi * rho * rho);
  CHECK(r.witness_count == 60);
  CHECK(r.value == doctest::Approx(predicted).epsilon(0.02));
  // Spec-level band relative to the M delta / pi bush mass.
  const double bush_scale = M * f.delta / kPi;
  CHECK(r.value >= bush_scale);
  CHECK(r.value <= 4.2 * bush_scale);

  // Doubling the bush doubles the count and the functional.
  GeneratorSpec spec2 = spec;
  spec2.count = 120;
  const TubeFamily f2 = generate(spec2);
  ShapeCatalog cat2;
  cat2.n = 2;
  cat2.shapes.push_back(shape_ball(Ball{f2.tubes[0].center, rho}, 2));
  const WolffReport r2 = poly_wolff_N(f2, cat2, {lambda}, 1000, 23);
  CHECK(r2.value / r.value == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("occupancy functional dominates containment on the same boxes") {
  GeneratorSpec spec;
  spec.kind = FamilyKind::RandomSeparated;
  spec.n = 2;
  spec.delta = 0.05;
  spec.count = 20;
  spec.seed = 3;
  const TubeFamily f = generate(spec);
  std::vector<OrientedBox> boxes = sample_boxes(2, 9, 30);
  for (int i = 0; i < 5; ++i) boxes.push_back(snug_box(f.tubes[static_cast<size_t>(i)]));
  const WolffReport lin = linear_wolff_N(f, boxes);
  ShapeCatalog cat;
  cat.n = 2;
  for (const OrientedBox& b : boxes) cat.shapes.push_back(shape_oriented_box(b));
  const WolffReport poly = poly_wolff_N(f, cat, {1.0}, 800, 31);
  // Containment forces occupancy 1, so at lambda = 1 the poly sup dominates.
  CHECK(poly.value >= lin.value - 1e-12);

  // Growing the catalog (same seed stream per shape) can only raise the sup.
  const ShapeCatalog small = builtin_catalog(2, 8, 6);
  ShapeCatalog large = builtin_catalog(2, 8, 12);
  const std::vector<double> lambdas{0.1, 0.3, 1.0};
  const double v_small = poly_wolff_N(f, small, lambdas, 400, 11).value;
  const double v_large = poly_wolff_N(f, large, lambdas, 400, 11).value;
  CHECK(v_large >= v_small - 1e-12);

  CHECK_THROWS(poly_wolff_N(f, small, {0.0}, 400, 11));
  CHECK_THROWS(poly_wolff_N(f, small, {1.5}, 400, 11));
  ShapeCatalog wrong_dim = builtin_catalog(3, 8, 3);
  CHECK_THROWS(poly_wolff_N(f, wrong_dim, {0.5}, 400, 11));
}
