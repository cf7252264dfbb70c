#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "kakeya/geometry.hpp"
#include "kakeya/rng.hpp"
#include "kakeya/tube.hpp"
#include "kakeya/variety.hpp"

using namespace kakeya;

namespace {

Tube make_tube(const Vec& center, const Vec& dir, double radius) {
  Tube t;
  t.center = center;
  t.dir = dir.normalized();
  t.radius = radius;
  return t;
}

TubeFamily fan_family_2d(double delta, const std::vector<double>& angles) {
  TubeFamily f;
  f.n = 2;
  f.delta = delta;
  for (double a : angles)
    f.tubes.push_back(make_tube(Vec(0, 0), Vec(std::cos(a), std::sin(a)), delta));
  return f;
}

}  // namespace

TEST_CASE("unit ball volumes and tube volume") {
  CHECK(unit_ball_volume(0) == 1.0);
  CHECK(unit_ball_volume(1) == 2.0);
  CHECK(unit_ball_volume(2) == doctest::Approx(kPi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0));
  CHECK_THROWS(unit_ball_volume(4));
  // Cross-section v_{n-1} delta^{n-1} times unit height.
  CHECK(tube_volume(2, 0.01) == doctest::Approx(0.02));
  CHECK(tube_volume(3, 0.01) == doctest::Approx(kPi * 1e-4));
}

TEST_CASE("vector primitives") {
  const Vec a(1, 2, 3), b(4, 5, 6);
  CHECK(a.dot(b) == doctest::Approx(32));
  CHECK(a.cross(b) == Vec(-3, 6, -3));
  CHECK(Vec(3, 4).norm() == doctest::Approx(5));
  CHECK(Vec(1, 0).perp() == Vec(0, 1));
  CHECK(Vec(0, 1).perp() == Vec(-1, 0));
  CHECK_THROWS(Vec(1e-15, 0).normalized());
  CHECK_THROWS(Vec(1, 2).cross(Vec(3, 4)));

  // Angles between lines: antipodal identification, clamped to [0, pi/2].
  CHECK(line_angle(Vec(1, 0), Vec(-1, 0)) == doctest::Approx(0));
  CHECK(line_angle(Vec(1, 0), Vec(0, 1)) == doctest::Approx(kPi / 2));
  for (double th : {0.05, 0.3, 1.1}) {
    CHECK(line_angle(Vec(1, 0), Vec(std::cos(th), std::sin(th))) == doctest::Approx(th));
    CHECK(line_angle(Vec(1, 0), -Vec(std::cos(th), std::sin(th))) == doctest::Approx(th));
  }
}

TEST_CASE("subspace angles") {
  const Subspace xy = make_subspace(3, {Vec(1, 0, 0), Vec(0, 1, 0)});
  CHECK(angle_to_subspace(Vec(0, 0, 1), xy) == doctest::Approx(kPi / 2));
  CHECK(angle_to_subspace(Vec(3, -2, 0), xy) == doctest::Approx(0));
  for (double th : {0.1, 0.7, 1.4})
    CHECK(angle_to_subspace(Vec(std::cos(th), 0, std::sin(th)), xy) == doctest::Approx(th));

  const Subspace line = make_subspace(2, {Vec(1, 1)});
  CHECK(angle_to_subspace(Vec(1, -1), line) == doctest::Approx(kPi / 2));
  CHECK(angle_to_subspace(Vec(2, 2), line) == doctest::Approx(0));

  // Gram-Schmidt rejects degenerate spanning sets.
  CHECK_THROWS(make_subspace(2, {Vec(1, 1), Vec(2, 2)}));
  CHECK_THROWS(make_subspace(3, {}));

  // Infimum over the cap: shrink the point angle by the cap radius beta/2.
  const Vec w(std::cos(0.4), 0, std::sin(0.4));
  CHECK(cap_angle_to_subspace(w, 0.2, xy) == doctest::Approx(0.3));
  CHECK(cap_angle_to_subspace(w, 1.0, xy) == doctest::Approx(0));
}

TEST_CASE("boxes and regions") {
  Box b{Vec(-1, 0), Vec(1, 2)};
  CHECK(b.volume() == doctest::Approx(4));
  CHECK(b.contains(Vec(0.5, 1.5)));
  CHECK_FALSE(b.contains(Vec(1.5, 1.5)));
  CHECK(b.inflated(0.5).volume() == doctest::Approx(9));
  Box u = b.union_with(Box{Vec(0, -1), Vec(3, 1)});
  CHECK(u.lo == Vec(-1, -1));
  CHECK(u.hi == Vec(3, 2));

  const Region r = Region::ball(Ball{Vec(1, 1), 0.5});
  const Box bb = r.bounding_box();
  CHECK(bb.lo == Vec(0.5, 0.5));
  CHECK(bb.hi == Vec(1.5, 1.5));
  CHECK(r.contains(Vec(1.2, 1.2)));
  CHECK_FALSE(r.contains(Vec(1.4, 1.4)));
}

TEST_CASE("tube membership") {
  const Tube t = make_tube(Vec(0, 0), Vec(1, 0), 0.01);
  CHECK(tube_contains(t, Vec(0.49, 0.009)));
  CHECK(tube_contains(t, Vec(-0.5, -0.01)));
  CHECK_FALSE(tube_contains(t, Vec(0.51, 0)));
  CHECK_FALSE(tube_contains(t, Vec(0, 0.011)));
  CHECK(tube_contains(t, Vec(0.51, 0), 0.02));
  CHECK(tube_contains(t, Vec(0, 0.011), 0.002));
  CHECK(tube_axis_point(t, 0.25) == Vec(0.25, 0));

  const Tube s = make_tube(Vec(1, 1, 1), Vec(0, 0, 1), 0.05);
  CHECK(tube_contains(s, Vec(1.03, 1.03, 1.4)));
  CHECK_FALSE(tube_contains(s, Vec(1.04, 1.04, 0)));
  CHECK_FALSE(tube_contains(s, Vec(1, 1, 1.51)));
}

TEST_CASE("family validation") {
  TubeFamily f = fan_family_2d(0.01, {0.0, 0.5, 1.0});
  CHECK_NOTHROW(validate_family(f));

  TubeFamily bad_radius = f;
  bad_radius.tubes[1].radius = 0.02;
  CHECK_THROWS(validate_family(bad_radius));

  TubeFamily bad_dir = f;
  bad_dir.tubes[0].dir = Vec(1.0 + 1e-6, 0);
  CHECK_THROWS(validate_family(bad_dir));

  TubeFamily bad_delta = f;
  bad_delta.delta = 0.5;
  for (auto& t : bad_delta.tubes) t.radius = 0.5;
  CHECK_THROWS(validate_family(bad_delta));

  TubeFamily bad_dim = f;
  bad_dim.tubes[2].center = Vec(0, 0, 0);
  CHECK_THROWS(validate_family(bad_dim));
}

TEST_CASE("direction separation") {
  const double d = 0.01;
  CHECK(direction_separated(fan_family_2d(d, {0.0})));
  CHECK(direction_separated(fan_family_2d(d, {0.0, 1.5 * d, 3.0 * d})));
  CHECK_FALSE(direction_separated(fan_family_2d(d, {0.0, 0.5 * d})));
  // Antipodal directions name the same line.
  CHECK_FALSE(direction_separated(fan_family_2d(d, {0.1, 0.1 + kPi})));
  // Exactly delta apart counts as separated.
  CHECK(direction_separated(fan_family_2d(d, {0.0, d})));
}

TEST_CASE("greedy cap decomposition") {
  const double delta = 0.005, beta = 0.15;

  SUBCASE("hand-checked four directions") {
    const TubeFamily f = fan_family_2d(delta, {0.0, 0.1, 0.3, 0.32});
    const CapDecomposition caps = cap_decompose(f, beta);
    REQUIRE(caps.caps.size() == 2);
    CHECK(caps.caps[0].members == std::vector<int>{0, 1});
    CHECK(caps.caps[1].members == std::vector<int>{2, 3});
  }

  SUBCASE("structural guarantees on an even fan") {
    std::vector<double> angles;
    for (double a = 0; a < kPi - 1e-12; a += 2 * delta) angles.push_back(a);
    const TubeFamily f = fan_family_2d(delta, angles);
    const CapDecomposition caps = cap_decompose(f, beta);

    // Partition of the index set.
    std::set<int> seen;
    for (const Cap& c : caps.caps)
      for (int i : c.members) CHECK(seen.insert(i).second);
    CHECK(seen.size() == f.tubes.size());

    // Every member within beta of its center; centers pairwise > beta apart.
    for (const Cap& c : caps.caps)
      for (int i : c.members)
        CHECK(line_angle(f.tubes[static_cast<size_t>(i)].dir, c.omega) <= beta + 1e-12);
    for (size_t a = 0; a < caps.caps.size(); ++a)
      for (size_t b = a + 1; b < caps.caps.size(); ++b)
        CHECK(line_angle(caps.caps[a].omega, caps.caps[b].omega) > beta);

    // Packing bound on the projective circle of circumference pi.
    CHECK(static_cast<double>(caps.caps.size()) < kPi / beta + 1.0);
    // Nearest-center assignment keeps every cap small: each cap spans an arc
    // of at most 2 beta, holding at most beta/delta + 1 directions at 2 delta
    // spacing.
    for (const Cap& c : caps.caps)
      CHECK(static_cast<double>(c.members.size()) <= beta / delta + 1.0);
  }
}

TEST_CASE("cap rescaling covers the image by boundedly many wider tubes") {
  const double delta = 0.01, beta = 0.125;

  SUBCASE("identity at beta = 1") {
    TubeFamily f = fan_family_2d(delta, {0.3});
    f.tubes[0].center = Vec(0.2, -0.1);
    Cap cap;
    cap.omega = f.tubes[0].dir;
    cap.members = {0};
    const CapRescaling r = rescale_cap(f, cap, 1.0);
    REQUIRE(r.spans.size() == 1);
    CHECK(r.spans[0].second - r.spans[0].first == 1);
    CHECK(r.family.delta == doctest::Approx(delta));
    CHECK(r.apply(Vec(0.4, 0.7)) == Vec(0.4, 0.7));
    CHECK(r.family.tubes[0].center.dist(f.tubes[0].center) < 1e-12);
  }

  SUBCASE("rejects directions outside the cap") {
    const TubeFamily f = fan_family_2d(delta, {0.0, 0.5});
    Cap cap;
    cap.omega = Vec(1, 0);
    cap.members = {0, 1};
    CHECK_THROWS(rescale_cap(f, cap, beta));
  }

  SUBCASE("pointwise image containment, dimension 2") {
    Rng rng(91);
    TubeFamily f;
    f.n = 2;
    f.delta = delta;
    Cap cap;
    cap.omega = Vec(1, 0);
    for (int i = 0; i < 6; ++i) {
      const double a = rng.uniform(-beta, beta);
      f.tubes.push_back(make_tube(Vec(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)),
                                  Vec(std::cos(a), std::sin(a)), delta));
      cap.members.push_back(i);
    }
    const CapRescaling r = rescale_cap(f, cap, beta);
    CHECK(r.family.delta == doctest::Approx(delta / beta));

    for (size_t m = 0; m < cap.members.size(); ++m) {
      const Tube& t = f.tubes[m];
      const auto [begin, end] = r.spans[m];
      CHECK(end - begin >= 1);
      CHECK(end - begin <= 4);  // dimensional constant
      const Vec w = t.dir.perp();
      for (int s = 0; s < 2000; ++s) {
        const Vec x =
            t.center + rng.uniform(-0.5, 0.5) * t.dir + (rng.uniform(-1, 1) * delta) * w;
        const Vec y = r.apply(x);
        bool covered = false;
        for (int j = begin; j < end && !covered; ++j)
          covered = tube_contains(r.family.tubes[static_cast<size_t>(j)], y, 1e-9);
        CHECK(covered);
      }
    }
  }

  SUBCASE("pointwise image containment, dimension 3") {
    Rng rng(92);
    TubeFamily f;
    f.n = 3;
    f.delta = delta;
    Cap cap;
    cap.omega = Vec(0, 0, 1);
    for (int i = 0; i < 4; ++i) {
      Vec dir(rng.uniform(-1, 1), rng.uniform(-1, 1), 0);
      dir = (cap.omega + std::tan(rng.uniform(0, beta)) * dir.normalized()).normalized();
      f.tubes.push_back(
          make_tube(Vec(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)),
                    dir, delta));
      cap.members.push_back(i);
    }
    const CapRescaling r = rescale_cap(f, cap, beta);

    for (size_t m = 0; m < cap.members.size(); ++m) {
      const Tube& t = f.tubes[m];
      const auto [begin, end] = r.spans[m];
      CHECK(end - begin <= 4);
      Vec seed = std::abs(t.dir[0]) < 0.9 ? Vec(1, 0, 0) : Vec(0, 1, 0);
      const Vec w1 = (seed - seed.dot(t.dir) * t.dir).normalized();
      const Vec w2 = t.dir.cross(w1);
      for (int s = 0; s < 2000; ++s) {
        const double rho = delta * std::sqrt(rng.uniform());
        const double ph = rng.uniform(0, 2 * kPi);
        const Vec x = t.center + rng.uniform(-0.5, 0.5) * t.dir +
                      (rho * std::cos(ph)) * w1 + (rho * std::sin(ph)) * w2;
        const Vec y = r.apply(x);
        bool covered = false;
        for (int j = begin; j < end && !covered; ++j)
          covered = tube_contains(r.family.tubes[static_cast<size_t>(j)], y, 1e-9);
        CHECK(covered);
      }
    }
  }
}

TEST_CASE("tube index returns a superset of the true hits") {
  Rng rng(17);
  for (int n : {2, 3}) {
    TubeFamily f;
    f.n = n;
    f.delta = 0.02;
    for (int i = 0; i < 40; ++i) {
      Vec dir(n);
      for (int k = 0; k < n; ++k) dir[k] = rng.gaussian();
      Vec center(n);
      for (int k = 0; k < n; ++k) center[k] = rng.uniform(-0.5, 0.5);
      f.tubes.push_back(make_tube(center, dir, f.delta));
    }
    const double margin = 0.01;
    const TubeIndex index(f, margin);
    for (int q = 0; q < 500; ++q) {
      Vec x(n);
      for (int k = 0; k < n; ++k) x[k] = rng.uniform(-0.9, 0.9);
      const auto& cand = index.candidates(x);
      const std::set<int> cset(cand.begin(), cand.end());
      for (int i = 0; i < static_cast<int>(f.tubes.size()); ++i)
        if (tube_contains(f.tubes[static_cast<size_t>(i)], x, margin))
          CHECK(cset.count(i) == 1);
    }
  }
}

TEST_CASE("polynomial evaluation, gradient, degree") {
  // P = x^2 + y^2 - 1.
  MultiPoly P;
  P.n = 2;
  P.terms = {PolyTerm{{2, 0, 0}, Rational(1)}, PolyTerm{{0, 2, 0}, Rational(1)},
             PolyTerm{{0, 0, 0}, Rational(-1)}};
  CHECK(P.degree() == 2);
  CHECK(P.eval(Vec(0.6, 0.8)) == doctest::Approx(0).epsilon(1e-12));
  CHECK(P.eval(Vec(1, 1)) == doctest::Approx(1));
  const Vec g = P.gradient(Vec(0.6, 0.8));
  CHECK(g[0] == doctest::Approx(1.2));
  CHECK(g[1] == doctest::Approx(1.6));

  // Q = x y z - 2 x + 1/2 in three variables.
  MultiPoly Q;
  Q.n = 3;
  Q.terms = {PolyTerm{{1, 1, 1}, Rational(1)}, PolyTerm{{1, 0, 0}, Rational(-2)},
             PolyTerm{{0, 0, 0}, Rational(1, 2)}};
  CHECK(Q.degree() == 3);
  CHECK(Q.eval(Vec(1, 2, 3)) == doctest::Approx(4.5));
  const Vec gq = Q.gradient(Vec(1, 2, 3));
  CHECK(gq[0] == doctest::Approx(4));   // yz - 2
  CHECK(gq[1] == doctest::Approx(3));   // xz
  CHECK(gq[2] == doctest::Approx(2));   // xy
}

TEST_CASE("nearest point on catalog varieties") {
  SUBCASE("hyperplane") {
    const Variety h = Variety::hyperplane(Vec(0, 3), 6);  // the line y = 2
    const NearestPoint np = h.nearest(Vec(5, 7));
    CHECK(np.distance == doctest::Approx(5));
    CHECK(np.point.dist(Vec(5, 2)) < 1e-12);
    CHECK(angle_to_subspace(Vec(1, 0), np.tangent) == doctest::Approx(0));
    CHECK(h.degree() == 1);
    CHECK(h.dimension() == 1);

    const Variety p3 = Variety::hyperplane(Vec(1, 1, 1), 0);
    CHECK(p3.distance(Vec(1, 1, 1)) == doctest::Approx(std::sqrt(3.0)));
    CHECK(p3.nearest(Vec(1, 1, 1)).point.norm() < 1e-12);
  }

  SUBCASE("affine subspace: line in space and a single point") {
    const Variety line = Variety::affine_subspace(Vec(0, 0, 1), {Vec(2, 0, 0)});
    const NearestPoint np = line.nearest(Vec(3, 4, 1));
    CHECK(np.distance == doctest::Approx(4));
    CHECK(np.point.dist(Vec(3, 0, 1)) < 1e-12);
    CHECK(np.tangent.dim() == 1);

    const Variety point = Variety::affine_subspace(Vec(1, 2), {});
    CHECK(point.dimension() == 0);
    CHECK(point.distance(Vec(4, 6)) == doctest::Approx(5));
    CHECK(point.nearest(Vec(4, 6)).tangent.basis.empty());
    // Two defining linear forms vanish at the base point.
    REQUIRE(point.polynomials().size() == 2);
    for (const MultiPoly& q : point.polynomials())
      CHECK(std::abs(q.eval(Vec(1, 2))) < 1e-12);
  }

  SUBCASE("sphere") {
    const Variety s = Variety::sphere(Vec(1, 0), 2);
    CHECK(s.distance(Vec(6, 0)) == doctest::Approx(3));
    CHECK(s.distance(Vec(1.5, 0)) == doctest::Approx(1.5));
    const NearestPoint np = s.nearest(Vec(1, 5));
    CHECK(np.point.dist(Vec(1, 2)) < 1e-12);
    // Tangent is orthogonal to the radial direction.
    CHECK(angle_to_subspace(Vec(0, 1), np.tangent) == doctest::Approx(kPi / 2));
    // Defining polynomial vanishes on the sphere.
    CHECK(std::abs(s.polynomials()[0].eval(Vec(3, 0))) < 1e-12);
    CHECK(std::abs(s.polynomials()[0].eval(Vec(1, -2))) < 1e-12);

    const Variety s3 = Variety::sphere(Vec(0, 0, 0), 1);
    CHECK(s3.distance(Vec(0, 0, 0.25)) == doctest::Approx(0.75));
    CHECK(s3.nearest(Vec(2, 0, 0)).point.dist(Vec(1, 0, 0)) < 1e-12);
  }

  SUBCASE("parabola graph in the plane") {
    const Variety par = Variety::quadric_graph(2, {1, 0, 0});  // y = x^2
    // From (0, 2): critical points solve 2u^3 - 3u = 0.
    CHECK(par.distance(Vec(0, 2)) == doctest::Approx(std::sqrt(7.0) / 2).epsilon(1e-10));
    const NearestPoint np = par.nearest(Vec(0, 2));
    CHECK(std::abs(np.point[1] - 1.5) < 1e-9);
    CHECK(np.point[1] == doctest::Approx(np.point[0] * np.point[0]));
    // Below the vertex the foot is the vertex itself.
    CHECK(par.distance(Vec(0, -1)) == doctest::Approx(1));
    // Tangent at the vertex is horizontal.
    CHECK(angle_to_subspace(Vec(1, 0), par.nearest(Vec(0, -1)).tangent) ==
          doctest::Approx(0).epsilon(1e-9));

    // Degenerate quadric (a = 0) falls back to the exact line formula.
    const Variety lin = Variety::quadric_graph(2, {0, 2, 1});  // y = 2x + 1
    CHECK(lin.distance(Vec(0, 0)) == doctest::Approx(1.0 / std::sqrt(5.0)));
  }

  SUBCASE("paraboloid graph in space") {
    const Variety pb = Variety::quadric_graph(3, {1, 0, 1, 0, 0, 0});  // z = u^2 + v^2
    CHECK(pb.distance(Vec(0, 0, 2)) == doctest::Approx(std::sqrt(7.0) / 2).epsilon(1e-9));
    CHECK(pb.distance(Vec(0, 0, -1)) == doctest::Approx(1).epsilon(1e-9));
    const NearestPoint np = pb.nearest(Vec(3, 0, 0.5));
    // Foot lies on the graph and the connecting segment is normal to it.
    CHECK(np.point[2] ==
          doctest::Approx(np.point[0] * np.point[0] + np.point[1] * np.point[1]));
    const Vec seg = Vec(3, 0, 0.5) - np.point;
    CHECK(angle_to_subspace(seg, np.tangent) == doctest::Approx(kPi / 2).epsilon(1e-7));

    // Saddle sanity: z = u^2 - v^2 from directly above the origin.
    const Variety sd = Variety::quadric_graph(3, {1, 0, -1, 0, 0, 0});
    const NearestPoint ns = sd.nearest(Vec(0, 0, 0.1));
    CHECK(ns.distance <= 0.1 + 1e-9);
  }

  SUBCASE("sampled zero set of a circle") {
    MultiPoly P;
    P.n = 2;
    P.terms = {PolyTerm{{2, 0, 0}, Rational(1)}, PolyTerm{{0, 2, 0}, Rational(1)},
               PolyTerm{{0, 0, 0}, Rational(-1)}};
    const double spacing = 0.02;
    const Variety z = Variety::zero_set(P, Box{Vec(-1.5, -1.5), Vec(1.5, 1.5)}, spacing);
    CHECK(z.degree() == 2);

    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
      const double th = rng.uniform(0, 2 * kPi);
      const double rad = rng.uniform(0.5, 1.4);
      const Vec x(rad * std::cos(th), rad * std::sin(th));
      const NearestPoint np = z.nearest(x);
      CHECK(std::abs(np.distance - std::abs(rad - 1.0)) <= spacing);
      // Cloud tangents come from the exact gradient: orthogonal to radial.
      CHECK(angle_to_subspace(np.point, np.tangent) > kPi / 2 - 1e-6);
    }
    CHECK(std::abs(z.nearest(Vec(5, 0)).distance - 4.0) <= spacing);

    // A polynomial with empty zero set yields an empty cloud.
    MultiPoly Q = P;
    Q.terms[2].coeff = Rational(1);
    const Variety none = Variety::zero_set(Q, Box{Vec(-1, -1), Vec(1, 1)}, 0.05);
    CHECK(none.nearest(Vec(0, 0)).distance == std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("tangency certificates") {
  const double delta = std::pow(2.0, -7);
  const double r = std::pow(delta, 0.9);
  const double threshold = 0.1 * delta / r;

  SUBCASE("tube lying inside its tangent line") {
    const Variety z = Variety::hyperplane(Vec(0, 1), 0);
    const Tube t = make_tube(Vec(0, 0), Vec(1, 0), delta);
    CHECK(tangency_check(t, z, Ball{Vec(0, 0), r}));
  }

  SUBCASE("tilting by half the tolerance keeps tangency") {
    const double th = 0.5 * threshold;
    const Variety z = Variety::hyperplane(Vec(0, 1), 0);
    const Tube t = make_tube(Vec(0, 0), Vec(std::cos(th), std::sin(th)), delta);
    CHECK(tangency_check(t, z, Ball{Vec(0, 0), r}));
  }

  SUBCASE("tilting by ten times the tolerance breaks it") {
    const double th = 10 * threshold;
    const Variety z = Variety::hyperplane(Vec(0, 1), 0);
    const Tube t = make_tube(Vec(0, 0), Vec(std::cos(th), std::sin(th)), delta);
    CHECK_FALSE(tangency_check(t, z, Ball{Vec(0, 0), r}));
  }

  SUBCASE("parallel offset by three deltas breaks it") {
    const Variety z = Variety::hyperplane(Vec(0, 1), 0);
    const Tube t = make_tube(Vec(0, 3 * delta), Vec(1, 0), delta);
    CHECK_FALSE(tangency_check(t, z, Ball{Vec(0, 0), r}));
  }

  SUBCASE("tube tangent to a circle") {
    const Variety z = Variety::sphere(Vec(0, 0), 1);
    const Tube t = make_tube(Vec(0, 1), Vec(1, 0), delta);
    CHECK(tangency_check(t, z, Ball{Vec(0, 1), r}));
    // The same tube against the concentric circle of half the radius fails.
    const Variety inner = Variety::sphere(Vec(0, 0), 0.5);
    CHECK_FALSE(tangency_check(t, inner, Ball{Vec(0, 1), r}));
  }

  SUBCASE("zero-dimensional variety admits no tangent tube") {
    const Variety z = Variety::affine_subspace(Vec(0, 0), {});
    const Tube t = make_tube(Vec(0, 0), Vec(1, 0), delta);
    CHECK_FALSE(tangency_check(t, z, Ball{Vec(0, 0), r}));
  }

  SUBCASE("plane tangency in dimension 3") {
    const Variety z = Variety::hyperplane(Vec(0, 0, 1), 0);
    const Tube flat = make_tube(Vec(0, 0, 0), Vec(1, 0, 0), delta);
    CHECK(tangency_check(flat, z, Ball{Vec(0, 0, 0), r}));
    const double th = 10 * threshold;
    const Tube tilted = make_tube(Vec(0, 0, 0), Vec(std::cos(th), 0, std::sin(th)), delta);
    CHECK_FALSE(tangency_check(tilted, z, Ball{Vec(0, 0, 0), r}));
  }
}

TEST_CASE("neighborhood volumes against closed forms") {
  SUBCASE("slab around a line inside a disc") {
    const Variety z = Variety::hyperplane(Vec(0, 1), 0);
    const double R = 0.5, delta = 0.1;
    // 2 * integral_0^delta 2 sqrt(R^2 - y^2) dy.
    const double exact =
        2 * (delta * std::sqrt(R * R - delta * delta) + R * R * std::asin(delta / R));
    const double est = neighborhood_volume(z, Ball{Vec(0, 0), R}, delta, delta / 10);
    CHECK(est == doctest::Approx(exact).epsilon(0.10));
  }

  SUBCASE("disc around a point") {
    const Variety z = Variety::affine_subspace(Vec(0.3, 0.1), {});
    const double delta = 0.1;
    const double est = neighborhood_volume(z, Ball{Vec(0.3, 0.1), 0.35}, delta, delta / 10);
    CHECK(est == doctest::Approx(kPi * delta * delta).epsilon(0.10));
  }

  SUBCASE("annulus around a circle") {
    const Variety z = Variety::sphere(Vec(0, 0), 1);
    const double delta = 0.05;
    const double est = neighborhood_volume(z, Ball{Vec(0, 0), 2}, delta, delta / 5);
    CHECK(est == doctest::Approx(4 * kPi * delta).epsilon(0.10));
  }

  SUBCASE("slab around a plane inside a ball") {
    const Variety z = Variety::hyperplane(Vec(0, 0, 1), 0);
    const double R = 0.4, delta = 0.1;
    const double exact = kPi * (2 * delta * R * R - 2 * delta * delta * delta / 3);
    const double est = neighborhood_volume(z, Ball{Vec(0, 0, 0), R}, delta, delta / 8);
    CHECK(est == doctest::Approx(exact).epsilon(0.10));
  }

  SUBCASE("rejects a resolution coarser than delta/2") {
    const Variety z = Variety::hyperplane(Vec(0, 1), 0);
    CHECK_THROWS(neighborhood_volume(z, Ball{Vec(0, 0), 0.5}, 0.1, 0.08));
  }
}
