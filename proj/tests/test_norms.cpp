#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "kakeya/generators.hpp"
#include "kakeya/norms.hpp"
#include "kakeya/rng.hpp"

using namespace kakeya;

namespace {

Tube make_tube(const Vec& center, const Vec& dir, double radius) {
  Tube t;
  t.center = center;
  t.dir = dir.normalized();
  t.radius = radius;
  return t;
}

TubeFamily family_of(int n, double delta, const std::vector<Tube>& tubes) {
  TubeFamily f;
  f.n = n;
  f.delta = delta;
  f.tubes = tubes;
  validate_family(f);
  return f;
}

// Independent re-implementation of the per-cap p-mass quadrature used by mu:
// midpoint grid over the ball's bounding box, counts by direct containment.
double cap_mass_oracle(const std::vector<Tube>& members, const Ball& B, double p, double res) {
  const int n = B.center.dim();
  Vec lo = B.center, hi = B.center;
  for (int a = 0; a < n; ++a) {
    lo[a] -= B.radius;
    hi[a] += B.radius;
  }
  std::array<int, 3> steps{1, 1, 1};
  std::array<double, 3> step{0, 0, 0};
  double cellvol = 1;
  for (int a = 0; a < n; ++a) {
    steps[static_cast<size_t>(a)] =
        std::max(1, static_cast<int>(std::ceil((hi[a] - lo[a]) / res - 1e-12)));
    step[static_cast<size_t>(a)] = (hi[a] - lo[a]) / steps[static_cast<size_t>(a)];
    cellvol *= step[static_cast<size_t>(a)];
  }
  double mass = 0;
  Vec x(n);
  for (int i = 0; i < steps[0]; ++i) {
    x[0] = lo[0] + (i + 0.5) * step[0];
    for (int j = 0; j < steps[1]; ++j) {
      x[1] = lo[1] + (j + 0.5) * step[1];
      for (int l = 0; l < steps[2]; ++l) {
        if (n == 3) x[2] = lo[2] + (l + 0.5) * step[2];
        if (!B.contains(x)) continue;
        int c = 0;
        for (const Tube& t : members)
          if (tube_contains(t, x)) ++c;
        if (c > 0) mass += std::pow(static_cast<double>(c), p) * cellvol;
      }
    }
  }
  return mass;
}

double res_for(const GeneratorSpec& s) { return s.delta / 4.0; }

}  // namespace

TEST_CASE("lp norm of a single tube matches its volume") {
  const double delta = 1.0 / 16.0;
  const Tube t = make_tube(Vec(0.0, 0.0), Vec(std::cos(0.3), std::sin(0.3)), delta);
  const TubeFamily f = family_of(2, delta, {t});
  const Region U = Region::box(family_bounding_box(f));
  const double res = delta / 32.0;
  const double volume = tube_volume(2, delta);
  for (double p : {1.0, 1.5, 2.0}) {
    CAPTURE(p);
    const double v = lp_norm(f, p, U, res);
    CHECK(v == doctest::Approx(std::pow(volume, 1.0 / p)).epsilon(0.02));
  }

  // Cross-check the membership predicate against rejection sampling.
  const Box bb = family_bounding_box(f);
  Rng rng(99);
  long hits = 0;
  const long samples = 100000;
  for (long s = 0; s < samples; ++s) {
    Vec x(2);
    for (int a = 0; a < 2; ++a) x[a] = rng.uniform(bb.lo[a], bb.hi[a]);
    if (tube_contains(t, x)) ++hits;
  }
  const double mc = bb.volume() * static_cast<double>(hits) / static_cast<double>(samples);
  CHECK(mc == doctest::Approx(volume).epsilon(0.02));
}

TEST_CASE("lp norm scales and adds exactly on the shared grid") {
  const double delta = 1.0 / 32.0;
  const Tube t = make_tube(Vec(0.1, 0.0), Vec(1.0, 0.2), delta);
  const TubeFamily one = family_of(2, delta, {t});
  const TubeFamily two = family_of(2, delta, {t, t});
  const Region U = Region::box(family_bounding_box(one));
  const double res = delta / 4.0;
  for (double p : {1.0, 1.5, 2.0}) {
    CAPTURE(p);
    const double v1 = lp_norm(one, p, U, res);
    const double v2 = lp_norm(two, p, U, res);
    CHECK(v2 == doctest::Approx(2.0 * v1).epsilon(1e-9));  // counts double pointwise
  }

  // Disjoint supports: p-th powers add up to summation order.
  const Tube far = make_tube(Vec(0.1, 0.7), Vec(1.0, 0.2), delta);
  const TubeFamily a = family_of(2, delta, {t});
  const TubeFamily b = family_of(2, delta, {far});
  const TubeFamily ab = family_of(2, delta, {t, far});
  const Region W = Region::box(family_bounding_box(ab));
  for (double p : {1.0, 2.0}) {
    CAPTURE(p);
    const double va = std::pow(lp_norm(a, p, W, res), p);
    const double vb = std::pow(lp_norm(b, p, W, res), p);
    const double vab = std::pow(lp_norm(ab, p, W, res), p);
    CHECK(vab == doctest::Approx(va + vb).epsilon(1e-12));
  }

  CHECK(lp_norm(TubeFamily{2, delta, {}}, 2.0, U, res) == 0.0);
  CHECK_THROWS(lp_norm(one, 2.0, U, delta));        // resolution above delta/4
  CHECK_THROWS(lp_norm(one, 0.5, U, res));          // p below 1
}

TEST_CASE("mu discards exactly A caps and keeps the next mass") {
  const double delta = 1.0 / 32.0;
  const double p = 2.0;
  const double res = delta / 4.0;
  const Vec d1(1.0, 0.0);
  const Vec d2(std::cos(kPi / 4), std::sin(kPi / 4));
  const Vec d3(0.0, 1.0);
  // Repeated tubes give the three caps distinct masses 9u > 4u > u.
  std::vector<Tube> tubes;
  for (int i = 0; i < 3; ++i) tubes.push_back(make_tube(Vec(0.0, 0.0), d1, delta));
  for (int i = 0; i < 2; ++i) tubes.push_back(make_tube(Vec(0.0, 0.0), d2, delta));
  tubes.push_back(make_tube(Vec(0.0, 0.0), d3, delta));
  const TubeFamily f = family_of(2, delta, tubes);
  const CapDecomposition caps = cap_decompose(f, 0.3);
  REQUIRE(caps.caps.size() == 3);
  const Ball B{Vec(0.0, 0.0), 0.3};

  // Independent per-cap masses on the same grid.
  std::vector<double> masses;
  for (const Cap& c : caps.caps) {
    std::vector<Tube> members;
    for (int idx : c.members) members.push_back(f.tubes[static_cast<size_t>(idx)]);
    masses.push_back(cap_mass_oracle(members, B, p, res));
  }
  std::sort(masses.begin(), masses.end(), std::greater<>());
  REQUIRE(masses[0] > masses[1]);
  REQUIRE(masses[1] > masses[2]);
  REQUIRE(masses[2] > 0);

  BroadParams params;
  params.k = 2;
  params.p = p;
  params.beta = 0.3;
  params.A = 1;
  CHECK(mu(f, caps, B, params, res) == doctest::Approx(masses[1]).epsilon(1e-12));
  params.A = 2;
  CHECK(mu(f, caps, B, params, res) == doctest::Approx(masses[2]).epsilon(1e-12));
  params.A = 3;
  CHECK(mu(f, caps, B, params, res) == 0.0);
}

TEST_CASE("broad norm is monotone in A and dominated by the lp norm") {
  GeneratorSpec spec;
  spec.kind = FamilyKind::RandomSeparated;
  spec.n = 2;
  spec.delta = 1.0 / 32.0;
  spec.count = 15;
  spec.seed = 5;
  const TubeFamily f = generate(spec);
  const double res = spec.delta / 4.0;
  const Box snapped = make_ball_cover(family_bounding_box(f), f.n, f.delta).bounds;
  const Region U = Region::box(snapped);

  BroadParams params;
  params.k = 2;
  params.p = 2.0;
  params.beta = 0.25;
  const double lp = lp_norm(f, params.p, U, res);
  double previous = std::numeric_limits<double>::infinity();
  for (int A : {1, 2, 3}) {
    CAPTURE(A);
    params.A = A;
    const NormResult r = broad_norm(f, U, params, res, true);
    CHECK(r.value <= lp * (1 + 1e-12));
    CHECK(r.value <= previous * (1 + 1e-12));
    CHECK(r.n_balls > 0);
    CHECK(r.per_ball_mu.size() == make_ball_cover(snapped, f.n, f.delta).centers.size());
    previous = r.value;
  }

  // A quasi-uniform candidate net can only help the minimum.
  params.A = 1;
  const double plain = broad_norm(f, U, params, res).value;
  params.candidates = candidate_subspaces(cap_decompose(f, params.beta), params.k, f.n, 16, 7);
  const double with_net = broad_norm(f, U, params, res).value;
  CHECK(with_net <= plain * (1 + 1e-12));

  BroadParams bad = params;
  bad.k = 5;
  CHECK_THROWS(broad_norm(f, U, bad, res));
  bad = params;
  bad.A = 0;
  CHECK_THROWS(broad_norm(f, U, bad, res));
}

TEST_CASE("broad norm vanishes identically for tangent families") {
  // Plane case: directions inside a line's direction space.
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    CAPTURE(seed);
    GeneratorSpec spec;
    spec.kind = FamilyKind::TangentToVariety;
    spec.n = 2;
    spec.delta = 1.0 / 128.0;
    spec.count = 10;
    spec.seed = seed;
    spec.variety = "line";
    const TubeFamily f = generate(spec);
    BroadParams params;
    params.k = 2;
    params.A = 1;
    params.p = 2.0;
    params.beta = 0.25;
    const Region U = Region::ball(tangency_ball(spec));
    const NormResult r = broad_norm(f, U, params, res_for(spec));
    CHECK(r.value == 0.0);
  }

  // Space case: directions inside a plane, k = 3 plane candidates.
  for (std::uint64_t seed : {1ULL, 2ULL}) {
    CAPTURE(seed);
    GeneratorSpec spec;
    spec.kind = FamilyKind::TangentToVariety;
    spec.n = 3;
    spec.delta = 1.0 / 128.0;
    spec.count = 10;
    spec.seed = seed;
    spec.variety = "plane";
    const TubeFamily f = generate(spec);
    BroadParams params;
    params.k = 3;
    params.A = 1;
    params.p = 2.0;
    params.beta = 0.25;
    const Region U = Region::ball(tangency_ball(spec));
    const NormResult r = broad_norm(f, U, params, res_for(spec));
    CHECK(r.value == 0.0);
  }
}

TEST_CASE("norm comparison lemmas hold with quadrature slack") {
  const double delta = 1.0 / 32.0;
  const double res = delta / 4.0;
  GeneratorSpec spec;
  spec.kind = FamilyKind::RandomSeparated;
  spec.n = 2;
  spec.delta = delta;
  spec.count = 12;
  spec.seed = 21;
  const TubeFamily f1 = generate(spec);
  spec.seed = 22;
  const TubeFamily f2 = generate(spec);
  TubeFamily both = f1;
  both.tubes.insert(both.tubes.end(), f2.tubes.begin(), f2.tubes.end());
  validate_family(both);

  const Box snapped = make_ball_cover(family_bounding_box(both), 2, delta).bounds;
  const Region U = Region::box(snapped);

  for (double p : {1.5, 2.0}) {
    CAPTURE(p);
    BroadParams params;
    params.k = 2;
    params.A = 1;
    params.p = p;
    params.beta = 0.25;

    // Subadditivity in the region argument (boxes whose union is a box).
    Box left = snapped, right = snapped;
    left.hi[0] = 0.45 * snapped.lo[0] + 0.55 * snapped.hi[0];
    right.lo[0] = 0.55 * snapped.lo[0] + 0.45 * snapped.hi[0];
    REQUIRE(left.hi[0] > right.lo[0]);  // overlapping strip, union is the whole box
    {
      const double whole = broad_norm(f1, U, params, res).value;
      const double l = broad_norm(f1, Region::box(left), params, res).value;
      const double r = broad_norm(f1, Region::box(right), params, res).value;
      const double refined = broad_norm(f1, U, params, res / 2).value;
      const double q = 3.0 * std::abs(std::pow(whole, p) - std::pow(refined, p));
      CHECK(std::pow(whole, p) <= std::pow(l, p) + std::pow(r, p) + q + 1e-12);
    }

    // Triangle inequality: common caps, common candidates, doubled A.
    {
      const CapDecomposition caps = cap_decompose(both, params.beta);
      CapDecomposition caps1, caps2;
      caps1.beta = caps2.beta = caps.beta;
      const int n1 = static_cast<int>(f1.tubes.size());
      for (const Cap& c : caps.caps) {
        Cap a, b;
        a.omega = b.omega = c.omega;
        for (int m : c.members)
          (m < n1 ? a.members : b.members).push_back(m < n1 ? m : m - n1);
        caps1.caps.push_back(a);
        caps2.caps.push_back(b);
      }
      BroadParams common = params;
      common.candidates = candidate_subspaces(caps, params.k, 2);
      BroadParams doubled = common;
      doubled.A = 2 * common.A;
      const double u = broad_norm(both, U, doubled, res, false, &caps).value;
      const double v1 = broad_norm(f1, U, common, res, false, &caps1).value;
      const double v2 = broad_norm(f2, U, common, res, false, &caps2).value;
      const double refined = broad_norm(both, U, doubled, res / 2, false, &caps).value;
      const double q = 3.0 * std::abs(std::pow(u, p) - std::pow(refined, p));
      CHECK(std::pow(u, p) <=
            std::pow(2.0, p - 1) * (std::pow(v1, p) + std::pow(v2, p)) + q + 1e-12);
    }
  }

  // Log-convexity: p = 2 sits between 3/2 and 3 with theta = 1/2.
  {
    BroadParams base;
    base.k = 2;
    base.A = 1;
    base.beta = 0.25;
    base.candidates = candidate_subspaces(cap_decompose(f1, base.beta), base.k, 2);
    BroadParams p0 = base, p1 = base, mid = base;
    p0.p = 1.5;
    p1.p = 3.0;
    mid.p = 2.0;
    mid.A = 2;
    const double v0 = broad_norm(f1, U, p0, res).value;
    const double v1 = broad_norm(f1, U, p1, res).value;
    const double vm = broad_norm(f1, U, mid, res).value;
    const double refined = broad_norm(f1, U, mid, res / 2).value;
    const double q = 3.0 * std::abs(vm * vm - refined * refined);
    CHECK(vm * vm <= v0 * v1 + q + 1e-12);
  }
}

TEST_CASE("klinear functional matches the crossing-square oracle") {
  const double delta = 1.0 / 32.0;
  const double res = delta / 16.0;
  const TubeFamily cross = family_of(2, delta,
                                     {make_tube(Vec(0.0, 0.0), Vec(1.0, 0.0), delta),
                                      make_tube(Vec(0.0, 0.0), Vec(0.0, 1.0), delta)});
  const CapDecomposition caps = cap_decompose(cross, 0.25);
  REQUIRE(caps.caps.size() == 2);
  // Inflating a delta-tube by 2delta gives halfwidth 3delta, so the two
  // perpendicular neighborhoods overlap in a 6delta x 6delta square and the
  // bilinear mass is its area: the functional is (36 delta^2)^{1/2}.
  const double v = klinear_rhs(cross, caps, 2, 2.0, res);
  CHECK(v == doctest::Approx(6.0 * delta).epsilon(0.03));

  // Parallel caps are never transversal: empty tuple set.
  const TubeFamily parallel = family_of(2, delta,
                                        {make_tube(Vec(0.0, 0.0), Vec(1.0, 0.0), delta),
                                         make_tube(Vec(0.0, 0.1), Vec(1.0, 0.0), delta)});
  CHECK(klinear_rhs(parallel, cap_decompose(parallel, 0.25), 2, 2.0, res) == 0.0);
}

TEST_CASE("broad norm against the transversal functional") {
  GeneratorSpec spec;
  spec.kind = FamilyKind::TwoCapTransversal;
  spec.n = 2;
  spec.delta = 1.0 / 32.0;
  spec.count = 16;
  spec.seed = 31;
  const TubeFamily f = generate(spec);
  const double res = spec.delta / 4.0;
  BroadParams params;
  params.k = 2;
  params.A = 1;
  params.p = 2.0;
  params.beta = 0.25;
  const Region U = Region::box(make_ball_cover(family_bounding_box(f), 2, f.delta).bounds);
  const double broad = broad_norm(f, U, params, res).value;
  const double rhs = klinear_rhs(f, cap_decompose(f, params.beta), params.k, params.p, res);
  REQUIRE(rhs > 0);
  // Calibration constant frozen from the first recorded run of this exact
  // configuration; the broad mass of a genuinely transversal family stays
  // within a dimensional factor of the k-linear functional.
  CHECK(broad <= 2.0 * rhs);
  CHECK(broad > 0);
}
