#include "kakeya/generators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "kakeya/rng.hpp"

namespace kakeya {

namespace {

Vec random_in_ball(int n, double radius, Rng& rng) {
  for (;;) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(-1, 1);
    if (x.norm2() <= 1.0) return radius * x;
  }
}

std::vector<Vec> plane_fan(double delta, double phase) {
  std::vector<Vec> dirs;
  const long m = static_cast<long>(std::floor(kPi / (2.0 * delta)));
  for (long j = 0; j < m; ++j) {
    const double a = phase + 2.0 * delta * static_cast<double>(j);
    dirs.push_back(Vec(std::cos(a), std::sin(a)));
  }
  return dirs;
}

// Greedy thinning of a Fibonacci sphere lattice down to pairwise line-angle
// separation >= delta, using a chord-length hash grid so the scan stays
// near-linear.
std::vector<Vec> sphere_net(double delta, Rng& rng) {
  const long N = std::max(16L, static_cast<long>(std::ceil(4.0 / (delta * delta))));
  const double ga = kPi * (3.0 - std::sqrt(5.0));  // golden angle
  const double spin = rng.uniform(0, 2 * kPi);

  std::vector<Vec> kept;
  const double cell = delta;  // separation delta in angle implies chord >= 2 sin(delta/2)
  std::unordered_map<long long, std::vector<int>> grid;
  auto key_of = [&](const Vec& v) {
    long long key = 0;
    for (int i = 0; i < 3; ++i)
      key = key * 4096 + (static_cast<long long>(std::floor(v[i] / cell)) + 1024);
    return key;
  };

  for (long s = 0; s < N; ++s) {
    const double z = 1.0 - (2.0 * static_cast<double>(s) + 1.0) / static_cast<double>(N);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = ga * static_cast<double>(s) + spin;
    Vec v(rho * std::cos(phi), rho * std::sin(phi), z);
    if (v[2] < 0) v = -v;  // antipodal identification: keep one hemisphere

    bool clear = true;
    // A line angle below delta forces a chord below delta (to either antipode),
    // so scanning the neighboring cells of v and -v finds every conflict.
    for (const Vec& probe : {v, -v}) {
      for (int dx = -1; dx <= 1 && clear; ++dx)
        for (int dy = -1; dy <= 1 && clear; ++dy)
          for (int dz = -1; dz <= 1 && clear; ++dz) {
            Vec shifted = probe;
            shifted[0] += dx * cell;
            shifted[1] += dy * cell;
            shifted[2] += dz * cell;
            const auto it = grid.find(key_of(shifted));
            if (it == grid.end()) continue;
            for (int idx : it->second)
              if (line_angle(kept[static_cast<size_t>(idx)], v) < delta) {
                clear = false;
                break;
              }
          }
      if (!clear) break;
    }
    if (!clear) continue;
    grid[key_of(v)].push_back(static_cast<int>(kept.size()));
    grid[key_of(-v)].push_back(static_cast<int>(kept.size()));
    kept.push_back(v);
  }
  return kept;
}

std::vector<Vec> pick_directions(const GeneratorSpec& spec, Rng& rng) {
  std::vector<Vec> dirs = separated_directions(spec.n, spec.delta, spec.seed);
  if (spec.count > 0) {
    if (static_cast<size_t>(spec.count) > dirs.size())
      throw std::invalid_argument("generate: count exceeds the maximal separated set (" +
                                  std::to_string(dirs.size()) + ")");
    for (size_t i = dirs.size(); i > 1; --i)
      std::swap(dirs[i - 1], dirs[rng.uniform_int(0, static_cast<long>(i) - 1)]);
    dirs.resize(static_cast<size_t>(spec.count));
  }
  return dirs;
}

Vec in_plane_dir(double angle) { return Vec(std::cos(angle), std::sin(angle), 0.0); }

TubeFamily build_tangent(const GeneratorSpec& spec, Rng& rng) {
  const Variety target = tangent_target(spec);
  const Ball B = tangency_ball(spec);
  const double d = spec.delta, r = B.radius;
  const int count = spec.count > 0 ? spec.count : 20;
  TubeFamily f;
  f.n = spec.n;
  f.delta = d;

  if (spec.variety == "line") {
    for (int i = 0; i < count; ++i) {
      Tube t;
      t.center = Vec(rng.uniform(-0.8 * r, 0.8 * r), rng.uniform(-d / 2, d / 2));
      t.dir = Vec(1, 0);
      t.radius = d;
      f.tubes.push_back(t);
    }
  } else if (spec.variety == "plane") {
    // Directions exactly inside the plane, 2 delta apart in angle.
    const long m = static_cast<long>(std::floor(kPi / (2.0 * d)));
    const double phase = rng.uniform(0, kPi);
    for (int i = 0; i < count; ++i) {
      Tube t;
      t.dir = in_plane_dir(phase + 2.0 * d * static_cast<double>(rng.uniform_int(0, m - 1)));
      const Vec xy = random_in_ball(2, 0.8 * r, rng);
      t.center = Vec(xy[0], xy[1], rng.uniform(-d / 2, d / 2));
      t.radius = d;
      f.tubes.push_back(t);
    }
  } else if (spec.variety == "circle") {
    // Tangent lines near the top of the unit circle.
    for (int i = 0; i < count; ++i) {
      const double phi = kPi / 2 + rng.uniform(-0.5 * r, 0.5 * r);
      const Vec z(std::cos(phi), std::sin(phi));
      Tube t;
      t.center = z + rng.uniform(-d / 4, d / 4) * z;
      t.dir = Vec(-std::sin(phi), std::cos(phi));
      t.radius = d;
      f.tubes.push_back(t);
    }
  } else if (spec.variety == "sphere") {
    for (int i = 0; i < count; ++i) {
      const Vec pole(0, 0, 1);
      const Vec off = random_in_ball(2, 0.5 * r, rng);
      Vec z = Vec(off[0], off[1], 0) + pole;
      z = z.normalized();
      const Vec t1 = Vec(1, 0, 0) - z[0] * z, t2v = z.cross(t1.normalized());
      const double a = rng.uniform(0, kPi);
      Tube t;
      t.dir = (std::cos(a) * t1.normalized() + std::sin(a) * t2v).normalized();
      t.center = z + rng.uniform(-d / 4, d / 4) * z;
      t.radius = d;
      f.tubes.push_back(t);
    }
  } else {
    throw std::invalid_argument("generate: unknown tangency target '" + spec.variety + "'");
  }

  for (const Tube& t : f.tubes)
    if (!tangency_check(t, target, B))
      throw std::runtime_error("generate: constructed tube fails its tangency certificate");
  return f;
}

}  // namespace

std::string to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::Bush: return "bush";
    case FamilyKind::RandomSeparated: return "random_separated";
    case FamilyKind::ParallelSlab: return "parallel_slab";
    case FamilyKind::TangentToVariety: return "tangent_to_variety";
    case FamilyKind::TwoCapTransversal: return "two_cap_transversal";
  }
  throw std::logic_error("to_string(FamilyKind): unknown kind");
}

FamilyKind family_kind_from_string(const std::string& s) {
  if (s == "bush") return FamilyKind::Bush;
  if (s == "random_separated") return FamilyKind::RandomSeparated;
  if (s == "parallel_slab") return FamilyKind::ParallelSlab;
  if (s == "tangent_to_variety") return FamilyKind::TangentToVariety;
  if (s == "two_cap_transversal") return FamilyKind::TwoCapTransversal;
  throw std::invalid_argument("unknown family kind '" + s + "'");
}

std::vector<Vec> separated_directions(int n, double delta, std::uint64_t seed) {
  if (!(delta > 0) || delta > 0.1)
    throw std::invalid_argument("separated_directions: delta must lie in (0, 1/10]");
  Rng rng(seed);
  if (n == 2) return plane_fan(delta, rng.uniform(0, kPi));
  if (n == 3) return sphere_net(delta, rng);
  throw std::invalid_argument("separated_directions: dimension must be 2 or 3");
}

Variety tangent_target(const GeneratorSpec& spec) {
  if (spec.variety == "line") return Variety::hyperplane(Vec(0.0, 1.0), 0.0);
  if (spec.variety == "plane") return Variety::hyperplane(Vec(0.0, 0.0, 1.0), 0.0);
  if (spec.variety == "circle") return Variety::sphere(Vec(0.0, 0.0), 1.0);
  if (spec.variety == "sphere") return Variety::sphere(Vec(0.0, 0.0, 0.0), 1.0);
  throw std::invalid_argument("tangent_target: unknown variety '" + spec.variety + "'");
}

Ball tangency_ball(const GeneratorSpec& spec) {
  Ball B;
  B.radius = spec.ball_radius > 0 ? spec.ball_radius : std::pow(spec.delta, 0.9);
  if (spec.variety == "circle")
    B.center = Vec(0.0, 1.0);
  else if (spec.variety == "sphere")
    B.center = Vec(0.0, 0.0, 1.0);
  else
    B.center = Vec(spec.n);
  return B;
}

TubeFamily generate(const GeneratorSpec& spec) {
  if (!(spec.delta > 0) || spec.delta > 0.1)
    throw std::invalid_argument("generate: delta must lie in (0, 1/10]");
  if (spec.n != 2 && spec.n != 3)
    throw std::invalid_argument("generate: dimension must be 2 or 3");
  Rng rng(spec.seed);
  TubeFamily f;
  f.n = spec.n;
  f.delta = spec.delta;

  switch (spec.kind) {
    case FamilyKind::Bush: {
      const Vec apex = random_in_ball(spec.n, 0.2, rng);
      for (const Vec& dir : pick_directions(spec, rng)) {
        Tube t;
        t.center = apex;
        t.dir = dir;
        t.radius = spec.delta;
        f.tubes.push_back(t);
      }
      break;
    }
    case FamilyKind::RandomSeparated: {
      for (const Vec& dir : pick_directions(spec, rng)) {
        Tube t;
        t.center = random_in_ball(spec.n, 1.0, rng);
        t.dir = dir;
        t.radius = spec.delta;
        f.tubes.push_back(t);
      }
      break;
    }
    case FamilyKind::ParallelSlab: {
      const int count = spec.count > 0 ? spec.count : 10;
      Vec dir(spec.n), step(spec.n);
      dir[0] = 1.0;
      step[1] = 2.0 * spec.delta;
      for (int j = 0; j < count; ++j) {
        Tube t;
        t.center = static_cast<double>(j) * step;
        t.dir = dir;
        t.radius = spec.delta;
        f.tubes.push_back(t);
      }
      if (f.tubes.size() >= 2 && direction_separated(f))
        throw std::runtime_error("generate: parallel slab unexpectedly separated");
      validate_family(f);
      return f;  // negative control: skip the separation contract below
    }
    case FamilyKind::TangentToVariety: {
      f = build_tangent(spec, rng);
      validate_family(f);
      return f;  // tangency is its contract; directions may coincide
    }
    case FamilyKind::TwoCapTransversal: {
      const int per_group = std::max(1, (spec.count > 0 ? spec.count : 20) / 2);
      Vec mean[2];
      for (int g = 0; g < 2; ++g) {
        Vec sum(spec.n);
        for (int i = 0; i < per_group; ++i) {
          const double a = rng.uniform(-kPi / 16, kPi / 16);
          Vec dir(spec.n);
          if (spec.n == 2) {
            const double base = g == 0 ? 0.0 : kPi / 2;
            dir = Vec(std::cos(base + a), std::sin(base + a));
          } else {
            const double b = rng.uniform(-kPi / 16, kPi / 16);
            dir = g == 0 ? Vec(std::cos(a) * std::cos(b), std::sin(a), std::cos(a) * std::sin(b))
                         : Vec(std::sin(a), std::cos(a) * std::cos(b), std::cos(a) * std::sin(b));
            dir = dir.normalized();
          }
          Tube t;
          t.center = random_in_ball(spec.n, 0.25, rng);
          t.dir = dir;
          t.radius = spec.delta;
          f.tubes.push_back(t);
          sum += dir;
        }
        mean[g] = sum.normalized();
      }
      if (line_angle(mean[0], mean[1]) < kPi / 2 - kPi / 8)
        throw std::runtime_error("generate: transversal groups lost orthogonality");
      validate_family(f);
      return f;
    }
  }

  validate_family(f);
  if (!direction_separated(f))
    throw std::runtime_error("generate: constructed family violates direction separation");
  return f;
}

}  // namespace kakeya
