#include "kakeya/norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "kakeya/rng.hpp"

namespace kakeya {

namespace {

void check_resolution(double delta, double resolution) {
  if (!(resolution > 0)) throw std::invalid_argument("norms: resolution must be positive");
  if (resolution > delta / 4 + 1e-15)
    throw std::invalid_argument("norms: resolution must be <= delta/4");
}

// Per-tile quadrature: a midpoint subgrid whose pitch divides the tile side,
// so the union of all tile grids is one global midpoint grid.
struct TileGrid {
  int per_axis = 1;
  double step = 0;
  double cellvol = 0;
};

TileGrid tile_grid(double h, double resolution, int n) {
  TileGrid g;
  g.per_axis = std::max(1, static_cast<int>(std::ceil(h / resolution - 1e-12)));
  g.step = h / g.per_axis;
  g.cellvol = std::pow(g.step, n);
  return g;
}

// Visit the subgrid points of the axis cube with low corner `lo`.
template <typename F>
void for_tile_points(const Vec& lo, int n, const TileGrid& g, F&& fn) {
  Vec x(n);
  if (n == 2) {
    for (int i = 0; i < g.per_axis; ++i) {
      x[0] = lo[0] + (i + 0.5) * g.step;
      for (int j = 0; j < g.per_axis; ++j) {
        x[1] = lo[1] + (j + 0.5) * g.step;
        fn(x);
      }
    }
  } else {
    for (int i = 0; i < g.per_axis; ++i) {
      x[0] = lo[0] + (i + 0.5) * g.step;
      for (int j = 0; j < g.per_axis; ++j) {
        x[1] = lo[1] + (j + 0.5) * g.step;
        for (int l = 0; l < g.per_axis; ++l) {
          x[2] = lo[2] + (l + 0.5) * g.step;
          fn(x);
        }
      }
    }
  }
}

int count_tubes_at(const TubeFamily& f, const TubeIndex& idx, const Vec& x, double inflate) {
  int c = 0;
  for (int t : idx.candidates(x))
    if (tube_contains(f.tubes[static_cast<size_t>(t)], x, inflate)) ++c;
  return c;
}

using Mask = std::vector<std::uint64_t>;

bool mask_test(const Mask& m, size_t bit) { return (m[bit / 64] >> (bit % 64)) & 1u; }

void mask_set(Mask& m, size_t bit) { m[bit / 64] |= std::uint64_t(1) << (bit % 64); }

Mask mask_or(const Mask& a, const Mask& b) {
  Mask r(a.size());
  for (size_t w = 0; w < a.size(); ++w) r[w] = a[w] | b[w];
  return r;
}

// One exclusion mask per candidate subspace: bit j set when cap j sits within
// angle beta of the subspace (measured from the nearest point of the cap).
std::vector<Mask> exclusion_masks(const CapDecomposition& caps,
                                  const std::vector<Subspace>& candidates) {
  const size_t n_caps = caps.caps.size();
  const size_t words = (n_caps + 63) / 64;
  std::vector<Mask> masks;
  masks.reserve(candidates.size());
  for (const Subspace& v : candidates) {
    Mask m(words, 0);
    for (size_t j = 0; j < n_caps; ++j)
      if (cap_angle_to_subspace(caps.caps[j].omega, caps.beta, v) <= caps.beta) mask_set(m, j);
    masks.push_back(std::move(m));
  }
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
  return masks;
}

// All unions of exactly min(A, #masks) distinct exclusion masks. Unions of
// fewer masks are dominated: a larger union excludes more caps and can only
// lower the surviving maximum, and tuples may repeat a subspace, so the
// minimum over tuples of length A is attained on these.
std::vector<Mask> tuple_unions(const std::vector<Mask>& masks, int A, size_t n_caps) {
  std::vector<Mask> out;
  if (masks.empty()) {
    out.emplace_back((n_caps + 63) / 64, 0);  // no candidates: nothing excluded
    return out;
  }
  const int take = std::min<int>(A, static_cast<int>(masks.size()));
  std::vector<int> pick(static_cast<size_t>(take));
  Mask acc(masks[0].size(), 0);
  // Depth-first enumeration of combinations.
  struct Frame {
    int depth;
    int start;
    Mask acc;
  };
  std::vector<Frame> stack;
  stack.push_back({0, 0, acc});
  while (!stack.empty()) {
    Frame fr = std::move(stack.back());
    stack.pop_back();
    if (fr.depth == take) {
      out.push_back(std::move(fr.acc));
      continue;
    }
    for (int i = fr.start; i + (take - fr.depth) <= static_cast<int>(masks.size()); ++i)
      stack.push_back({fr.depth + 1, i + 1, mask_or(fr.acc, masks[static_cast<size_t>(i)])});
    if (out.size() > 500000) throw std::runtime_error("norms: candidate tuple explosion");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// min over the precomputed unions of the largest surviving cap mass.
double select_mu(const std::vector<double>& cap_mass, const std::vector<int>& order_desc,
                 const std::vector<Mask>& unions) {
  double best = std::numeric_limits<double>::infinity();
  for (const Mask& u : unions) {
    double val = 0;
    for (int j : order_desc) {
      if (!mask_test(u, static_cast<size_t>(j))) {
        val = cap_mass[static_cast<size_t>(j)];
        break;
      }
    }
    best = std::min(best, val);
    if (best == 0) break;
  }
  return best;
}

std::vector<int> mass_order(const std::vector<double>& cap_mass) {
  std::vector<int> order(cap_mass.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return cap_mass[static_cast<size_t>(a)] > cap_mass[static_cast<size_t>(b)]; });
  return order;
}

std::vector<int> cap_of_tube(const CapDecomposition& caps, size_t n_tubes) {
  std::vector<int> cap_of(n_tubes, -1);
  for (size_t c = 0; c < caps.caps.size(); ++c)
    for (int t : caps.caps[c].members) cap_of[static_cast<size_t>(t)] = static_cast<int>(c);
  return cap_of;
}

void check_broad_params(const TubeFamily& f, const BroadParams& params) {
  if (params.k < 2 || params.k > f.n)
    throw std::invalid_argument("norms: broadness parameter k must lie in [2, n]");
  if (params.A < 1) throw std::invalid_argument("norms: A must be >= 1");
  if (!(params.p >= 1)) throw std::invalid_argument("norms: p must be >= 1");
  if (!(params.beta > 0)) throw std::invalid_argument("norms: beta must be positive");
}

}  // namespace

Box BallCover::tile(size_t i) const {
  Vec lo = centers[i], hi = centers[i];
  for (int a = 0; a < n; ++a) {
    lo[a] -= h / 2;
    hi[a] += h / 2;
  }
  return Box{lo, hi};
}

BallCover make_ball_cover(const Box& region, int n, double delta) {
  if (!(delta > 0)) throw std::invalid_argument("ball cover: delta must be positive");
  if (n != 2 && n != 3) throw std::invalid_argument("ball cover: dimension must be 2 or 3");
  BallCover cover;
  cover.n = n;
  cover.delta = delta;
  cover.h = 2.0 * delta / std::sqrt(static_cast<double>(n));
  std::array<long, 3> first{}, count{};
  for (int a = 0; a < n; ++a) {
    first[static_cast<size_t>(a)] = static_cast<long>(std::floor(region.lo[a] / cover.h));
    const long last = static_cast<long>(std::floor(region.hi[a] / cover.h));
    count[static_cast<size_t>(a)] = last - first[static_cast<size_t>(a)] + 1;
  }
  Vec lo(n), hi(n);
  for (int a = 0; a < n; ++a) {
    lo[a] = static_cast<double>(first[static_cast<size_t>(a)]) * cover.h;
    hi[a] = static_cast<double>(first[static_cast<size_t>(a)] + count[static_cast<size_t>(a)]) * cover.h;
  }
  cover.bounds = Box{lo, hi};
  Vec c(n);
  if (n == 2) {
    for (long i = 0; i < count[0]; ++i)
      for (long j = 0; j < count[1]; ++j) {
        c[0] = (static_cast<double>(first[0] + i) + 0.5) * cover.h;
        c[1] = (static_cast<double>(first[1] + j) + 0.5) * cover.h;
        cover.centers.push_back(c);
      }
  } else {
    for (long i = 0; i < count[0]; ++i)
      for (long j = 0; j < count[1]; ++j)
        for (long l = 0; l < count[2]; ++l) {
          c[0] = (static_cast<double>(first[0] + i) + 0.5) * cover.h;
          c[1] = (static_cast<double>(first[1] + j) + 0.5) * cover.h;
          c[2] = (static_cast<double>(first[2] + l) + 0.5) * cover.h;
          cover.centers.push_back(c);
        }
  }
  return cover;
}

Box family_bounding_box(const TubeFamily& f, double margin) {
  if (f.tubes.empty()) {
    Vec z(f.n == 3 ? 3 : 2);
    return Box{z, z}.inflated(margin);
  }
  Vec lo(f.n), hi(f.n);
  bool started = false;
  for (const Tube& t : f.tubes) {
    for (double s : {-0.5, 0.5}) {
      const Vec e = tube_axis_point(t, s);
      if (!started) {
        lo = e;
        hi = e;
        started = true;
        continue;
      }
      for (int a = 0; a < f.n; ++a) {
        lo[a] = std::min(lo[a], e[a]);
        hi[a] = std::max(hi[a], e[a]);
      }
    }
  }
  return Box{lo, hi}.inflated(f.delta + margin);
}

double lp_norm(const TubeFamily& f, double p, const Region& region, double resolution) {
  check_resolution(f.delta, resolution);
  if (!(p >= 1)) throw std::invalid_argument("norms: p must be >= 1");
  if (f.tubes.empty()) return 0;
  const BallCover cover = make_ball_cover(region.bounding_box(), f.n, f.delta);
  const TileGrid grid = tile_grid(cover.h, resolution, f.n);
  const TubeIndex idx(f, 0);
  double total = 0;
  for (size_t b = 0; b < cover.centers.size(); ++b) {
    const Box tile = cover.tile(b);
    double tile_sum = 0;
    for_tile_points(tile.lo, f.n, grid, [&](const Vec& x) {
      if (!region.contains(x)) return;
      const int c = count_tubes_at(f, idx, x, 0);
      if (c > 0) tile_sum += std::pow(static_cast<double>(c), p);
    });
    total += tile_sum * grid.cellvol;
  }
  return std::pow(total, 1.0 / p);
}

double mu(const TubeFamily& f, const CapDecomposition& caps, const Ball& B,
          const BroadParams& params, double resolution) {
  check_resolution(f.delta, resolution);
  check_broad_params(f, params);
  const std::vector<Subspace> cands =
      params.candidates.empty() ? candidate_subspaces(caps, params.k, f.n) : params.candidates;
  const std::vector<Mask> unions =
      tuple_unions(exclusion_masks(caps, cands), params.A, caps.caps.size());
  const std::vector<int> cap_of = cap_of_tube(caps, f.tubes.size());
  const TubeIndex idx(f, 0);
  std::vector<double> cap_mass(caps.caps.size(), 0.0);
  // Plain midpoint grid over the ball's bounding box.
  const Box bb = Box{B.center, B.center}.inflated(B.radius);
  std::array<int, 3> steps{1, 1, 1};
  for (int a = 0; a < f.n; ++a)
    steps[static_cast<size_t>(a)] =
        std::max(1, static_cast<int>(std::ceil((bb.hi[a] - bb.lo[a]) / resolution - 1e-12)));
  Vec x(f.n);
  double cellvol = 1;
  std::array<double, 3> step{0, 0, 0};
  for (int a = 0; a < f.n; ++a) {
    step[static_cast<size_t>(a)] = (bb.hi[a] - bb.lo[a]) / steps[static_cast<size_t>(a)];
    cellvol *= step[static_cast<size_t>(a)];
  }
  std::vector<int> cap_count(caps.caps.size(), 0);
  for (int i = 0; i < steps[0]; ++i) {
    x[0] = bb.lo[0] + (i + 0.5) * step[0];
    for (int j = 0; j < steps[1]; ++j) {
      x[1] = bb.lo[1] + (j + 0.5) * step[1];
      for (int l = 0; l < steps[2]; ++l) {
        if (f.n == 3) x[2] = bb.lo[2] + (l + 0.5) * step[2];
        if (!B.contains(x)) continue;
        std::fill(cap_count.begin(), cap_count.end(), 0);
        for (int t : idx.candidates(x)) {
          if (cap_of[static_cast<size_t>(t)] < 0) continue;
          if (tube_contains(f.tubes[static_cast<size_t>(t)], x))
            ++cap_count[static_cast<size_t>(cap_of[static_cast<size_t>(t)])];
        }
        for (size_t c = 0; c < cap_count.size(); ++c)
          if (cap_count[c] > 0)
            cap_mass[c] += std::pow(static_cast<double>(cap_count[c]), params.p) * cellvol;
      }
    }
  }
  return select_mu(cap_mass, mass_order(cap_mass), unions);
}

NormResult broad_norm(const TubeFamily& f, const Region& U, const BroadParams& params,
                      double resolution, bool keep_per_ball,
                      const CapDecomposition* caps_override) {
  check_resolution(f.delta, resolution);
  check_broad_params(f, params);
  NormResult result;
  result.resolution = resolution;
  if (f.tubes.empty()) return result;
  const CapDecomposition own_caps =
      caps_override ? CapDecomposition{} : cap_decompose(f, params.beta);
  const CapDecomposition& caps = caps_override ? *caps_override : own_caps;
  const std::vector<Subspace> cands =
      params.candidates.empty() ? candidate_subspaces(caps, params.k, f.n) : params.candidates;
  const std::vector<Mask> unions =
      tuple_unions(exclusion_masks(caps, cands), params.A, caps.caps.size());
  const std::vector<int> cap_of = cap_of_tube(caps, f.tubes.size());
  const BallCover cover = make_ball_cover(U.bounding_box(), f.n, f.delta);
  const TileGrid grid = tile_grid(cover.h, resolution, f.n);
  const TubeIndex idx(f, 0);
  if (keep_per_ball) result.per_ball_mu.assign(cover.centers.size(), 0.0);

  std::vector<double> cap_mass(caps.caps.size(), 0.0);
  std::vector<int> cap_count(caps.caps.size(), 0);
  const long pts_per_tile = [&] {
    long m = 1;
    for (int a = 0; a < f.n; ++a) m *= grid.per_axis;
    return m;
  }();
  double total = 0;
  for (size_t b = 0; b < cover.centers.size(); ++b) {
    const Box tile = cover.tile(b);
    long in_u = 0;
    for_tile_points(tile.lo, f.n, grid, [&](const Vec& x) {
      if (U.contains(x)) ++in_u;
    });
    if (in_u == 0) continue;
    std::fill(cap_mass.begin(), cap_mass.end(), 0.0);
    for_tile_points(tile.lo, f.n, grid, [&](const Vec& x) {
      std::fill(cap_count.begin(), cap_count.end(), 0);
      for (int t : idx.candidates(x)) {
        if (cap_of[static_cast<size_t>(t)] < 0) continue;
        if (tube_contains(f.tubes[static_cast<size_t>(t)], x))
          ++cap_count[static_cast<size_t>(cap_of[static_cast<size_t>(t)])];
      }
      for (size_t c = 0; c < cap_count.size(); ++c)
        if (cap_count[c] > 0)
          cap_mass[c] += std::pow(static_cast<double>(cap_count[c]), params.p) * grid.cellvol;
    });
    const double mu_b = select_mu(cap_mass, mass_order(cap_mass), unions);
    const double weight = static_cast<double>(in_u) / static_cast<double>(pts_per_tile);
    total += weight * mu_b;
    ++result.n_balls;
    if (keep_per_ball) result.per_ball_mu[b] = mu_b;
  }
  result.value = std::pow(total, 1.0 / params.p);
  return result;
}

double klinear_rhs(const TubeFamily& f, const CapDecomposition& caps, int k, double p,
                   double resolution) {
  check_resolution(f.delta, resolution);
  if (k < 2 || k > f.n) throw std::invalid_argument("norms: k must lie in [2, n]");
  if (!(p >= 1)) throw std::invalid_argument("norms: p must be >= 1");
  if (f.tubes.empty()) return 0;

  const double threshold = std::pow(caps.beta, k - 1) / 2.0;
  const size_t n_caps = caps.caps.size();
  std::vector<std::array<int, 3>> tuples;
  const auto wedge2 = [&](const Vec& a, const Vec& b) {
    if (f.n == 2) return std::abs(a[0] * b[1] - a[1] * b[0]);
    return a.cross(b).norm();
  };
  if (k == 2) {
    for (size_t i = 0; i < n_caps; ++i)
      for (size_t j = i + 1; j < n_caps; ++j)
        if (wedge2(caps.caps[i].omega, caps.caps[j].omega) >= threshold)
          tuples.push_back({static_cast<int>(i), static_cast<int>(j), -1});
  } else {
    for (size_t i = 0; i < n_caps; ++i)
      for (size_t j = i + 1; j < n_caps; ++j)
        for (size_t l = j + 1; l < n_caps; ++l) {
          const Vec &a = caps.caps[i].omega, &b = caps.caps[j].omega, &c = caps.caps[l].omega;
          const double det = a[0] * (b[1] * c[2] - b[2] * c[1]) -
                             a[1] * (b[0] * c[2] - b[2] * c[0]) +
                             a[2] * (b[0] * c[1] - b[1] * c[0]);
          if (std::abs(det) >= threshold)
            tuples.push_back({static_cast<int>(i), static_cast<int>(j), static_cast<int>(l)});
        }
  }
  if (tuples.empty()) return 0;

  const std::vector<int> cap_of = cap_of_tube(caps, f.tubes.size());
  const double inflate = 2 * f.delta;
  const Box bounds = family_bounding_box(f, inflate);
  const TubeIndex idx(f, inflate);
  std::array<int, 3> steps{1, 1, 1};
  std::array<double, 3> step{0, 0, 0};
  double cellvol = 1;
  for (int a = 0; a < f.n; ++a) {
    steps[static_cast<size_t>(a)] =
        std::max(1, static_cast<int>(std::ceil((bounds.hi[a] - bounds.lo[a]) / resolution - 1e-12)));
    step[static_cast<size_t>(a)] = (bounds.hi[a] - bounds.lo[a]) / steps[static_cast<size_t>(a)];
    cellvol *= step[static_cast<size_t>(a)];
  }
  std::vector<double> tuple_integral(tuples.size(), 0.0);
  std::vector<int> cap_count(n_caps, 0);
  Vec x(f.n);
  for (int i = 0; i < steps[0]; ++i) {
    x[0] = bounds.lo[0] + (i + 0.5) * step[0];
    for (int j = 0; j < steps[1]; ++j) {
      x[1] = bounds.lo[1] + (j + 0.5) * step[1];
      for (int l = 0; l < steps[2]; ++l) {
        if (f.n == 3) x[2] = bounds.lo[2] + (l + 0.5) * step[2];
        std::fill(cap_count.begin(), cap_count.end(), 0);
        for (int t : idx.candidates(x)) {
          if (cap_of[static_cast<size_t>(t)] < 0) continue;
          if (tube_contains(f.tubes[static_cast<size_t>(t)], x, inflate))
            ++cap_count[static_cast<size_t>(cap_of[static_cast<size_t>(t)])];
        }
        for (size_t tix = 0; tix < tuples.size(); ++tix) {
          double prod = 1;
          bool alive = true;
          for (int slot = 0; slot < k; ++slot) {
            const int c = cap_count[static_cast<size_t>(tuples[tix][static_cast<size_t>(slot)])];
            if (c == 0) {
              alive = false;
              break;
            }
            prod *= std::pow(static_cast<double>(c), p / k);
          }
          if (alive) tuple_integral[tix] += prod * cellvol;
        }
      }
    }
  }
  double total = 0;
  for (double v : tuple_integral) total += v;
  return std::pow(total, 1.0 / p);
}

std::vector<Subspace> candidate_subspaces(const CapDecomposition& caps, int k, int n,
                                          int net_size, std::uint64_t seed,
                                          const std::vector<Subspace>& extra) {
  const int dim = k - 1;
  if (dim < 1 || dim > n - 1)
    throw std::invalid_argument("norms: candidate subspace dimension must lie in [1, n-1]");
  std::vector<Subspace> out = extra;
  const auto& caps_list = caps.caps;
  if (dim == 1) {
    for (const Cap& c : caps_list) out.push_back(make_subspace(n, {c.omega}));
  } else {
    for (size_t i = 0; i < caps_list.size(); ++i)
      for (size_t j = i + 1; j < caps_list.size(); ++j) {
        try {
          out.push_back(make_subspace(n, {caps_list[i].omega, caps_list[j].omega}));
        } catch (const std::exception&) {
          // parallel cap centers span no plane; skip
        }
      }
  }
  Rng rng(seed);
  const auto random_unit = [&] {
    Vec v(n);
    for (int a = 0; a < n; ++a) v[a] = rng.gaussian();
    return v.normalized();
  };
  for (int t = 0; t < net_size; ++t) {
    try {
      if (dim == 1) {
        out.push_back(make_subspace(n, {random_unit()}));
      } else {
        out.push_back(make_subspace(n, {random_unit(), random_unit()}));
      }
    } catch (const std::exception&) {
      // degenerate draw; skip
    }
  }
  return out;
}

}  // namespace kakeya
