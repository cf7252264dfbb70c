#include "kakeya/tube.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kakeya {

double tube_volume(int n, double delta) {
  if (delta <= 0) throw std::invalid_argument("tube_volume: delta must be positive");
  return unit_ball_volume(n - 1) * std::pow(delta, n - 1);
}

bool tube_contains(const Tube& t, const Vec& x, double inflate) {
  const Vec r = x - t.center;
  const double axial = r.dot(t.dir);
  if (std::abs(axial) > 0.5 + inflate) return false;
  const Vec radial = r - axial * t.dir;
  return radial.norm() <= t.radius + inflate;
}

Vec tube_axis_point(const Tube& t, double s) { return t.center + s * t.dir; }

void validate_family(const TubeFamily& f) {
  if (f.n != 2 && f.n != 3) throw std::invalid_argument("family: dimension must be 2 or 3");
  if (!(f.delta > 0) || f.delta >= 0.5)
    throw std::invalid_argument("family: delta must lie in (0, 1/2)");
  for (const Tube& t : f.tubes) {
    if (t.center.dim() != f.n || t.dir.dim() != f.n)
      throw std::invalid_argument("family: tube dimension mismatch");
    if (std::abs(t.dir.norm() - 1.0) > 1e-12)
      throw std::invalid_argument("family: tube direction is not unit length (|1-|dir|| > 1e-12)");
    if (t.radius != f.delta)
      throw std::invalid_argument("family: tube radius differs from family delta");
  }
}

bool direction_separated(const TubeFamily& f) {
  if (f.tubes.empty()) throw std::invalid_argument("direction_separated: empty family");
  // Angular separation with a relative epsilon: acos rounding must not fail
  // families built at exactly delta spacing.
  const double threshold = f.delta * (1.0 - 1e-9) - 1e-12;
  for (size_t i = 0; i < f.tubes.size(); ++i)
    for (size_t j = i + 1; j < f.tubes.size(); ++j)
      if (line_angle(f.tubes[i].dir, f.tubes[j].dir) < threshold) return false;
  return true;
}

namespace {

// Representative of the projective direction on the hemisphere of `anchor`.
Vec align_with(const Vec& v, const Vec& anchor) { return v.dot(anchor) < 0 ? -v : v; }

}  // namespace

CapDecomposition cap_decompose(const TubeFamily& f, double beta) {
  if (f.tubes.empty()) throw std::invalid_argument("cap_decompose: empty family");
  if (!(beta > 0)) throw std::invalid_argument("cap_decompose: beta must be positive");
  CapDecomposition out;
  out.beta = beta;
  for (const Tube& t : f.tubes) {
    bool covered = false;
    for (const Cap& c : out.caps)
      if (line_angle(t.dir, c.omega) <= beta) { covered = true; break; }
    if (!covered) out.caps.push_back(Cap{t.dir, {}});
  }
  for (size_t i = 0; i < f.tubes.size(); ++i) {
    size_t best = 0;
    double best_angle = line_angle(f.tubes[i].dir, out.caps[0].omega);
    for (size_t c = 1; c < out.caps.size(); ++c) {
      const double a = line_angle(f.tubes[i].dir, out.caps[c].omega);
      if (a < best_angle) { best_angle = a; best = c; }
    }
    out.caps[best].members.push_back(static_cast<int>(i));
  }
  return out;
}

Vec CapRescaling::apply(const Vec& x) const {
  const Vec par = x.dot(omega) * omega;
  return par + (1.0 / beta) * (x - par);
}

CapRescaling rescale_cap(const TubeFamily& f, const Cap& cap, double beta) {
  validate_family(f);
  if (!(beta > 0 && beta <= 1)) throw std::invalid_argument("rescale_cap: beta must be in (0, 1]");
  CapRescaling out;
  out.omega = cap.omega.normalized();
  out.beta = beta;
  out.family.n = f.n;
  out.family.delta = f.delta / beta;

  for (int idx : cap.members) {
    const Tube& t = f.tubes.at(static_cast<size_t>(idx));
    if (line_angle(t.dir, out.omega) > beta + 1e-12)
      throw std::invalid_argument("rescale_cap: tube direction lies outside the cap");

    const Vec v = align_with(t.dir, out.omega);
    const Vec c_img = out.apply(t.center);
    const Vec u = out.apply(v);
    const double len = u.norm();
    const Vec axis = u * (1.0 / len);

    // Axial slack: how far L moves a unit cross-section vector along the new
    // axis. w -> L(w).axis is linear, so its max over the unit circle in
    // v-perp is the norm of its coefficients in any orthonormal basis.
    double slack_unit = 0;
    if (f.n == 2) {
      slack_unit = std::abs(out.apply(v.perp()).dot(axis));
    } else {
      // Orthonormal basis of v-perp in R^3.
      Vec seed = std::abs(v[0]) < 0.9 ? Vec(1, 0, 0) : Vec(0, 1, 0);
      const Vec w1 = (seed - seed.dot(v) * v).normalized();
      const Vec w2 = v.cross(w1);
      slack_unit = std::hypot(out.apply(w1).dot(axis), out.apply(w2).dot(axis));
    }

    const double half_extent = 0.5 * len + slack_unit * f.delta;
    const int count = std::max(1, static_cast<int>(std::ceil(2.0 * half_extent - 1e-12)));
    const int begin = static_cast<int>(out.family.tubes.size());
    for (int j = 0; j < count; ++j) {
      const double pos = -half_extent + (j + 0.5) * (2.0 * half_extent / count);
      Tube covering;
      covering.center = c_img + pos * axis;
      covering.dir = axis;
      covering.radius = out.family.delta;
      out.family.tubes.push_back(covering);
    }
    out.spans.emplace_back(begin, static_cast<int>(out.family.tubes.size()));
  }
  validate_family(out.family);
  return out;
}

TubeIndex::TubeIndex(const TubeFamily& f, double margin) : n_(f.n) {
  if (f.tubes.empty()) throw std::invalid_argument("TubeIndex: empty family");
  if (!(margin >= 0)) throw std::invalid_argument("TubeIndex: negative margin");
  h_ = std::max(0.05, 8.0 * f.delta);

  // Bounding box of all inflated tubes, padded by one cell.
  Box box;
  box.lo = f.tubes[0].center;
  box.hi = f.tubes[0].center;
  const double pad = f.delta + margin + h_;
  for (const Tube& t : f.tubes) {
    for (double side : {-0.5, 0.5}) {
      const Vec p = tube_axis_point(t, side);
      for (int i = 0; i < n_; ++i) {
        box.lo[i] = std::min(box.lo[i], p[i] - pad);
        box.hi[i] = std::max(box.hi[i], p[i] + pad);
      }
    }
  }
  origin_ = box.lo;
  dims_ = {1, 1, 1};
  long total = 1;
  for (int i = 0; i < n_; ++i) {
    dims_[static_cast<size_t>(i)] =
        static_cast<long>(std::floor((box.hi[i] - box.lo[i]) / h_)) + 2;
    total *= dims_[static_cast<size_t>(i)];
  }
  cells_.assign(static_cast<size_t>(total), {});

  // Rasterize each tube spine; mark every cell whose region could meet the
  // margin-inflated tube (reach + cell diagonal + spine sampling slop).
  const double reach = f.delta + margin;
  const double mark_radius = reach + h_ * (std::sqrt(static_cast<double>(n_)) / 2.0 + 0.3);
  const int block = static_cast<int>(std::ceil(mark_radius / h_));
  std::vector<int> stamp(static_cast<size_t>(total), -1);
  for (size_t ti = 0; ti < f.tubes.size(); ++ti) {
    const Tube& t = f.tubes[ti];
    const double t_lo = -0.5 - margin, t_hi = 0.5 + margin;
    const int steps = static_cast<int>(std::ceil((t_hi - t_lo) / (h_ / 2.0)));
    for (int s = 0; s <= steps; ++s) {
      const Vec p = tube_axis_point(t, t_lo + (t_hi - t_lo) * s / steps);
      std::array<long, 3> base{0, 0, 0};
      for (int i = 0; i < n_; ++i)
        base[static_cast<size_t>(i)] = static_cast<long>(std::floor((p[i] - origin_[i]) / h_));
      const long bz0 = n_ == 3 ? -block : 0, bz1 = n_ == 3 ? block : 0;
      for (long dx = -block; dx <= block; ++dx)
        for (long dy = -block; dy <= block; ++dy)
          for (long dz = bz0; dz <= bz1; ++dz) {
            const long ix = base[0] + dx, iy = base[1] + dy, iz = base[2] + dz;
            if (ix < 0 || ix >= dims_[0] || iy < 0 || iy >= dims_[1] || iz < 0 || iz >= dims_[2])
              continue;
            const long cell = (iz * dims_[1] + iy) * dims_[0] + ix;
            if (stamp[static_cast<size_t>(cell)] == static_cast<int>(ti)) continue;
            stamp[static_cast<size_t>(cell)] = static_cast<int>(ti);
            cells_[static_cast<size_t>(cell)].push_back(static_cast<int>(ti));
          }
    }
  }
}

long TubeIndex::cell_of(const Vec& x) const {
  std::array<long, 3> idx{0, 0, 0};
  for (int i = 0; i < n_; ++i) {
    idx[static_cast<size_t>(i)] = static_cast<long>(std::floor((x[i] - origin_[i]) / h_));
    if (idx[static_cast<size_t>(i)] < 0 || idx[static_cast<size_t>(i)] >= dims_[static_cast<size_t>(i)])
      return -1;
  }
  return (idx[2] * dims_[1] + idx[1]) * dims_[0] + idx[0];
}

const std::vector<int>& TubeIndex::candidates(const Vec& x) const {
  const long cell = cell_of(x);
  return cell < 0 ? empty_ : cells_[static_cast<size_t>(cell)];
}

}  // namespace kakeya
