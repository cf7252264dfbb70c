#include "kakeya/wolff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kakeya/rng.hpp"

namespace kakeya {

namespace {

void check_box(const OrientedBox& b) {
  const size_t n = static_cast<size_t>(b.center.dim());
  if (b.axes.size() != n || b.half.size() != n)
    throw std::invalid_argument("wolff: oriented box needs n axes and n half extents");
  for (size_t i = 0; i < n; ++i) {
    if (std::abs(b.axes[i].norm() - 1.0) > 1e-9)
      throw std::invalid_argument("wolff: box axes must be unit vectors");
    for (size_t j = i + 1; j < n; ++j)
      if (std::abs(b.axes[i].dot(b.axes[j])) > 1e-9)
        throw std::invalid_argument("wolff: box axes must be orthogonal");
    if (!(b.half[i] > 0)) throw std::invalid_argument("wolff: box half extents must be positive");
  }
}

// Orthonormal frame with the given first column, seeded for the random part.
std::vector<Vec> random_frame(int n, Rng& rng) {
  std::vector<Vec> frame;
  for (;;) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.gaussian();
    if (v.norm() < 1e-9) continue;
    frame.push_back(v.normalized());
    break;
  }
  if (n == 2) {
    frame.push_back(frame[0].perp());
    return frame;
  }
  for (;;) {
    Vec v(3);
    for (int i = 0; i < 3; ++i) v[i] = rng.gaussian();
    v -= v.dot(frame[0]) * frame[0];
    if (v.norm() < 1e-9) continue;
    frame.push_back(v.normalized());
    break;
  }
  frame.push_back(frame[0].cross(frame[1]));
  return frame;
}

}  // namespace

double OrientedBox::volume() const {
  double v = 1;
  for (double h : half) v *= 2 * h;
  return v;
}

bool OrientedBox::contains(const Vec& x) const {
  const Vec d = x - center;
  for (size_t i = 0; i < axes.size(); ++i)
    if (std::abs(d.dot(axes[i])) > half[i]) return false;
  return true;
}

bool tube_in_box(const Tube& t, const OrientedBox& box) {
  // The tube is the Minkowski sum of its axis segment and a radius-delta disc
  // orthogonal to dir; its support halfwidth along a unit u is
  // |dir.u|/2 + delta*|P u| with P the projection off the axis.
  const Vec d = t.center - box.center;
  for (size_t i = 0; i < box.axes.size(); ++i) {
    const Vec& u = box.axes[i];
    const double along = t.dir.dot(u);
    const Vec transverse = u - along * t.dir;
    const double support = std::abs(along) / 2 + t.radius * transverse.norm();
    if (std::abs(d.dot(u)) + support > box.half[i] + 1e-12) return false;
  }
  return true;
}

Shape shape_axis_box(const Box& b) {
  Shape s;
  s.desc = "axis box";
  s.complexity = 2 * b.lo.dim();
  s.volume = b.volume();
  s.member = [b](const Vec& x) { return b.contains(x); };
  return s;
}

Shape shape_oriented_box(const OrientedBox& b) {
  check_box(b);
  Shape s;
  s.desc = "oriented box";
  s.complexity = 2 * b.center.dim();
  s.volume = b.volume();
  s.member = [b](const Vec& x) { return b.contains(x); };
  return s;
}

Shape shape_ball(const Ball& b, int n) {
  Shape s;
  s.desc = "ball";
  s.complexity = 1;
  s.volume = unit_ball_volume(n) * std::pow(b.radius, n);
  s.member = [b](const Vec& x) { return b.contains(x); };
  return s;
}

Shape shape_axis_ellipsoid(const Vec& center, const Vec& semi) {
  Shape s;
  s.desc = "axis ellipsoid";
  s.complexity = 1;
  double v = unit_ball_volume(center.dim());
  for (int i = 0; i < center.dim(); ++i) {
    if (!(semi[i] > 0)) throw std::invalid_argument("wolff: ellipsoid semi-axes must be positive");
    v *= semi[i];
  }
  s.volume = v;
  s.member = [center, semi](const Vec& x) {
    double q = 0;
    for (int i = 0; i < center.dim(); ++i) {
      const double r = (x[i] - center[i]) / semi[i];
      q += r * r;
    }
    return q <= 1.0;
  };
  return s;
}

Shape shape_annulus(const Vec& center, double r_inner, double r_outer, int n) {
  if (!(0 <= r_inner && r_inner < r_outer))
    throw std::invalid_argument("wolff: annulus needs 0 <= inner < outer");
  Shape s;
  s.desc = "annulus";
  s.complexity = 2;
  s.volume = unit_ball_volume(n) * (std::pow(r_outer, n) - std::pow(r_inner, n));
  s.member = [center, r_inner, r_outer](const Vec& x) {
    const double d = center.dist(x);
    return r_inner <= d && d <= r_outer;
  };
  return s;
}

ShapeCatalog builtin_catalog(int n, std::uint64_t seed, int size) {
  if (n != 2 && n != 3) throw std::invalid_argument("wolff: dimension must be 2 or 3");
  if (size < 1) throw std::invalid_argument("wolff: catalog size must be positive");
  ShapeCatalog cat;
  cat.n = n;
  Rng rng(seed);
  while (static_cast<int>(cat.shapes.size()) < size) {
    const int pick = static_cast<int>(cat.shapes.size()) % 5;
    Vec c(n);
    for (int i = 0; i < n; ++i) c[i] = rng.uniform(-0.5, 0.5);
    switch (pick) {
      case 0: {  // axis box at an assorted aspect
        Vec lo = c, hi = c;
        for (int i = 0; i < n; ++i) {
          const double h = rng.uniform(0.05, 0.6);
          lo[i] -= h;
          hi[i] += h;
        }
        cat.shapes.push_back(shape_axis_box(Box{lo, hi}));
        break;
      }
      case 1: {  // rotated slab-like box
        OrientedBox b;
        b.center = c;
        b.axes = random_frame(n, rng);
        b.half.push_back(rng.uniform(0.3, 0.7));
        b.half.push_back(rng.uniform(0.02, 0.15));
        if (n == 3) b.half.push_back(rng.uniform(0.1, 0.5));
        cat.shapes.push_back(shape_oriented_box(b));
        break;
      }
      case 2:
        cat.shapes.push_back(shape_ball(Ball{c, rng.uniform(0.1, 0.6)}, n));
        break;
      case 3: {
        Vec semi(n);
        for (int i = 0; i < n; ++i) semi[i] = rng.uniform(0.05, 0.6);
        cat.shapes.push_back(shape_axis_ellipsoid(c, semi));
        break;
      }
      default: {
        const double inner = rng.uniform(0.1, 0.4);
        cat.shapes.push_back(shape_annulus(c, inner, inner + rng.uniform(0.05, 0.3), n));
        break;
      }
    }
  }
  return cat;
}

std::vector<OrientedBox> sample_boxes(int n, std::uint64_t seed, int count) {
  if (n != 2 && n != 3) throw std::invalid_argument("wolff: dimension must be 2 or 3");
  Rng rng(seed);
  std::vector<OrientedBox> boxes;
  boxes.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    OrientedBox b;
    Vec c(n);
    for (int a = 0; a < n; ++a) c[a] = rng.uniform(-0.75, 0.75);
    b.center = c;
    b.axes = random_frame(n, rng);
    for (int a = 0; a < n; ++a) b.half.push_back(rng.uniform(0.02, 0.75));
    boxes.push_back(std::move(b));
  }
  return boxes;
}

WolffReport linear_wolff_N(const TubeFamily& f, const std::vector<OrientedBox>& boxes) {
  WolffReport report;
  if (f.tubes.empty()) return report;
  const double weight = std::pow(f.delta, f.n - 1);
  for (size_t i = 0; i < boxes.size(); ++i) {
    check_box(boxes[i]);
    long count = 0;
    for (const Tube& t : f.tubes)
      if (tube_in_box(t, boxes[i])) ++count;
    if (count == 0) continue;
    const double value = static_cast<double>(count) * weight / boxes[i].volume();
    if (value > report.value) {
      report.value = value;
      report.witness_shape = static_cast<int>(i);
      report.witness_lambda = 1.0;
      report.witness_count = count;
      report.witness_desc = "oriented box";
    }
  }
  return report;
}

double tube_shape_fraction(const Tube& t, const Shape& s, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("wolff: samples must be positive");
  Rng rng(seed);
  const int n = t.center.dim();
  // Transverse frame of the tube.
  std::vector<Vec> frame;
  if (n == 2) {
    frame.push_back(t.dir.perp());
  } else {
    Vec v = std::abs(t.dir[0]) < 0.9 ? Vec(1.0, 0.0, 0.0) : Vec(0.0, 1.0, 0.0);
    v -= v.dot(t.dir) * t.dir;
    frame.push_back(v.normalized());
    frame.push_back(t.dir.cross(frame[0]));
  }
  // Stratified along the axis, uniform in the cross-section.
  long hits = 0;
  for (int i = 0; i < samples; ++i) {
    const double s_axis = (static_cast<double>(i) + rng.uniform()) / samples - 0.5;
    Vec x = t.center + s_axis * t.dir;
    if (n == 2) {
      x += rng.uniform(-t.radius, t.radius) * frame[0];
    } else {
      for (;;) {
        const double u = rng.uniform(-1, 1), w = rng.uniform(-1, 1);
        if (u * u + w * w <= 1.0) {
          x += (u * t.radius) * frame[0] + (w * t.radius) * frame[1];
          break;
        }
      }
    }
    if (s.member(x)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

WolffReport poly_wolff_N(const TubeFamily& f, const ShapeCatalog& catalog,
                         const std::vector<double>& lambdas, int samples_per_tube,
                         std::uint64_t seed) {
  WolffReport report;
  if (f.tubes.empty()) return report;
  if (catalog.n != f.n) throw std::invalid_argument("wolff: catalog dimension mismatch");
  for (double l : lambdas)
    if (!(l > 0) || l > 1) throw std::invalid_argument("wolff: lambda thresholds must lie in (0,1]");
  const double weight = std::pow(f.delta, f.n - 1);
  std::vector<double> fraction(f.tubes.size());
  for (size_t s = 0; s < catalog.shapes.size(); ++s) {
    const Shape& shape = catalog.shapes[s];
    if (!(shape.volume > 0)) throw std::invalid_argument("wolff: shapes need positive volume");
    for (size_t t = 0; t < f.tubes.size(); ++t)
      fraction[t] = tube_shape_fraction(f.tubes[t], shape, samples_per_tube,
                                        seed + 0x9e3779b97f4a7c15ULL * (s + 1) + t);
    for (double lambda : lambdas) {
      long count = 0;
      for (double fr : fraction)
        if (fr >= lambda) ++count;
      if (count == 0) continue;
      const double value = static_cast<double>(count) * weight *
                           std::pow(lambda, f.n) / shape.volume;
      if (value > report.value) {
        report.value = value;
        report.witness_shape = static_cast<int>(s);
        report.witness_lambda = lambda;
        report.witness_count = count;
        report.witness_desc = shape.desc;
      }
    }
  }
  return report;
}

}  // namespace kakeya
