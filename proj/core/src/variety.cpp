#include "kakeya/variety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kakeya {

double MultiPoly::eval(const Vec& x) const {
  double sum = 0;
  for (const PolyTerm& t : terms) {
    double m = t.coeff.to_double();
    for (int i = 0; i < n; ++i)
      for (int e = 0; e < t.exp[static_cast<size_t>(i)]; ++e) m *= x[i];
    sum += m;
  }
  return sum;
}

Vec MultiPoly::gradient(const Vec& x) const {
  Vec g(n);
  for (const PolyTerm& t : terms) {
    for (int i = 0; i < n; ++i) {
      const int ei = t.exp[static_cast<size_t>(i)];
      if (ei == 0) continue;
      double m = t.coeff.to_double() * ei;
      for (int j = 0; j < n; ++j) {
        const int target = t.exp[static_cast<size_t>(j)] - (j == i ? 1 : 0);
        for (int e = 0; e < target; ++e) m *= x[j];
      }
      g[i] += m;
    }
  }
  return g;
}

int MultiPoly::degree() const {
  int d = 0;
  for (const PolyTerm& t : terms) d = std::max(d, t.exp[0] + t.exp[1] + t.exp[2]);
  return d;
}

namespace {

PolyTerm term(int ex, int ey, int ez, double c) {
  PolyTerm t;
  t.exp = {ex, ey, ez};
  t.coeff = Rational::from_double(c);
  return t;
}

// Orthonormal tangent frame of a codimension-1 variety from its unit normal.
Subspace tangent_from_normal(const Vec& normal) {
  Subspace V;
  V.ambient = normal.dim();
  if (normal.dim() == 2) {
    V.basis = {normal.perp()};
  } else {
    Vec seed = std::abs(normal[0]) < 0.9 ? Vec(1, 0, 0) : Vec(0, 1, 0);
    const Vec t1 = (seed - seed.dot(normal) * normal).normalized();
    V.basis = {t1, normal.cross(t1)};
  }
  return V;
}

// All real roots of a t^3 + b t^2 + c t + d, Newton-polished.
std::vector<double> real_cubic_roots(double a, double b, double c, double d) {
  std::vector<double> roots;
  if (std::abs(a) < 1e-300) {
    if (std::abs(b) < 1e-300) {
      if (std::abs(c) > 1e-300) roots.push_back(-d / c);
      return roots;
    }
    const double disc = c * c - 4 * b * d;
    if (disc >= 0) {
      const double s = std::sqrt(disc);
      roots.push_back((-c + s) / (2 * b));
      roots.push_back((-c - s) / (2 * b));
    }
    return roots;
  }
  const double B = b / a, C = c / a, D = d / a;
  const double p = C - B * B / 3.0;
  const double q = 2.0 * B * B * B / 27.0 - B * C / 3.0 + D;
  const double shift = -B / 3.0;
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  if (disc > 0) {
    // Three real roots: trigonometric form.
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double theta = std::acos(std::clamp(3.0 * q / (p * m), -1.0, 1.0)) / 3.0;
    for (int k = 0; k < 3; ++k)
      roots.push_back(shift + m * std::cos(theta - 2.0 * kPi * k / 3.0));
  } else {
    // One real root: Cardano.
    const double s = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
    const double u = std::cbrt(-q / 2.0 + s), v = std::cbrt(-q / 2.0 - s);
    roots.push_back(shift + u + v);
  }
  for (double& r : roots) {
    for (int it = 0; it < 4; ++it) {
      const double f = ((a * r + b) * r + c) * r + d;
      const double fp = (3 * a * r + 2 * b) * r + c;
      if (std::abs(fp) < 1e-300) break;
      r -= f / fp;
    }
  }
  return roots;
}

long long hash_key(const Vec& x, double cell, int n) {
  long long key = 0;
  for (int i = 0; i < n; ++i) {
    const long long idx = static_cast<long long>(std::floor(x[i] / cell)) + 4000000LL;
    key = key * 8000000LL + idx;
  }
  return key;
}

}  // namespace

Variety Variety::hyperplane(const Vec& normal, double offset) {
  Variety z;
  z.kind_ = VarietyKind::Hyperplane;
  z.n_ = normal.dim();
  const double len = normal.norm();
  z.normal_ = normal.normalized();
  z.offset_ = offset / len;
  z.dim_ = z.n_ - 1;
  z.degree_ = 1;
  MultiPoly P;
  P.n = z.n_;
  for (int i = 0; i < z.n_; ++i)
    P.terms.push_back(term(i == 0, i == 1, i == 2, z.normal_[i]));
  P.terms.push_back(term(0, 0, 0, -z.offset_));
  z.polys_ = {P};
  return z;
}

Variety Variety::affine_subspace(const Vec& base, const std::vector<Vec>& dirs) {
  Variety z;
  z.kind_ = VarietyKind::AffineSubspace;
  z.n_ = base.dim();
  z.base_ = base;
  if (!dirs.empty()) {
    const Subspace V = make_subspace(z.n_, dirs);
    z.dirs_ = V.basis;
  }
  z.dim_ = static_cast<int>(z.dirs_.size());
  z.degree_ = 1;
  // Defining polynomials: the orthogonal complement's linear forms.
  std::vector<Vec> complement;
  std::vector<Vec> candidates;
  if (z.n_ == 2) candidates = {Vec(1, 0), Vec(0, 1)};
  else candidates = {Vec(1, 0, 0), Vec(0, 1, 0), Vec(0, 0, 1)};
  std::vector<Vec> frame = z.dirs_;
  for (const Vec& c : candidates) {
    Vec w = c;
    for (const Vec& b : frame) w -= w.dot(b) * b;
    if (w.norm() > 1e-10) {
      const Vec unit = w.normalized();
      frame.push_back(unit);
      complement.push_back(unit);
    }
  }
  for (const Vec& c : complement) {
    MultiPoly P;
    P.n = z.n_;
    for (int i = 0; i < z.n_; ++i) P.terms.push_back(term(i == 0, i == 1, i == 2, c[i]));
    P.terms.push_back(term(0, 0, 0, -c.dot(base)));
    z.polys_.push_back(P);
  }
  return z;
}

Variety Variety::sphere(const Vec& center, double rho) {
  if (!(rho > 0)) throw std::invalid_argument("Variety::sphere: radius must be positive");
  Variety z;
  z.kind_ = VarietyKind::Sphere;
  z.n_ = center.dim();
  z.center_ = center;
  z.rho_ = rho;
  z.dim_ = z.n_ - 1;
  z.degree_ = 2;
  MultiPoly P;
  P.n = z.n_;
  double c0 = -rho * rho;
  for (int i = 0; i < z.n_; ++i) {
    P.terms.push_back(term(2 * (i == 0), 2 * (i == 1), 2 * (i == 2), 1.0));
    P.terms.push_back(term(i == 0, i == 1, i == 2, -2.0 * center[i]));
    c0 += center[i] * center[i];
  }
  P.terms.push_back(term(0, 0, 0, c0));
  z.polys_ = {P};
  return z;
}

Variety Variety::quadric_graph(int n, const std::vector<double>& coeffs) {
  Variety z;
  z.kind_ = VarietyKind::QuadricGraph;
  z.n_ = n;
  z.q_ = coeffs;
  z.dim_ = n - 1;
  z.degree_ = 2;
  MultiPoly P;
  P.n = n;
  if (n == 2) {
    if (coeffs.size() != 3) throw std::invalid_argument("quadric_graph: need {a,b,c} in R^2");
    P.terms = {term(2, 0, 0, coeffs[0]), term(1, 0, 0, coeffs[1]), term(0, 0, 0, coeffs[2]),
               term(0, 1, 0, -1.0)};
  } else if (n == 3) {
    if (coeffs.size() != 6) throw std::invalid_argument("quadric_graph: need 6 coeffs in R^3");
    P.terms = {term(2, 0, 0, coeffs[0]), term(1, 1, 0, coeffs[1]), term(0, 2, 0, coeffs[2]),
               term(1, 0, 0, coeffs[3]), term(0, 1, 0, coeffs[4]), term(0, 0, 0, coeffs[5]),
               term(0, 0, 1, -1.0)};
  } else {
    throw std::invalid_argument("quadric_graph: dimension must be 2 or 3");
  }
  z.polys_ = {P};
  return z;
}

Variety Variety::zero_set(const MultiPoly& P, const Box& domain, double spacing) {
  if (!(spacing > 0)) throw std::invalid_argument("zero_set: spacing must be positive");
  Variety z;
  z.kind_ = VarietyKind::PointCloud;
  z.n_ = P.n;
  z.dim_ = P.n - 1;
  z.degree_ = P.degree();
  z.polys_ = {P};
  z.spacing_ = spacing;

  // March a grid at half the requested spacing; bisect every axis edge with a
  // sign change. Consecutive zero-crossings then sit within `spacing` of each
  // other along the variety.
  const double h = spacing / 2.0;
  const int n = P.n;
  std::array<long, 3> steps{1, 1, 1};
  for (int i = 0; i < n; ++i)
    steps[static_cast<size_t>(i)] =
        std::max(1L, static_cast<long>(std::ceil((domain.hi[i] - domain.lo[i]) / h)));
  auto grid_point = [&](long ix, long iy, long iz) {
    Vec p(n);
    const std::array<long, 3> idx{ix, iy, iz};
    for (int i = 0; i < n; ++i)
      p[i] = domain.lo[i] + (domain.hi[i] - domain.lo[i]) *
                                (static_cast<double>(idx[static_cast<size_t>(i)]) /
                                 static_cast<double>(steps[static_cast<size_t>(i)]));
    return p;
  };
  auto bisect_edge = [&](Vec a, Vec b) {
    double fa = P.eval(a);
    for (int it = 0; it < 60; ++it) {
      Vec mid = 0.5 * (a + b);
      const double fm = P.eval(mid);
      if (fm == 0.0) { a = mid; break; }
      if ((fa < 0) == (fm < 0)) { a = mid; fa = fm; } else { b = mid; }
      if (a.dist(b) < 1e-13) break;
    }
    return 0.5 * (a + b);
  };
  const long zmax = n == 3 ? steps[2] : 0;
  for (long ix = 0; ix <= steps[0]; ++ix)
    for (long iy = 0; iy <= steps[1]; ++iy)
      for (long iz = 0; iz <= zmax; ++iz) {
        const Vec p = grid_point(ix, iy, iz);
        const double fp = P.eval(p);
        const std::array<long, 3> idx{ix, iy, iz};
        for (int axis = 0; axis < n; ++axis) {
          if (idx[static_cast<size_t>(axis)] >= steps[static_cast<size_t>(axis)]) continue;
          const Vec q = grid_point(ix + (axis == 0), iy + (axis == 1), iz + (axis == 2));
          const double fq = P.eval(q);
          if (fp == 0.0 && fq == 0.0) continue;
          if ((fp < 0) != (fq < 0) || fp == 0.0 || fq == 0.0) {
            const Vec zpt = (fp == 0.0) ? p : ((fq == 0.0) ? q : bisect_edge(p, q));
            z.cloud_.push_back(zpt);
            const Vec g = P.gradient(zpt);
            z.cloud_normals_.push_back(g.norm() > 1e-12 ? g.normalized()
                                                        : (n == 2 ? Vec(1, 0) : Vec(1, 0, 0)));
          }
        }
      }
  z.hash_cell_ = std::max(4.0 * spacing, 1e-9);
  for (size_t i = 0; i < z.cloud_.size(); ++i)
    z.hash_[hash_key(z.cloud_[i], z.hash_cell_, n)].push_back(static_cast<int>(i));
  return z;
}

NearestPoint Variety::nearest(const Vec& x) const {
  NearestPoint np;
  switch (kind_) {
    case VarietyKind::Hyperplane: {
      const double signed_d = x.dot(normal_) - offset_;
      np.distance = std::abs(signed_d);
      np.point = x - signed_d * normal_;
      np.tangent = tangent_from_normal(normal_);
      return np;
    }
    case VarietyKind::AffineSubspace: {
      Vec proj = base_;
      const Vec r = x - base_;
      for (const Vec& b : dirs_) proj += r.dot(b) * b;
      np.distance = x.dist(proj);
      np.point = proj;
      np.tangent.ambient = n_;
      np.tangent.basis = dirs_;
      return np;
    }
    case VarietyKind::Sphere: {
      const Vec r = x - center_;
      const double d = r.norm();
      const Vec radial = d > 1e-14 ? r * (1.0 / d) : (n_ == 2 ? Vec(1, 0) : Vec(1, 0, 0));
      np.distance = std::abs(d - rho_);
      np.point = center_ + rho_ * radial;
      np.tangent = tangent_from_normal(radial);
      return np;
    }
    case VarietyKind::QuadricGraph:
      return n_ == 2 ? nearest_quadric2(x) : nearest_quadric3(x);
    case VarietyKind::PointCloud:
      return nearest_cloud(x);
  }
  throw std::logic_error("Variety::nearest: unknown kind");
}

NearestPoint Variety::nearest_quadric2(const Vec& x) const {
  const double a = q_[0], b = q_[1], c = q_[2];
  if (std::abs(a) < 1e-14) {
    // Degenerate graph: a line. Normal direction (b, -1)/sqrt(1+b^2).
    return hyperplane(Vec(b, -1.0), -c).nearest(x);
  }
  // d/du [ (u - x1)^2 + (q(u) - x2)^2 ] = 0 is a cubic in u.
  const auto roots = real_cubic_roots(2 * a * a, 3 * a * b,
                                      1 + b * b + 2 * a * (c - x[1]), b * (c - x[1]) - x[0]);
  NearestPoint np;
  np.distance = std::numeric_limits<double>::infinity();
  for (double u : roots) {
    const Vec p(u, (a * u + b) * u + c);
    const double d = x.dist(p);
    if (d < np.distance) {
      np.distance = d;
      np.point = p;
      np.tangent = make_subspace(2, {Vec(1.0, 2 * a * u + b)});
    }
  }
  return np;
}

NearestPoint Variety::nearest_quadric3(const Vec& x) const {
  const double a = q_[0], b = q_[1], c = q_[2], d = q_[3], e = q_[4], f = q_[5];
  auto qv = [&](double u, double v) { return a * u * u + b * u * v + c * v * v + d * u + e * v + f; };
  auto qu_ = [&](double u, double v) { return 2 * a * u + b * v + d; };
  auto qv_ = [&](double u, double v) { return b * u + 2 * c * v + e; };

  NearestPoint np;
  np.distance = std::numeric_limits<double>::infinity();
  // Newton on the critical-point system from a grid of seeds around the
  // query's horizontal projection; quadratic convergence gives 1e-12.
  for (int si = -2; si <= 2; ++si) {
    for (int sj = -2; sj <= 2; ++sj) {
      double u = x[0] + 0.7 * si, v = x[1] + 0.7 * sj;
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        const double g = qv(u, v) - x[2], gu = qu_(u, v), gv = qv_(u, v);
        const double F1 = u - x[0] + g * gu;
        const double F2 = v - x[1] + g * gv;
        if (std::abs(F1) + std::abs(F2) < 1e-13) { ok = true; break; }
        const double J11 = 1 + gu * gu + g * 2 * a;
        const double J12 = gu * gv + g * b;
        const double J22 = 1 + gv * gv + g * 2 * c;
        const double det = J11 * J22 - J12 * J12;
        if (std::abs(det) < 1e-14) break;
        u -= (F1 * J22 - F2 * J12) / det;
        v -= (F2 * J11 - F1 * J12) / det;
        if (std::abs(u - x[0]) + std::abs(v - x[1]) > 50) break;
      }
      if (!ok) continue;
      const Vec p(u, v, qv(u, v));
      const double dist = x.dist(p);
      if (dist < np.distance) {
        np.distance = dist;
        np.point = p;
        np.tangent =
            make_subspace(3, {Vec(1, 0, qu_(u, v)), Vec(0, 1, qv_(u, v))});
      }
    }
  }
  if (!std::isfinite(np.distance))
    throw std::runtime_error("quadric_graph: Newton failed to locate a nearest point");
  return np;
}

NearestPoint Variety::nearest_cloud(const Vec& x) const {
  NearestPoint np;
  if (cloud_.empty()) {
    np.distance = std::numeric_limits<double>::infinity();
    np.point = x;
    np.tangent.ambient = n_;
    return np;
  }
  // Expanding ring search over the hash cells.
  double radius = hash_cell_;
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 64; ++round) {
    std::array<long, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int i = 0; i < n_; ++i) {
      lo[static_cast<size_t>(i)] = static_cast<long>(std::floor((x[i] - radius) / hash_cell_));
      hi[static_cast<size_t>(i)] = static_cast<long>(std::floor((x[i] + radius) / hash_cell_));
    }
    const long z0 = n_ == 3 ? lo[2] : 0, z1 = n_ == 3 ? hi[2] : 0;
    for (long ix = lo[0]; ix <= hi[0]; ++ix)
      for (long iy = lo[1]; iy <= hi[1]; ++iy)
        for (long iz = z0; iz <= z1; ++iz) {
          Vec probe(n_);
          probe[0] = (ix + 0.5) * hash_cell_;
          probe[1] = (iy + 0.5) * hash_cell_;
          if (n_ == 3) probe[2] = (iz + 0.5) * hash_cell_;
          const auto it = hash_.find(hash_key(probe, hash_cell_, n_));
          if (it == hash_.end()) continue;
          for (int idx : it->second) {
            const double d = x.dist(cloud_[static_cast<size_t>(idx)]);
            if (d < best_d) { best_d = d; best = idx; }
          }
        }
    if (best >= 0 && best_d <= radius) break;
    radius *= 2.0;
  }
  if (best < 0) {
    // Hash rings exhausted (query far outside the domain): brute force.
    for (size_t i = 0; i < cloud_.size(); ++i) {
      const double d = x.dist(cloud_[i]);
      if (d < best_d) { best_d = d; best = static_cast<int>(i); }
    }
  }
  np.distance = best_d;
  np.point = cloud_[static_cast<size_t>(best)];
  np.tangent = tangent_from_normal(cloud_normals_[static_cast<size_t>(best)]);
  return np;
}

bool tangency_check(const Tube& t, const Variety& Z, const Ball& B, double c_tang) {
  if (!(B.radius > 0)) throw std::invalid_argument("tangency_check: ball radius must be positive");
  const double delta = t.radius;
  const double threshold = c_tang * delta / B.radius;
  const int n = t.center.dim();

  // Orthonormal cross-section frame.
  std::vector<Vec> frame;
  if (n == 2) {
    frame = {t.dir.perp()};
  } else {
    Vec seed = std::abs(t.dir[0]) < 0.9 ? Vec(1, 0, 0) : Vec(0, 1, 0);
    const Vec w1 = (seed - seed.dot(t.dir) * t.dir).normalized();
    frame = {w1, t.dir.cross(w1)};
  }

  const double step = delta / 4.0;
  const int axial_steps = static_cast<int>(std::ceil(1.0 / step));
  const int radial_steps = 4;  // delta / step
  bool meets_ball_near_z = false;

  for (int s = 0; s <= axial_steps; ++s) {
    const Vec axis = tube_axis_point(t, -0.5 + s * (1.0 / axial_steps));
    for (int i = -radial_steps; i <= radial_steps; ++i) {
      const int jmax = n == 3 ? radial_steps : 0;
      for (int j = -jmax; j <= jmax; ++j) {
        Vec w = static_cast<double>(i) * step * frame[0];
        if (n == 3) w += static_cast<double>(j) * step * frame[1];
        if (w.norm() > delta + 1e-15) continue;
        const Vec x = axis + w;
        const NearestPoint np = Z.nearest(x);
        if (B.contains(x) && np.distance <= delta) meets_ball_near_z = true;
        // Inclusion: T within the double ball must stay inside N_{2 delta}(Z).
        if (x.dist(B.center) <= 2 * B.radius && np.distance > 2 * delta) return false;
        // Angular condition against the tangent space at the nearest point.
        if (np.distance <= 4 * delta && np.point.dist(B.center) <= 2 * B.radius) {
          const double angle = np.tangent.basis.empty()
                                   ? kPi / 2
                                   : angle_to_subspace(t.dir, np.tangent);
          if (angle > threshold + 1e-12) return false;
        }
      }
    }
  }
  return meets_ball_near_z;
}

double neighborhood_volume(const Variety& Z, const Ball& B, double delta, double grid_res) {
  if (!(delta > 0)) throw std::invalid_argument("neighborhood_volume: delta must be positive");
  if (!(grid_res > 0) || grid_res > delta / 2.0 + 1e-15)
    throw std::invalid_argument("neighborhood_volume: resolution too coarse (need <= delta/2)");
  const int n = B.center.dim();
  std::array<long, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int i = 0; i < n; ++i) {
    lo[static_cast<size_t>(i)] = static_cast<long>(std::floor((B.center[i] - B.radius) / grid_res));
    hi[static_cast<size_t>(i)] = static_cast<long>(std::ceil((B.center[i] + B.radius) / grid_res));
  }
  long count = 0;
  const long z0 = n == 3 ? lo[2] : 0, z1 = n == 3 ? hi[2] : 0;
  for (long ix = lo[0]; ix <= hi[0]; ++ix)
    for (long iy = lo[1]; iy <= hi[1]; ++iy)
      for (long iz = z0; iz <= z1; ++iz) {
        Vec x(n);
        x[0] = (ix + 0.5) * grid_res;
        x[1] = (iy + 0.5) * grid_res;
        if (n == 3) x[2] = (iz + 0.5) * grid_res;
        if (B.contains(x) && Z.distance(x) <= delta) ++count;
      }
  return static_cast<double>(count) * std::pow(grid_res, n);
}

}  // namespace kakeya
