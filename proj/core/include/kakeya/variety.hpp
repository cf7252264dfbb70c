#pragma once

#include <array>
#include <unordered_map>
#include <vector>

#include "kakeya/geometry.hpp"
#include "kakeya/rational.hpp"
#include "kakeya/tube.hpp"

namespace kakeya {

// Dense-enough description of an algebraic variety for the tangency and
// covering experiments. Catalog members (hyperplanes, affine subspaces,
// spheres, quadric graphs) answer nearest-point queries in closed form or by
// certified Newton polish, exact to 1e-12. Everything else falls back to a
// sampled point cloud with spacing <= delta/4 inside its stated domain.

struct PolyTerm {
  std::array<int, 3> exp{};  // exponents of x, y, z (z unused when n = 2)
  Rational coeff;
};

struct MultiPoly {
  int n = 0;
  std::vector<PolyTerm> terms;

  double eval(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  int degree() const;
};

struct NearestPoint {
  double distance = 0;
  Vec point;         // a closest point of Z
  Subspace tangent;  // tangent space of Z there (empty basis for 0-dim Z)
};

enum class VarietyKind { Hyperplane, AffineSubspace, Sphere, QuadricGraph, PointCloud };

class Variety {
 public:
  // {x : normal . x = offset}; the normal is normalized internally.
  static Variety hyperplane(const Vec& normal, double offset);
  // base + span(dirs); dirs may be empty (a point). dim(dirs) < n.
  static Variety affine_subspace(const Vec& base, const std::vector<Vec>& dirs);
  static Variety sphere(const Vec& center, double rho);
  // Graph x_n = q(x_1..x_{n-1}). n = 2: coeffs {a,b,c} for a u^2 + b u + c.
  // n = 3: coeffs {a,b,c,d,e,f} for a u^2 + b uv + c v^2 + d u + e v + f.
  static Variety quadric_graph(int n, const std::vector<double>& coeffs);
  // Codimension-1 zero set of P sampled inside `domain` at `spacing` (which
  // must be <= delta/4 for the delta the caller will query at).
  static Variety zero_set(const MultiPoly& P, const Box& domain, double spacing);

  VarietyKind kind() const { return kind_; }
  int ambient() const { return n_; }
  int dimension() const { return dim_; }
  int degree() const { return degree_; }
  const std::vector<MultiPoly>& polynomials() const { return polys_; }

  NearestPoint nearest(const Vec& x) const;
  double distance(const Vec& x) const { return nearest(x).distance; }

 private:
  Variety() = default;

  VarietyKind kind_ = VarietyKind::Hyperplane;
  int n_ = 0, dim_ = 0, degree_ = 1;
  std::vector<MultiPoly> polys_;

  // Hyperplane.
  Vec normal_;
  double offset_ = 0;
  // Affine subspace.
  Vec base_;
  std::vector<Vec> dirs_;  // orthonormal
  // Sphere.
  Vec center_;
  double rho_ = 0;
  // Quadric graph.
  std::vector<double> q_;
  // Point cloud.
  std::vector<Vec> cloud_;
  std::vector<Vec> cloud_normals_;
  double spacing_ = 0;
  double hash_cell_ = 0;
  std::unordered_map<long long, std::vector<int>> hash_;

  NearestPoint nearest_quadric2(const Vec& x) const;
  NearestPoint nearest_quadric3(const Vec& x) const;
  NearestPoint nearest_cloud(const Vec& x) const;
};

// Tangency of a delta-tube to Z inside B = B(x0, r), with angular tolerance
// c_tang * delta / r:
//   (i)   T meets B inside N_delta(Z);
//   (ii)  for sampled x in T whose nearest z in Z satisfies |z - x| <= 4 delta
//         and z in B(x0, 2r): angle(dir T, T_z Z) <= c_tang * delta / r;
//   (iii) T intersect B(x0, 2r) lies inside N_{2 delta}(Z).
// Sample spacing delta/4. Any violation returns false.
bool tangency_check(const Tube& t, const Variety& Z, const Ball& B, double c_tang = 0.1);

// Grid estimate of |B intersect N_delta(Z)| at midpoint resolution grid_res
// (<= delta/2), relative accuracy O(grid_res / delta).
double neighborhood_volume(const Variety& Z, const Ball& B, double delta, double grid_res);

}  // namespace kakeya
