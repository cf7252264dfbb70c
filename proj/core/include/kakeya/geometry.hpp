#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace kakeya {

inline constexpr double kPi = 3.14159265358979323846;

// Volume of the unit k-ball, k <= 3 (the simulator lives in R^2 and R^3).
double unit_ball_volume(int k);

// Small dense vector with runtime dimension 2 or 3. The geometric simulator
// never needs more, and a fixed footprint keeps the quadrature loops flat.
class Vec {
 public:
  Vec() : n_(0) {}
  explicit Vec(int n);
  Vec(double x, double y) : n_(2) { v_ = {x, y, 0.0}; }
  Vec(double x, double y, double z) : n_(3) { v_ = {x, y, z}; }

  int dim() const { return n_; }
  double operator[](int i) const { return v_[static_cast<size_t>(i)]; }
  double& operator[](int i) { return v_[static_cast<size_t>(i)]; }

  Vec& operator+=(const Vec& o);
  Vec& operator-=(const Vec& o);
  Vec& operator*=(double s);
  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  Vec operator-() const;
  friend bool operator==(const Vec& a, const Vec& b) { return a.n_ == b.n_ && a.v_ == b.v_; }

  double dot(const Vec& o) const;
  double norm2() const { return dot(*this); }
  double norm() const;
  double dist(const Vec& o) const { return (*this - o).norm(); }
  Vec normalized() const;  // throws on (near-)zero
  Vec cross(const Vec& o) const;  // dimension 3 only
  Vec perp() const;               // dimension 2 only: rotate by +pi/2

 private:
  std::array<double, 3> v_{};
  int n_;
};

// Angle between the lines spanned by u and v (antipodal directions
// identified), in [0, pi/2].
double line_angle(const Vec& u, const Vec& v);

// Linear subspace of R^n given by an orthonormal basis, dim 1 or 2.
struct Subspace {
  int ambient = 0;
  std::vector<Vec> basis;  // orthonormal

  int dim() const { return static_cast<int>(basis.size()); }
  Vec project(const Vec& x) const;
};

// Gram-Schmidt; throws when the spanning set is (numerically) degenerate.
Subspace make_subspace(int ambient, const std::vector<Vec>& spanning);

// Unsigned angle between a vector and a subspace, in [0, pi/2]; the zero
// vector is rejected. A vector inside V has angle 0; orthogonal gives pi/2.
double angle_to_subspace(const Vec& v, const Subspace& V);

// Infimum of angle_to_subspace over a spherical cap of diameter beta around
// omega, evaluated as max(0, angle(omega, V) - beta/2).
double cap_angle_to_subspace(const Vec& omega, double beta, const Subspace& V);

struct Ball {
  Vec center;
  double radius = 0;
  bool contains(const Vec& x) const { return center.dist(x) <= radius; }
};

struct Box {
  Vec lo, hi;  // axis-aligned, lo <= hi componentwise
  bool contains(const Vec& x) const;
  Vec extent() const { return hi - lo; }
  double volume() const;
  Box inflated(double margin) const;
  Box union_with(const Box& o) const;
};

// Evaluation region for norms: a ball or an axis-aligned box.
class Region {
 public:
  static Region ball(const Ball& b) { Region r; r.is_ball_ = true; r.ball_ = b; return r; }
  static Region box(const Box& b) { Region r; r.is_ball_ = false; r.box_ = b; return r; }

  bool contains(const Vec& x) const { return is_ball_ ? ball_.contains(x) : box_.contains(x); }
  Box bounding_box() const;
  bool is_ball() const { return is_ball_; }
  const Ball& as_ball() const { return ball_; }
  const Box& as_box() const { return box_; }

 private:
  bool is_ball_ = false;
  Ball ball_;
  Box box_;
};

}  // namespace kakeya
