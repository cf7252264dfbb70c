#include "kakeya/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kakeya {

double unit_ball_volume(int k) {
  switch (k) {
    case 0: return 1.0;
    case 1: return 2.0;
    case 2: return kPi;
    case 3: return 4.0 * kPi / 3.0;
    default: throw std::invalid_argument("unit_ball_volume: k must be in [0, 3]");
  }
}

Vec::Vec(int n) : n_(n) {
  if (n < 2 || n > 3) throw std::invalid_argument("Vec: dimension must be 2 or 3");
}

Vec& Vec::operator+=(const Vec& o) {
  for (int i = 0; i < n_; ++i) v_[static_cast<size_t>(i)] += o[i];
  return *this;
}

Vec& Vec::operator-=(const Vec& o) {
  for (int i = 0; i < n_; ++i) v_[static_cast<size_t>(i)] -= o[i];
  return *this;
}

Vec& Vec::operator*=(double s) {
  for (int i = 0; i < n_; ++i) v_[static_cast<size_t>(i)] *= s;
  return *this;
}

Vec Vec::operator-() const {
  Vec out = *this;
  return out *= -1.0;
}

double Vec::dot(const Vec& o) const {
  double s = 0;
  for (int i = 0; i < n_; ++i) s += v_[static_cast<size_t>(i)] * o[i];
  return s;
}

double Vec::norm() const { return std::sqrt(norm2()); }

Vec Vec::normalized() const {
  const double len = norm();
  if (len < 1e-14) throw std::invalid_argument("Vec::normalized: zero vector");
  Vec out = *this;
  return out *= 1.0 / len;
}

Vec Vec::cross(const Vec& o) const {
  if (n_ != 3 || o.dim() != 3) throw std::invalid_argument("Vec::cross: dimension 3 only");
  return Vec(v_[1] * o[2] - v_[2] * o[1], v_[2] * o[0] - v_[0] * o[2],
             v_[0] * o[1] - v_[1] * o[0]);
}

Vec Vec::perp() const {
  if (n_ != 2) throw std::invalid_argument("Vec::perp: dimension 2 only");
  return Vec(-v_[1], v_[0]);
}

double line_angle(const Vec& u, const Vec& v) {
  const double denom = u.norm() * v.norm();
  if (denom < 1e-28) throw std::invalid_argument("line_angle: zero vector");
  const double c = std::clamp(std::abs(u.dot(v)) / denom, 0.0, 1.0);
  return std::acos(c);
}

Vec Subspace::project(const Vec& x) const {
  Vec out(ambient);
  for (const Vec& b : basis) out += x.dot(b) * b;
  return out;
}

Subspace make_subspace(int ambient, const std::vector<Vec>& spanning) {
  if (spanning.empty()) throw std::invalid_argument("make_subspace: empty spanning set");
  Subspace V;
  V.ambient = ambient;
  for (const Vec& raw : spanning) {
    if (raw.dim() != ambient) throw std::invalid_argument("make_subspace: dimension mismatch");
    Vec w = raw;
    for (const Vec& b : V.basis) w -= w.dot(b) * b;
    const double len = w.norm();
    if (len < 1e-10) throw std::invalid_argument("make_subspace: degenerate spanning set");
    V.basis.push_back(w * (1.0 / len));
  }
  if (V.dim() >= ambient)
    throw std::invalid_argument("make_subspace: subspace must be proper");
  return V;
}

double angle_to_subspace(const Vec& v, const Subspace& V) {
  if (v.dim() != V.ambient) throw std::invalid_argument("angle_to_subspace: dimension mismatch");
  const double len = v.norm();
  if (len < 1e-14) throw std::invalid_argument("angle_to_subspace: zero vector");
  const Vec par = V.project(v);
  const Vec perp = v - par;
  return std::atan2(perp.norm(), par.norm());
}

double cap_angle_to_subspace(const Vec& omega, double beta, const Subspace& V) {
  return std::max(0.0, angle_to_subspace(omega, V) - beta / 2.0);
}

bool Box::contains(const Vec& x) const {
  for (int i = 0; i < x.dim(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

double Box::volume() const {
  double v = 1;
  for (int i = 0; i < lo.dim(); ++i) v *= std::max(0.0, hi[i] - lo[i]);
  return v;
}

Box Box::inflated(double margin) const {
  Box out = *this;
  for (int i = 0; i < lo.dim(); ++i) {
    out.lo[i] -= margin;
    out.hi[i] += margin;
  }
  return out;
}

Box Box::union_with(const Box& o) const {
  Box out = *this;
  for (int i = 0; i < lo.dim(); ++i) {
    out.lo[i] = std::min(out.lo[i], o.lo[i]);
    out.hi[i] = std::max(out.hi[i], o.hi[i]);
  }
  return out;
}

Box Region::bounding_box() const {
  if (!is_ball_) return box_;
  Box out;
  out.lo = ball_.center;
  out.hi = ball_.center;
  return out.inflated(ball_.radius);
}

}  // namespace kakeya
