#include "kakeya/polynomial.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

namespace kakeya {

namespace {

void trim(RatPoly& p) {
  while (!p.c.empty() && p.c.back().sign() == 0) p.c.pop_back();
}

// Scale by a positive rational so every coefficient is a coprime integer.
// Positive scaling preserves all sign information, which is what the Sturm
// chain cares about, and keeps remainder-sequence coefficients small.
void make_primitive(RatPoly& p) {
  trim(p);
  if (p.c.empty()) return;
  mpz_class den_lcm = 1, num_gcd = 0;
  for (const Rational& q : p.c) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(),
                                        q.denominator().get_mpz_t());
  for (const Rational& q : p.c) {
    mpz_class scaled = q.numerator() * (den_lcm / q.denominator());
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), scaled.get_mpz_t());
  }
  if (num_gcd == 0) return;
  const Rational s(mpq_class(den_lcm, num_gcd));
  for (Rational& q : p.c) q = q * s;
}

}  // namespace

int RatPoly::degree() const {
  int d = static_cast<int>(c.size()) - 1;
  while (d >= 0 && c[static_cast<size_t>(d)].sign() == 0) --d;
  return d;
}

Rational RatPoly::eval(const Rational& x) const {
  Rational acc(0);
  for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
  return acc;
}

RatPoly RatPoly::derivative() const {
  RatPoly d;
  for (size_t i = 1; i < c.size(); ++i) d.c.push_back(Rational(static_cast<long>(i)) * c[i]);
  trim(d);
  return d;
}

RatPoly poly_add(const RatPoly& a, const RatPoly& b) {
  RatPoly out;
  out.c.resize(std::max(a.c.size(), b.c.size()), Rational(0));
  for (size_t i = 0; i < a.c.size(); ++i) out.c[i] = out.c[i] + a.c[i];
  for (size_t i = 0; i < b.c.size(); ++i) out.c[i] = out.c[i] + b.c[i];
  trim(out);
  return out;
}

RatPoly poly_scale(const RatPoly& a, const Rational& s) {
  RatPoly out = a;
  for (Rational& q : out.c) q = q * s;
  trim(out);
  return out;
}

RatPoly poly_mul(const RatPoly& a, const RatPoly& b) {
  if (a.c.empty() || b.c.empty()) return {};
  RatPoly out;
  out.c.resize(a.c.size() + b.c.size() - 1, Rational(0));
  for (size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i].sign() == 0) continue;
    for (size_t j = 0; j < b.c.size(); ++j) out.c[i + j] = out.c[i + j] + a.c[i] * b.c[j];
  }
  trim(out);
  return out;
}

RatPoly poly_rem(const RatPoly& a, const RatPoly& b) {
  const int db = b.degree();
  if (db < 0) throw std::invalid_argument("poly_rem: division by zero polynomial");
  RatPoly r = a;
  trim(r);
  const Rational lead_inv = b.c[static_cast<size_t>(db)].reciprocal();
  while (r.degree() >= db) {
    const int dr = r.degree();
    const Rational q = r.c[static_cast<size_t>(dr)] * lead_inv;
    for (int i = 0; i <= db; ++i) {
      const size_t k = static_cast<size_t>(dr - db + i);
      r.c[k] = r.c[k] - q * b.c[static_cast<size_t>(i)];
    }
    trim(r);
  }
  return r;
}

RatPoly poly_divexact(const RatPoly& a, const RatPoly& b) {
  const int db = b.degree();
  if (db < 0) throw std::invalid_argument("poly_divexact: division by zero polynomial");
  RatPoly r = a;
  trim(r);
  RatPoly q;
  q.c.resize(r.c.empty() ? 0 : std::max<size_t>(1, r.c.size()), Rational(0));
  const Rational lead_inv = b.c[static_cast<size_t>(db)].reciprocal();
  while (r.degree() >= db) {
    const int dr = r.degree();
    const Rational f = r.c[static_cast<size_t>(dr)] * lead_inv;
    q.c[static_cast<size_t>(dr - db)] = f;
    for (int i = 0; i <= db; ++i) {
      const size_t k = static_cast<size_t>(dr - db + i);
      r.c[k] = r.c[k] - f * b.c[static_cast<size_t>(i)];
    }
    trim(r);
  }
  if (!r.c.empty()) throw std::logic_error("poly_divexact: remainder is nonzero");
  trim(q);
  return q;
}

RatPoly poly_gcd(RatPoly a, RatPoly b) {
  make_primitive(a);
  make_primitive(b);
  while (b.degree() >= 0) {
    RatPoly r = poly_rem(a, b);
    make_primitive(r);
    a = std::move(b);
    b = std::move(r);
  }
  if (a.degree() >= 0 && a.c[static_cast<size_t>(a.degree())].sign() < 0)
    a = poly_scale(a, Rational(-1));
  return a;
}

RatPoly square_free_part(const RatPoly& p) {
  const int d = p.degree();
  if (d <= 0) return p;
  RatPoly g = poly_gcd(p, p.derivative());
  if (g.degree() <= 0) {
    RatPoly out = p;
    trim(out);
    return out;
  }
  return poly_divexact(p, g);
}

int SturmChain::variations(const Rational& x) const {
  int count = 0, prev = 0;
  for (const RatPoly& p : seq) {
    const int s = p.eval(x).sign();
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++count;
    prev = s;
  }
  return count;
}

SturmChain sturm_chain(const RatPoly& p) {
  SturmChain chain;
  RatPoly p0 = p;
  make_primitive(p0);
  if (p0.degree() < 0) return chain;
  chain.seq.push_back(p0);
  RatPoly p1 = p0.derivative();
  make_primitive(p1);
  while (p1.degree() >= 0) {
    chain.seq.push_back(p1);
    RatPoly r = poly_scale(poly_rem(chain.seq[chain.seq.size() - 2], p1), Rational(-1));
    make_primitive(r);
    p1 = std::move(r);
  }
  return chain;
}

long count_distinct_roots(const RatPoly& p, const Rational& a, const Rational& b) {
  if (!(a < b)) throw std::invalid_argument("count_distinct_roots: need a < b");
  RatPoly q = square_free_part(p);
  if (q.degree() < 0)
    throw std::invalid_argument("count_distinct_roots: zero polynomial has no root count");
  if (q.degree() == 0) return 0;

  long endpoint_roots = 0;
  // Peel endpoint roots off exactly: square-free means multiplicity one.
  if (q.eval(a).sign() == 0) {
    ++endpoint_roots;
    RatPoly lin;
    lin.c = {Rational(0) - a, Rational(1)};
    q = poly_divexact(q, lin);
  }
  if (q.degree() >= 1 && q.eval(b).sign() == 0) {
    ++endpoint_roots;
    RatPoly lin;
    lin.c = {Rational(0) - b, Rational(1)};
    q = poly_divexact(q, lin);
  }
  if (q.degree() < 1) return endpoint_roots;

  const SturmChain chain = sturm_chain(q);
  return endpoint_roots + (chain.variations(a) - chain.variations(b));
}

int BiPoly::degree() const {
  int d = -1;
  for (const BiTerm& t : terms)
    if (t.c.sign() != 0) d = std::max(d, t.i + t.j);
  return d < 0 ? 0 : d;
}

double BiPoly::eval(double x, double y) const {
  int max_i = 0, max_j = 0;
  for (const BiTerm& t : terms) {
    max_i = std::max(max_i, t.i);
    max_j = std::max(max_j, t.j);
  }
  std::vector<double> px(static_cast<size_t>(max_i) + 1, 1.0);
  std::vector<double> py(static_cast<size_t>(max_j) + 1, 1.0);
  for (int i = 1; i <= max_i; ++i) px[static_cast<size_t>(i)] = px[static_cast<size_t>(i - 1)] * x;
  for (int j = 1; j <= max_j; ++j) py[static_cast<size_t>(j)] = py[static_cast<size_t>(j - 1)] * y;
  double sum = 0;
  for (const BiTerm& t : terms)
    sum += t.c.to_double() * px[static_cast<size_t>(t.i)] * py[static_cast<size_t>(t.j)];
  return sum;
}

Rational BiPoly::eval_exact(const Rational& x, const Rational& y) const {
  Rational sum(0);
  for (const BiTerm& t : terms) {
    Rational m = t.c;
    for (int k = 0; k < t.i; ++k) m = m * x;
    for (int k = 0; k < t.j; ++k) m = m * y;
    sum = sum + m;
  }
  return sum;
}

void BiPoly::combine_like_terms() {
  std::map<std::pair<int, int>, Rational> acc;
  for (const BiTerm& t : terms) {
    auto [it, inserted] = acc.emplace(std::make_pair(t.i, t.j), t.c);
    if (!inserted) it->second = it->second + t.c;
  }
  terms.clear();
  for (const auto& [ij, c] : acc)
    if (c.sign() != 0) terms.push_back(BiTerm{ij.first, ij.second, c});
}

BiPoly bipoly_mul(const BiPoly& a, const BiPoly& b) {
  BiPoly out;
  out.terms.reserve(a.terms.size() * b.terms.size());
  for (const BiTerm& s : a.terms)
    for (const BiTerm& t : b.terms) out.terms.push_back(BiTerm{s.i + t.i, s.j + t.j, s.c * t.c});
  out.combine_like_terms();
  return out;
}

RatPoly restrict_to_line(const BiPoly& P, const Vec& center, const Vec& dir) {
  if (center.dim() != 2 || dir.dim() != 2)
    throw std::invalid_argument("restrict_to_line: planar polynomials only");
  RatPoly x0;
  x0.c = {Rational::from_double(center[0]), Rational::from_double(dir[0])};
  RatPoly y0;
  y0.c = {Rational::from_double(center[1]), Rational::from_double(dir[1])};

  int max_i = 0, max_j = 0;
  for (const BiTerm& t : P.terms) {
    max_i = std::max(max_i, t.i);
    max_j = std::max(max_j, t.j);
  }
  std::vector<RatPoly> px(static_cast<size_t>(max_i) + 1), py(static_cast<size_t>(max_j) + 1);
  px[0].c = {Rational(1)};
  py[0].c = {Rational(1)};
  for (int i = 1; i <= max_i; ++i) px[static_cast<size_t>(i)] = poly_mul(px[static_cast<size_t>(i - 1)], x0);
  for (int j = 1; j <= max_j; ++j) py[static_cast<size_t>(j)] = poly_mul(py[static_cast<size_t>(j - 1)], y0);

  RatPoly out;
  for (const BiTerm& t : P.terms)
    out = poly_add(out, poly_scale(poly_mul(px[static_cast<size_t>(t.i)], py[static_cast<size_t>(t.j)]), t.c));
  return out;
}

}  // namespace kakeya
