#pragma once

#include <vector>

#include "kakeya/geometry.hpp"
#include "kakeya/rational.hpp"

namespace kakeya {

// Univariate polynomial with exact rational coefficients, lowest degree
// first. Everything here is exact arithmetic; doubles only enter through
// Rational::from_double, which is itself exact.
struct RatPoly {
  std::vector<Rational> c;

  int degree() const;  // -1 for the zero polynomial
  bool is_zero() const { return degree() < 0; }
  Rational eval(const Rational& x) const;
  RatPoly derivative() const;
};

RatPoly poly_add(const RatPoly& a, const RatPoly& b);
RatPoly poly_scale(const RatPoly& a, const Rational& s);
RatPoly poly_mul(const RatPoly& a, const RatPoly& b);
// Euclidean remainder a mod b; b must be nonzero.
RatPoly poly_rem(const RatPoly& a, const RatPoly& b);
// Exact quotient; throws logic_error when b does not divide a.
RatPoly poly_divexact(const RatPoly& a, const RatPoly& b);
// GCD normalized to positive leading coefficient.
RatPoly poly_gcd(RatPoly a, RatPoly b);
// p / gcd(p, p'): same distinct roots, all simple.
RatPoly square_free_part(const RatPoly& p);

// Canonical Sturm chain of a (square-free) polynomial.
struct SturmChain {
  std::vector<RatPoly> seq;
  // Sign variations of the chain evaluated at x, zeros skipped.
  int variations(const Rational& x) const;
};

SturmChain sturm_chain(const RatPoly& p);

// Number of DISTINCT real roots in the closed interval [a, b], exact.
// Endpoint roots are detected by evaluation and peeled off by synthetic
// division, so no perturbation arguments are needed. Throws on a == b or the
// zero polynomial.
long count_distinct_roots(const RatPoly& p, const Rational& a, const Rational& b);

// Bivariate polynomial with exact rational coefficients (the partitioning
// polynomials live in the plane).
struct BiTerm {
  int i = 0, j = 0;  // exponents of x and y
  Rational c;
};

struct BiPoly {
  std::vector<BiTerm> terms;

  int degree() const;
  bool is_zero() const { return terms.empty(); }
  double eval(double x, double y) const;
  Rational eval_exact(const Rational& x, const Rational& y) const;
  void combine_like_terms();  // merge duplicate exponent pairs, drop zeros
};

BiPoly bipoly_mul(const BiPoly& a, const BiPoly& b);

// Exact restriction of P to the line t -> center + t*dir (coordinates are
// converted to rationals exactly).
RatPoly restrict_to_line(const BiPoly& P, const Vec& center, const Vec& dir);

}  // namespace kakeya
