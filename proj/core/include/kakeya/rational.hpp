#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <string>

namespace kakeya {

// Exact rational scalar for the closed-form exponent engine.
//
// Thin value wrapper over GMP's mpq_class that enforces the contract the
// engine relies on everywhere: values are always canonical (lowest terms,
// denominator > 0), construction from a zero denominator throws, and powers
// with integer exponents are exact. The table at n = 1000 manipulates
// integers of several thousand decimal digits, so fixed-width arithmetic is
// not an option.
class Rational {
 public:
  Rational() : q_(0) {}
  Rational(int v) : q_(v) {}                 // NOLINT: implicit by design
  Rational(long v) : q_(static_cast<signed long>(v)) {}
  Rational(long num, long den);
  explicit Rational(const mpz_class& z) : q_(z) {}
  explicit Rational(const mpq_class& q);

  // Exact conversion: every finite double is a binary rational.
  static Rational from_double(double x);

  mpz_class numerator() const { return q_.get_num(); }
  mpz_class denominator() const { return q_.get_den(); }

  double to_double() const { return q_.get_d(); }
  bool is_integer() const { return q_.get_den() == 1; }
  int sign() const { return sgn(q_); }

  // "a/b", or just "a" when the denominator is 1.
  std::string str() const;

  // Exact integer power; negative exponents invert (0^negative throws).
  Rational pow(long e) const;
  Rational reciprocal() const;

  Rational operator-() const { return Rational(mpq_class(-q_)); }
  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.q_ < b.q_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.q_ <= b.q_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.q_ > b.q_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.q_ >= b.q_; }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r);

 private:
  mpq_class q_;
};

}  // namespace kakeya
