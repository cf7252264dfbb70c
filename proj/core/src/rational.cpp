#include "kakeya/rational.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace kakeya {

Rational::Rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

Rational::Rational(const mpq_class& q) : q_(q) {
  if (q_.get_den() == 0) throw std::invalid_argument("Rational: zero denominator");
  q_.canonicalize();
}

Rational Rational::from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("Rational: non-finite double");
  return Rational(mpq_class(x));  // exact binary expansion
}

std::string Rational::str() const {
  if (is_integer()) return q_.get_num().get_str();
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

Rational Rational::pow(long e) const {
  if (e == 0) return Rational(1);
  const bool invert = e < 0;
  const unsigned long ue = invert ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  if (invert && sign() == 0) throw std::domain_error("Rational::pow: 0 to a negative power");
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), q_.get_num().get_mpz_t(), ue);
  mpz_pow_ui(den.get_mpz_t(), q_.get_den().get_mpz_t(), ue);
  mpq_class out;
  if (invert) {
    out = mpq_class(den, num);
  } else {
    out = mpq_class(num, den);
  }
  out.canonicalize();  // sign normalization when inverting negatives
  return Rational(out);
}

Rational Rational::reciprocal() const {
  if (sign() == 0) throw std::domain_error("Rational::reciprocal: zero");
  mpq_class out(q_.get_den(), q_.get_num());
  out.canonicalize();
  return Rational(out);
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.sign() == 0) throw std::domain_error("Rational: division by zero");
  q_ /= o.q_;
  return *this;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace kakeya
