#ifndef COMSEARCH_RATIONAL_HPP
#define COMSEARCH_RATIONAL_HPP

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace comsearch {

using Rational = mpq_class;
using Integer = mpz_class;

struct ValueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses "29", "-3", "1/5", "3.14", "2.50" into an exact rational.
// Decimals are exact: "3.14" -> 157/50. Returns nullopt on malformed input.
std::optional<Rational> try_parse_rational(const std::string& text);

// Same, but throws ValueError on malformed input.
Rational parse_rational(const std::string& text);

// mpq_class(n, d) does not reduce; this does.
inline Rational make_rational(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Canonical rendering: "p/q" with q > 1, plain "p" for integers.
std::string rational_to_string(const Rational& v);

// |a - b| <= tol * max(1, |b|)
bool within_relative_tolerance(const Rational& a, const Rational& b, const Rational& tol);

Integer factorial(unsigned n);
Integer int_pow(unsigned base, unsigned exp);

}  // namespace comsearch

#endif
