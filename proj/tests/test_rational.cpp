#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "comsearch/rational.hpp"

using namespace comsearch;

TEST_CASE("parsing integers, fractions, decimals") {
  CHECK(parse_rational("29") == Rational(29));
  CHECK(parse_rational("1/5") == Rational(1, 5));
  CHECK(parse_rational("3.14") == Rational(157, 50));
  CHECK(parse_rational("2.50") == Rational(5, 2));
  CHECK(parse_rational("-3") == Rational(-3));
  CHECK(parse_rational("0.2") == Rational(1, 5));
  CHECK(parse_rational(" 42 ") == Rational(42));
}

TEST_CASE("percent suffixes and wrapping parentheses") {
  CHECK(parse_rational("50%") == Rational(1, 2));
  CHECK(parse_rational("20%") == Rational(1, 5));
  CHECK(parse_rational("(3/2)") == Rational(3, 2));
  CHECK(parse_rational("12.5%") == Rational(1, 8));
}

TEST_CASE("malformed input is rejected") {
  CHECK(!try_parse_rational("").has_value());
  CHECK(!try_parse_rational("abc").has_value());
  CHECK(!try_parse_rational("1/0").has_value());
  CHECK(!try_parse_rational("1.2.3").has_value());
  CHECK_THROWS_AS(parse_rational("x"), ValueError);
}

TEST_CASE("rendering is canonical") {
  CHECK(rational_to_string(Rational(6, 4)) == "3/2");
  CHECK(rational_to_string(Rational(8, 4)) == "2");
  CHECK(rational_to_string(Rational(-1, 5)) == "-1/5");
}

TEST_CASE("relative tolerance uses max(1, |reference|)") {
  Rational tol(1, 10000);
  CHECK(within_relative_tolerance(Rational(10000), Rational(10001), tol));
  CHECK(!within_relative_tolerance(Rational(10000), Rational(10003), tol));
  // near zero the bound is absolute
  CHECK(within_relative_tolerance(Rational(1, 100000), Rational(0), tol));
  CHECK(!within_relative_tolerance(Rational(1, 100), Rational(0), tol));
}

TEST_CASE("factorial and powers") {
  CHECK(factorial(0) == 1);
  CHECK(factorial(6) == 720);
  CHECK(int_pow(4, 5) == 1024);
  CHECK(int_pow(3, 0) == 1);
}
