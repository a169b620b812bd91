#include "comsearch/rational.hpp"

#include <cctype>

namespace comsearch {

namespace {

bool is_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

std::optional<Rational> try_parse_rational(const std::string& text) {
  std::string s = text;
  // trim
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  // tolerate one layer of wrapping parentheses ("(3/2)") and a percent suffix
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  bool percent = false;
  if (!s.empty() && s.back() == '%') {
    percent = true;
    s.pop_back();
  }
  if (s.empty()) return std::nullopt;

  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    s.erase(s.begin());
  }
  if (s.empty()) return std::nullopt;

  Rational r;
  auto slash = s.find('/');
  auto dot = s.find('.');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!is_digits(num) || !is_digits(den)) return std::nullopt;
    Integer d(den);
    if (d == 0) return std::nullopt;
    r = Rational(Integer(num), d);
  } else if (dot != std::string::npos) {
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if (ip.empty()) ip = "0";
    if (!is_digits(ip) || (!fp.empty() && !is_digits(fp))) return std::nullopt;
    Integer scale = 1;
    for (size_t i = 0; i < fp.size(); i++) scale *= 10;
    r = Rational(Integer(ip) * scale + (fp.empty() ? Integer(0) : Integer(fp)), scale);
  } else {
    if (!is_digits(s)) return std::nullopt;
    r = Rational(Integer(s));
  }
  r.canonicalize();
  if (percent) r /= 100;
  if (neg) r = -r;
  return r;
}

Rational parse_rational(const std::string& text) {
  auto v = try_parse_rational(text);
  if (!v) throw ValueError("malformed rational: '" + text + "'");
  return *v;
}

std::string rational_to_string(const Rational& v) {
  Rational c = v;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

bool within_relative_tolerance(const Rational& a, const Rational& b, const Rational& tol) {
  Rational diff = a - b;
  if (diff < 0) diff = -diff;
  Rational mag = b < 0 ? Rational(-b) : b;
  if (mag < 1) mag = 1;
  return diff <= tol * mag;
}

Integer factorial(unsigned n) {
  Integer r = 1;
  for (unsigned i = 2; i <= n; i++) r *= i;
  return r;
}

Integer int_pow(unsigned base, unsigned exp) {
  Integer r = 1;
  for (unsigned i = 0; i < exp; i++) r *= base;
  return r;
}

}  // namespace comsearch
