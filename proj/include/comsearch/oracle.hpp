#ifndef COMSEARCH_ORACLE_HPP
#define COMSEARCH_ORACLE_HPP

#include <string>
#include <vector>

#include "comsearch/rational.hpp"

namespace comsearch {

// Truncated power series with exact rational coefficients.
struct RationalSeries {
  int order = 0;
  std::vector<Rational> coeff;  // coeff[k] is [z^k], size order+1

  explicit RationalSeries(int n) : order(n), coeff(n + 1, Rational(0)) {}
};

RationalSeries series_add(const RationalSeries& a, const RationalSeries& b);
RationalSeries series_sub(const RationalSeries& a, const RationalSeries& b);
RationalSeries series_scale(const RationalSeries& a, const Rational& k);
RationalSeries series_mul(const RationalSeries& a, const RationalSeries& b);

// exp(a) for a with zero constant term, via the derivative recurrence.
RationalSeries series_exp(const RationalSeries& a);

bool series_equal(const RationalSeries& a, const RationalSeries& b);

// s_1..s_N from the coupled EGF fixed points:
//   U+ = z + e^{U/} - 1 - U/            U/ = z + e^{2U+} - e^{U+} - U+
//   T+-= 2z + e^{T/} - 1 - T/           T/ = 2z + 2e^{T+-} - 2e^{T+-/2} - T+-
//   S = (T+- + T/ - 2z) - (U+ + U/ - z),   s_n = n! [z^n] S
std::vector<Integer> egf_counts(int max_order);

// n! (n-1)! 4^(n-1), the unrestricted search-space size.
Integer brute_force_count(int n);

enum class BaselineRule { NoBrackets, Commutative };

// NoBrackets: bracket-removal cuts each operator choice after the first from
// four to three: n! (n-1)! 4 3^(n-2).
// Commutative: classes of distinct binary operator trees after recursively
// sorting the children of + and * nodes, counted by explicit enumeration and
// dedup (n <= 5 by default; n = 6 is long-running and needs allow_long).
Integer baseline_count(int n, BaselineRule rule, bool allow_long = false);

struct CountRow {
  int n = 0;
  Integer brute_force, no_brackets, commutative, comsearch;
  std::string ratio;  // brute_force / comsearch, one decimal
};

struct CountReport {
  std::vector<CountRow> rows;
};

// comsearch column from the enumerator's count, cross-checked against the EGF.
CountReport compression_report(int max_n, bool allow_long = false);

std::string format_ratio_one_decimal(const Integer& num, const Integer& den);

}  // namespace comsearch

#endif
