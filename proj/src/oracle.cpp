#include "comsearch/oracle.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

#include "comsearch/enumerate.hpp"

namespace comsearch {

namespace {

void check_same_order(const RationalSeries& a, const RationalSeries& b) {
  if (a.order != b.order) throw std::invalid_argument("series order mismatch");
}

}  // namespace

RationalSeries series_add(const RationalSeries& a, const RationalSeries& b) {
  check_same_order(a, b);
  RationalSeries r(a.order);
  for (int i = 0; i <= a.order; i++) r.coeff[i] = a.coeff[i] + b.coeff[i];
  return r;
}

RationalSeries series_sub(const RationalSeries& a, const RationalSeries& b) {
  check_same_order(a, b);
  RationalSeries r(a.order);
  for (int i = 0; i <= a.order; i++) r.coeff[i] = a.coeff[i] - b.coeff[i];
  return r;
}

RationalSeries series_scale(const RationalSeries& a, const Rational& k) {
  RationalSeries r(a.order);
  for (int i = 0; i <= a.order; i++) r.coeff[i] = a.coeff[i] * k;
  return r;
}

RationalSeries series_mul(const RationalSeries& a, const RationalSeries& b) {
  check_same_order(a, b);
  RationalSeries r(a.order);
  for (int i = 0; i <= a.order; i++)
    for (int j = 0; i + j <= a.order; j++) r.coeff[i + j] += a.coeff[i] * b.coeff[j];
  return r;
}

RationalSeries series_exp(const RationalSeries& a) {
  if (a.coeff[0] != 0) throw std::invalid_argument("series_exp requires a zero constant term");
  RationalSeries b(a.order);
  b.coeff[0] = 1;
  for (int k = 0; k + 1 <= a.order; k++) {
    Rational s = 0;
    for (int j = 0; j <= k; j++) s += Rational(j + 1) * a.coeff[j + 1] * b.coeff[k - j];
    b.coeff[k + 1] = s / Rational(k + 1);
  }
  return b;
}

bool series_equal(const RationalSeries& a, const RationalSeries& b) {
  if (a.order != b.order) return false;
  for (int i = 0; i <= a.order; i++)
    if (a.coeff[i] != b.coeff[i]) return false;
  return true;
}

std::vector<Integer> egf_counts(int max_order) {
  if (max_order < 1 || max_order > 12)
    throw std::invalid_argument("egf_counts supports orders 1..12");
  const int N = max_order;
  RationalSeries z(N), one(N);
  z.coeff[1] = 1;
  one.coeff[0] = 1;
  RationalSeries up(N), ud(N), tp(N), td(N);
  auto step = [&](RationalSeries& a, RationalSeries& b, RationalSeries& c, RationalSeries& d) {
    RationalSeries up2 = series_sub(series_add(z, series_exp(b)), series_add(one, b));
    RationalSeries ud2 =
        series_sub(series_sub(series_add(z, series_exp(series_scale(a, 2))), series_exp(a)), a);
    RationalSeries tp2 = series_sub(series_add(series_scale(z, 2), series_exp(d)), series_add(one, d));
    RationalSeries td2 = series_sub(
        series_sub(series_add(series_scale(z, 2), series_scale(series_exp(c), 2)),
                   series_scale(series_exp(series_scale(c, Rational(1, 2))), 2)),
        c);
    a = up2;
    b = ud2;
    c = tp2;
    d = td2;
  };
  for (int it = 0; it < N + 1; it++) step(up, ud, tp, td);
  // one more pass must leave every coefficient unchanged
  RationalSeries fup = up, fud = ud, ftp = tp, ftd = td;
  step(fup, fud, ftp, ftd);
  if (!series_equal(fup, up) || !series_equal(fud, ud) || !series_equal(ftp, tp) || !series_equal(ftd, td))
    throw std::runtime_error("EGF fixed point failed to converge");

  RationalSeries U = series_sub(series_add(up, ud), z);
  RationalSeries T = series_sub(series_add(tp, td), series_scale(z, 2));
  RationalSeries S = series_sub(T, U);
  std::vector<Integer> out;
  Integer fact = 1;
  for (int n = 1; n <= N; n++) {
    fact *= n;
    Rational v = S.coeff[n] * Rational(fact);
    if (v.get_den() != 1) throw std::runtime_error("non-integral EGF count");
    out.push_back(v.get_num());
  }
  return out;
}

Integer brute_force_count(int n) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  return factorial(n) * factorial(n - 1) * int_pow(4, n - 1);
}

namespace {

// distinct binary operator trees over labeled leaves, with the children of
// + and * sorted recursively; counted by materializing canonical strings
Integer commutative_class_count(int n) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; i++) perm[i] = i;
  std::set<std::string> classes;
  const char ops[] = "+-*/";
  // canonical string of every tree over the leaf slice [lo, hi) of perm
  std::function<std::vector<std::string>(int, int)> gen = [&](int lo, int hi) {
    std::vector<std::string> out;
    if (hi - lo == 1) {
      out.push_back("v" + std::to_string(perm[lo]));
      return out;
    }
    for (int mid = lo + 1; mid < hi; mid++) {
      auto L = gen(lo, mid);
      auto R = gen(mid, hi);
      for (auto& l : L)
        for (auto& r : R)
          for (int op = 0; op < 4; op++) {
            bool comm = op == 0 || op == 2;
            const std::string &a = (comm && r < l) ? r : l, &b = (comm && r < l) ? l : r;
            out.push_back("(" + a + ops[op] + b + ")");
          }
    }
    return out;
  };
  do {
    for (auto& s : gen(0, n)) classes.insert(s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return Integer(static_cast<unsigned long>(classes.size()));
}

}  // namespace

Integer baseline_count(int n, BaselineRule rule, bool allow_long) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (n == 1) return 1;
  if (rule == BaselineRule::NoBrackets)
    return factorial(n) * factorial(n - 1) * 4 * int_pow(3, n - 2);
  if (n > 5 && !allow_long)
    throw CapacityError("commutative baseline is long-running beyond n=5; opt in explicitly");
  if (n > 6) throw CapacityError("commutative baseline supports n <= 6");
  return commutative_class_count(n);
}

std::string format_ratio_one_decimal(const Integer& num, const Integer& den) {
  // round(10*num/den) / 10, half away from zero
  Integer scaled = 10 * num;
  Integer q = (2 * scaled + den) / (2 * den);
  Integer whole = q / 10, tenth = q % 10;
  return whole.get_str() + "." + tenth.get_str();
}

CountReport compression_report(int max_n, bool allow_long) {
  if (max_n < 1 || max_n > 6) throw CapacityError("compression report supports n <= 6");
  auto egf = egf_counts(std::max(max_n, 1));
  CountReport report;
  for (int n = 1; n <= max_n; n++) {
    CountRow row;
    row.n = n;
    row.brute_force = brute_force_count(n);
    row.no_brackets = baseline_count(n, BaselineRule::NoBrackets);
    row.commutative = baseline_count(n, BaselineRule::Commutative, allow_long);
    row.comsearch = count_skeletons(n);
    if (row.comsearch != egf[n - 1]) throw std::runtime_error("enumerator count disagrees with the EGF");
    row.ratio = format_ratio_one_decimal(row.brute_force, row.comsearch);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace comsearch
