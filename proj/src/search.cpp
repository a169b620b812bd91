#include "comsearch/search.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

namespace comsearch {

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved: return "solved";
    case SolveStatus::Unsolved: return "unsolved";
    case SolveStatus::FilteredTooLong: return "filtered-too-long";
    default: return "filtered-power-op";
  }
}

std::optional<SolveStatus> status_from_name(const std::string& name) {
  if (name == "solved") return SolveStatus::Solved;
  if (name == "unsolved") return SolveStatus::Unsolved;
  if (name == "filtered-too-long") return SolveStatus::FilteredTooLong;
  if (name == "filtered-power-op") return SolveStatus::FilteredPowerOp;
  return std::nullopt;
}

bool match_value(const Rational& value, bool value_exact, const Rational& answer, bool answer_exact,
                 const Rational& tolerance) {
  if (value_exact && answer_exact) return value == answer;
  return within_relative_tolerance(value, answer, tolerance);
}

namespace {

CanonPtr leaf_for_constant(const ConstantSpec& c) {
  return c.is_pi ? CanonicalExpr::leaf_pi() : CanonicalExpr::leaf_constant(c.value);
}

// Overflow-checked 128-bit fraction arithmetic for the template evaluation
// hot path; any overflow or oddity falls back to exact GMP evaluation.
struct FastVal {
  __int128 num = 0;
  __int128 den = 1;
};

struct FastEval {
  std::vector<FastVal> values;  // per slot
  bool usable = true;

  explicit FastEval(const std::vector<Rational>& slot_values) {
    values.reserve(slot_values.size());
    for (auto& v : slot_values) {
      if (!v.get_num().fits_slong_p() || !v.get_den().fits_slong_p()) {
        usable = false;
        return;
      }
      values.push_back({static_cast<__int128>(v.get_num().get_si()),
                        static_cast<__int128>(v.get_den().get_si())});
    }
  }

  static bool mul(__int128 a, __int128 b, __int128& out) { return !__builtin_mul_overflow(a, b, &out); }
  static bool add(__int128 a, __int128 b, __int128& out) { return !__builtin_add_overflow(a, b, &out); }

  // returns false on overflow; division by zero reported through zero_division
  bool eval(const CanonPtr& e, FastVal& out, bool& zero_division) const {
    switch (e->kind) {
      case CanonicalExpr::Kind::Leaf:
        // templates hold quantity slots only; anything else goes the slow way
        if (e->leaf_kind != CanonicalExpr::LeafKind::Quantity || e->index < 0 ||
            e->index >= static_cast<int>(values.size()))
          return false;
        out = values[e->index];
        return true;
      case CanonicalExpr::Kind::AddSub: {
        FastVal acc{0, 1};
        auto accumulate = [&](const CanonPtr& c, bool negative) {
          FastVal v;
          if (!eval(c, v, zero_division)) return false;
          __int128 lhs, rhs, den;
          if (!mul(acc.num, v.den, lhs) || !mul(v.num, acc.den, rhs) || !mul(acc.den, v.den, den))
            return false;
          if (negative) rhs = -rhs;
          if (!add(lhs, rhs, acc.num)) return false;
          acc.den = den;
          return true;
        };
        for (auto& c : e->first)
          if (!accumulate(c, false)) return false;
        for (auto& c : e->second)
          if (!accumulate(c, true)) return false;
        out = acc;
        return true;
      }
      default: {
        FastVal acc{1, 1};
        for (auto& c : e->first) {
          FastVal v;
          if (!eval(c, v, zero_division)) return false;
          if (!mul(acc.num, v.num, acc.num) || !mul(acc.den, v.den, acc.den)) return false;
        }
        for (auto& c : e->second) {
          FastVal v;
          if (!eval(c, v, zero_division)) return false;
          if (v.num == 0) {
            zero_division = true;
            return true;
          }
          if (!mul(acc.num, v.den, acc.num) || !mul(acc.den, v.num, acc.den)) return false;
        }
        out = acc;
        return true;
      }
    }
  }
};

Rational fastval_to_rational(const FastVal& v) {
  auto to_mpz = [](__int128 x) {
    bool neg = x < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(x + 1)) + 1 : static_cast<unsigned __int128>(x);
    Integer hi(static_cast<unsigned long>(u >> 64));
    Integer lo(static_cast<unsigned long>(u & 0xffffffffffffffffULL));
    Integer r = (hi << 64) + lo;
    return neg ? Integer(-r) : r;
  };
  Rational r(to_mpz(v.num), to_mpz(v.den));
  r.canonicalize();
  return r;
}

// Replaces slot leaves by the mapped leaves; structure is untouched, canonical
// form is re-established by the caller.
CanonPtr substitute(const CanonPtr& tpl, const std::vector<CanonPtr>& slot_leaves) {
  if (tpl->kind == CanonicalExpr::Kind::Leaf) {
    if (tpl->leaf_kind != CanonicalExpr::LeafKind::Quantity)
      return tpl;
    return slot_leaves.at(tpl->index);
  }
  std::vector<CanonPtr> first, second;
  first.reserve(tpl->first.size());
  second.reserve(tpl->second.size());
  for (auto& c : tpl->first) first.push_back(substitute(c, slot_leaves));
  for (auto& c : tpl->second) second.push_back(substitute(c, slot_leaves));
  return CanonicalExpr::node(tpl->kind, std::move(first), std::move(second));
}

struct StageRunner {
  const Problem& p;
  const TemplateBank& bank;
  const SearchConfig& cfg;
  std::map<std::string, Candidate> found;  // keyed by canonical infix

  StageRunner(const Problem& p_, const TemplateBank& bank_, const SearchConfig& cfg_)
      : p(p_), bank(bank_), cfg(cfg_) {}

  // Templates are evaluated directly against the slot values; the canonical
  // instantiated tree is materialized only for the few that match.
  void try_templates(int slot_count, const std::vector<CanonPtr>& slot_leaves,
                     const std::vector<Rational>& slot_values, bool instantiation_exact) {
    if (slot_count < 1 || slot_count > bank.max_n) return;
    Assignment a;
    a.values = slot_values;
    a.pi_mode = PiMode::Approx;
    a.pi_approx = cfg.pi_approx;

    FastEval fast(slot_values);
    FastVal answer_fast;
    bool fast_path = fast.usable && instantiation_exact && p.answer_exact &&
                     p.answer.get_num().fits_slong_p() && p.answer.get_den().fits_slong_p();
    if (fast_path) {
      answer_fast.num = static_cast<__int128>(p.answer.get_num().get_si());
      answer_fast.den = static_cast<__int128>(p.answer.get_den().get_si());
    }

    for (auto& tpl : bank.templates(slot_count)) {
      Rational value;
      if (fast_path) {
        FastVal fv;
        bool zero_division = false;
        if (fast.eval(tpl, fv, zero_division)) {
          if (zero_division) continue;
          __int128 lhs, rhs;
          if (FastEval::mul(fv.num, answer_fast.den, lhs) &&
              FastEval::mul(answer_fast.num, fv.den, rhs)) {
            if (lhs != rhs) continue;  // a/b == c/d iff ad == cb, sign-safe
            value = fastval_to_rational(fv);
          } else {
            value = fastval_to_rational(fv);  // cross-multiply overflowed
            if (value != p.answer) continue;
          }
        } else {
          // evaluation overflow: exact fallback
          EvalResult r = evaluate_exact(tpl, a);
          if (!r.defined || r.value != p.answer) continue;
          value = r.value;
        }
      } else {
        EvalResult r = evaluate_exact(tpl, a);
        if (!r.defined) continue;  // division by zero: skip the instantiation
        if (!match_value(r.value, instantiation_exact, p.answer, p.answer_exact, cfg.tolerance)) continue;
        value = r.value;
      }
      CanonPtr inst = renormalize(substitute(tpl, slot_leaves));
      std::string key = print_canonical_infix(inst);
      if (!found.count(key))
        found.emplace(std::move(key), Candidate{std::move(inst), value, instantiation_exact});
    }
  }

  bool run_stage(SearchStage stage) {
    const int n = static_cast<int>(p.quantities.size());
    const std::vector<Rational> values = p.quantity_values();
    std::vector<CanonPtr> slots;
    std::vector<Rational> slot_values;
    switch (stage) {
      case SearchStage::AllNumbers: {
        for (int i = 0; i < n; i++) slots.push_back(CanonicalExpr::leaf_quantity(i));
        try_templates(n, slots, values, true);
        break;
      }
      case SearchStage::OmitOne: {
        if (n < 2) break;
        for (int omit = 0; omit < n; omit++) {
          slots.clear();
          slot_values.clear();
          for (int i = 0; i < n; i++) {
            if (i == omit) continue;
            slots.push_back(CanonicalExpr::leaf_quantity(i));
            slot_values.push_back(values[i]);
          }
          try_templates(n - 1, slots, slot_values, true);
        }
        break;
      }
      case SearchStage::AddConstant: {
        for (auto& c : cfg.constants) {
          slots.clear();
          slot_values = values;
          for (int i = 0; i < n; i++) slots.push_back(CanonicalExpr::leaf_quantity(i));
          slots.push_back(leaf_for_constant(c));
          slot_values.push_back(c.is_pi ? cfg.pi_approx : c.value);
          try_templates(n + 1, slots, slot_values, !c.is_pi);
        }
        break;
      }
      case SearchStage::ReuseOne: {
        for (int reuse = 0; reuse < n; reuse++) {
          slots.clear();
          slot_values = values;
          for (int i = 0; i < n; i++) slots.push_back(CanonicalExpr::leaf_quantity(i));
          slots.push_back(CanonicalExpr::leaf_quantity(reuse));
          slot_values.push_back(values[reuse]);
          try_templates(n + 1, slots, slot_values, true);
        }
        break;
      }
    }
    return !found.empty();
  }
};

}  // namespace

CandidateSet extract_candidates(const Problem& p, const TemplateBank& bank, const SearchConfig& cfg) {
  if (cfg.tolerance < 0) throw std::invalid_argument("tolerance must be non-negative");
  if (cfg.enable_stage[2] && cfg.constants.empty())
    throw std::invalid_argument("the add-constant stage needs a non-empty constants list");
  CandidateSet out;
  out.problem_id = p.id;
  out.n_quantities = static_cast<int>(p.quantities.size());

  if (p.gold_power_op) {
    out.status = SolveStatus::FilteredPowerOp;
    return out;
  }
  if (out.n_quantities > cfg.max_vars) {
    out.status = SolveStatus::FilteredTooLong;
    return out;
  }
  if (out.n_quantities < 1) {
    out.status = SolveStatus::Unsolved;
    return out;
  }

  StageRunner runner(p, bank, cfg);
  for (int s = 0; s < 4; s++) {
    if (!cfg.enable_stage[s]) continue;
    if (runner.run_stage(static_cast<SearchStage>(s))) {
      out.status = SolveStatus::Solved;
      out.stage = s;
      for (auto& [key, cand] : runner.found) out.equations.push_back(cand);
      std::sort(out.equations.begin(), out.equations.end(),
                [](const Candidate& a, const Candidate& b) { return compare_canonical(a.expr, b.expr) < 0; });
      return out;
    }
  }
  out.status = SolveStatus::Unsolved;
  return out;
}

TemplateBank build_or_load_bank(int max_n, const std::string& cache_path) {
  namespace fs = std::filesystem;
  if (!cache_path.empty() && fs::exists(cache_path)) {
    try {
      TemplateBank bank = load_bank(cache_path);
      if (bank.max_n >= max_n) return bank;
    } catch (const std::exception&) {
      // stale or corrupt cache: rebuild below
    }
  }
  TemplateBank bank = build_template_bank(max_n);
  if (!cache_path.empty()) {
    fs::path p(cache_path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    save_bank(bank, cache_path);
  }
  return bank;
}

}  // namespace comsearch
