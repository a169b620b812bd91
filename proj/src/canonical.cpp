#include "comsearch/canonical.hpp"

#include <algorithm>
#include <cassert>

#include "comsearch/rng.hpp"

namespace comsearch {

namespace {

bool less_canonical(const CanonPtr& a, const CanonPtr& b) { return compare_canonical(a, b) < 0; }

CanonPtr make_leaf(CanonicalExpr::LeafKind lk, int index, Rational value) {
  auto e = std::make_shared<CanonicalExpr>();
  e->kind = CanonicalExpr::Kind::Leaf;
  e->leaf_kind = lk;
  e->index = index;
  e->value = std::move(value);
  e->flippable = false;
  return e;
}

}  // namespace

CanonPtr CanonicalExpr::leaf_quantity(int index) { return make_leaf(LeafKind::Quantity, index, Rational(0)); }
CanonPtr CanonicalExpr::leaf_constant(Rational value) { return make_leaf(LeafKind::Constant, -1, std::move(value)); }
CanonPtr CanonicalExpr::leaf_pi() { return make_leaf(LeafKind::Pi, -1, Rational(0)); }

CanonPtr CanonicalExpr::node(Kind kind, std::vector<CanonPtr> first, std::vector<CanonPtr> second) {
  assert(kind != Kind::Leaf);
  auto e = std::make_shared<CanonicalExpr>();
  e->kind = kind;
  std::sort(first.begin(), first.end(), less_canonical);
  std::sort(second.begin(), second.end(), less_canonical);
  e->flippable = (kind == Kind::AddSub && !second.empty());
  for (auto& c : first) e->flippable = e->flippable || c->flippable;
  for (auto& c : second) e->flippable = e->flippable || c->flippable;
  e->first = std::move(first);
  e->second = std::move(second);
  return e;
}

namespace {

int compare_lists(const std::vector<CanonPtr>& u, const std::vector<CanonPtr>& v) {
  size_t n = std::min(u.size(), v.size());
  for (size_t i = 0; i < n; i++) {
    int c = compare_canonical(u[i], v[i]);
    if (c) return c;
  }
  if (u.size() != v.size()) return u.size() < v.size() ? -1 : 1;
  return 0;
}

int leaf_rank(CanonicalExpr::LeafKind lk) {
  switch (lk) {
    case CanonicalExpr::LeafKind::Quantity: return 0;
    case CanonicalExpr::LeafKind::Constant: return 1;
    default: return 2;
  }
}

}  // namespace

int compare_canonical(const CanonPtr& a, const CanonPtr& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind != b->kind) return static_cast<int>(a->kind) < static_cast<int>(b->kind) ? -1 : 1;
  if (a->kind == CanonicalExpr::Kind::Leaf) {
    int ra = leaf_rank(a->leaf_kind), rb = leaf_rank(b->leaf_kind);
    if (ra != rb) return ra < rb ? -1 : 1;
    if (a->leaf_kind == CanonicalExpr::LeafKind::Quantity)
      return a->index < b->index ? -1 : (a->index > b->index ? 1 : 0);
    if (a->leaf_kind == CanonicalExpr::LeafKind::Constant)
      return a->value < b->value ? -1 : (a->value > b->value ? 1 : 0);
    return 0;  // pi == pi
  }
  int c = compare_lists(a->first, b->first);
  if (c) return c;
  return compare_lists(a->second, b->second);
}

bool canonical_equal(const CanonPtr& a, const CanonPtr& b) { return compare_canonical(a, b) == 0; }

// ---------------------------------------------------------------------------
// canonicalization
// ---------------------------------------------------------------------------

namespace {

// Builds the add-sub orbit representative from signed terms. Terms are
// (sign, shape) with mul-div shapes already net-canonical.
SignedCanon build_addsub(std::vector<std::pair<int, CanonPtr>> terms) {
  std::vector<CanonPtr> plus, minus;
  for (auto& [sg, sh] : terms) (sg > 0 ? plus : minus).push_back(sh);
  if (minus.empty()) return {+1, CanonicalExpr::node(CanonicalExpr::Kind::AddSub, std::move(plus), {})};
  if (plus.empty()) return {-1, CanonicalExpr::node(CanonicalExpr::Kind::AddSub, std::move(minus), {})};
  CanonPtr f = CanonicalExpr::node(CanonicalExpr::Kind::AddSub, plus, minus);
  CanonPtr g = CanonicalExpr::node(CanonicalExpr::Kind::AddSub, minus, plus);
  if (compare_canonical(f, g) <= 0) return {+1, f};
  return {-1, g};
}

SignedCanon build_muldiv(int sign, std::vector<CanonPtr> num, std::vector<CanonPtr> den) {
  if (num.empty()) throw std::logic_error("mul-div node with empty numerator");
  return {sign, CanonicalExpr::node(CanonicalExpr::Kind::MulDiv, std::move(num), std::move(den))};
}

SignedCanon canon_rec(const BinaryExprPtr& e) {
  switch (e->kind) {
    case BinaryExpr::Kind::Quantity: return {+1, CanonicalExpr::leaf_quantity(e->index)};
    case BinaryExpr::Kind::Constant: return {+1, CanonicalExpr::leaf_constant(e->value)};
    case BinaryExpr::Kind::Pi: return {+1, CanonicalExpr::leaf_pi()};
    case BinaryExpr::Kind::Binary: break;
  }
  SignedCanon l = canon_rec(e->left);
  SignedCanon r = canon_rec(e->right);
  if (e->op == BinOp::Add || e->op == BinOp::Sub) {
    std::vector<std::pair<int, CanonPtr>> terms;
    auto add_terms = [&terms](const SignedCanon& s, int mul) {
      if (s.shape->kind == CanonicalExpr::Kind::AddSub) {
        for (auto& c : s.shape->first) terms.emplace_back(mul * s.sign, c);
        for (auto& c : s.shape->second) terms.emplace_back(-mul * s.sign, c);
      } else {
        terms.emplace_back(mul * s.sign, s.shape);
      }
    };
    add_terms(l, +1);
    add_terms(r, e->op == BinOp::Add ? +1 : -1);
    return build_addsub(std::move(terms));
  }
  std::vector<CanonPtr> num, den;
  auto add_factors = [&num, &den](const SignedCanon& s, bool numerator) {
    if (s.shape->kind == CanonicalExpr::Kind::MulDiv) {
      for (auto& c : s.shape->first) (numerator ? num : den).push_back(c);
      for (auto& c : s.shape->second) (numerator ? den : num).push_back(c);
    } else {
      (numerator ? num : den).push_back(s.shape);
    }
  };
  add_factors(l, true);
  add_factors(r, e->op == BinOp::Mul);
  return build_muldiv(l.sign * r.sign, std::move(num), std::move(den));
}

// realize(-1, shape): proper tree for the negated value
CanonPtr realize_neg(const CanonPtr& shape) {
  assert(shape->flippable);
  if (shape->kind == CanonicalExpr::Kind::AddSub) {
    if (!shape->second.empty())
      return CanonicalExpr::node(CanonicalExpr::Kind::AddSub, shape->second, shape->first);
    // pure sum: anti-orient the least flippable child
    CanonPtr best;
    for (auto& c : shape->first)
      if (c->flippable && (!best || compare_canonical(c, best) < 0)) best = c;
    assert(best);
    std::vector<CanonPtr> minus;
    bool removed = false;
    for (auto& c : shape->first) {
      if (!removed && c.get() == best.get()) {
        removed = true;
        continue;
      }
      minus.push_back(c);
    }
    return CanonicalExpr::node(CanonicalExpr::Kind::AddSub, {realize_neg(best)}, std::move(minus));
  }
  // mul-div: anti-orient the least flippable child, wherever it sits
  CanonPtr best;
  for (auto& c : shape->first)
    if (c->flippable && (!best || compare_canonical(c, best) < 0)) best = c;
  for (auto& c : shape->second)
    if (c->flippable && (!best || compare_canonical(c, best) < 0)) best = c;
  assert(best);
  bool done = false;
  std::vector<CanonPtr> num, den;
  for (auto& c : shape->first) {
    if (!done && c.get() == best.get()) {
      num.push_back(realize_neg(c));
      done = true;
    } else {
      num.push_back(c);
    }
  }
  for (auto& c : shape->second) {
    if (!done && c.get() == best.get()) {
      den.push_back(realize_neg(c));
      done = true;
    } else {
      den.push_back(c);
    }
  }
  return CanonicalExpr::node(CanonicalExpr::Kind::MulDiv, std::move(num), std::move(den));
}

// Recomputes (sign, shape) of a structurally canonical-shaped tree whose leaf
// payloads or orientations may be stale.
SignedCanon decompose_rec(const CanonPtr& e) {
  if (e->kind == CanonicalExpr::Kind::Leaf) return {+1, e};
  if (e->kind == CanonicalExpr::Kind::AddSub) {
    std::vector<std::pair<int, CanonPtr>> terms;
    for (auto& c : e->first) {
      SignedCanon s = decompose_rec(c);
      terms.emplace_back(s.sign, s.shape);
    }
    for (auto& c : e->second) {
      SignedCanon s = decompose_rec(c);
      terms.emplace_back(-s.sign, s.shape);
    }
    return build_addsub(std::move(terms));
  }
  int sign = +1;
  std::vector<CanonPtr> num, den;
  for (auto& c : e->first) {
    SignedCanon s = decompose_rec(c);
    sign *= s.sign;
    num.push_back(s.shape);
  }
  for (auto& c : e->second) {
    SignedCanon s = decompose_rec(c);
    sign *= s.sign;
    den.push_back(s.shape);
  }
  return build_muldiv(sign, std::move(num), std::move(den));
}

}  // namespace

CanonPtr realize_signed(const SignedCanon& sc) {
  if (sc.sign > 0) return sc.shape;
  if (!sc.shape->flippable) throw std::logic_error("negative sign on a rigid shape");
  return realize_neg(sc.shape);
}

CanonPtr canonicalize(const BinaryExprPtr& e) { return realize_signed(canon_rec(e)); }

SignedCanon decompose_canonical(const CanonPtr& e) { return decompose_rec(e); }

CanonPtr renormalize(const CanonPtr& e) { return realize_signed(decompose_rec(e)); }

std::optional<CanonPtr> negate_canonical(const CanonPtr& e) {
  SignedCanon sc = decompose_rec(e);
  if (!sc.shape->flippable) return std::nullopt;
  return realize_signed({-sc.sign, sc.shape});
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

namespace {

std::string leaf_text(const CanonPtr& e, bool one_based) {
  switch (e->leaf_kind) {
    case CanonicalExpr::LeafKind::Quantity:
      return one_based ? "n" + std::to_string(e->index + 1) : "N" + std::to_string(e->index);
    case CanonicalExpr::LeafKind::Constant:
      return rational_to_string(e->value);
    default:
      return "pi";
  }
}

void print_canon_rec(const CanonPtr& e, std::string& out, bool in_den) {
  if (e->kind == CanonicalExpr::Kind::Leaf) {
    std::string s = leaf_text(e, true);
    bool needs = in_den && s.find('/') != std::string::npos;
    if (needs) out += "(";
    out += s;
    if (needs) out += ")";
    return;
  }
  if (e->kind == CanonicalExpr::Kind::AddSub) {
    bool first = true;
    for (auto& c : e->first) {
      if (!first) out += "+";
      first = false;
      print_canon_rec(c, out, false);
    }
    for (auto& c : e->second) {
      out += "-";
      print_canon_rec(c, out, false);
    }
    return;
  }
  auto child = [&out](const CanonPtr& c, bool den) {
    if (c->kind == CanonicalExpr::Kind::AddSub) {
      out += "(";
      print_canon_rec(c, out, false);
      out += ")";
    } else {
      print_canon_rec(c, out, den);
    }
  };
  bool first = true;
  for (auto& c : e->first) {
    if (!first) out += "*";
    first = false;
    child(c, false);
  }
  for (auto& c : e->second) {
    out += "/";
    child(c, true);
  }
}

}  // namespace

std::string print_canonical_infix(const CanonPtr& e) {
  std::string out;
  print_canon_rec(e, out, false);
  return out;
}

namespace {

// minimal recursive-descent over printed canonical text
struct CanonReader {
  const std::string& s;
  size_t pos = 0;

  explicit CanonReader(const std::string& text) : s(text) {}

  [[noreturn]] void fail() { throw ParseError("malformed canonical text: '" + s + "'"); }

  char peek() const { return pos < s.size() ? s[pos] : '\0'; }

  CanonPtr leaf_or_group() {
    char c = peek();
    if (c == '(') {
      pos++;
      CanonPtr inner = add_level();
      if (peek() != ')') fail();
      pos++;
      return inner;
    }
    if (c == 'n' || c == 'N') {
      size_t j = pos + 1, start = j;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) j++;
      if (j == start) fail();
      int idx = std::stoi(s.substr(start, j - start));
      if (c == 'n') idx -= 1;
      pos = j;
      return CanonicalExpr::leaf_quantity(idx);
    }
    if (c == 'p' && s.compare(pos, 2, "pi") == 0) {
      pos += 2;
      return CanonicalExpr::leaf_pi();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = pos;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) j++;
      Rational v = parse_rational(s.substr(pos, j - pos));
      pos = j;
      return CanonicalExpr::leaf_constant(v);
    }
    fail();
  }

  CanonPtr mul_level() {
    CanonPtr first = leaf_or_group();
    if (peek() != '*' && peek() != '/') return first;
    std::vector<CanonPtr> num{first}, den;
    while (peek() == '*' || peek() == '/') {
      char op = s[pos++];
      (op == '*' ? num : den).push_back(leaf_or_group());
    }
    return CanonicalExpr::node(CanonicalExpr::Kind::MulDiv, std::move(num), std::move(den));
  }

  CanonPtr add_level() {
    CanonPtr first = mul_level();
    if (peek() != '+' && peek() != '-') return first;
    std::vector<CanonPtr> plus{first}, minus;
    while (peek() == '+' || peek() == '-') {
      char op = s[pos++];
      (op == '+' ? plus : minus).push_back(mul_level());
    }
    return CanonicalExpr::node(CanonicalExpr::Kind::AddSub, std::move(plus), std::move(minus));
  }
};

}  // namespace

CanonPtr read_canonical_infix(const std::string& text) {
  CanonReader reader(text);
  CanonPtr e = reader.add_level();
  if (reader.pos != text.size()) reader.fail();
  return e;
}

namespace {

void prefix_leaf(const CanonPtr& e, std::vector<std::string>& out) { out.push_back(leaf_text(e, false)); }

void prefix_rec(const CanonPtr& e, std::vector<std::string>& out);

// left fold: ((c0 op c1) op c2) ...; emitted in prefix as op op c0 c1 c2
void prefix_fold(const CanonPtr& e, std::vector<std::string>& out) {
  const bool add = e->kind == CanonicalExpr::Kind::AddSub;
  const std::string pos_op = add ? "+" : "*";
  const std::string neg_op = add ? "-" : "/";
  size_t ops = e->first.size() - 1 + e->second.size();
  std::vector<std::string> prefix_ops;
  for (size_t i = 0; i < e->second.size(); i++) prefix_ops.push_back(neg_op);
  for (size_t i = 0; i + 1 < e->first.size(); i++) prefix_ops.push_back(pos_op);
  (void)ops;
  for (auto& op : prefix_ops) out.push_back(op);
  for (auto& c : e->first) prefix_rec(c, out);
  for (auto& c : e->second) prefix_rec(c, out);
}

void prefix_rec(const CanonPtr& e, std::vector<std::string>& out) {
  if (e->kind == CanonicalExpr::Kind::Leaf) {
    prefix_leaf(e, out);
    return;
  }
  prefix_fold(e, out);
}

}  // namespace

std::vector<std::string> to_prefix_tokens(const CanonPtr& e) {
  std::vector<std::string> out;
  prefix_rec(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

namespace {

struct EvalVisitor {
  const Assignment& a;
  bool exact = true;

  std::optional<Rational> leaf(const CanonicalExpr& e) {
    switch (e.leaf_kind) {
      case CanonicalExpr::LeafKind::Quantity:
        if (e.index < 0 || e.index >= static_cast<int>(a.values.size()))
          throw ValueError("assignment does not cover quantity index " + std::to_string(e.index));
        return a.values[e.index];
      case CanonicalExpr::LeafKind::Constant:
        return e.value;
      default:
        if (a.pi_mode == PiMode::Barred) throw ValueError("pi leaf under symbol-barred evaluation");
        exact = false;
        return a.pi_approx;
    }
  }

  std::optional<Rational> canon(const CanonPtr& e) {
    if (e->kind == CanonicalExpr::Kind::Leaf) return leaf(*e);
    if (e->kind == CanonicalExpr::Kind::AddSub) {
      Rational s = 0;
      for (auto& c : e->first) {
        auto v = canon(c);
        if (!v) return std::nullopt;
        s += *v;
      }
      for (auto& c : e->second) {
        auto v = canon(c);
        if (!v) return std::nullopt;
        s -= *v;
      }
      return s;
    }
    Rational n = 1, d = 1;
    for (auto& c : e->first) {
      auto v = canon(c);
      if (!v) return std::nullopt;
      n *= *v;
    }
    for (auto& c : e->second) {
      auto v = canon(c);
      if (!v) return std::nullopt;
      d *= *v;
    }
    if (d == 0) return std::nullopt;
    return n / d;
  }

  std::optional<Rational> binary(const BinaryExprPtr& e) {
    switch (e->kind) {
      case BinaryExpr::Kind::Quantity: {
        if (e->index < 0 || e->index >= static_cast<int>(a.values.size()))
          throw ValueError("assignment does not cover quantity index " + std::to_string(e->index));
        return a.values[e->index];
      }
      case BinaryExpr::Kind::Constant:
        return e->value;
      case BinaryExpr::Kind::Pi:
        if (a.pi_mode == PiMode::Barred) throw ValueError("pi leaf under symbol-barred evaluation");
        exact = false;
        return a.pi_approx;
      case BinaryExpr::Kind::Binary:
        break;
    }
    auto l = binary(e->left);
    if (!l) return std::nullopt;
    auto r = binary(e->right);
    if (!r) return std::nullopt;
    switch (e->op) {
      case BinOp::Add: return *l + *r;
      case BinOp::Sub: return *l - *r;
      case BinOp::Mul: return *l * *r;
      default:
        if (*r == 0) return std::nullopt;
        return *l / *r;
    }
  }
};

EvalResult finish(EvalVisitor& vis, std::optional<Rational> v) {
  EvalResult r;
  r.defined = v.has_value();
  r.exact = vis.exact;
  if (v) r.value = std::move(*v);
  return r;
}

}  // namespace

EvalResult evaluate_exact(const BinaryExprPtr& e, const Assignment& a) {
  EvalVisitor vis{a};
  return finish(vis, vis.binary(e));
}

EvalResult evaluate_exact(const CanonPtr& e, const Assignment& a) {
  EvalVisitor vis{a};
  return finish(vis, vis.canon(e));
}

bool equivalent(const BinaryExprPtr& e1, const BinaryExprPtr& e2) {
  return canonical_equal(canonicalize(e1), canonicalize(e2));
}

bool equivalent_randomized(const BinaryExprPtr& e1, const BinaryExprPtr& e2, int quantity_count, int k,
                           uint64_t seed) {
  Rng rng(seed);
  for (int i = 0; i < k; i++) {
    Assignment a;
    for (int q = 0; q < quantity_count; q++) a.values.push_back(rng.small_rational());
    EvalResult r1 = evaluate_exact(e1, a);
    EvalResult r2 = evaluate_exact(e2, a);
    if (r1.defined != r2.defined) return false;
    if (r1.defined && r1.value != r2.value) return false;
  }
  return true;
}

}  // namespace comsearch
