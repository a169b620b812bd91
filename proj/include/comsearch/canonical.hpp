#ifndef COMSEARCH_CANONICAL_HPP
#define COMSEARCH_CANONICAL_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "comsearch/expr.hpp"
#include "comsearch/rational.hpp"

namespace comsearch {

// Representative form of an equation class. Alternating layers: children of an
// add-sub node are leaves or mul-div nodes and vice versa; every internal node
// has at least two children across its two multisets; the plus part and the
// numerator are never empty. Child lists are sorted under compare_canonical, so
// equal classes are structurally identical trees.
//
// Sign handling follows the class algebra behind the certified count sequence:
// at a mul-div node, factor orientations are normalized (each sign-flippable
// add-sub factor stored as the smaller of itself and its plus/minus swap), and
// the accumulated sign is pushed outward. A negated value is realized by
// swapping the top plus/minus parts, or, for a pure sum, by anti-orienting its
// least flippable child into the plus slot.
struct CanonicalExpr;
using CanonPtr = std::shared_ptr<const CanonicalExpr>;

struct CanonicalExpr {
  enum class Kind { Leaf, AddSub, MulDiv };
  enum class LeafKind { Quantity, Constant, Pi };

  Kind kind;
  LeafKind leaf_kind = LeafKind::Quantity;
  int index = -1;
  Rational value;
  std::vector<CanonPtr> first;   // plus part / numerator
  std::vector<CanonPtr> second;  // minus part / denominator
  bool flippable = false;        // some add-sub descendant has a non-empty minus part

  static CanonPtr leaf_quantity(int index);
  static CanonPtr leaf_constant(Rational value);
  static CanonPtr leaf_pi();
  // Children are sorted on construction.
  static CanonPtr node(Kind kind, std::vector<CanonPtr> first, std::vector<CanonPtr> second);
};

// Strict total order: leaf < add-sub < mul-div; leaves by (quantity index,
// constant value, pi); internal nodes by lexicographic child-list comparison.
int compare_canonical(const CanonPtr& a, const CanonPtr& b);
bool canonical_equal(const CanonPtr& a, const CanonPtr& b);

// (sign, shape) decomposition used internally and by negation/augmentation.
struct SignedCanon {
  int sign;  // +1 or -1
  CanonPtr shape;
};

CanonPtr canonicalize(const BinaryExprPtr& e);

// Re-establishes canonical form after leaf payloads changed (sorting, orbit
// representatives and the outward sign may all need recomputation).
CanonPtr renormalize(const CanonPtr& e);

// Canonical tree for -e, when representable (no unary minus in the grammar).
std::optional<CanonPtr> negate_canonical(const CanonPtr& e);

SignedCanon decompose_canonical(const CanonPtr& e);
CanonPtr realize_signed(const SignedCanon& sc);

// Deterministic infix with minimal brackets; quantities print as n1, n2, ...
std::string print_canonical_infix(const CanonPtr& e);

// Fast reader for text produced by print_canonical_infix. Trusts that the
// input is already in canonical form (bank loading validates the fingerprint
// afterwards); no orbit renormalization is performed.
CanonPtr read_canonical_infix(const std::string& text);

// Left-folded binary prefix tokens; quantities print as N0, N1, ...
std::vector<std::string> to_prefix_tokens(const CanonPtr& e);

enum class PiMode { Barred, Approx };

struct Assignment {
  std::vector<Rational> values;
  PiMode pi_mode = PiMode::Approx;
  Rational pi_approx = Rational(Integer("314159265358979"), Integer("100000000000000"));
};

struct EvalResult {
  bool defined = false;  // false: division by zero
  bool exact = true;     // false: a pi leaf was substituted
  Rational value;
};

EvalResult evaluate_exact(const BinaryExprPtr& e, const Assignment& a);
EvalResult evaluate_exact(const CanonPtr& e, const Assignment& a);

bool equivalent(const BinaryExprPtr& e1, const BinaryExprPtr& e2);

// Randomized cross-check: evaluates both expressions at k seeded rational
// assignments; returns false only if some assignment separates them.
bool equivalent_randomized(const BinaryExprPtr& e1, const BinaryExprPtr& e2, int quantity_count, int k,
                           uint64_t seed);

}  // namespace comsearch

#endif
