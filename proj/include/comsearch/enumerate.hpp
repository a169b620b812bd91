#ifndef COMSEARCH_ENUMERATE_HPP
#define COMSEARCH_ENUMERATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "comsearch/canonical.hpp"

namespace comsearch {

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Hard cap on materialized enumeration; beyond it only counting is supported.
inline constexpr int kMaxEnumerableN = 7;

// All non-equivalent equation templates over n operand slots, exactly one
// representative per class, sorted under the canonical total order. Leaves are
// quantity slots 0..n-1.
std::vector<CanonPtr> enum_skeletons(int n, int max_n = 6);

// Certified count of enum_skeletons(n) without materializing (partition DP).
Integer count_skeletons(int n);

// Adds the negated counterpart of every subtraction-bearing skeleton whose
// negation is missing. A full template bank is already closed under this.
std::vector<CanonPtr> augment_with_negations(const std::vector<CanonPtr>& skeletons);

// Compact rendering: letters per slot, '&' between positive and negative
// (or numerator and denominator) parts, brackets around compound children.
// a+b -> "ab", a-b -> "a&b", (a*b)-c -> "(ab)&c".
std::string skeleton_notation(const CanonPtr& e);

struct TemplateBank {
  int max_n = 0;
  std::vector<std::vector<CanonPtr>> per_n;  // per_n[k] holds templates over k+1 slots
  uint64_t fingerprint = 0;

  const std::vector<CanonPtr>& templates(int n) const;
};

TemplateBank build_template_bank(int max_n);
void save_bank(const TemplateBank& bank, const std::string& path);
TemplateBank load_bank(const std::string& path);

// FNV-1a over the serialized bank content (also used for cache validation).
uint64_t bank_fingerprint(const TemplateBank& bank);

}  // namespace comsearch

#endif
