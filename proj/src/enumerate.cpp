#include "comsearch/enumerate.hpp"

#include <algorithm>
#include <fstream>
#include <map>

namespace comsearch {

namespace {

using Mask = uint32_t;

struct ShapeGen {
  // memo[(mask, kind)] -> shapes (orbit representatives) over that leaf set
  std::map<std::pair<Mask, int>, std::vector<CanonPtr>> memo;

  std::vector<CanonPtr> child_options(Mask block, CanonicalExpr::Kind kind) {
    if (__builtin_popcount(block) == 1)
      return {CanonicalExpr::leaf_quantity(__builtin_ctz(block))};
    return shapes(block, kind);
  }

  void partitions(Mask mask, std::vector<Mask>& cur, std::vector<std::vector<Mask>>& out) {
    if (!mask) {
      out.push_back(cur);
      return;
    }
    Mask low = mask & (~mask + 1);
    Mask rest = mask & ~low;
    for (Mask sub = rest;; sub = (sub - 1) & rest) {
      cur.push_back(low | sub);
      partitions(mask & ~(low | sub), cur, out);
      cur.pop_back();
      if (!sub) break;
    }
  }

  std::vector<CanonPtr> shapes(Mask mask, CanonicalExpr::Kind kind) {
    auto key = std::make_pair(mask, static_cast<int>(kind));
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    CanonicalExpr::Kind other =
        kind == CanonicalExpr::Kind::AddSub ? CanonicalExpr::Kind::MulDiv : CanonicalExpr::Kind::AddSub;
    std::vector<CanonPtr> result;
    std::vector<std::vector<Mask>> parts;
    std::vector<Mask> cur;
    partitions(mask, cur, parts);
    for (auto& blocks : parts) {
      size_t k = blocks.size();
      if (k < 2) continue;
      std::vector<std::vector<CanonPtr>> opts;
      opts.reserve(k);
      for (Mask b : blocks) opts.push_back(child_options(b, other));
      std::vector<size_t> idx(k, 0);
      while (true) {
        std::vector<CanonPtr> children(k);
        for (size_t i = 0; i < k; i++) children[i] = opts[i][idx[i]];
        for (Mask sel = 0; sel < (Mask(1) << k); sel++) {
          std::vector<CanonPtr> first, second;
          for (size_t i = 0; i < k; i++) (((sel >> i) & 1) ? second : first).push_back(children[i]);
          if (first.empty()) continue;  // plus part / numerator never empty
          if (kind == CanonicalExpr::Kind::AddSub && !second.empty()) {
            // keep one representative per plus/minus swap orbit
            CanonPtr f = CanonicalExpr::node(kind, first, second);
            CanonPtr g = CanonicalExpr::node(kind, second, first);
            if (compare_canonical(f, g) > 0) continue;
            result.push_back(f);
          } else {
            result.push_back(CanonicalExpr::node(kind, std::move(first), std::move(second)));
          }
        }
        size_t i = k;
        while (i > 0 && ++idx[i - 1] == opts[i - 1].size()) idx[--i] = 0;
        if (i == 0) break;
      }
    }
    memo[key] = result;
    return result;
  }
};

}  // namespace

std::vector<CanonPtr> enum_skeletons(int n, int max_n) {
  if (n < 1) throw CapacityError("operand count must be at least 1");
  if (n > max_n || n > kMaxEnumerableN)
    throw CapacityError("operand count " + std::to_string(n) + " exceeds the enumeration cap");
  std::vector<CanonPtr> out;
  if (n == 1) {
    out.push_back(CanonicalExpr::leaf_quantity(0));
    return out;
  }
  ShapeGen gen;
  Mask full = (Mask(1) << n) - 1;
  for (auto kind : {CanonicalExpr::Kind::AddSub, CanonicalExpr::Kind::MulDiv}) {
    for (auto& s : gen.shapes(full, kind)) {
      out.push_back(s);
      if (s->flippable) out.push_back(realize_signed({-1, s}));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const CanonPtr& a, const CanonPtr& b) { return compare_canonical(a, b) < 0; });
  return out;
}

namespace {

// Partition-sum tables: W_c(m) over set partitions of m labeled items with
// per-block weight w and per-block factor c; K_c excludes the single-block
// partition. Drives all four count families.
struct PartitionTable {
  std::vector<Integer> w, W1, W2, K1, K2;
  const std::vector<std::vector<Integer>>& binom;

  PartitionTable(int n, const std::vector<std::vector<Integer>>& C)
      : w(n + 1), W1(n + 1), W2(n + 1), K1(n + 1), K2(n + 1), binom(C) {
    w[1] = 1;
    W1[1] = 1;
    W2[1] = 2;
  }

  void compute_k(int m) {
    K1[m] = 0;
    K2[m] = 0;
    for (int j = 1; j <= m - 1; j++) {
      K1[m] += binom[m - 1][j - 1] * w[j] * W1[m - j];
      K2[m] += binom[m - 1][j - 1] * 2 * w[j] * W2[m - j];
    }
  }

  void close(int m) {
    W1[m] = K1[m] + w[m];
    W2[m] = K2[m] + 2 * w[m];
  }
};

}  // namespace

Integer count_skeletons(int n) {
  if (n < 1) throw CapacityError("operand count must be at least 1");
  if (n == 1) return 1;
  std::vector<std::vector<Integer>> C(n, std::vector<Integer>(n, 0));
  for (int i = 0; i < n; i++) {
    C[i][0] = 1;
    for (int j = 1; j <= i; j++) C[i][j] = C[i - 1][j - 1] + (j <= i - 1 ? C[i - 1][j] : Integer(0));
  }
  // orbit counts: additive orbits (o), multiplicative orbits (mo),
  // rigid = minus-free structures (rp additive, rd multiplicative)
  PartitionTable To(n, C), Tm(n, C), Tp(n, C), Td(n, C);
  Integer o_n = 1, mo_n = 0, rp_n = 1, rd_n = 0;
  for (int m = 2; m <= n; m++) {
    To.compute_k(m);
    Tm.compute_k(m);
    Tp.compute_k(m);
    Td.compute_k(m);
    o_n = To.K2[m] / 2;
    mo_n = Tm.K2[m] - Tm.K1[m];
    rp_n = Tp.K1[m];
    rd_n = Td.K2[m] - Td.K1[m];
    To.w[m] = mo_n;   // additive children are multiplicative orbits
    Tm.w[m] = o_n;    // multiplicative children are additive orbits
    Tp.w[m] = rd_n;   // minus-free additive over minus-free multiplicative
    Td.w[m] = rp_n;
    To.close(m);
    Tm.close(m);
    Tp.close(m);
    Td.close(m);
  }
  // every orbit yields one template, flippable orbits a second (negated) one
  return 2 * (o_n + mo_n) - (rp_n + rd_n);
}

std::vector<CanonPtr> augment_with_negations(const std::vector<CanonPtr>& skeletons) {
  std::vector<CanonPtr> out = skeletons;
  std::map<std::string, bool> present;
  for (auto& s : skeletons) present[print_canonical_infix(s)] = true;
  for (auto& s : skeletons) {
    auto neg = negate_canonical(s);
    if (!neg) continue;
    std::string key = print_canonical_infix(*neg);
    if (!present.count(key)) {
      present[key] = true;
      out.push_back(*neg);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const CanonPtr& a, const CanonPtr& b) { return compare_canonical(a, b) < 0; });
  return out;
}

namespace {

void notation_rec(const CanonPtr& e, std::string& out) {
  if (e->kind == CanonicalExpr::Kind::Leaf) {
    if (e->leaf_kind == CanonicalExpr::LeafKind::Quantity)
      out += e->index < 26 ? std::string(1, static_cast<char>('a' + e->index))
                           : "v" + std::to_string(e->index + 1);
    else if (e->leaf_kind == CanonicalExpr::LeafKind::Pi)
      out += "@";
    else
      out += "[" + rational_to_string(e->value) + "]";
    return;
  }
  auto child = [&out](const CanonPtr& c) {
    if (c->kind == CanonicalExpr::Kind::Leaf) {
      notation_rec(c, out);
    } else {
      out += "(";
      notation_rec(c, out);
      out += ")";
    }
  };
  for (auto& c : e->first) child(c);
  if (!e->second.empty()) {
    out += "&";
    for (auto& c : e->second) child(c);
  }
}

}  // namespace

std::string skeleton_notation(const CanonPtr& e) {
  std::string out;
  notation_rec(e, out);
  return out;
}

const std::vector<CanonPtr>& TemplateBank::templates(int n) const {
  if (n < 1 || n > max_n) throw CapacityError("bank does not cover size " + std::to_string(n));
  return per_n[n - 1];
}

TemplateBank build_template_bank(int max_n) {
  if (max_n < 1 || max_n > kMaxEnumerableN)
    throw CapacityError("bank size must be between 1 and " + std::to_string(kMaxEnumerableN));
  TemplateBank bank;
  bank.max_n = max_n;
  bank.per_n.resize(max_n);
  for (int n = 1; n <= max_n; n++) {
    bank.per_n[n - 1] = enum_skeletons(n, max_n);
    if (Integer(static_cast<unsigned long>(bank.per_n[n - 1].size())) != count_skeletons(n))
      throw std::logic_error("template bank size disagrees with the certified count at n=" +
                             std::to_string(n));
  }
  bank.fingerprint = bank_fingerprint(bank);
  return bank;
}

namespace {

constexpr uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr uint64_t kFnvPrime = 1099511628211ULL;

void fnv(uint64_t& h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  h ^= '\n';
  h *= kFnvPrime;
}

}  // namespace

uint64_t bank_fingerprint(const TemplateBank& bank) {
  uint64_t h = kFnvOffset;
  fnv(h, "comsearch-bank v1");
  fnv(h, std::to_string(bank.max_n));
  for (int n = 1; n <= bank.max_n; n++) {
    fnv(h, std::to_string(n) + ":" + std::to_string(bank.per_n[n - 1].size()));
    for (auto& s : bank.per_n[n - 1]) fnv(h, print_canonical_infix(s));
  }
  return h;
}

void save_bank(const TemplateBank& bank, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write bank file: " + path);
  out << "comsearch-bank v1\n";
  out << "max_n " << bank.max_n << "\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(bank.fingerprint));
  out << "fingerprint " << buf << "\n";
  for (int n = 1; n <= bank.max_n; n++) {
    out << "n " << n << " count " << bank.per_n[n - 1].size() << "\n";
    for (auto& s : bank.per_n[n - 1]) out << print_canonical_infix(s) << "\n";
  }
}

TemplateBank load_bank(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read bank file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "comsearch-bank v1")
    throw std::runtime_error("bad bank header in " + path);
  TemplateBank bank;
  uint64_t declared = 0;
  if (!(in >> line >> bank.max_n) || line != "max_n") throw std::runtime_error("bad bank max_n line");
  if (!(in >> line)) throw std::runtime_error("bad bank fingerprint line");
  std::string fp;
  if (line != "fingerprint" || !(in >> fp)) throw std::runtime_error("bad bank fingerprint line");
  declared = std::stoull(fp, nullptr, 16);
  bank.per_n.resize(bank.max_n);
  uint64_t h = kFnvOffset;
  fnv(h, "comsearch-bank v1");
  fnv(h, std::to_string(bank.max_n));
  for (int n = 1; n <= bank.max_n; n++) {
    size_t count = 0;
    int nn = 0;
    if (!(in >> line >> nn >> line >> count) || nn != n) throw std::runtime_error("bad bank section header");
    std::getline(in, line);  // eat newline
    fnv(h, std::to_string(n) + ":" + std::to_string(count));
    bank.per_n[n - 1].reserve(count);
    for (size_t i = 0; i < count; i++) {
      if (!std::getline(in, line)) throw std::runtime_error("truncated bank file");
      fnv(h, line);
      bank.per_n[n - 1].push_back(read_canonical_infix(line));
    }
  }
  bank.fingerprint = h;
  if (bank.fingerprint != declared) throw std::runtime_error("bank fingerprint mismatch in " + path);
  return bank;
}

}  // namespace comsearch
