#include "comsearch/rank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace comsearch {

namespace {

constexpr const char* kUnk = "<unk>";
constexpr const char* kBos = "<s>";

int clamp_bucket(int n, int max_slots) { return std::max(1, std::min(n, max_slots)); }

}  // namespace

void MarkovScorer::index_vocab() {
  vocab_ids_.clear();
  for (size_t i = 0; i < vocab_.size(); i++) vocab_ids_[vocab_[i]] = static_cast<long>(i);
}

std::string MarkovScorer::context_key(int bucket, const std::vector<std::string>& window) const {
  std::string key = std::to_string(bucket) + "#";
  for (auto& w : window) {
    key += w;
    key += ' ';
  }
  return key;
}

MarkovScorer MarkovScorer::train(const std::vector<TrainExample>& data, const ScorerConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("scorer training requires at least one example");
  if (cfg.order < 1) throw std::invalid_argument("scorer order must be >= 1");
  if (cfg.alpha <= 0) throw std::invalid_argument("smoothing alpha must be positive");
  MarkovScorer s;
  s.cfg_ = cfg;
  s.vocab_ = {"+", "-", "*", "/"};
  for (int i = 0; i < cfg.max_slots; i++) s.vocab_.push_back("N" + std::to_string(i));
  for (auto& c : cfg.constant_tokens) s.vocab_.push_back(c);
  s.vocab_.push_back(kUnk);
  s.index_vocab();

  for (auto& ex : data) {
    int bucket = clamp_bucket(ex.n_quantities, cfg.max_slots);
    std::vector<std::string> window(cfg.order, kBos);
    for (auto& raw : ex.tokens) {
      std::string tok = s.vocab_ids_.count(raw) ? raw : std::string(kUnk);
      std::string key = s.context_key(bucket, window);
      s.counts_[key][tok] += 1;
      s.context_totals_[key] += 1;
      window.erase(window.begin());
      window.push_back(tok);
    }
  }
  return s;
}

double MarkovScorer::sequence_log_prob(int n_quantities, const std::vector<std::string>& tokens) const {
  int bucket = clamp_bucket(n_quantities, cfg_.max_slots);
  const double v = static_cast<double>(vocab_.size());
  double total = 0.0;
  std::vector<std::string> window(cfg_.order, kBos);
  for (auto& raw : tokens) {
    std::string tok = vocab_ids_.count(raw) ? raw : std::string(kUnk);
    std::string key = context_key(bucket, window);
    long ctx_total = 0, tok_count = 0;
    auto ct = context_totals_.find(key);
    if (ct != context_totals_.end()) {
      ctx_total = ct->second;
      auto row = counts_.find(key);
      auto tc = row->second.find(tok);
      if (tc != row->second.end()) tok_count = tc->second;
    }
    double p = (static_cast<double>(tok_count) + cfg_.alpha) /
               (static_cast<double>(ctx_total) + cfg_.alpha * v);
    total += std::log(p);
    window.erase(window.begin());
    window.push_back(tok);
  }
  return total;
}

void MarkovScorer::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write scorer file: " + path);
  out << "comsearch-scorer v1\n";
  out << "order " << cfg_.order << "\n";
  out << "alpha " << cfg_.alpha << "\n";
  out << "max_slots " << cfg_.max_slots << "\n";
  out << "constants";
  for (auto& c : cfg_.constant_tokens) out << " " << c;
  out << "\n";
  out << "entries " << [this] {
    size_t n = 0;
    for (auto& [k, row] : counts_) n += row.size();
    return n;
  }() << "\n";
  for (auto& [key, row] : counts_)
    for (auto& [tok, count] : row) out << key << "\t" << tok << "\t" << count << "\n";
}

MarkovScorer MarkovScorer::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read scorer file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "comsearch-scorer v1")
    throw std::runtime_error("bad scorer header in " + path);
  ScorerConfig cfg;
  cfg.constant_tokens.clear();
  std::string word;
  if (!(in >> word >> cfg.order) || word != "order") throw std::runtime_error("bad scorer order");
  if (!(in >> word >> cfg.alpha) || word != "alpha") throw std::runtime_error("bad scorer alpha");
  if (!(in >> word >> cfg.max_slots) || word != "max_slots") throw std::runtime_error("bad scorer max_slots");
  if (!std::getline(in, line)) throw std::runtime_error("truncated scorer file");
  if (!std::getline(in, line) || line.rfind("constants", 0) != 0)
    throw std::runtime_error("bad scorer constants line");
  {
    std::istringstream cs(line.substr(9));
    while (cs >> word) cfg.constant_tokens.push_back(word);
  }
  size_t entries = 0;
  if (!(in >> word >> entries) || word != "entries") throw std::runtime_error("bad scorer entries line");
  std::getline(in, line);

  MarkovScorer s;
  s.cfg_ = cfg;
  s.vocab_ = {"+", "-", "*", "/"};
  for (int i = 0; i < cfg.max_slots; i++) s.vocab_.push_back("N" + std::to_string(i));
  for (auto& c : cfg.constant_tokens) s.vocab_.push_back(c);
  s.vocab_.push_back(kUnk);
  s.index_vocab();
  for (size_t i = 0; i < entries; i++) {
    if (!std::getline(in, line)) throw std::runtime_error("truncated scorer entries");
    auto t1 = line.find('\t');
    auto t2 = line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      throw std::runtime_error("bad scorer entry line");
    std::string key = line.substr(0, t1);
    std::string tok = line.substr(t1 + 1, t2 - t1 - 1);
    long count = std::stol(line.substr(t2 + 1));
    s.counts_[key][tok] += count;
    s.context_totals_[key] += count;
  }
  return s;
}

PseudoLabel rank_candidates(const MarkovScorer& scorer, const Problem& p, const CandidateSet& cands,
                            const std::vector<ExternalCandidate>& externals, RankMode mode,
                            const SearchConfig& cfg) {
  struct Entry {
    CanonPtr expr;
    std::vector<std::string> tokens;
    std::string source;
    double score = 0.0;
  };
  std::vector<Entry> entries;
  std::vector<std::string> seen;  // canonical keys, parallel to entries

  for (auto& c : cands.equations) {
    entries.push_back({c.expr, to_prefix_tokens(c.expr), "search", 0.0});
    seen.push_back(print_canonical_infix(c.expr));
  }

  if (mode == RankMode::Beam) {
    Assignment a;
    a.values = p.quantity_values();
    a.pi_approx = cfg.pi_approx;
    for (auto& ext : externals) {
      if (ext.problem_id != p.id) continue;
      BinaryExprPtr parsed;
      try {
        parsed = ext.prefix_tokens.empty() ? parse_infix(ext.infix, p.surface_map())
                                           : parse_prefix_tokens(ext.prefix_tokens);
      } catch (const ParseError&) {
        continue;  // unusable external candidate
      }
      if (references_out_of_range(parsed, static_cast<int>(p.quantities.size()))) continue;
      EvalResult r = evaluate_exact(parsed, a);
      if (!r.defined) continue;
      if (!match_value(r.value, r.exact, p.answer, p.answer_exact, cfg.tolerance)) continue;
      CanonPtr canon = canonicalize(parsed);
      std::string key = print_canonical_infix(canon);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
      entries.push_back({canon, to_prefix_tokens(canon), "external-beam", 0.0});
      seen.push_back(std::move(key));
    }
  }

  if (entries.empty()) throw NoCandidateError("no candidates to rank for problem " + p.id);

  int n = static_cast<int>(p.quantities.size());
  for (auto& e : entries) e.score = scorer.sequence_log_prob(n, e.tokens);

  size_t best = 0;
  for (size_t i = 1; i < entries.size(); i++) {
    if (entries[i].score > entries[best].score ||
        (entries[i].score == entries[best].score &&
         compare_canonical(entries[i].expr, entries[best].expr) < 0))
      best = i;
  }

  PseudoLabel label;
  label.problem_id = p.id;
  label.expr = entries[best].expr;
  label.prefix_tokens = entries[best].tokens;
  label.score = entries[best].score;
  label.source = entries[best].source;
  label.stage = cands.stage;
  for (size_t i = 0; i < entries.size(); i++)
    if (i != best) label.runner_up_scores.push_back(entries[i].score);
  std::sort(label.runner_up_scores.rbegin(), label.runner_up_scores.rend());
  return label;
}

PseudoLabelRecord to_record(const PseudoLabel& label) {
  PseudoLabelRecord rec;
  rec.problem_id = label.problem_id;
  rec.infix = print_canonical_infix(label.expr);
  rec.prefix_tokens = label.prefix_tokens;
  rec.score = label.score;
  rec.source = label.source;
  rec.stage = label.stage;
  rec.runner_up_scores = label.runner_up_scores;
  return rec;
}

}  // namespace comsearch
