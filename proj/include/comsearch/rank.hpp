#ifndef COMSEARCH_RANK_HPP
#define COMSEARCH_RANK_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "comsearch/data.hpp"
#include "comsearch/search.hpp"

namespace comsearch {

struct TrainExample {
  int n_quantities = 1;
  std::vector<std::string> tokens;  // prefix tokens of the pseudo equation
};

struct ScorerConfig {
  int order = 3;
  double alpha = 0.1;
  int max_slots = 8;  // quantity placeholders N0..N{max_slots-1} in the vocabulary
  std::vector<std::string> constant_tokens = {"1", "pi"};
};

// Order-m Markov model over prefix tokens with additive smoothing, one count
// table per quantity-count bucket. Stands in for the draft model: per-step
// log-probabilities summed over the sequence give the equation score.
class MarkovScorer {
 public:
  static MarkovScorer train(const std::vector<TrainExample>& data, const ScorerConfig& cfg);

  double sequence_log_prob(int n_quantities, const std::vector<std::string>& tokens) const;

  int vocabulary_size() const { return static_cast<int>(vocab_.size()); }
  const ScorerConfig& config() const { return cfg_; }

  void save(const std::string& path) const;
  static MarkovScorer load(const std::string& path);

 private:
  ScorerConfig cfg_;
  std::vector<std::string> vocab_;
  std::map<std::string, long> vocab_ids_;
  // key: bucket '#' context tokens joined by ' '
  std::map<std::string, std::map<std::string, long>> counts_;
  std::map<std::string, long> context_totals_;

  std::string context_key(int bucket, const std::vector<std::string>& window) const;
  void index_vocab();
};

enum class RankMode { Basic, Beam };

struct ExternalCandidate {
  std::string problem_id;
  std::vector<std::string> prefix_tokens;  // either tokens or infix given
  std::string infix;
  std::optional<double> external_score;
};

struct NoCandidateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PseudoLabel {
  std::string problem_id;
  CanonPtr expr;
  std::vector<std::string> prefix_tokens;
  double score = 0.0;
  std::string source;  // "search" | "external-beam"
  int stage = -1;
  std::vector<double> runner_up_scores;  // non-chosen scores, descending
};

// Basic mode ranks the search candidates; beam mode adds external candidates
// that hold the correct value (deduplicated against search candidates, the
// surviving copy keeps source "search"). Argmax with canonical-order tie-break.
PseudoLabel rank_candidates(const MarkovScorer& scorer, const Problem& p, const CandidateSet& cands,
                            const std::vector<ExternalCandidate>& externals, RankMode mode,
                            const SearchConfig& cfg);

PseudoLabelRecord to_record(const PseudoLabel& label);

}  // namespace comsearch

#endif
