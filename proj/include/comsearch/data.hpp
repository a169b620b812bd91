#ifndef COMSEARCH_DATA_HPP
#define COMSEARCH_DATA_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "comsearch/canonical.hpp"
#include "comsearch/expr.hpp"

namespace comsearch {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuantityOccurrence {
  Rational value;
  std::string surface;
  size_t offset = 0;
};

struct Problem {
  std::string id;
  std::string text;
  std::vector<QuantityOccurrence> quantities;
  Rational answer;
  bool answer_exact = true;
  std::optional<std::string> gold_infix;
  BinaryExprPtr gold;          // parsed gold equation, when present and parseable
  bool gold_power_op = false;  // gold uses ^ or **
  bool designed_solvable = true;

  QuantitySurfaceMap surface_map() const;
  std::vector<Rational> quantity_values() const;
};

struct LoadOptions {
  bool extract_from_text_when_missing = true;
};

// Line-delimited JSON records: {id, text, answer, numbers?, gold?, solvable?,
// inexact_answer?}. When "numbers" is absent, quantities are extracted from the
// text (integers, decimals, p/q fractions, x% percentages), ordered by offset.
std::vector<Problem> load_problems(const std::string& path, const LoadOptions& opts = {});

// Text scanner behind load_problems, exposed for tests.
std::vector<QuantityOccurrence> extract_quantities(const std::string& text);

struct PseudoLabelRecord {
  std::string problem_id;
  std::string infix;
  std::vector<std::string> prefix_tokens;
  double score = 0.0;
  std::string source;  // "search" or "external-beam"
  int stage = -1;
  std::vector<double> runner_up_scores;
};

void export_pseudo_labels(const std::vector<PseudoLabelRecord>& labels, const std::string& path);
std::vector<PseudoLabelRecord> load_pseudo_labels(const std::string& path);

struct BucketStats {
  size_t total = 0;
  size_t solved = 0;
  double recall = 0.0;
  size_t micro_correct = 0, micro_total = 0;
  size_t macro_correct = 0, macro_total = 0;
};

struct StatsReport {
  size_t total = 0;
  size_t too_long = 0;
  size_t power_op = 0;
  size_t single = 0;
  size_t multiple = 0;
  size_t unsolved = 0;
  double recall = 0.0;
  std::vector<BucketStats> buckets;  // quantity counts 1..5, then >= 6
  std::map<size_t, size_t> candidate_histogram;
  bool has_accuracy = false;
  double micro_accuracy = 0.0;  // labels equivalent to gold / labels with gold
  double macro_accuracy = 0.0;  // per-problem indicator over problems with candidates
};

struct CandidateSet;  // search.hpp

StatsReport compute_stats(const std::vector<Problem>& problems, const std::vector<CandidateSet>& sets,
                          const std::vector<PseudoLabelRecord>& labels, bool with_accuracy);

std::string stats_to_table(const StatsReport& r);
std::string stats_to_csv(const StatsReport& r);
std::string histogram_to_csv(const StatsReport& r);

}  // namespace comsearch

#endif
