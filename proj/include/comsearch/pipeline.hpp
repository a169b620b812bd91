#ifndef COMSEARCH_PIPELINE_HPP
#define COMSEARCH_PIPELINE_HPP

#include <functional>
#include <string>
#include <vector>

#include "comsearch/rank.hpp"
#include "comsearch/search.hpp"

namespace comsearch {

struct PipelineConfig {
  std::string input_path;
  std::string workdir = ".";
  std::string bank_path;      // defaults to <cache_dir>/bank-n<max_vars>.txt
  std::string external_path;  // beam candidates, optional
  SearchConfig search;
  ScorerConfig scorer;
  RankMode mode = RankMode::Basic;
  uint64_t seed = 0;
  int jobs = 0;  // 0: hardware concurrency
  bool resume = false;
};

struct PipelineResult {
  std::vector<Problem> problems;
  std::vector<CandidateSet> candidate_sets;
  std::vector<PseudoLabelRecord> labels;
  StatsReport stats;
  std::string candidates_path, labels_path, stats_path, histogram_path;
};

// bank -> search -> split single/multiple -> train scorer on singles ->
// rank multiples -> merge labels -> stats. Artifacts land in workdir.
PipelineResult run_pipeline(const PipelineConfig& cfg);

// Search every problem with data parallelism; output order follows input order.
std::vector<CandidateSet> search_corpus(const std::vector<Problem>& problems, const TemplateBank& bank,
                                        const SearchConfig& cfg, int jobs);

// Candidate-set JSONL records are self-contained (quantities + answer embedded)
// so ranking does not need the corpus file.
void export_candidate_sets(const std::vector<Problem>& problems, const std::vector<CandidateSet>& sets,
                           const std::string& path);

struct LoadedCandidates {
  std::vector<Problem> problems;  // reconstructed quantity/answer views
  std::vector<CandidateSet> sets;
};

LoadedCandidates load_candidate_sets(const std::string& path);

std::vector<ExternalCandidate> load_external_candidates(const std::string& path);

std::string default_cache_dir();

}  // namespace comsearch

#endif
