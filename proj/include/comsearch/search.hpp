#ifndef COMSEARCH_SEARCH_HPP
#define COMSEARCH_SEARCH_HPP

#include <optional>
#include <string>
#include <vector>

#include "comsearch/data.hpp"
#include "comsearch/enumerate.hpp"

namespace comsearch {

struct ConstantSpec {
  bool is_pi = false;
  Rational value;  // when not pi

  static ConstantSpec one() { return {false, Rational(1)}; }
  static ConstantSpec pi() { return {true, Rational(0)}; }
};

// Stage order is fixed: S0 all numbers, S1 omit one, S2 add one constant,
// S3 reuse one number. The first stage with a match wins.
enum class SearchStage { AllNumbers = 0, OmitOne = 1, AddConstant = 2, ReuseOne = 3 };

struct SearchConfig {
  int max_vars = 6;
  std::vector<ConstantSpec> constants = {ConstantSpec::one(), ConstantSpec::pi()};
  Rational tolerance = Rational(1, 10000);
  Rational pi_approx = Rational(Integer("314159265358979"), Integer("100000000000000"));
  bool enable_stage[4] = {true, true, true, true};
};

enum class SolveStatus { Solved, Unsolved, FilteredTooLong, FilteredPowerOp };

std::string status_name(SolveStatus s);
std::optional<SolveStatus> status_from_name(const std::string& name);

struct Candidate {
  CanonPtr expr;
  Rational value;
  bool exact = true;
};

struct CandidateSet {
  std::string problem_id;
  SolveStatus status = SolveStatus::Unsolved;
  int stage = -1;  // SearchStage when solved
  std::vector<Candidate> equations;
  int n_quantities = 0;
};

// Exact equality when both sides are exact and no pi participates; otherwise
// |v - answer| <= tol * max(1, |answer|).
bool match_value(const Rational& value, bool value_exact, const Rational& answer, bool answer_exact,
                 const Rational& tolerance);

CandidateSet extract_candidates(const Problem& p, const TemplateBank& bank, const SearchConfig& cfg);

// Cached bank build: reuses the file when its fingerprint checks out.
TemplateBank build_or_load_bank(int max_n, const std::string& cache_path);

}  // namespace comsearch

#endif
