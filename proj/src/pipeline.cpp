#include "comsearch/pipeline.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"

namespace comsearch {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string default_cache_dir() {
  if (const char* env = std::getenv("COMSEARCH_CACHE_DIR")) return env;
  return "comsearch-cache";
}

std::vector<CandidateSet> search_corpus(const std::vector<Problem>& problems, const TemplateBank& bank,
                                        const SearchConfig& cfg, int jobs) {
  std::vector<CandidateSet> out(problems.size());
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  jobs = std::min<int>(jobs, std::max<size_t>(problems.size(), 1));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= problems.size()) return;
      out[i] = extract_candidates(problems[i], bank, cfg);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; t++) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return out;
}

void export_candidate_sets(const std::vector<Problem>& problems, const std::vector<CandidateSet>& sets,
                           const std::string& path) {
  if (problems.size() != sets.size()) throw DataError("candidate sets do not cover the corpus");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write candidates file: " + path);
  for (size_t i = 0; i < sets.size(); i++) {
    const Problem& p = problems[i];
    const CandidateSet& cs = sets[i];
    ordered_json rec;
    rec["id"] = cs.problem_id;
    rec["status"] = status_name(cs.status);
    rec["stage"] = cs.stage;
    rec["n_quantities"] = cs.n_quantities;
    ordered_json nums = ordered_json::array();
    for (auto& q : p.quantities) nums.push_back(rational_to_string(q.value));
    rec["numbers"] = nums;
    rec["answer"] = rational_to_string(p.answer);
    if (!p.answer_exact) rec["inexact_answer"] = true;
    if (p.gold_infix) rec["gold"] = *p.gold_infix;
    ordered_json cands = ordered_json::array();
    for (auto& c : cs.equations) {
      ordered_json jc;
      jc["infix"] = print_canonical_infix(c.expr);
      jc["prefix_tokens"] = to_prefix_tokens(c.expr);
      jc["value"] = rational_to_string(c.value);
      if (!c.exact) jc["inexact"] = true;
      cands.push_back(jc);
    }
    rec["candidates"] = cands;
    out << rec.dump() << "\n";
  }
}

LoadedCandidates load_candidate_sets(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open candidates file: " + path);
  LoadedCandidates out;
  std::string line;
  size_t lineno = 0;
  QuantitySurfaceMap empty_map;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty()) continue;
    ordered_json rec;
    try {
      rec = ordered_json::parse(line);
    } catch (const std::exception& e) {
      throw DataError("malformed candidates record at line " + std::to_string(lineno) + ": " + e.what());
    }
    Problem p;
    p.id = rec.at("id").get<std::string>();
    size_t off = 0;
    for (auto& nv : rec.at("numbers")) {
      std::string s = nv.get<std::string>();
      p.quantities.push_back({parse_rational(s), s, off++});
    }
    p.answer = parse_rational(rec.at("answer").get<std::string>());
    p.answer_exact = !rec.value("inexact_answer", false);
    if (rec.contains("gold")) {
      p.gold_infix = rec["gold"].get<std::string>();
      std::string gold_text = *p.gold_infix;
      if (gold_text.size() > 2 && (gold_text[0] == 'x' || gold_text[0] == 'X') && gold_text[1] == '=')
        gold_text = gold_text.substr(2);
      try {
        QuantitySurfaceMap gold_map = p.surface_map();
        gold_map.pi_surfaces = {"3.14"};
        p.gold = parse_infix(gold_text, gold_map);
      } catch (const UnsupportedOperatorError&) {
        p.gold_power_op = true;
      } catch (const ParseError&) {
      }
    }
    CandidateSet cs;
    cs.problem_id = p.id;
    auto status = status_from_name(rec.at("status").get<std::string>());
    if (!status) throw DataError("unknown status at line " + std::to_string(lineno));
    cs.status = *status;
    cs.stage = rec.at("stage").get<int>();
    cs.n_quantities = rec.at("n_quantities").get<int>();
    for (auto& jc : rec.at("candidates")) {
      Candidate c;
      c.expr = canonicalize(parse_infix(jc.at("infix").get<std::string>(), empty_map));
      c.value = parse_rational(jc.at("value").get<std::string>());
      c.exact = !jc.value("inexact", false);
      cs.equations.push_back(std::move(c));
    }
    out.problems.push_back(std::move(p));
    out.sets.push_back(std::move(cs));
  }
  return out;
}

std::vector<ExternalCandidate> load_external_candidates(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open external candidates file: " + path);
  std::vector<ExternalCandidate> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty()) continue;
    ordered_json rec;
    try {
      rec = ordered_json::parse(line);
    } catch (const std::exception& e) {
      throw DataError("malformed external record at line " + std::to_string(lineno) + ": " + e.what());
    }
    ExternalCandidate ext;
    ext.problem_id = rec.at("problem_id").get<std::string>();
    if (rec.contains("prefix_tokens"))
      for (auto& t : rec["prefix_tokens"]) ext.prefix_tokens.push_back(t.get<std::string>());
    if (rec.contains("infix")) ext.infix = rec["infix"].get<std::string>();
    if (ext.prefix_tokens.empty() && ext.infix.empty())
      throw DataError("external record needs prefix_tokens or infix at line " + std::to_string(lineno));
    if (rec.contains("external_score")) ext.external_score = rec["external_score"].get<double>();
    out.push_back(std::move(ext));
  }
  return out;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  PipelineResult res;
  fs::create_directories(cfg.workdir);
  res.candidates_path = (fs::path(cfg.workdir) / "candidates.jsonl").string();
  res.labels_path = (fs::path(cfg.workdir) / "pseudo.jsonl").string();
  res.stats_path = (fs::path(cfg.workdir) / "stats.csv").string();
  res.histogram_path = (fs::path(cfg.workdir) / "histogram.csv").string();

  res.problems = load_problems(cfg.input_path);

  std::string bank_path = cfg.bank_path;
  if (bank_path.empty())
    bank_path =
        (fs::path(default_cache_dir()) / ("bank-n" + std::to_string(cfg.search.max_vars) + ".txt")).string();
  TemplateBank bank = build_or_load_bank(cfg.search.max_vars, bank_path);

  if (cfg.resume && fs::exists(res.candidates_path)) {
    auto loaded = load_candidate_sets(res.candidates_path);
    if (loaded.sets.size() == res.problems.size())
      res.candidate_sets = std::move(loaded.sets);
  }
  if (res.candidate_sets.empty() && !res.problems.empty())
    res.candidate_sets = search_corpus(res.problems, bank, cfg.search, cfg.jobs);
  export_candidate_sets(res.problems, res.candidate_sets, res.candidates_path);

  // split singles/multiples; train on singles
  std::vector<TrainExample> train_data;
  for (size_t i = 0; i < res.candidate_sets.size(); i++) {
    const CandidateSet& cs = res.candidate_sets[i];
    if (cs.status == SolveStatus::Solved && cs.equations.size() == 1)
      train_data.push_back({cs.n_quantities, to_prefix_tokens(cs.equations[0].expr)});
  }

  std::vector<ExternalCandidate> externals;
  if (!cfg.external_path.empty()) externals = load_external_candidates(cfg.external_path);

  res.labels.clear();
  if (!train_data.empty()) {
    MarkovScorer scorer = MarkovScorer::train(train_data, cfg.scorer);
    scorer.save((fs::path(cfg.workdir) / "scorer.txt").string());
    for (size_t i = 0; i < res.candidate_sets.size(); i++) {
      const CandidateSet& cs = res.candidate_sets[i];
      if (cs.status != SolveStatus::Solved) continue;
      PseudoLabel label =
          rank_candidates(scorer, res.problems[i], cs, externals, cfg.mode, cfg.search);
      res.labels.push_back(to_record(label));
    }
  } else {
    // no single-candidate data: fall back to the canonical-least candidate
    for (size_t i = 0; i < res.candidate_sets.size(); i++) {
      const CandidateSet& cs = res.candidate_sets[i];
      if (cs.status != SolveStatus::Solved || cs.equations.empty()) continue;
      PseudoLabelRecord rec;
      rec.problem_id = cs.problem_id;
      rec.infix = print_canonical_infix(cs.equations[0].expr);
      rec.prefix_tokens = to_prefix_tokens(cs.equations[0].expr);
      rec.score = 0.0;
      rec.source = "search";
      rec.stage = cs.stage;
      res.labels.push_back(std::move(rec));
    }
  }
  export_pseudo_labels(res.labels, res.labels_path);

  bool with_accuracy = false;
  for (auto& p : res.problems)
    if (p.gold) with_accuracy = true;
  res.stats = compute_stats(res.problems, res.candidate_sets, res.labels, with_accuracy);
  {
    std::ofstream s(res.stats_path, std::ios::binary | std::ios::trunc);
    s << stats_to_csv(res.stats);
    std::ofstream h(res.histogram_path, std::ios::binary | std::ios::trunc);
    h << histogram_to_csv(res.stats);
  }
  return res;
}

}  // namespace comsearch
