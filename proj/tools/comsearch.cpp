// Command-line front end: enumerate, count, oracle, baseline-counts, bank,
// search, train-scorer, rank, stats, pipeline.
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "comsearch/oracle.hpp"
#include "comsearch/pipeline.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace comsearch;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

struct GlobalOpts {
  uint64_t seed = 0;
  int jobs = 0;
  std::string format = "csv";
};

SearchConfig make_search_config(int max_vars, const std::string& constants, const std::string& tolerance) {
  SearchConfig cfg;
  cfg.max_vars = max_vars;
  if (!constants.empty()) {
    cfg.constants.clear();
    std::string cur;
    std::istringstream in(constants);
    while (std::getline(in, cur, ',')) {
      if (cur == "pi" || cur == "PI")
        cfg.constants.push_back(ConstantSpec::pi());
      else
        cfg.constants.push_back({false, parse_rational(cur)});
    }
  }
  if (!tolerance.empty()) cfg.tolerance = parse_rational(tolerance);
  return cfg;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << content;
}

int run(int argc, char** argv) {
  CLI::App app{"non-equivalent equation enumeration, answer-driven search, and pseudo-label ranking"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--seed", g.seed, "seed for all randomized steps");
  app.add_option("--jobs", g.jobs, "worker threads (0 = all cores)");
  app.add_option("--format", g.format, "output format for reports: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // enumerate
  auto* cmd_enum = app.add_subcommand("enumerate", "enumerate templates for one operand count");
  int enum_n = 2;
  bool enum_negations = false;
  std::string enum_out, enum_style = "infix";
  cmd_enum->add_option("--n", enum_n, "operand count")->required()->check(CLI::Range(1, 6));
  cmd_enum->add_flag("--negations", enum_negations, "append missing negated counterparts");
  cmd_enum->add_option("--out", enum_out, "write templates to this file");
  cmd_enum->add_option("--style", enum_style, "line style: infix|skeleton")
      ->check(CLI::IsMember({"infix", "skeleton"}));

  // count
  auto* cmd_count = app.add_subcommand("count", "certified template counts 1..max-n");
  int count_max_n = 6;
  cmd_count->add_option("--max-n", count_max_n, "largest operand count")
      ->required()
      ->check(CLI::Range(1, 16));

  // oracle
  auto* cmd_oracle = app.add_subcommand("oracle", "EGF count sequence 1..max-n");
  int oracle_max_n = 7;
  cmd_oracle->add_option("--max-n", oracle_max_n, "largest order")->required();

  // baseline-counts
  auto* cmd_base = app.add_subcommand("baseline-counts", "search-space size report");
  int base_max_n = 5;
  bool base_allow_long = false;
  std::string base_out;
  cmd_base->add_option("--max-n", base_max_n, "largest operand count (<= 6)")->required();
  cmd_base->add_flag("--allow-long", base_allow_long, "permit the long-running n=6 commutative dedup");
  cmd_base->add_option("--out", base_out, "write the report to this file");

  // bank
  auto* cmd_bank = app.add_subcommand("bank", "build (or refresh) a template bank file");
  int bank_max_n = 6;
  std::string bank_out;
  cmd_bank->add_option("--max-n", bank_max_n, "largest operand count")->required()->check(CLI::Range(1, 6));
  cmd_bank->add_option("--out", bank_out, "bank file path")->required();

  // search
  auto* cmd_search = app.add_subcommand("search", "extract answer-matching candidates per problem");
  std::string search_input, search_bank, search_out, search_constants, search_tol;
  int search_max_vars = 6;
  cmd_search->add_option("--input", search_input, "problems JSONL")->required();
  cmd_search->add_option("--bank", search_bank, "bank file (built if missing)");
  cmd_search->add_option("--out", search_out, "candidates JSONL")->required();
  cmd_search->add_option("--tolerance", search_tol, "relative tolerance for inexact matches");
  cmd_search->add_option("--constants", search_constants, "comma list, e.g. 1,pi");
  cmd_search->add_option("--max-vars", search_max_vars, "filter problems with more quantities")
      ->check(CLI::Range(1, 6));

  // train-scorer
  auto* cmd_train = app.add_subcommand("train-scorer", "fit the Markov scorer on single-candidate data");
  std::string train_in, train_out;
  int train_order = 3;
  double train_alpha = 0.1;
  cmd_train->add_option("--in", train_in, "candidates JSONL (singles are used)")->required();
  cmd_train->add_option("--order", train_order, "Markov order");
  cmd_train->add_option("--alpha", train_alpha, "additive smoothing");
  cmd_train->add_option("--out", train_out, "scorer file")->required();

  // rank
  auto* cmd_rank = app.add_subcommand("rank", "choose pseudo-labels for solved problems");
  std::string rank_mode = "basic", rank_scorer, rank_cands, rank_external, rank_out;
  cmd_rank->add_option("--mode", rank_mode, "basic|beam")->check(CLI::IsMember({"basic", "beam"}));
  cmd_rank->add_option("--scorer", rank_scorer, "scorer file")->required();
  cmd_rank->add_option("--candidates", rank_cands, "candidates JSONL")->required();
  cmd_rank->add_option("--external", rank_external, "external beam candidates JSONL");
  cmd_rank->add_option("--out", rank_out, "pseudo-labels JSONL")->required();

  // stats
  auto* cmd_stats = app.add_subcommand("stats", "corpus statistics report");
  std::string stats_problems, stats_cands, stats_labels, stats_out_prefix;
  cmd_stats->add_option("--problems", stats_problems, "problems JSONL");
  cmd_stats->add_option("--candidates", stats_cands, "candidates JSONL")->required();
  cmd_stats->add_option("--labels", stats_labels, "pseudo-labels JSONL");
  cmd_stats->add_option("--out", stats_out_prefix, "write <prefix>stats.csv and <prefix>histogram.csv");

  // pipeline
  auto* cmd_pipe = app.add_subcommand("pipeline", "bank, search, train, rank, stats in one run");
  std::string pipe_input, pipe_workdir = "comsearch-out", pipe_mode = "basic", pipe_external, pipe_bank;
  std::string pipe_constants, pipe_tol;
  int pipe_max_vars = 6, pipe_order = 3;
  double pipe_alpha = 0.1;
  bool pipe_resume = false;
  cmd_pipe->add_option("--input", pipe_input, "problems JSONL")->required();
  cmd_pipe->add_option("--workdir", pipe_workdir, "artifact directory");
  cmd_pipe->add_option("--mode", pipe_mode, "basic|beam")->check(CLI::IsMember({"basic", "beam"}));
  cmd_pipe->add_option("--external", pipe_external, "external beam candidates JSONL");
  cmd_pipe->add_option("--bank", pipe_bank, "bank file (cache default otherwise)");
  cmd_pipe->add_option("--max-vars", pipe_max_vars, "filter problems with more quantities")
      ->check(CLI::Range(1, 6));
  cmd_pipe->add_option("--constants", pipe_constants, "comma list, e.g. 1,pi");
  cmd_pipe->add_option("--tolerance", pipe_tol, "relative tolerance for inexact matches");
  cmd_pipe->add_option("--order", pipe_order, "scorer Markov order");
  cmd_pipe->add_option("--alpha", pipe_alpha, "scorer smoothing");
  cmd_pipe->add_flag("--resume", pipe_resume, "reuse existing artifacts when inputs are unchanged");

  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (cmd_enum->parsed()) {
    auto skeletons = enum_skeletons(enum_n, std::max(enum_n, 6));
    if (enum_negations) skeletons = augment_with_negations(skeletons);
    std::cout << skeletons.size() << "\n";
    if (!enum_out.empty()) {
      std::ofstream out(enum_out, std::ios::binary | std::ios::trunc);
      if (!out) throw DataError("cannot write " + enum_out);
      for (auto& s : skeletons)
        out << (enum_style == "infix" ? print_canonical_infix(s) : skeleton_notation(s)) << "\n";
    }
    return kExitOk;
  }

  if (cmd_count->parsed()) {
    bool first = true;
    for (int n = 1; n <= count_max_n; n++) {
      if (!first) std::cout << " ";
      first = false;
      std::cout << count_skeletons(n).get_str();
    }
    std::cout << "\n";
    return kExitOk;
  }

  if (cmd_oracle->parsed()) {
    auto seq = egf_counts(oracle_max_n);
    for (size_t i = 0; i < seq.size(); i++) std::cout << (i ? " " : "") << seq[i].get_str();
    std::cout << "\n";
    return kExitOk;
  }

  if (cmd_base->parsed()) {
    CountReport report = compression_report(base_max_n, base_allow_long);
    std::ostringstream out;
    if (g.format == "json") {
      ordered_json rows = ordered_json::array();
      for (auto& r : report.rows) {
        ordered_json row;
        row["n"] = r.n;
        row["brute_force"] = r.brute_force.get_str();
        row["no_brackets"] = r.no_brackets.get_str();
        row["commutative"] = r.commutative.get_str();
        row["comsearch"] = r.comsearch.get_str();
        row["ratio"] = r.ratio;
        rows.push_back(row);
      }
      out << rows.dump(2) << "\n";
    } else {
      out << "n,brute_force,no_brackets,commutative,comsearch,ratio\n";
      for (auto& r : report.rows)
        out << r.n << "," << r.brute_force.get_str() << "," << r.no_brackets.get_str() << ","
            << r.commutative.get_str() << "," << r.comsearch.get_str() << "," << r.ratio << "\n";
    }
    if (base_out.empty())
      std::cout << out.str();
    else
      write_file(base_out, out.str());
    return kExitOk;
  }

  if (cmd_bank->parsed()) {
    TemplateBank bank = build_or_load_bank(bank_max_n, bank_out);
    std::cout << "bank max_n=" << bank.max_n << " fingerprint=" << std::hex << bank.fingerprint << std::dec
              << "\n";
    return kExitOk;
  }

  if (cmd_search->parsed()) {
    SearchConfig cfg = make_search_config(search_max_vars, search_constants, search_tol);
    std::string bank_path = search_bank;
    if (bank_path.empty())
      bank_path =
          (fs::path(default_cache_dir()) / ("bank-n" + std::to_string(cfg.max_vars) + ".txt")).string();
    TemplateBank bank = build_or_load_bank(cfg.max_vars, bank_path);
    auto problems = load_problems(search_input);
    auto sets = search_corpus(problems, bank, cfg, g.jobs);
    export_candidate_sets(problems, sets, search_out);
    size_t solved = 0;
    for (auto& s : sets)
      if (s.status == SolveStatus::Solved) solved++;
    std::cout << "searched " << problems.size() << " problems, solved " << solved << "\n";
    return kExitOk;
  }

  if (cmd_train->parsed()) {
    auto loaded = load_candidate_sets(train_in);
    std::vector<TrainExample> data;
    for (auto& cs : loaded.sets)
      if (cs.status == SolveStatus::Solved && cs.equations.size() == 1)
        data.push_back({cs.n_quantities, to_prefix_tokens(cs.equations[0].expr)});
    ScorerConfig cfg;
    cfg.order = train_order;
    cfg.alpha = train_alpha;
    MarkovScorer scorer = MarkovScorer::train(data, cfg);
    scorer.save(train_out);
    std::cout << "trained on " << data.size() << " single-candidate examples\n";
    return kExitOk;
  }

  if (cmd_rank->parsed()) {
    MarkovScorer scorer = MarkovScorer::load(rank_scorer);
    auto loaded = load_candidate_sets(rank_cands);
    std::vector<ExternalCandidate> externals;
    if (!rank_external.empty()) externals = load_external_candidates(rank_external);
    RankMode mode = rank_mode == "beam" ? RankMode::Beam : RankMode::Basic;
    SearchConfig cfg;
    std::vector<PseudoLabelRecord> labels;
    for (size_t i = 0; i < loaded.sets.size(); i++) {
      if (loaded.sets[i].status != SolveStatus::Solved) continue;
      labels.push_back(to_record(rank_candidates(scorer, loaded.problems[i], loaded.sets[i], externals,
                                                 mode, cfg)));
    }
    export_pseudo_labels(labels, rank_out);
    std::cout << "ranked " << labels.size() << " problems\n";
    return kExitOk;
  }

  if (cmd_stats->parsed()) {
    auto loaded = load_candidate_sets(stats_cands);
    std::vector<PseudoLabelRecord> labels;
    if (!stats_labels.empty()) labels = load_pseudo_labels(stats_labels);
    bool with_accuracy = false;
    for (auto& p : loaded.problems)
      if (p.gold) with_accuracy = true;
    StatsReport report = compute_stats(loaded.problems, loaded.sets, labels, with_accuracy);
    if (g.format == "json") {
      ordered_json j;
      j["total"] = report.total;
      j["too_long"] = report.too_long;
      j["power_op"] = report.power_op;
      j["single"] = report.single;
      j["multiple"] = report.multiple;
      j["unsolved"] = report.unsolved;
      j["recall"] = report.recall;
      if (report.has_accuracy) {
        j["micro_eq_acc"] = report.micro_accuracy;
        j["macro_eq_acc"] = report.macro_accuracy;
      }
      ordered_json hist = ordered_json::array();
      for (auto& [count, problems_at] : report.candidate_histogram)
        hist.push_back({{"candidates", count}, {"problems", problems_at}});
      j["histogram"] = hist;
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << stats_to_table(report);
    }
    if (!stats_out_prefix.empty()) {
      write_file(stats_out_prefix + "stats.csv", stats_to_csv(report));
      write_file(stats_out_prefix + "histogram.csv", histogram_to_csv(report));
    }
    return kExitOk;
  }

  if (cmd_pipe->parsed()) {
    PipelineConfig cfg;
    cfg.input_path = pipe_input;
    cfg.workdir = pipe_workdir;
    cfg.bank_path = pipe_bank;
    cfg.external_path = pipe_external;
    cfg.search = make_search_config(pipe_max_vars, pipe_constants, pipe_tol);
    cfg.scorer.order = pipe_order;
    cfg.scorer.alpha = pipe_alpha;
    cfg.mode = pipe_mode == "beam" ? RankMode::Beam : RankMode::Basic;
    cfg.seed = g.seed;
    cfg.jobs = g.jobs;
    cfg.resume = pipe_resume;
    PipelineResult res = run_pipeline(cfg);
    std::cout << stats_to_table(res.stats);
    std::cout << "artifacts: " << res.candidates_path << " " << res.labels_path << " " << res.stats_path
              << "\n";
    return kExitOk;
  }

  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ValueError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
