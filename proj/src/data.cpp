#include "comsearch/data.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "comsearch/search.hpp"
#include "json.hpp"

namespace comsearch {

using ordered_json = nlohmann::ordered_json;

QuantitySurfaceMap Problem::surface_map() const {
  QuantitySurfaceMap m;
  for (auto& q : quantities) {
    m.surfaces.push_back(q.surface);
    m.values.push_back(q.value);
  }
  return m;
}

std::vector<Rational> Problem::quantity_values() const {
  std::vector<Rational> v;
  v.reserve(quantities.size());
  for (auto& q : quantities) v.push_back(q.value);
  return v;
}

std::vector<QuantityOccurrence> extract_quantities(const std::string& text) {
  std::vector<QuantityOccurrence> out;
  size_t i = 0;
  const size_t n = text.size();
  auto digits_at = [&](size_t p) {
    size_t q = p;
    while (q < n && std::isdigit(static_cast<unsigned char>(text[q]))) q++;
    return q;
  };
  while (i < n) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      i++;
      continue;
    }
    size_t start = i;
    size_t end = digits_at(i);
    bool fraction = false, decimal = false;
    if (end < n && text[end] == '/' && end + 1 < n && std::isdigit(static_cast<unsigned char>(text[end + 1]))) {
      end = digits_at(end + 1);
      fraction = true;
    } else if (end < n && text[end] == '.' && end + 1 < n &&
               std::isdigit(static_cast<unsigned char>(text[end + 1]))) {
      end = digits_at(end + 1);
      decimal = true;
    }
    std::string surface = text.substr(start, end - start);
    Rational value = parse_rational(surface);
    if (!fraction && end < n && text[end] == '%') {
      end++;
      surface = text.substr(start, end - start);
      value /= 100;
    }
    (void)decimal;
    out.push_back({value, surface, start});
    i = end;
  }
  return out;
}

namespace {

Rational json_number_to_rational(const ordered_json& v, const std::string& context) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(Integer(std::to_string(v.get<long long>())));
  if (v.is_number_float()) {
    // round-trips through the shortest decimal representation, so literals
    // like 0.2 stay exactly 1/5
    return parse_rational(v.dump());
  }
  throw DataError("expected a number or numeric string for " + context);
}

}  // namespace

std::vector<Problem> load_problems(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open problems file: " + path);
  std::vector<Problem> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ordered_json rec;
    try {
      rec = ordered_json::parse(line);
    } catch (const std::exception& e) {
      throw DataError("malformed record at line " + std::to_string(lineno) + ": " + e.what());
    }
    Problem p;
    try {
      if (!rec.contains("id")) throw DataError("missing id");
      p.id = rec["id"].is_string() ? rec["id"].get<std::string>() : rec["id"].dump();
      p.text = rec.value("text", std::string());
      if (!rec.contains("answer")) throw DataError("missing answer");
      p.answer = json_number_to_rational(rec["answer"], "answer");
      p.answer_exact = !rec.value("inexact_answer", false);
      p.designed_solvable = rec.value("solvable", true);
      if (rec.contains("numbers") && rec["numbers"].is_array()) {
        size_t offset = 0;
        for (auto& nv : rec["numbers"]) {
          Rational v = json_number_to_rational(nv, "numbers");
          std::string surface = nv.is_string() ? nv.get<std::string>() : nv.dump();
          p.quantities.push_back({v, surface, offset++});
        }
      } else if (opts.extract_from_text_when_missing) {
        p.quantities = extract_quantities(p.text);
      }
      if (rec.contains("gold") && rec["gold"].is_string()) {
        p.gold_infix = rec["gold"].get<std::string>();
        std::string gold_text = *p.gold_infix;
        // gold annotations often come as "x=<expr>"
        if (gold_text.size() > 2 && (gold_text[0] == 'x' || gold_text[0] == 'X') && gold_text[1] == '=')
          gold_text = gold_text.substr(2);
        try {
          QuantitySurfaceMap gold_map = p.surface_map();
          gold_map.pi_surfaces = {"3.14"};
          p.gold = parse_infix(gold_text, gold_map);
        } catch (const UnsupportedOperatorError&) {
          p.gold_power_op = true;
        } catch (const ParseError& e) {
          throw DataError(std::string("unparseable gold equation: ") + e.what());
        }
      }
    } catch (const ValueError& e) {
      throw DataError("unparseable answer/number at line " + std::to_string(lineno) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("bad record at line " + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(std::move(p));
  }
  return out;
}

void export_pseudo_labels(const std::vector<PseudoLabelRecord>& labels, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write labels file: " + path);
  for (auto& l : labels) {
    ordered_json rec;
    rec["problem_id"] = l.problem_id;
    rec["infix"] = l.infix;
    rec["prefix_tokens"] = l.prefix_tokens;
    rec["score"] = l.score;
    rec["source"] = l.source;
    rec["stage"] = l.stage;
    rec["runner_up_scores"] = l.runner_up_scores;
    out << rec.dump() << "\n";
  }
}

std::vector<PseudoLabelRecord> load_pseudo_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open labels file: " + path);
  std::vector<PseudoLabelRecord> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty()) continue;
    ordered_json rec;
    try {
      rec = ordered_json::parse(line);
    } catch (const std::exception& e) {
      throw DataError("malformed label at line " + std::to_string(lineno) + ": " + e.what());
    }
    PseudoLabelRecord l;
    l.problem_id = rec.at("problem_id").get<std::string>();
    l.infix = rec.at("infix").get<std::string>();
    for (auto& t : rec.at("prefix_tokens")) l.prefix_tokens.push_back(t.get<std::string>());
    l.score = rec.at("score").get<double>();
    l.source = rec.at("source").get<std::string>();
    l.stage = rec.at("stage").get<int>();
    if (rec.contains("runner_up_scores"))
      for (auto& s : rec["runner_up_scores"]) l.runner_up_scores.push_back(s.get<double>());
    out.push_back(std::move(l));
  }
  return out;
}

namespace {

size_t bucket_index(int n_quantities) {
  if (n_quantities <= 1) return 0;
  if (n_quantities >= 6) return 5;
  return static_cast<size_t>(n_quantities - 1);
}

}  // namespace

StatsReport compute_stats(const std::vector<Problem>& problems, const std::vector<CandidateSet>& sets,
                          const std::vector<PseudoLabelRecord>& labels, bool with_accuracy) {
  if (problems.size() != sets.size())
    throw DataError("candidate sets do not cover the corpus");
  StatsReport r;
  r.total = problems.size();
  r.buckets.assign(6, BucketStats{});

  std::map<std::string, const PseudoLabelRecord*> label_by_id;
  for (auto& l : labels) label_by_id[l.problem_id] = &l;

  size_t micro_correct = 0, micro_total = 0;
  size_t macro_correct = 0, macro_total = 0;

  for (size_t i = 0; i < problems.size(); i++) {
    const Problem& p = problems[i];
    const CandidateSet& cs = sets[i];
    if (cs.problem_id != p.id) throw DataError("candidate set order does not match the corpus");
    size_t b = bucket_index(static_cast<int>(p.quantities.size()));
    r.buckets[b].total++;
    switch (cs.status) {
      case SolveStatus::FilteredTooLong: r.too_long++; break;
      case SolveStatus::FilteredPowerOp: r.power_op++; break;
      case SolveStatus::Unsolved: r.unsolved++; break;
      case SolveStatus::Solved: {
        r.buckets[b].solved++;
        r.candidate_histogram[cs.equations.size()]++;
        if (cs.equations.size() == 1)
          r.single++;
        else
          r.multiple++;
        break;
      }
    }
    if (with_accuracy && p.gold && !p.gold_power_op) {
      auto gold_canon = canonicalize(p.gold);
      const PseudoLabelRecord* label = nullptr;
      if (auto it = label_by_id.find(p.id); it != label_by_id.end()) label = it->second;
      if (label) {
        micro_total++;
        r.buckets[b].micro_total++;
        bool ok = false;
        try {
          auto label_canon = canonicalize(parse_prefix_tokens(label->prefix_tokens));
          ok = canonical_equal(label_canon, gold_canon);
        } catch (const ParseError&) {
          ok = false;
        }
        if (ok) {
          micro_correct++;
          r.buckets[b].micro_correct++;
        }
        if (cs.status == SolveStatus::Solved && !cs.equations.empty()) {
          macro_total++;
          r.buckets[b].macro_total++;
          if (ok) {
            macro_correct++;
            r.buckets[b].macro_correct++;
          }
        }
      } else if (cs.status == SolveStatus::Solved && !cs.equations.empty()) {
        macro_total++;
        r.buckets[b].macro_total++;
      }
    }
  }

  r.recall = r.total ? static_cast<double>(r.single + r.multiple) / static_cast<double>(r.total) : 0.0;
  for (auto& b : r.buckets)
    b.recall = b.total ? static_cast<double>(b.solved) / static_cast<double>(b.total) : 0.0;
  if (with_accuracy) {
    r.has_accuracy = true;
    r.micro_accuracy = micro_total ? static_cast<double>(micro_correct) / static_cast<double>(micro_total) : 0.0;
    r.macro_accuracy = macro_total ? static_cast<double>(macro_correct) / static_cast<double>(macro_total) : 0.0;
  }

  // partition identity
  if (r.single + r.multiple + r.unsolved + r.too_long + r.power_op != r.total)
    throw std::logic_error("stats partition identity violated");
  return r;
}

std::string stats_to_table(const StatsReport& r) {
  std::ostringstream o;
  o << "total            " << r.total << "\n";
  o << "too long         " << r.too_long << "\n";
  o << "power operator   " << r.power_op << "\n";
  o << "single           " << r.single << "\n";
  o << "multiple         " << r.multiple << "\n";
  o << "unsolved         " << r.unsolved << "\n";
  o.setf(std::ios::fixed);
  o.precision(1);
  o << "recall           " << r.recall * 100 << "%\n";
  o << "recall by #var:";
  for (size_t i = 0; i < r.buckets.size(); i++) {
    o << "  " << (i == 5 ? ">=6" : std::to_string(i + 1)) << ":";
    if (r.buckets[i].total)
      o << r.buckets[i].recall * 100 << "%";
    else
      o << "-";
  }
  o << "\n";
  if (r.has_accuracy) {
    o << "micro eq acc     " << r.micro_accuracy * 100 << "%\n";
    o << "macro eq acc     " << r.macro_accuracy * 100 << "%\n";
  }
  return o.str();
}

std::string stats_to_csv(const StatsReport& r) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(4);
  o << "metric,value\n";
  o << "total," << r.total << "\n";
  o << "too_long," << r.too_long << "\n";
  o << "power_op," << r.power_op << "\n";
  o << "single," << r.single << "\n";
  o << "multiple," << r.multiple << "\n";
  o << "unsolved," << r.unsolved << "\n";
  o << "recall," << r.recall << "\n";
  for (size_t i = 0; i < r.buckets.size(); i++) {
    std::string name = i == 5 ? "ge6" : std::to_string(i + 1);
    o << "recall_var_" << name << "," << r.buckets[i].recall << "\n";
  }
  if (r.has_accuracy) {
    o << "micro_eq_acc," << r.micro_accuracy << "\n";
    o << "macro_eq_acc," << r.macro_accuracy << "\n";
    for (size_t i = 0; i < r.buckets.size(); i++) {
      std::string name = i == 5 ? "ge6" : std::to_string(i + 1);
      const auto& b = r.buckets[i];
      if (b.micro_total)
        o << "micro_eq_acc_var_" << name << ","
          << static_cast<double>(b.micro_correct) / static_cast<double>(b.micro_total) << "\n";
      if (b.macro_total)
        o << "macro_eq_acc_var_" << name << ","
          << static_cast<double>(b.macro_correct) / static_cast<double>(b.macro_total) << "\n";
    }
  }
  return o.str();
}

std::string histogram_to_csv(const StatsReport& r) {
  std::ostringstream o;
  o << "candidate_count,problem_count\n";
  for (auto& [count, problems] : r.candidate_histogram) o << count << "," << problems << "\n";
  return o.str();
}

}  // namespace comsearch
