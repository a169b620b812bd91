#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string g_binary;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = g_binary + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.output.append(buf.data(), got);
  int status = pclose(pipe);
  res.exit_code = WEXITSTATUS(status);
  return res;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

}  // namespace

TEST_CASE("count prints the certified sequence") {
  auto r = run_cli("count --max-n 5");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "1 6 68 1170 27142\n");
}

TEST_CASE("oracle prints the EGF sequence") {
  auto r = run_cli("oracle --max-n 7");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "1 6 68 1170 27142 793002 27914126\n");
}

TEST_CASE("enumerate writes sorted templates") {
  auto r = run_cli("enumerate --n 2 --out cli_enum_tmp.txt");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "6\n");
  auto body = read_file("cli_enum_tmp.txt");
  CHECK(body.find("n1+n2") != std::string::npos);
  CHECK(body.find("n2/n1") != std::string::npos);
  std::remove("cli_enum_tmp.txt");
}

TEST_CASE("baseline-counts emits the report csv") {
  auto r = run_cli("baseline-counts --max-n 3");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("n,brute_force,no_brackets,commutative,comsearch,ratio") != std::string::npos);
  CHECK(r.output.find("3,192,144,108,68,2.8") != std::string::npos);
}

TEST_CASE("bad configuration exits with code 2") {
  auto r = run_cli("count --max-n 0");
  CHECK(r.exit_code == 2);
  auto r2 = run_cli("enumerate --n 9 --out /dev/null");
  CHECK(r2.exit_code == 2);
}

TEST_CASE("missing data file exits with code 3") {
  auto r = run_cli("search --input does_not_exist.jsonl --out cli_x_tmp.jsonl --max-vars 3");
  CHECK(r.exit_code == 3);
}

TEST_CASE("pipeline on an empty corpus exits cleanly") {
  write_file("cli_empty_tmp.jsonl", "");
  auto r = run_cli(
      "pipeline --input cli_empty_tmp.jsonl --workdir cli_empty_out_tmp --max-vars 3 --bank cli_bank_tmp.txt");
  CHECK(r.exit_code == 0);
  CHECK(read_file("cli_empty_out_tmp/pseudo.jsonl").empty());
  std::filesystem::remove_all("cli_empty_out_tmp");
  std::remove("cli_empty_tmp.jsonl");
}

TEST_CASE("pipeline end-to-end on a small corpus, byte-identical across runs") {
  std::string corpus =
      R"x({"id": "savings", "text": "", "numbers": ["150", "50", "2"], "answer": 250, "gold": "150*2-50"})x"
      "\n"
      R"x({"id": "trees", "text": "planting every 2 meters with 11 trees", "answer": 20, "gold": "2*(11-1)"})x"
      "\n"
      R"x({"id": "books", "text": "", "numbers": ["30", "1/5", "5"], "answer": 29, "gold": "30-(1/5)*5"})x"
      "\n"
      R"x({"id": "queue", "text": "", "numbers": ["2", "4", "5"], "answer": 18, "gold": "4*2+5*2"})x"
      "\n";
  write_file("cli_small_tmp.jsonl", corpus);
  auto r1 = run_cli(
      "pipeline --input cli_small_tmp.jsonl --workdir cli_out1_tmp --max-vars 4 --bank cli_bank_tmp.txt");
  CHECK(r1.exit_code == 0);
  auto r2 = run_cli(
      "pipeline --input cli_small_tmp.jsonl --workdir cli_out2_tmp --max-vars 4 --bank cli_bank_tmp.txt");
  CHECK(r2.exit_code == 0);
  for (const char* f : {"candidates.jsonl", "pseudo.jsonl", "stats.csv", "histogram.csv"}) {
    CHECK(read_file(std::string("cli_out1_tmp/") + f) == read_file(std::string("cli_out2_tmp/") + f));
  }
  auto stats = read_file("cli_out1_tmp/stats.csv");
  CHECK(stats.find("total,4") != std::string::npos);
  CHECK(stats.find("recall,1.0000") != std::string::npos);

  // the ranked label for the queue problem has runner-up audit data
  auto pseudo = read_file("cli_out1_tmp/pseudo.jsonl");
  CHECK(pseudo.find("\"queue\"") != std::string::npos);

  // stats subcommand reads the artifacts back
  auto rs = run_cli("stats --candidates cli_out1_tmp/candidates.jsonl --labels cli_out1_tmp/pseudo.jsonl");
  CHECK(rs.exit_code == 0);
  CHECK(rs.output.find("recall") != std::string::npos);

  std::filesystem::remove_all("cli_out1_tmp");
  std::filesystem::remove_all("cli_out2_tmp");
  std::remove("cli_small_tmp.jsonl");
  std::remove("cli_bank_tmp.txt");
}

TEST_CASE("parallel search is order-stable on a generated corpus") {
  // 300 generated problems; --jobs 2 and --jobs 1 must emit identical bytes
  std::ostringstream corpus;
  uint64_t state = 42;
  auto next = [&state] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return state >> 33;
  };
  for (int i = 0; i < 300; i++) {
    int n = 2 + static_cast<int>(next() % 3);
    std::vector<long> vals;
    for (int q = 0; q < n; q++) vals.push_back(1 + static_cast<long>(next() % 12));
    long answer;
    switch (next() % 4) {
      case 0: answer = vals[0] * vals[1]; break;
      case 1: answer = vals[0] + vals[1]; break;
      case 2: answer = vals[0] * vals[1] + (n > 2 ? vals[2] : 0); break;
      default: answer = 999983; break;  // mostly unreachable
    }
    corpus << "{\"id\": \"g" << i << "\", \"text\": \"\", \"numbers\": [";
    for (int q = 0; q < n; q++) corpus << (q ? ", " : "") << "\"" << vals[q] << "\"";
    corpus << "], \"answer\": " << answer << "}\n";
  }
  write_file("cli_gen_tmp.jsonl", corpus.str());
  auto r1 = run_cli(
      "search --input cli_gen_tmp.jsonl --out cli_gen_out1.jsonl --bank cli_genbank_tmp.txt "
      "--max-vars 4 --jobs 2");
  auto r2 = run_cli(
      "search --input cli_gen_tmp.jsonl --out cli_gen_out2.jsonl --bank cli_genbank_tmp.txt "
      "--max-vars 4 --jobs 1");
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(read_file("cli_gen_out1.jsonl") == read_file("cli_gen_out2.jsonl"));
  CHECK(!read_file("cli_gen_out1.jsonl").empty());
  for (const char* f : {"cli_gen_tmp.jsonl", "cli_gen_out1.jsonl", "cli_gen_out2.jsonl",
                        "cli_genbank_tmp.txt"})
    std::remove(f);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <comsearch-binary>\n");
    return 1;
  }
  g_binary = argv[1];
  doctest::Context ctx;
  return ctx.run();
}
