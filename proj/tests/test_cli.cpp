#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "corpus.hpp"
#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(SEQAI_ANALYZE) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string corpus(const char* name) { return "'" + corpus_path(name) + "'"; }

}  // namespace

TEST_CASE("last element query") {
  auto r = run(corpus("is_last.pl") + " --query 'is_last(v,g)'");
  CHECK(r.status == 0);
  CHECK(r.out.find("<is_last(ground,[ground|ground]),0,1,pt>") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run("/nonexistent/file.pl --query 'p(g)'").status == 2);
  CHECK(run(corpus("is_last.pl")).status == 2);
  CHECK(run(corpus("is_last.pl") + " --query 'is_last(x,g)'").status == 2);
  CHECK(run(corpus("is_last.pl") + " --query 'is_last(v,g)' --domain other").status == 2);
  CHECK(run(corpus("is_last.pl") + " --query 'nothere(v)'").status == 1);
  CHECK(run(corpus("repeat.pl") + " --query repeat --max-iter 2").status == 1);

  auto bad = std::filesystem::temp_directory_path() / "seqai_cli_bad.pl";
  std::ofstream(bad) << "p(X :- q.\n";
  CHECK(run(bad.string() + " --query 'p(v)'").status == 2);
  std::filesystem::remove(bad);
}

TEST_CASE("json is stable and matches text") {
  using nlohmann::json;
  const char* cases[][2] = {
      {"compress.pl", "--query 'compress(v,g)'"},
      {"qsort.pl", "--query 'qsort(g,v)'"},
      {"repeat.pl", "--query repeat"},
      {"partition2.pl", "--query 'partition(g,g,v,v)' --no-arith"},
      {"pq_cut.pl", "--query 'p(v)' --query 'p(g)' --domain sahlin"},
  };
  for (auto& c : cases) {
    std::string args = corpus(c[0]) + " " + c[1];
    CAPTURE(args);
    auto a = run(args + " --format json");
    auto b = run(args + " --format json");
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
    auto doc = json::parse(a.out);
    auto text = run(args).out;

    std::regex entry(R"(    \S+  m=(\d+) M=(\d+|inf) t=(\w+)  \S+)");
    std::vector<std::string> ms;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), entry); it != std::sregex_iterator(); ++it)
      ms.push_back((*it)[1].str() + "/" + (*it)[2].str() + "/" + (*it)[3].str());
    REQUIRE(ms.size() == doc["entries"].size());
    for (size_t i = 0; i < ms.size(); ++i) {
      const auto& e = doc["entries"][i];
      std::string M = e["M"].is_string() ? e["M"].get<std::string>() : std::to_string(e["M"].get<long>());
      CHECK(ms[i] == std::to_string(e["m"].get<long>()) + "/" + M + "/" + e["t"].get<std::string>());
    }
    std::smatch sm;
    REQUIRE(std::regex_search(text, sm, std::regex(R"(NP=(\d+) D=(\d+) %D=(\d+))")));
    CHECK(std::stoi(sm[1]) == doc["summary"]["np"].get<int>());
    CHECK(std::stoi(sm[2]) == doc["summary"]["d"].get<int>());
    CHECK(std::stoi(sm[3]) == doc["summary"]["pct_d"].get<int>());
  }
}

TEST_CASE("report fields") {
  using nlohmann::json;
  auto rep = json::parse(run(corpus("repeat.pl") + " --query repeat --format json").out);
  CHECK(rep["entries"][0]["M"] == "inf");
  CHECK(rep["entries"][0]["t"] == "snt");

  auto part = json::parse(run(corpus("partition1.pl") + " --query 'partition(g,g,v,v)' --format json").out);
  const auto& e = part["entries"][0];
  CHECK(e["m"] == 0);
  CHECK(e["M"] == 1);
  CHECK(e["t"] == "pt");
  CHECK(e["deterministic"] == true);

  auto comp = json::parse(run(corpus("compress.pl") + " --query 'compress(v,g)' --format json").out);
  std::vector<std::string> dead;
  for (const auto& d : comp["dead_clauses"])
    dead.push_back(d["predicate"].get<std::string>() + "#" + std::to_string(d["clause_index"].get<int>()));
  CHECK(dead == std::vector<std::string>{"compress/2#2", "cmp/2#1", "cmp/2#2", "cmp/2#3", "cmp/2#4"});

  auto both = json::parse(
      run(corpus("compress.pl") + " --query 'compress(v,g)' --query 'compress(g,v)' --format json").out);
  CHECK(both["dead_clauses"].empty());
}

TEST_CASE("out file") {
  auto path = std::filesystem::temp_directory_path() / "seqai_cli_out.json";
  auto r = run(corpus("is_last.pl") + " --query 'is_last(v,g)' --format json --out " + path.string());
  CHECK(r.status == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == run(corpus("is_last.pl") + " --query 'is_last(v,g)' --format json").out);
  std::filesystem::remove(path);
}

TEST_CASE("safety check through the front end") {
  const char* cases[][2] = {
      {"is_last.pl", "--query 'is_last(v,g)' --query 'is_last(g,v)'"},
      {"repeat.pl", "--query repeat"},
      {"pq_cut.pl", "--query 'p(v)' --query 'p(g)' --query 'q(v)'"},
      {"partition1.pl", "--query 'partition(g,g,v,v)'"},
      {"partition2.pl", "--query 'partition(g,g,v,v)'"},
      {"compress.pl", "--query 'compress(v,g)' --query 'compress(g,v)'"},
      {"qsort.pl", "--query 'qsort(g,v)'"},
      {"append.pl", "--query 'app(g,g,v)' --query 'app(v,v,g)'"},
  };
  for (auto& c : cases)
    for (const char* dom : {"card", "sahlin"}) {
      std::string args = corpus(c[0]) + " " + c[1] + " --domain " + dom +
                         " --check-safety --oracle-depth 5 --format json";
      CAPTURE(args);
      auto r = run(args);
      CHECK(r.status == 0);
      auto doc = nlohmann::json::parse(r.out);
      CHECK(doc["safety"]["violations"].empty());
      CHECK(doc["safety"]["checked"].get<long>() > 0);
    }
}
