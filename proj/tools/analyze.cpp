// Command-line front end for the cardinality and Sahlin analyses.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "seqai/report.hpp"

using namespace seqai;

namespace {

constexpr int kOk = 0;
constexpr int kAnalysisFailed = 1;
constexpr int kUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cardinality and determinacy analysis for Prolog with cut"};
  std::string file;
  std::vector<std::string> query_texts;
  std::string domain = "card";
  std::string format = "text";
  std::string out_path;
  int widening_depth = 3;
  int oracle_depth = 6;
  int max_iter = 1000;
  bool check = false;
  bool no_arith = false;

  app.add_option("file", file, "Prolog source file")->required();
  app.add_option("--query,-q", query_texts, "entry pattern such as 'p(g,v)'")->required();
  app.add_option("--domain", domain, "card or sahlin")
      ->check(CLI::IsMember({"card", "sahlin"}));
  app.add_option("--widening-depth", widening_depth, "pattern depth bound")
      ->check(CLI::PositiveNumber);
  app.add_option("--oracle-depth", oracle_depth, "largest k for the concrete oracle")
      ->check(CLI::PositiveNumber);
  app.add_flag("--check-safety", check, "compare against the bounded concrete oracle");
  app.add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--max-iter", max_iter, "evaluation limit per entry")
      ->check(CLI::PositiveNumber);
  app.add_flag("--no-arith", no_arith, "ignore arithmetic tests when checking exclusivity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  std::vector<Query> queries;
  for (const auto& t : query_texts) {
    auto q = parse_query(t);
    if (!q) {
      std::cerr << "analyze: malformed query '" << t << "'\n";
      return kUsage;
    }
    queries.push_back(*q);
  }

  std::ifstream in(file);
  if (!in) {
    std::cerr << "analyze: cannot read " << file << "\n";
    return kUsage;
  }
  std::stringstream src;
  src << in.rdbuf();

  NormalizedProgram prog;
  try {
    prog = parse_program(src.str());
  } catch (const ParseError& e) {
    std::cerr << file << ": " << e.what() << "\n";
    return kUsage;
  }

  EngineConfig cfg;
  cfg.domain = domain == "sahlin" ? DomainKind::Sahlin : DomainKind::Card;
  cfg.widening_depth = widening_depth;
  cfg.max_iter = max_iter;
  cfg.use_arith = !no_arith;

  ReportOptions opts;
  opts.program = file;
  AnalysisResult res;
  try {
    res = analyze(prog, queries, cfg);
    if (check) {
      SafetyConfig sc;
      sc.max_k = oracle_depth;
      opts.safety = check_safety(prog, queries, res, sc);
      opts.oracle_depth = oracle_depth;
    }
  } catch (const AnalysisError& e) {
    std::cerr << "analyze: " << e.what() << "\n";
    return kAnalysisFailed;
  }

  std::string report = format == "json" ? report_json(res, opts) : report_text(res, opts);
  if (out_path.empty()) {
    std::cout << report;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!(out << report)) {
      std::cerr << "analyze: cannot write " << out_path << "\n";
      return kUsage;
    }
  }

  bool failed = !res.post_violations.empty() || (opts.safety && !opts.safety->violations.empty());
  return failed ? kAnalysisFailed : kOk;
}
