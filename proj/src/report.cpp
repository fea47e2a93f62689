#include "seqai/report.hpp"

#include <sstream>

#include "json.hpp"

namespace seqai {

const char* domain_name(DomainKind d) { return d == DomainKind::Card ? "card" : "sahlin"; }

int pct_d(const AnalysisResult& r) {
  if (r.np == 0) return 0;
  return (200 * r.d + r.np) / (2 * r.np);
}

namespace {

const char* det_class(const EntryResult& e) {
  if (e.fully_deterministic) return "fully-deterministic";
  if (e.deterministic) return "deterministic";
  return "nondeterministic";
}

}  // namespace

std::string report_text(const AnalysisResult& r, const ReportOptions& o) {
  std::ostringstream out;
  out << "program: " << o.program << "\n";
  out << "domain: " << domain_name(r.domain) << "\n";
  for (const auto& e : r.entries) {
    out << (e.root ? "* " : "  ") << e.input << "\n";
    out << "    " << e.text << "  m=" << e.m << " M=" << card_string(e.M) << " t=" << to_string(e.t)
        << "  " << det_class(e) << "\n";
  }
  out << "summary: NP=" << r.np << " D=" << r.d << " %D=" << pct_d(r) << "\n";
  out << "dead clauses:";
  if (r.dead_clauses.empty()) out << " none";
  for (const auto& d : r.dead_clauses) out << " " << d.pred << "/" << d.arity << "#" << d.clause;
  out << "\n";
  for (const auto& v : r.post_violations) out << "post-fixpoint check failed: " << v << "\n";
  if (o.safety) {
    out << "safety (k <= " << o.oracle_depth << "): checked=" << o.safety->checked
        << " complete=" << o.safety->complete << " skipped=" << o.safety->skipped
        << " violations=" << o.safety->violations.size() << "\n";
    for (const auto& v : o.safety->violations) out << "  " << v << "\n";
  }
  return out.str();
}

std::string report_json(const AnalysisResult& r, const ReportOptions& o) {
  using json = nlohmann::ordered_json;
  json doc;
  doc["program"] = o.program;
  doc["domain"] = domain_name(r.domain);
  json entries = json::array();
  for (const auto& e : r.entries) {
    json j;
    j["predicate"] = e.pred;
    j["arity"] = e.arity;
    j["query"] = e.root;
    j["input_pattern"] = e.input;
    j["output_pattern"] = e.output;
    j["m"] = e.m;
    if (e.M == kInf) j["M"] = "inf";
    else j["M"] = e.M;
    j["t"] = to_string(e.t);
    if (!e.clauses.empty()) {
      json acf = json::array();
      for (const auto& c : e.clauses) acf.push_back(to_string(c.acf));
      j["acf"] = acf;
    }
    j["deterministic"] = e.deterministic;
    j["fully_deterministic"] = e.fully_deterministic;
    entries.push_back(j);
  }
  doc["entries"] = entries;
  doc["summary"] = {{"np", r.np}, {"d", r.d}, {"pct_d", pct_d(r)}};
  json dead = json::array();
  for (const auto& d : r.dead_clauses)
    dead.push_back({{"predicate", d.pred + "/" + std::to_string(d.arity)}, {"clause_index", d.clause}});
  doc["dead_clauses"] = dead;
  doc["post_fixpoint_ok"] = r.post_violations.empty();
  if (o.safety) {
    doc["safety"] = {{"oracle_depth", o.oracle_depth},
                     {"checked", o.safety->checked},
                     {"complete", o.safety->complete},
                     {"skipped", o.safety->skipped},
                     {"violations", o.safety->violations}};
  }
  return doc.dump(2) + "\n";
}

}  // namespace seqai
