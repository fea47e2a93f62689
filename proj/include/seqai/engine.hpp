#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seqai/absdom.hpp"
#include "seqai/ast.hpp"
#include "seqai/cardseq.hpp"
#include "seqai/sahlin.hpp"

namespace seqai {

struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DomainKind { Card, Sahlin };

struct EngineConfig {
  DomainKind domain = DomainKind::Card;
  int widening_depth = 3;
  int max_iter = 1000;
  bool use_arith = true;
};

struct Query {
  std::string pred;
  std::vector<Mode> modes;
  int arity() const { return static_cast<int>(modes.size()); }
};

// "p(g,v)", "p()" or "p"; nothing on malformed input.
std::optional<Query> parse_query(const std::string& text);

// Clause result recorded after the fixpoint (cardinality domain).
struct ClauseResult {
  int clause = 0;  // 1-based
  AbsSeq value;
  Acf acf = Acf::NoCut;
};

struct EntryResult {
  std::string pred;
  int arity = 0;
  bool root = false;
  std::string input;   // input pattern, e.g. is_last(var,ground)
  std::string output;  // output pattern, or the atom set for the Sahlin domain
  std::string text;    // full rendering of the stored value
  Card m = 0, M = 0;
  TermInfo t = TermInfo::St;
  bool deterministic = false;
  bool fully_deterministic = false;
  int evaluations = 0;
  // (B_i, B'_i) per local iteration, rendered.
  std::vector<std::pair<std::string, std::string>> trace;

  // Raw values; only the one matching the domain is set.
  AbsSubst card_input;
  AbsSeq card_value;
  std::vector<std::pair<AbsSeq, AbsSeq>> card_trace;
  std::vector<ClauseResult> clauses;  // clauses evaluated for this entry
  sahlin::Seq sahlin_value = 0;
};

struct DeadClause {
  std::string pred;
  int arity = 0;
  int clause = 0;  // 1-based
  bool operator==(const DeadClause&) const = default;
};

struct AnalysisResult {
  DomainKind domain = DomainKind::Card;
  std::vector<EntryResult> entries;  // creation order
  std::vector<DeadClause> dead_clauses;
  // Entries whose re-evaluation after the fixpoint is not below the stored value.
  std::vector<std::string> post_violations;
  int np = 0;  // analyzed procedures
  int d = 0;   // deterministic ones

  // First root entry of the predicate.
  const EntryResult* root(const std::string& pred, int arity) const;
  // The root entry analyzed for this query.
  const EntryResult* root(const Query& q) const;
  bool is_dead(const std::string& pred, int arity, int clause) const;
};

AnalysisResult analyze(const NormalizedProgram& prog, const std::vector<Query>& queries,
                       const EngineConfig& cfg);

// Concrete inputs are built from these leaves up to the given depth.
struct Universe {
  std::vector<std::string> constants{"[]", "1"};
  std::vector<std::string> functors{"."};  // binary
  int depth = 3;
  int vars_per_arg = 2;
};

struct SafetyConfig {
  int max_k = 6;
  Universe universe;
};

struct SafetyReport {
  long checked = 0;  // (input, k) pairs compared
  long complete = 0;  // of those, runs that finished within the depth bound
  long skipped = 0;   // runs that raised an arithmetic error
  std::vector<std::string> violations;
};

// Compares tcb_k against each query's stored value for every input of the
// query pattern drawn from the universe.
SafetyReport check_safety(const NormalizedProgram& prog, const std::vector<Query>& queries,
                          const AnalysisResult& res, const SafetyConfig& cfg);

std::vector<PSubst> enumerate_inputs(const std::vector<Mode>& modes, const Universe& u);

}  // namespace seqai
