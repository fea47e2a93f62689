#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqai/ast.hpp"

namespace seqai {

// Term over standard variables y1, y2, ...; integers are 0-ary functors
// whose name is the decimal value.
struct Term {
  int var = 0;  // > 0 for a variable
  std::string fn;
  std::vector<Term> args;

  static Term v(int i) {
    Term t;
    t.var = i;
    return t;
  }
  static Term f(std::string name, std::vector<Term> a = {}) {
    Term t;
    t.fn = std::move(name);
    t.args = std::move(a);
    return t;
  }
  static Term num(long n) { return f(std::to_string(n)); }

  bool is_var() const { return var > 0; }
  bool is_ground() const;
  std::optional<long> as_int() const;
  int depth() const;
  bool operator==(const Term&) const = default;
};

std::string to_string(const Term& t);
void collect_vars(const Term& t, std::vector<int>& out);  // first-occurrence order
int max_var(const Term& t);

using Bindings = std::map<int, Term>;

Term substitute(const Term& t, const Bindings& s);
bool occurs(int v, const Term& t);
// Idempotent most general unifier with occur-check.
std::optional<Bindings> mgu(const Term& a, const Term& b);
// σ with pattern·σ = target, or nothing.
std::optional<Bindings> match(const Term& pattern, const Term& target);

// Program substitution over x1..xn (element k binds x_{k+1}).
using PSubst = std::vector<Term>;

std::string to_string(const PSubst& s);
PSubst canonicalize(const PSubst& s);
std::string key(const PSubst& s);
int max_var(const PSubst& s);
std::optional<Bindings> match(const PSubst& pattern, const PSubst& target);

enum class CutFlag { NoCut, Cut };

struct Sequence {
  std::vector<PSubst> elems;
  bool incomplete = false;

  size_t ns() const { return elems.size(); }
  size_t ne() const { return elems.size() + (incomplete ? 1 : 0); }
  static Sequence bottom() { return Sequence{{}, true}; }
  bool is_empty() const { return elems.empty() && !incomplete; }
  bool is_bottom() const { return elems.empty() && incomplete; }
  bool operator==(const Sequence&) const = default;
};

std::string to_string(const Sequence& s);

// S1 □ S2.
Sequence concat(const Sequence& a, const Sequence& b);
// ⟨S1, cf⟩ □ S2.
Sequence concat(const Sequence& a, CutFlag cf, const Sequence& b);
// Sequence ordering: a ⊑ b.
bool seq_prefix_leq(const Sequence& a, const Sequence& b);

struct ArithError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

PSubst concrete_extc(const Clause& c, const PSubst& theta);
Sequence concrete_restrc(const Clause& c, const Sequence& s);
PSubst restrg_raw(const Literal& l, const PSubst& theta);
PSubst concrete_restrg(const Literal& l, const PSubst& theta);
// Throws std::logic_error if an element of s is not an instance of the
// call projection.
Sequence concrete_extg(const Literal& l, const PSubst& theta, const Sequence& s);
// l in formal form (variables 1..r), theta over x1..xr.
Sequence concrete_unify(const Literal& l, const PSubst& theta);
// Type tests and arithmetic on one substitution.
Sequence concrete_builtin(const Literal& l, const PSubst& theta);

long eval_expr(const Expr& e, const PSubst& theta);

// Depth-bounded evaluator of the denotational semantics.
class Interpreter {
 public:
  explicit Interpreter(const NormalizedProgram& p) : prog_(p) {}

  // Answers of ⟨θ, p⟩ after k applications of the transformation.
  Sequence call(const std::string& pred, int arity, const PSubst& theta, int k);
  Sequence procedure(const Procedure& pr, const PSubst& theta, int k);
  std::pair<Sequence, CutFlag> clause(const Clause& c, const PSubst& theta, int k);

  size_t memo_size() const { return memo_.size(); }

 private:
  std::pair<Sequence, CutFlag> literal(const Literal& l, std::pair<Sequence, CutFlag> in, int k);

  const NormalizedProgram& prog_;
  std::unordered_map<std::string, Sequence> memo_;
};

Sequence tcb_k(const NormalizedProgram& p, const PSubst& theta, const std::string& pred, int arity,
               int k);

}  // namespace seqai
