#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace seqai {

// Source-level term. Lists are already desugared to '.'/2 and '[]'/0.
struct RawTerm {
  enum class Kind { Var, Int, Func };
  Kind kind = Kind::Func;
  std::string name;  // variable or functor name
  long value = 0;    // Int only
  std::vector<RawTerm> args;

  static RawTerm var(std::string n);
  static RawTerm integer(long v);
  static RawTerm func(std::string n, std::vector<RawTerm> a = {});

  bool is_var() const { return kind == Kind::Var; }
  bool operator==(const RawTerm&) const = default;
};

std::string to_string(const RawTerm& t);

struct RawClause {
  RawTerm head;
  std::vector<RawTerm> body;  // conjunction, flattened
  int line = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int col);
  int line;
  int col;
};

std::vector<RawClause> parse(const std::string& text);

enum class CmpOp { Lt, Le, Eq, Ne, Ge, Gt };
enum class TypeKind { Var, Ground, Novar };

const char* to_string(CmpOp op);
CmpOp negate(CmpOp op);
CmpOp swap_sides(CmpOp op);
bool holds(CmpOp op, long a, long b);

// Integer constant or program variable index (1-based).
struct Operand {
  bool is_const = false;
  long value = 0;  // constant value, or variable index
  bool operator==(const Operand&) const = default;
};

struct Expr {
  enum class Op { Var, Const, Add, Sub, Mul, Div, Mod, Neg };
  Op op = Op::Const;
  long value = 0;  // Const value or Var index
  std::vector<Expr> kids;
  bool operator==(const Expr&) const = default;
};

struct Literal {
  enum class Kind { Call, UnifVar, UnifFunc, Cut, ArithTest, ArithEval, TypeTest };
  Kind kind = Kind::Cut;
  std::string name;       // Call: predicate; UnifFunc: functor
  std::vector<int> args;  // Call: actuals; UnifVar: {i,j}; UnifFunc: {i,a1..ak};
                          // TypeTest: {i}; ArithEval: {target}
  CmpOp cmp = CmpOp::Eq;
  TypeKind type = TypeKind::Var;
  Operand lhs, rhs;  // ArithTest
  Expr expr;         // ArithEval

  static Literal call(std::string p, std::vector<int> a);
  static Literal unif_var(int i, int j);
  static Literal unif_func(int i, std::string f, std::vector<int> a);
  static Literal cut();
  static Literal arith_test(CmpOp op, Operand l, Operand r);
  static Literal arith_eval(int target, Expr e);
  static Literal type_test(TypeKind k, int i);

  // Distinct variable indices of the literal, in order of appearance.
  std::vector<int> vars() const;
  // Same literal with variable vars()[k] renamed to k+1.
  Literal formal() const;
  bool operator==(const Literal&) const = default;
};

std::string to_string(const Literal& l);

struct Clause {
  std::string name;
  int arity = 0;
  std::vector<Literal> body;
  int var_count = 0;
  int line = 0;
};

std::string to_string(const Clause& c);

using PredKey = std::pair<std::string, int>;

struct Procedure {
  std::string name;
  int arity = 0;
  std::vector<Clause> clauses;
};

struct NormalizedProgram {
  std::vector<Procedure> procs;  // source order of first clause
  std::map<PredKey, size_t> index;

  const Procedure* find(const std::string& name, int arity) const;
};

NormalizedProgram normalize(const std::vector<RawClause>& raw);
NormalizedProgram parse_program(const std::string& text);

// Checks every clause/literal invariant; returns a description of the
// first violation, or an empty string.
std::string validate(const NormalizedProgram& p);

}  // namespace seqai
