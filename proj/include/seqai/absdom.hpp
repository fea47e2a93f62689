#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "seqai/ast.hpp"
#include "seqai/concrete.hpp"

namespace seqai {

// Modes are sets of three disjoint term classes.
using Mode = std::uint8_t;
constexpr Mode kVar = 1;     // a variable
constexpr Mode kGround = 2;  // a ground term
constexpr Mode kNgv = 4;     // non-ground, non-variable
constexpr Mode kGv = kVar | kGround;
constexpr Mode kNovar = kGround | kNgv;
constexpr Mode kNoground = kVar | kNgv;
constexpr Mode kAny = 7;

const char* mode_name(Mode m);
std::optional<Mode> mode_from_letter(const std::string& s);  // g v a n ng ngv gv
Mode mode_of_term(const Term& t);

struct Node {
  Mode mode = kAny;
  bool frm = false;
  std::string fn;
  std::vector<int> kids;
  bool operator==(const Node&) const = default;
};

// lhs (index) rel rhs (index or constant).
struct Constraint {
  int lhs = 0;
  CmpOp rel = CmpOp::Eq;
  Operand rhs;
  bool operator==(const Constraint&) const = default;
};

// Abstract substitution over x1..xn: same-value map sv, patterns (frm),
// modes, pairwise possible sharing between leaves, known-integer indices
// and order constraints. Values are kept normalized (see normalize()).
struct AbsSubst {
  bool empty = false;
  std::vector<int> sv;
  std::vector<Node> nodes;
  std::set<std::pair<int, int>> ps;  // first < second, leaves only
  std::set<int> nums;
  std::vector<Constraint> arith;

  int size() const { return static_cast<int>(sv.size()); }
  Mode mode(int i) const { return nodes[i].mode; }
  bool is_frm(int i) const { return nodes[i].frm; }
  std::optional<long> int_value(int i) const;
  bool numeric(int i) const { return nums.count(i) || int_value(i).has_value(); }
  bool has_ps(int a, int b) const;
  // Non-ground leaves reachable from i.
  std::vector<int> leaves(int i) const;
  bool may_share(int a, int b) const;
  std::string key() const;
  bool operator==(const AbsSubst& o) const { return key() == o.key(); }

  static AbsSubst bottom(int n);
  // Each argument its own leaf with the given mode; no sharing.
  static AbsSubst from_modes(const std::vector<Mode>& modes);
};

AbsSubst normalize(AbsSubst b);

std::optional<std::vector<int>> instance_map(const AbsSubst& gen, const AbsSubst& inst);

bool as_leq(const AbsSubst& b1, const AbsSubst& b2);
AbsSubst as_union(const AbsSubst& b1, const AbsSubst& b2);
// Turns every pattern node at depth >= cap into a leaf.
AbsSubst as_cap(const AbsSubst& b, int cap);
AbsSubst as_widen(const AbsSubst& bnew, const AbsSubst& bold, int cap);

AbsSubst as_extc(const Clause& c, const AbsSubst& b);
AbsSubst as_restrc(const Clause& c, const AbsSubst& b);
AbsSubst as_project(const AbsSubst& b, const std::vector<int>& vars);  // 1-based vars
AbsSubst as_restrg(const Literal& l, const AbsSubst& b, int cap = 0);

struct Outcome {
  AbsSubst beta;
  bool ss = false;  // surely succeeds
  bool sf = false;  // surely fails
};

Outcome as_unif_var(const AbsSubst& b);
Outcome as_unif_func(const std::string& f, const AbsSubst& b);
AbsSubst as_extg(const Literal& l, const AbsSubst& b1, const AbsSubst& b2);
// l formal (variables 1..r), b over x1..xr.
Outcome abstract_builtin(const Literal& l, const AbsSubst& b, bool use_arith = true);
// Any literal other than a call or cut, over formals.
Outcome abstract_local(const Literal& l, const AbsSubst& b, bool use_arith = true);

bool exclusive(const AbsSubst& b, const AbsSubst& b1, const AbsSubst& b2, bool use_arith = true);

bool as_member(const PSubst& theta, const AbsSubst& b);

std::string render(const std::string& pred, const AbsSubst& b);
std::string render_arg(const AbsSubst& b, int node);

}  // namespace seqai
