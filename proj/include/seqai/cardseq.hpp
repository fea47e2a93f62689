#pragma once

#include <limits>
#include <string>
#include <vector>

#include "seqai/absdom.hpp"

namespace seqai {

// Solution counts; kInf stands for an unbounded number.
using Card = long;
constexpr Card kInf = std::numeric_limits<long>::max();

Card card_add(Card a, Card b);
Card card_mul(Card a, Card b);  // 0 * inf = 0
std::string card_string(Card c);

enum class TermInfo { St, Snt, Pt };
enum class Acf { Cut, NoCut, WeakCut };

const char* to_string(TermInfo t);
const char* to_string(Acf a);
bool term_leq(TermInfo a, TermInfo b);
TermInfo term_lub(TermInfo a, TermInfo b);

// <beta, m, M, t>
struct AbsSeq {
  AbsSubst beta;
  Card m = 0;
  Card M = 0;
  TermInfo t = TermInfo::St;

  // Canonical empty-concretization value, <empty, 1, 0, st>.
  static AbsSeq none(int n);
  // <empty, 0, 0, snt>, the start of every local iteration.
  static AbsSeq bottom(int n);
  bool cc_empty() const;
  std::string key() const;
  bool operator==(const AbsSeq& o) const { return key() == o.key(); }
};

struct AbsSeqC {
  AbsSeq b;
  Acf acf = Acf::NoCut;
  bool operator==(const AbsSeqC& o) const { return b == o.b && acf == o.acf; }
};

// Finite set of semi-simple sequences.
using EnhSeq = std::vector<AbsSeq>;

// Builds a sequence, collapsing values whose concretization is empty.
AbsSeq make_seq(AbsSubst beta, Card m, Card M, TermInfo t);

bool seq_leq(const AbsSeq& a, const AbsSeq& b);
bool cc_member(const Sequence& s, const AbsSeq& b);
bool cc_member(const Sequence& s, CutFlag cf, const AbsSeqC& c);
// Some completion of s (s itself when complete) lies in Cc(b).
bool cc_prefix(const Sequence& s, const AbsSeq& b);

AbsSeq seq_ub(const AbsSeq& a, const AbsSeq& b);
AbsSeq seq_widen(const AbsSeq& bnew, const AbsSeq& bold, int cap);

AbsSeq lift_unify(const Outcome& o);
AbsSeqC ai_cut(const AbsSeqC& c);
AbsSeqC extgs(const Literal& l, const AbsSeqC& c, const AbsSeq& b);

EnhSeq split1(const AbsSeq& b);
std::vector<AbsSeqC> split2(const AbsSeqC& c);
AbsSeq merge(const EnhSeq& sb, int n);
EnhSeq conc(const AbsSubst& beta, const AbsSeqC& c1, const EnhSeq& sb2, bool use_arith = true);
// True when conc(beta, c, X) does not depend on X.
bool conc_ignores_rest(const AbsSeqC& c);

AbsSeqC seq_extc(const Clause& c, const AbsSubst& beta);
AbsSeqC seq_restrc(const Clause& c, const AbsSeqC& s);
inline const AbsSeq& seq_of(const AbsSeqC& c) { return c.b; }
inline const AbsSubst& subst_of(const AbsSeqC& c) { return c.b.beta; }

std::string render(const std::string& pred, const AbsSeq& b);

}  // namespace seqai
