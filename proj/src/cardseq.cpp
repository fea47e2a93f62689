#include "seqai/cardseq.hpp"

#include <algorithm>
#include <set>

namespace seqai {

Card card_add(Card a, Card b) {
  if (a == kInf || b == kInf) return kInf;
  return a + b;
}

Card card_mul(Card a, Card b) {
  if (a == 0 || b == 0) return 0;
  if (a == kInf || b == kInf) return kInf;
  return a * b;
}

std::string card_string(Card c) { return c == kInf ? "inf" : std::to_string(c); }

const char* to_string(TermInfo t) {
  switch (t) {
    case TermInfo::St: return "st";
    case TermInfo::Snt: return "snt";
    case TermInfo::Pt: return "pt";
  }
  return "?";
}

const char* to_string(Acf a) {
  switch (a) {
    case Acf::Cut: return "cut";
    case Acf::NoCut: return "nocut";
    case Acf::WeakCut: return "weakcut";
  }
  return "?";
}

bool term_leq(TermInfo a, TermInfo b) { return a == b || b == TermInfo::Pt; }

TermInfo term_lub(TermInfo a, TermInfo b) { return a == b ? a : TermInfo::Pt; }

AbsSeq AbsSeq::none(int n) { return AbsSeq{AbsSubst::bottom(n), 1, 0, TermInfo::St}; }

AbsSeq AbsSeq::bottom(int n) { return AbsSeq{AbsSubst::bottom(n), 0, 0, TermInfo::Snt}; }

bool AbsSeq::cc_empty() const { return m > M || (beta.empty && m > 0); }

std::string AbsSeq::key() const {
  return beta.key() + "#" + std::to_string(m) + "," + card_string(M) + "," + to_string(t);
}

AbsSeq make_seq(AbsSubst beta, Card m, Card M, TermInfo t) {
  int n = beta.size();
  if (beta.empty) {
    if (m > 0) return AbsSeq::none(n);
    return AbsSeq{std::move(beta), 0, 0, t};
  }
  if (m > M) return AbsSeq::none(n);
  return AbsSeq{std::move(beta), m, M, t};
}

bool seq_leq(const AbsSeq& a, const AbsSeq& b) {
  if (a.cc_empty()) return true;
  return as_leq(a.beta, b.beta) && a.m >= b.m && a.M <= b.M && term_leq(a.t, b.t);
}

bool cc_member(const Sequence& s, const AbsSeq& b) {
  if (b.cc_empty()) return false;
  for (const auto& e : s.elems)
    if (!as_member(e, b.beta)) return false;
  Card n = static_cast<Card>(s.ns());
  if (n < b.m || n > b.M) return false;
  if (s.incomplete) return b.t != TermInfo::St;
  return b.t != TermInfo::Snt;
}

bool cc_member(const Sequence& s, CutFlag cf, const AbsSeqC& c) {
  switch (c.acf) {
    case Acf::Cut:
      if (cf != CutFlag::Cut) return false;
      break;
    case Acf::NoCut:
      if (cf != CutFlag::NoCut) return false;
      break;
    case Acf::WeakCut:
      if (cf == CutFlag::NoCut && !s.elems.empty()) return false;
      break;
  }
  return cc_member(s, c.b);
}

bool cc_prefix(const Sequence& s, const AbsSeq& b) {
  if (!s.incomplete) return cc_member(s, b);
  if (b.cc_empty()) return false;
  for (const auto& e : s.elems)
    if (!as_member(e, b.beta)) return false;
  return static_cast<Card>(s.ns()) <= b.M;
}

AbsSeq seq_ub(const AbsSeq& a, const AbsSeq& b) {
  if (a.cc_empty()) return b;
  if (b.cc_empty()) return a;
  return make_seq(as_union(a.beta, b.beta), std::min(a.m, b.m), std::max(a.M, b.M),
                  term_lub(a.t, b.t));
}

AbsSeq seq_widen(const AbsSeq& bnew, const AbsSeq& bold, int cap) {
  if (seq_leq(bnew, bold)) return bold;
  if (!as_leq(bnew.beta, bold.beta))
    return make_seq(as_widen(bnew.beta, bold.beta, cap), bnew.m, bnew.M, bnew.t);
  if (!term_leq(bnew.t, bold.t)) return make_seq(bold.beta, bnew.m, bnew.M, TermInfo::Pt);
  if (bnew.m < bold.m || bnew.M > bold.M)
    return make_seq(bold.beta, std::min(bnew.m, bold.m), kInf, bold.t);
  return bold;
}

AbsSeq lift_unify(const Outcome& o) {
  return make_seq(o.beta, o.ss ? 1 : 0, o.sf ? 0 : 1, TermInfo::St);
}

AbsSeqC ai_cut(const AbsSeqC& c) {
  const AbsSeq& b = c.b;
  TermInfo t = TermInfo::Pt;
  if (b.m >= 1 || b.t == TermInfo::St) t = TermInfo::St;
  else if (b.M == 0 && b.t == TermInfo::Snt) t = TermInfo::Snt;
  Acf acf = Acf::WeakCut;
  if (b.m >= 1 || c.acf == Acf::Cut) acf = Acf::Cut;
  else if (b.M == 0 && c.acf == Acf::NoCut) acf = Acf::NoCut;
  return {make_seq(b.beta, std::min<Card>(1, b.m), std::min<Card>(1, b.M), t), acf};
}

AbsSeqC extgs(const Literal& l, const AbsSeqC& c, const AbsSeq& b) {
  const AbsSeq& b1 = c.b;
  Card m = b.t == TermInfo::St ? card_mul(b1.m, b.m) : card_mul(std::min<Card>(1, b1.m), b.m);
  Card M = b.t == TermInfo::Snt ? card_mul(std::min<Card>(1, b1.M), b.M) : card_mul(b1.M, b.M);
  TermInfo t = TermInfo::Pt;
  if (b1.t == TermInfo::Snt || (b.t == TermInfo::Snt && b1.m >= 1)) t = TermInfo::Snt;
  else if (b1.t == TermInfo::St && (b.t == TermInfo::St || b1.M == 0)) t = TermInfo::St;
  return {make_seq(as_extg(l, b1.beta, b.beta), m, M, t), c.acf};
}

namespace {

void add_unique(EnhSeq& out, const AbsSeq& b) {
  for (const auto& x : out)
    if (x == b) return;
  out.push_back(b);
}

}  // namespace

EnhSeq split1(const AbsSeq& b) {
  EnhSeq out;
  if (b.m == 0) out.push_back(AbsSeq{AbsSubst::bottom(b.beta.size()), 0, 0, b.t});
  Card lo = std::max<Card>(1, b.m);
  if (!b.beta.empty && lo <= b.M) out.push_back(AbsSeq{b.beta, lo, b.M, b.t});
  return out;
}

std::vector<AbsSeqC> split2(const AbsSeqC& c) {
  std::vector<AbsSeqC> out;
  for (const AbsSeq& b : split1(c.b)) {
    std::vector<Acf> flags;
    if (c.acf == Acf::WeakCut) {
      if (b.m == 0) flags = {Acf::NoCut, Acf::Cut};
      else flags = {Acf::Cut};
    } else {
      flags = {c.acf};
    }
    for (Acf f : flags) {
      if (b.t == TermInfo::Pt) {
        out.push_back({AbsSeq{b.beta, b.m, b.M, TermInfo::Snt}, f});
        out.push_back({AbsSeq{b.beta, b.m, b.M, TermInfo::St}, f});
      } else {
        out.push_back({b, f});
      }
    }
  }
  return out;
}

AbsSeq merge(const EnhSeq& sb, int n) {
  if (sb.empty()) return AbsSeq::none(n);
  if (sb.size() == 1) return sb[0];
  AbsSubst beta = sb.back().beta;
  for (size_t i = sb.size() - 1; i-- > 0;) beta = as_union(sb[i].beta, beta);
  Card m = sb[0].m, M = sb[0].M;
  TermInfo t = sb[0].t;
  for (const auto& b : sb) {
    m = std::min(m, b.m);
    M = std::max(M, b.M);
    t = term_lub(t, b.t);
  }
  return make_seq(beta, m, M, t);
}

bool conc_ignores_rest(const AbsSeqC& c) {
  for (const auto& s : split2(c))
    if (s.acf != Acf::Cut && s.b.t != TermInfo::Snt) return false;
  return true;
}

EnhSeq conc(const AbsSubst& beta, const AbsSeqC& c1, const EnhSeq& sb2, bool use_arith) {
  EnhSeq out;
  for (const AbsSeqC& c : split2(c1)) {
    const AbsSeq& b1 = c.b;
    for (const AbsSeq& b2 : sb2) {
      if (c.acf == Acf::Cut || b1.t == TermInfo::Snt) {
        add_unique(out, b1);
      } else if (b1.M == 0) {
        add_unique(out, b2);
      } else if (b2.M == 0) {
        add_unique(out, AbsSeq{b1.beta, b1.m, b1.M, b2.t});
      } else if (!exclusive(beta, b1.beta, b2.beta, use_arith)) {
        add_unique(out, make_seq(as_union(b1.beta, b2.beta), card_add(b1.m, b2.m),
                                 card_add(b1.M, b2.M), b2.t));
      }
    }
  }
  return out;
}

AbsSeqC seq_extc(const Clause& c, const AbsSubst& beta) {
  return {AbsSeq{as_extc(c, beta), 1, 1, TermInfo::St}, Acf::NoCut};
}

AbsSeqC seq_restrc(const Clause& c, const AbsSeqC& s) {
  return {AbsSeq{as_restrc(c, s.b.beta), s.b.m, s.b.M, s.b.t}, s.acf};
}

std::string render(const std::string& pred, const AbsSeq& b) {
  return "<" + render(pred, b.beta) + "," + std::to_string(b.m) + "," + card_string(b.M) + "," +
         to_string(b.t) + ">";
}

}  // namespace seqai
