#include "seqai/sahlin.hpp"

#include <algorithm>
#include <map>

namespace seqai::sahlin {

int count(Atom a) { return static_cast<int>(a) / 2; }

bool incomplete(Atom a) { return a == L || a == A1i || a == A2i; }

Atom make_atom(int n, bool inc) {
  n = std::min(n, 2);
  if (n == 0) return inc ? L : A0;
  if (n == 1) return inc ? A1i : A1;
  return inc ? A2i : A2;
}

const char* atom_name(Atom a) {
  static const char* names[] = {"L", "0", "1", "1'", "2", "2'"};
  return names[a];
}

bool has(Seq s, Atom a) { return (s & bit(a)) != 0; }

std::string render(Seq s) {
  std::string out = "{";
  for (int a = 0; a < kAtoms; ++a) {
    if (!has(s, Atom(a))) continue;
    if (out.size() > 1) out += ",";
    out += atom_name(Atom(a));
  }
  return out + "}";
}

bool atom_less(Atom a, Atom b) {
  if (a == L) return b != L;
  if (a == A1i) return b == A1 || b == A2 || b == A2i;
  if (a == A2i) return b == A2;
  return false;
}

bool atom_leq(Atom a, Atom b) { return a == b || atom_less(a, b); }

bool cleq(Seq a, Seq b) {
  for (int x = 0; x < kAtoms; ++x) {
    if (!has(a, Atom(x))) continue;
    bool found = false;
    for (int y = 0; y < kAtoms && !found; ++y) found = has(b, Atom(y)) && atom_leq(Atom(x), Atom(y));
    if (!found) return false;
  }
  for (int y = 0; y < kAtoms; ++y) {
    if (!has(b, Atom(y))) continue;
    bool found = false;
    for (int x = 0; x < kAtoms && !found; ++x) found = has(a, Atom(x)) && atom_leq(Atom(x), Atom(y));
    if (!found) return false;
  }
  return true;
}

bool cless(Seq a, Seq b) { return cleq(a, b) && !cleq(b, a); }

bool equiv(Seq a, Seq b) { return cleq(a, b) && cleq(b, a); }

bool strengthened_leq(Seq a, Seq b) { return cless(a, b) || (equiv(a, b) && (a & b) == a); }

Seq widen(Seq bnew, Seq bold, bool& crude) {
  if (!cleq(bold, bnew)) crude = true;
  if (!crude && cless(bold, bnew)) return bnew;
  return static_cast<Seq>(bnew | bold);
}

std::vector<std::vector<Seq>> classes() {
  std::vector<std::vector<Seq>> out;
  for (int s = 0; s < 64; ++s) {
    bool placed = false;
    for (auto& c : out)
      if (equiv(c[0], Seq(s))) {
        c.push_back(Seq(s));
        placed = true;
        break;
      }
    if (!placed) out.push_back({Seq(s)});
  }
  return out;
}

Atom abstract(const Sequence& s) { return make_atom(static_cast<int>(s.ns()), s.incomplete); }

bool member(const Sequence& s, Seq b) { return has(b, abstract(s)); }

bool prefix(const Sequence& s, Seq b) {
  if (!s.incomplete) return member(s, b);
  for (int a = 0; a < kAtoms; ++a)
    if (has(b, Atom(a)) && (count(Atom(a)) == 2 || count(Atom(a)) >= static_cast<int>(s.ns())))
      return true;
  return false;
}

namespace {

Atom cat(Atom a, Atom b) {
  if (incomplete(a)) return a;
  return make_atom(count(a) + count(b), incomplete(b));
}

// Union of b^k over all k >= 2.
Seq power_two_plus(Seq b) {
  Seq cur = concat(b, b), acc = cur;
  for (;;) {
    cur = concat(cur, b);
    Seq next = static_cast<Seq>(acc | cur);
    if (next == acc) return acc;
    acc = next;
  }
}

}  // namespace

Seq concat(Seq a, Seq b) {
  Seq out = 0;
  for (int x = 0; x < kAtoms; ++x)
    for (int y = 0; y < kAtoms; ++y)
      if (has(a, Atom(x)) && has(b, Atom(y))) out |= bit(cat(Atom(x), Atom(y)));
  return out;
}

SeqC extc() { return cbit(A1, false); }

Seq local() { return static_cast<Seq>(bit(A0) | bit(A1)); }

SeqC cut(SeqC c) {
  SeqC out = 0;
  for (int k = 0; k < 2 * kAtoms; ++k) {
    if (!(c & (1u << k))) continue;
    Atom a = Atom(k % kAtoms);
    bool cf = k >= kAtoms;
    out |= count(a) >= 1 ? cbit(A1, true) : cbit(a, cf);
  }
  return out;
}

SeqC extgs(SeqC c, Seq b) {
  SeqC out = 0;
  for (int k = 0; k < 2 * kAtoms; ++k) {
    if (!(c & (1u << k))) continue;
    Atom a = Atom(k % kAtoms);
    bool cf = k >= kAtoms;
    Seq r = count(a) == 0 ? bit(A0) : count(a) == 1 ? b : power_two_plus(b);
    if (incomplete(a)) r = concat(r, bit(L));
    for (int y = 0; y < kAtoms; ++y)
      if (has(r, Atom(y))) out |= cbit(Atom(y), cf);
  }
  return out;
}

Seq seq_of(SeqC c) { return static_cast<Seq>((c | (c >> kAtoms)) & 0x3f); }

Seq conc(SeqC c, Seq rest) {
  Seq out = 0;
  for (int k = 0; k < 2 * kAtoms; ++k) {
    if (!(c & (1u << k))) continue;
    Atom a = Atom(k % kAtoms);
    if (k >= kAtoms || incomplete(a)) out |= bit(a);
    else out |= concat(bit(a), rest);
  }
  return out;
}

bool conc_ignores_rest(SeqC c) {
  for (int a = 0; a < kAtoms; ++a)
    if ((c & cbit(Atom(a), false)) && !incomplete(Atom(a))) return false;
  return true;
}

}  // namespace seqai::sahlin
