#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seqai/concrete.hpp"

namespace seqai::sahlin {

// Atomic sequences: L = <bottom>, 0 = <>, 1, 1' (one answer then bottom),
// 2, 2' (several answers, finite or not).
enum Atom : int { L = 0, A0, A1, A1i, A2, A2i };
constexpr int kAtoms = 6;

int count(Atom a);  // 0, 1 or 2 (two or more)
bool incomplete(Atom a);
Atom make_atom(int count, bool incomplete);
const char* atom_name(Atom a);

// Set of atoms as a bit mask.
using Seq = std::uint8_t;
constexpr Seq bit(Atom a) { return static_cast<Seq>(1u << a); }
bool has(Seq s, Atom a);

// Atoms paired with a cut flag; bit (a + 6 * cut).
using SeqC = std::uint16_t;
constexpr SeqC cbit(Atom a, bool cut) { return static_cast<SeqC>(1u << (a + (cut ? kAtoms : 0))); }

std::string render(Seq s);

bool atom_less(Atom a, Atom b);  // strictly less complete
bool atom_leq(Atom a, Atom b);
bool cleq(Seq a, Seq b);  // computational pre-order
bool cless(Seq a, Seq b);
bool equiv(Seq a, Seq b);
bool strengthened_leq(Seq a, Seq b);

// Returns the widened value; sets crude when old is not below new.
Seq widen(Seq bnew, Seq bold, bool& crude);

std::vector<std::vector<Seq>> classes();

Atom abstract(const Sequence& s);
bool member(const Sequence& s, Seq b);
bool prefix(const Sequence& s, Seq b);

// Sequence operations.
Seq concat(Seq a, Seq b);
SeqC extc();
Seq local();  // unification and built-ins: zero or one answer
SeqC cut(SeqC c);
SeqC extgs(SeqC c, Seq b);
Seq seq_of(SeqC c);
Seq conc(SeqC c, Seq rest);
bool conc_ignores_rest(SeqC c);

}  // namespace seqai::sahlin
