#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "seqai/sahlin.hpp"

using namespace seqai;
using namespace seqai::sahlin;

namespace {

Seq of(std::initializer_list<Atom> as) {
  Seq s = 0;
  for (Atom a : as) s |= bit(a);
  return s;
}

// Random concrete sequence described by atom a.
Sequence draw(Atom a, std::mt19937& rng) {
  Sequence s;
  int n = count(a) < 2 ? count(a) : 2 + static_cast<int>(rng() % 3);
  for (int i = 0; i < n; ++i) s.elems.push_back({Term::num(static_cast<long>(rng() % 5))});
  s.incomplete = incomplete(a);
  return s;
}

Atom pick(Seq s, std::mt19937& rng) {
  std::vector<Atom> as;
  for (int a = 0; a < kAtoms; ++a)
    if (has(s, Atom(a))) as.push_back(Atom(a));
  return as[rng() % as.size()];
}

}  // namespace

TEST_CASE("equivalence classes") {
  auto cs = classes();
  CHECK(cs.size() == 42);
  std::map<size_t, int> sizes;
  for (const auto& c : cs) ++sizes[c.size()];
  CHECK(sizes[1] == 28);
  CHECK(sizes[2] == 10);
  CHECK(sizes[4] == 4);
  CHECK(sizes.size() == 3);

  auto cls = [&](Seq s) {
    for (const auto& c : cs)
      if (std::find(c.begin(), c.end(), s) != c.end()) return std::set<Seq>(c.begin(), c.end());
    return std::set<Seq>{};
  };
  CHECK(cls(of({L, A0, A2i})) == std::set<Seq>{of({L, A0, A2i}), of({L, A0, A1i, A2i})});
  CHECK(cls(of({L, A0, A2})) == std::set<Seq>{of({L, A0, A2}), of({L, A0, A2, A2i}),
                                              of({L, A0, A1i, A2}), of({L, A0, A1i, A2, A2i})});
  CHECK(cls(of({L, A0, A1i})).size() == 1);
}

TEST_CASE("computational ordering") {
  CHECK(cleq(of({L}), of({A0, A1})));
  CHECK_FALSE(cleq(of({A1}), of({A1i})));
  CHECK(cleq(of({A1i}), of({A1})));
  int lesses = 0;
  for (int a = 0; a < kAtoms; ++a)
    for (int b = 0; b < kAtoms; ++b) lesses += atom_less(Atom(a), Atom(b));
  CHECK(lesses == 9);

  for (int a = 0; a < 64; ++a) {
    CHECK(cleq(Seq(a), Seq(a)));
    for (int b = 0; b < 64; ++b)
      for (int c = 0; c < 64; ++c)
        if (cleq(Seq(a), Seq(b)) && cleq(Seq(b), Seq(c))) CHECK(cleq(Seq(a), Seq(c)));
  }
}

TEST_CASE("strengthened ordering is a partial order") {
  for (int a = 0; a < 64; ++a) {
    CHECK(strengthened_leq(Seq(a), Seq(a)));
    for (int b = 0; b < 64; ++b) {
      if (a != b && strengthened_leq(Seq(a), Seq(b))) CHECK_FALSE(strengthened_leq(Seq(b), Seq(a)));
      for (int c = 0; c < 64; ++c)
        if (strengthened_leq(Seq(a), Seq(b)) && strengthened_leq(Seq(b), Seq(c)))
          CHECK(strengthened_leq(Seq(a), Seq(c)));
    }
  }
  // Longest strict chain is finite: no cycles in the strict relation.
  std::vector<int> depth(64, -1);
  std::function<int(int)> longest = [&](int a) {
    if (depth[a] >= 0) return depth[a];
    depth[a] = 0;
    int best = 0;
    for (int b = 0; b < 64; ++b)
      if (b != a && strengthened_leq(Seq(a), Seq(b))) best = std::max(best, 1 + longest(b));
    return depth[a] = best;
  };
  int top = 0;
  for (int a = 0; a < 64; ++a) top = std::max(top, longest(a));
  CHECK(top < 64);
}

TEST_CASE("widening") {
  bool crude = false;
  CHECK(widen(of({A0, A1}), of({L}), crude) == of({A0, A1}));
  CHECK_FALSE(crude);
  CHECK(widen(of({A1}), of({A1}), crude) == of({A1}));
  CHECK_FALSE(crude);
  CHECK(widen(of({A1}), of({A0}), crude) == of({A0, A1}));
  CHECK(crude);
  // Once crude, only unions.
  CHECK(widen(of({A2}), of({A2i}), crude) == of({A2, A2i}));
}

TEST_CASE("conditional convergence") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20000; ++trial) {
    Seq cur = bit(L);  // B'_0
    bool crude = false;
    for (int i = 0; i < 40; ++i) {
      // B_{i+1} with B'_i below it.
      std::vector<Seq> cands;
      for (int s = 0; s < 64; ++s)
        if (cleq(cur, Seq(s))) cands.push_back(Seq(s));
      Seq b = cands[rng() % cands.size()];
      Seq next = widen(b, cur, crude);
      CHECK_FALSE(crude);
      CHECK((b & next) == b);
      CHECK(strengthened_leq(cur, next));
      cur = next;
    }
  }
}

TEST_CASE("equivalent sets differ in concretization") {
  // Atoms have pairwise disjoint concretizations, so distinct sets differ.
  std::mt19937 rng(2);
  for (int a = 0; a < kAtoms; ++a)
    for (int i = 0; i < 20; ++i) CHECK(abstract(draw(Atom(a), rng)) == Atom(a));
  for (const auto& c : classes())
    for (Seq x : c)
      for (Seq y : c) {
        if (x == y) continue;
        Seq d = static_cast<Seq>(x ^ y);
        Sequence w = draw(pick(d, rng), rng);
        CHECK(member(w, x) != member(w, y));
      }
}

TEST_CASE("operations") {
  CHECK(concat(of({A1}), of({A1})) == of({A2}));
  CHECK(concat(of({A1i}), of({A2})) == of({A1i}));
  CHECK(concat(of({A0}), of({L})) == of({L}));
  CHECK(seq_of(extc()) == of({A1}));
  CHECK(cut(cbit(A2, false)) == cbit(A1, true));
  CHECK(cut(cbit(L, false)) == cbit(L, false));
  CHECK(cut(cbit(A0, true)) == cbit(A0, true));
  // q(X) :- X = a. q(X) :- X = b.  p(X) :- q(X), !.
  Seq q = conc(extgs(extc(), local()), seq_of(extgs(extc(), local())));
  CHECK(q == of({A0, A1, A2}));
  CHECK(seq_of(cut(extgs(extc(), q))) == of({A0, A1}));
  CHECK(conc_ignores_rest(cbit(A1, true)));
  CHECK(conc_ignores_rest(cbit(L, false)));
  CHECK_FALSE(conc_ignores_rest(cbit(A1, false)));
  CHECK(extgs(cbit(A2i, false), of({A0})) == cbit(L, false));
  CHECK(prefix(Sequence{{{}}, true}, of({A2})));
  CHECK_FALSE(prefix(Sequence{{{}, {}}, true}, of({A1, A0})));
}

TEST_CASE("soundness of sequence operations") {
  std::mt19937 rng(9);
  auto rand_seq = [&] {
    Seq s = 0;
    while (!s) s = static_cast<Seq>(rng() % 64);
    return s;
  };
  for (int trial = 0; trial < 20000; ++trial) {
    Seq b1 = rand_seq(), b2 = rand_seq();
    Sequence s1 = draw(pick(b1, rng), rng), s2 = draw(pick(b2, rng), rng);
    REQUIRE(member(s1, b1));
    CHECK(member(seqai::concat(s1, s2), concat(b1, b2)));

    bool cut_flag = rng() % 2;
    SeqC c = 0;
    for (int a = 0; a < kAtoms; ++a)
      if (has(b1, Atom(a))) c |= cbit(Atom(a), cut_flag);

    // Cut keeps the first answer.
    Sequence cs = s1;
    bool cf = cut_flag;
    if (!s1.elems.empty()) {
      cs = Sequence{{s1.elems[0]}, false};
      cf = true;
    }
    CHECK((cut(c) & cbit(abstract(cs), cf)) != 0);

    // Each answer of s1 runs a call whose answers lie in b2.
    Sequence ext;
    for (size_t i = 0; i < s1.elems.size(); ++i) ext = seqai::concat(ext, draw(pick(b2, rng), rng));
    if (s1.incomplete) ext = seqai::concat(ext, Sequence::bottom());
    CHECK((extgs(c, b2) & cbit(abstract(ext), cut_flag)) != 0);

    Sequence joined = seqai::concat(s1, cut_flag ? CutFlag::Cut : CutFlag::NoCut, s2);
    CHECK(member(joined, conc(c, b2)));
  }
}
