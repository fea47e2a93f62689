#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "seqai/concrete.hpp"
#include "universe.hpp"

using namespace seqai;

namespace {

Term y(int i) { return Term::v(i); }
Term a(const char* n) { return Term::f(n); }

std::string corpus(const std::string& name) {
  return oracle::read_file(std::string(SEQAI_CORPUS) + "/" + name + ".pl");
}

Clause clause(int n, int m) {
  Clause c;
  c.name = "c";
  c.arity = n;
  c.var_count = m;
  return c;
}

}  // namespace

TEST_CASE("mgu") {
  auto s = mgu(y(1), Term::f("f", {y(2)}));
  REQUIRE(s);
  CHECK(s->size() == 1);
  CHECK(s->at(1) == Term::f("f", {y(2)}));
  CHECK(!mgu(Term::f("f", {y(1)}), Term::f("g", {y(1)})));
  CHECK(!mgu(y(1), Term::f("f", {y(1)})));
  // Idempotence: no bound variable occurs in a binding.
  auto t = mgu(Term::f("p", {y(1), y(2), y(3)}), Term::f("p", {y(2), y(3), a("a")}));
  REQUIRE(t);
  for (const auto& [v, b] : *t)
    for (const auto& [w, _] : *t) CHECK(!occurs(w, b));
  CHECK(substitute(y(1), *t) == a("a"));
}

TEST_CASE("canonicalize") {
  CHECK(canonicalize({y(7)}) == PSubst{y(1)});
  CHECK(canonicalize({a("a")}) == PSubst{a("a")});
  CHECK(canonicalize({y(3), Term::f("f", {y(3), y(9)})}) ==
        PSubst{y(1), Term::f("f", {y(1), y(2)})});
}

TEST_CASE("extc and restrc") {
  CHECK(concrete_extc(clause(1, 1), {a("a")}) == PSubst{a("a")});
  CHECK(concrete_extc(clause(1, 2), {a("a")}) == PSubst{a("a"), y(1)});
  PSubst e = concrete_extc(clause(1, 3), {y(1)});
  CHECK(e.size() == 3);
  CHECK(e[1] != y(1));
  CHECK(e[2] != y(1));
  CHECK(e[1] != e[2]);

  Sequence s{{{a("a"), a("b")}}, false};
  CHECK(concrete_restrc(clause(1, 2), s).elems == std::vector<PSubst>{{a("a")}});
  CHECK(concrete_restrc(clause(1, 2), Sequence{}).is_empty());
  Sequence inc{{{a("a"), y(1)}}, true};
  auto r = concrete_restrc(clause(1, 2), inc);
  CHECK(r.incomplete);
  CHECK(r.elems.size() == 1);
}

TEST_CASE("restrg") {
  Literal p3 = Literal::call("p", {3});
  CHECK(concrete_restrg(p3, {y(1), y(2), a("a")}) == PSubst{a("a")});
  Literal p21 = Literal::call("p", {2, 1});
  CHECK(concrete_restrg(p21, {a("a"), y(4)}) == PSubst{y(1), a("a")});
  CHECK(concrete_restrg(Literal::call("p", {1}), {y(1)}) == PSubst{y(1)});
}

TEST_CASE("extg") {
  Literal p1 = Literal::call("p", {1});
  CHECK(concrete_extg(p1, {y(1)}, Sequence{{{a("a")}}, false}).elems ==
        std::vector<PSubst>{{a("a")}});
  CHECK(concrete_extg(p1, {y(1), y(1)}, Sequence{{{a("a")}}, false}).elems ==
        std::vector<PSubst>{{a("a"), a("a")}});
  CHECK(concrete_extg(p1, {y(1)}, Sequence{}).is_empty());
  // Fresh variables of the answer stay apart from the rest of θ.
  auto r = concrete_extg(p1, {y(1), y(2)}, Sequence{{{Term::f("f", {y(1)})}}, false});
  REQUIRE(r.elems.size() == 1);
  CHECK(r.elems[0] == PSubst{Term::f("f", {y(1)}), y(2)});
  CHECK_THROWS_AS(concrete_extg(p1, {a("a")}, Sequence{{{a("b")}}, false}), std::logic_error);
}

TEST_CASE("unify") {
  Literal uv = Literal::unif_var(1, 2);
  CHECK(concrete_unify(uv, {y(1), a("a")}).elems == std::vector<PSubst>{{a("a"), a("a")}});
  Literal uf = Literal::unif_func(1, "f", {2});
  CHECK(concrete_unify(uf, {Term::f("g", {a("a")}), a("a")}).is_empty());
  CHECK(concrete_unify(uv, {y(1), Term::f("f", {y(1)})}).is_empty());
}

TEST_CASE("lazy concatenation") {
  PSubst t1{a("a")}, t2{a("b")};
  CHECK(concat(Sequence{{t1}, false}, Sequence{{t2}, false}).elems == std::vector<PSubst>{t1, t2});
  CHECK(concat(Sequence{{t1}, true}, Sequence{{t2}, false}) == Sequence{{t1}, true});
  CHECK(concat(Sequence{{t1}, false}, CutFlag::Cut, Sequence{{t2}, false}) == Sequence{{t1}, false});
}

TEST_CASE("builtins") {
  Literal lt = Literal::arith_test(CmpOp::Lt, Operand{false, 1}, Operand{true, 3});
  CHECK(concrete_builtin(lt, {Term::num(2)}).elems.size() == 1);
  CHECK(concrete_builtin(lt, {Term::num(3)}).is_empty());
  CHECK(concrete_builtin(lt, {a("a")}).is_empty());
  CHECK(concrete_builtin(lt, {y(1)}).is_empty());
  Expr e{Expr::Op::Add, 0, {Expr{Expr::Op::Var, 2, {}}, Expr{Expr::Op::Const, 1, {}}}};
  Literal ev = Literal::arith_eval(1, e);
  CHECK(concrete_builtin(ev, {y(1), Term::num(4)}).elems ==
        std::vector<PSubst>{{Term::num(5), Term::num(4)}});
  CHECK(concrete_builtin(ev, {Term::num(6), Term::num(4)}).is_empty());
  CHECK_THROWS_AS(concrete_builtin(ev, {y(1), y(2)}), ArithError);
  CHECK(concrete_builtin(Literal::type_test(TypeKind::Var, 1), {y(1)}).elems.size() == 1);
  CHECK(concrete_builtin(Literal::type_test(TypeKind::Ground, 1), {Term::f("f", {y(1)})}).is_empty());
  CHECK(concrete_builtin(Literal::type_test(TypeKind::Novar, 1), {Term::f("f", {y(1)})}).elems.size() == 1);
}

TEST_CASE("eval: two-clause procedure and cut") {
  auto prog = parse_program(corpus("pq_cut"));
  Interpreter in(prog);
  CHECK(in.call("q", 1, {y(1)}, 5).elems == std::vector<PSubst>{{a("a")}, {a("b")}});
  CHECK(in.call("p", 1, {y(1)}, 5) == Sequence{{{a("a")}}, false});
  CHECK(in.call("p", 1, {a("b")}, 5) == Sequence{{{a("b")}}, false});
  CHECK(in.call("p", 1, {a("c")}, 5).is_empty());
  // Clause with empty body.
  auto f = parse_program("t(X).");
  auto [s, cf] = Interpreter(f).clause(f.procs[0].clauses[0], {y(1)}, 1);
  CHECK(s.elems == std::vector<PSubst>{{y(1)}});
  CHECK(cf == CutFlag::NoCut);
}

TEST_CASE("tcb_k: repeat") {
  auto prog = parse_program(corpus("repeat"));
  CHECK(tcb_k(prog, {}, "repeat", 0, 0) == Sequence::bottom());
  CHECK(tcb_k(prog, {}, "repeat", 0, 1) == Sequence{{{}}, true});
  CHECK(tcb_k(prog, {}, "repeat", 0, 3) == Sequence{{{}, {}, {}}, true});
}

TEST_CASE("tcb_k: chain property and output instances on the corpus") {
  universe::Universe u{{"[]", "1"}, {{".", 2}}};
  auto cands = universe::terms(u, 2, true);
  for (const char* name : {"is_last", "partition1", "append", "qsort", "compress", "pq_cut"}) {
    auto prog = parse_program(corpus(name));
    for (const auto& pr : prog.procs) {
      std::vector<std::vector<Term>> per(pr.arity, cands);
      auto qs = universe::product(per);
      if (qs.size() > 400) qs.resize(400);
      Interpreter in(prog);
      for (const auto& q : qs) {
        Sequence prev;
        try {
          prev = in.call(pr.name, pr.arity, q, 0);
          for (int k = 1; k <= 5; ++k) {
            Sequence cur = in.call(pr.name, pr.arity, q, k);
            INFO(name << " " << to_string(q) << " k=" << k);
            CHECK(seq_prefix_leq(prev, cur));
            for (const auto& e : cur.elems) CHECK(match(canonicalize(q), e).has_value());
            prev = cur;
          }
        } catch (const ArithError&) {
        }
      }
    }
  }
}

TEST_CASE("cut soundness against resolution over a two-constant universe") {
  auto raw = parse(corpus("pq_cut"));
  auto prog = normalize(raw);
  universe::Universe u{{"a", "c"}, {{"f", 2}}};
  auto cands = universe::terms(u, 3, true);
  for (const char* pred : {"p", "q"}) {
    for (int k = 0; k <= 4; ++k) {
      Interpreter in(prog);
      for (const auto& t : cands) {
        PSubst q{t};
        auto expect = oracle::solve(raw, pred, q, k);
        auto got = in.call(pred, 1, q, k);
        CHECK(got.elems == expect.sols);
        CHECK(got.incomplete == expect.incomplete);
      }
    }
  }
}

TEST_CASE("lazy concatenation is associative on complete sequences") {
  std::mt19937 rng(7);
  auto gen = [&]() {
    Sequence s;
    int n = rng() % 4;
    for (int i = 0; i < n; ++i) s.elems.push_back({Term::num(rng() % 5)});
    s.incomplete = rng() % 3 == 0;
    return s;
  };
  for (int i = 0; i < 2000; ++i) {
    Sequence s1 = gen(), s2 = gen(), s3 = gen();
    CHECK(concat(concat(s1, s2), s3) == concat(s1, concat(s2, s3)));
  }
}
