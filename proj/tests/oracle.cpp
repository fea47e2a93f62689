#include "oracle.hpp"

#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace oracle {

namespace {

struct Cell {
  bool is_var = false;
  int ref = -1;
  std::string name;
  std::vector<int> args;
};

struct ArithFault {};

struct Goal {
  int term;
  int budget;
  int barrier;
  std::shared_ptr<const Goal> next;
};
using Goals = std::shared_ptr<const Goal>;

enum class Kind { Ok, Cut, Bottom };
struct Res {
  Kind kind = Kind::Ok;
  int barrier = 0;
};

bool parse_long(const std::string& s, long& out) {
  if (s.empty()) return false;
  size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size()) return false;
  for (size_t k = i; k < s.size(); ++k)
    if (s[k] < '0' || s[k] > '9') return false;
  out = std::stol(s);
  return true;
}

class Machine {
 public:
  explicit Machine(const std::vector<seqai::RawClause>& p) : prog_(p) {}

  int new_var() {
    Cell c;
    c.is_var = true;
    c.ref = static_cast<int>(heap_.size());
    heap_.push_back(c);
    return c.ref;
  }

  int new_struct(const std::string& name, std::vector<int> args) {
    Cell c;
    c.name = name;
    c.args = std::move(args);
    heap_.push_back(std::move(c));
    return static_cast<int>(heap_.size()) - 1;
  }

  int build(const seqai::RawTerm& t, std::map<std::string, int>& vars) {
    if (t.is_var()) {
      if (t.name == "_") return new_var();
      auto it = vars.find(t.name);
      if (it != vars.end()) return it->second;
      int v = new_var();
      vars[t.name] = v;
      return v;
    }
    std::vector<int> a;
    for (const auto& x : t.args) a.push_back(build(x, vars));
    return new_struct(t.name, std::move(a));
  }

  int build(const seqai::Term& t, std::map<int, int>& vars) {
    if (t.is_var()) {
      auto it = vars.find(t.var);
      if (it != vars.end()) return it->second;
      int v = new_var();
      vars[t.var] = v;
      return v;
    }
    std::vector<int> a;
    for (const auto& x : t.args) a.push_back(build(x, vars));
    return new_struct(t.fn, std::move(a));
  }

  int deref(int i) const {
    while (heap_[i].is_var && heap_[i].ref != i) i = heap_[i].ref;
    return i;
  }

  void bind(int v, int t) {
    heap_[v].ref = t;
    trail_.push_back(v);
  }

  void undo(size_t mark) {
    while (trail_.size() > mark) {
      int v = trail_.back();
      trail_.pop_back();
      heap_[v].ref = v;
    }
  }

  bool occurs_in(int v, int t) const {
    t = deref(t);
    if (t == v) return true;
    if (heap_[t].is_var) return false;
    for (int a : heap_[t].args)
      if (occurs_in(v, a)) return true;
    return false;
  }

  bool unify(int a, int b) {
    a = deref(a);
    b = deref(b);
    if (a == b) return true;
    if (heap_[a].is_var) {
      if (occurs_in(a, b)) return false;
      bind(a, b);
      return true;
    }
    if (heap_[b].is_var) {
      if (occurs_in(b, a)) return false;
      bind(b, a);
      return true;
    }
    if (heap_[a].name != heap_[b].name || heap_[a].args.size() != heap_[b].args.size())
      return false;
    for (size_t i = 0; i < heap_[a].args.size(); ++i)
      if (!unify(heap_[a].args[i], heap_[b].args[i])) return false;
    return true;
  }

  bool ground(int t) const {
    t = deref(t);
    if (heap_[t].is_var) return false;
    for (int a : heap_[t].args)
      if (!ground(a)) return false;
    return true;
  }

  long eval(int t) {
    t = deref(t);
    const Cell& c = heap_[t];
    long v;
    if (c.is_var) throw ArithFault{};
    if (c.args.empty() && parse_long(c.name, v)) return v;
    if (c.args.size() == 1 && c.name == "-") return -eval(c.args[0]);
    if (c.args.size() == 2) {
      long x = eval(c.args[0]), y = eval(c.args[1]);
      if (c.name == "+") return x + y;
      if (c.name == "-") return x - y;
      if (c.name == "*") return x * y;
      if (c.name == "//" || c.name == "mod") {
        if (y == 0) throw ArithFault{};
        return c.name == "//" ? x / y : ((x % y) + y) % y;
      }
    }
    throw ArithFault{};
  }

  // Plain variable operands must hold an integer; anything else fails.
  bool operand(int t, long& out) {
    if (heap_[t].is_var) {
      int d = deref(t);
      return !heap_[d].is_var && heap_[d].args.empty() && parse_long(heap_[d].name, out);
    }
    out = eval(t);
    return true;
  }

  Goals push_body(const seqai::RawClause& c, std::map<std::string, int>& vars, int budget,
                  int barrier, Goals rest) {
    for (auto it = c.body.rbegin(); it != c.body.rend(); ++it)
      rest = std::make_shared<const Goal>(Goal{build(*it, vars), budget, barrier, rest});
    return rest;
  }

  template <class Emit>
  Res run(const Goals& g, Emit& emit) {
    if (!g) {
      emit();
      return {};
    }
    int t = deref(g->term);
    const Cell c = heap_[t];
    const std::string& n = c.name;
    size_t ar = c.args.size();
    if (n == "!" && ar == 0) {
      Res r = run(g->next, emit);
      if (r.kind == Kind::Ok) return {Kind::Cut, g->barrier};
      return r;
    }
    if (n == "true" && ar == 0) return run(g->next, emit);
    if (ar == 2 && n == "=") return guarded(unify(c.args[0], c.args[1]), g, emit);
    if (ar == 2 && (n == "is" || n == ":=")) {
      long v = eval(c.args[1]);
      int num = new_struct(std::to_string(v), {});
      return guarded(unify(c.args[0], num), g, emit);
    }
    static const std::map<std::string, int> cmp = {{"<", 0},   {"=<", 1},   {"=:=", 2},
                                                   {"<>", 3},  {"=\\=", 3}, {">=", 4},
                                                   {">", 5}};
    if (ar == 2 && cmp.count(n)) {
      long a, b;
      bool ok = operand(c.args[0], a);
      ok = operand(c.args[1], b) && ok;
      if (ok) {
        switch (cmp.at(n)) {
          case 0: ok = a < b; break;
          case 1: ok = a <= b; break;
          case 2: ok = a == b; break;
          case 3: ok = a != b; break;
          case 4: ok = a >= b; break;
          default: ok = a > b;
        }
      }
      if (!ok) return {};
      return run(g->next, emit);
    }
    if (ar == 1 && (n == "var" || n == "nonvar" || n == "ground")) {
      int a = deref(c.args[0]);
      bool ok = n == "var" ? heap_[a].is_var : n == "nonvar" ? !heap_[a].is_var : ground(a);
      if (!ok) return {};
      return run(g->next, emit);
    }
    if (g->budget == 0) return {Kind::Bottom, 0};
    int barrier = ++barriers_;
    for (const auto& cl : prog_) {
      if (cl.head.name != n || cl.head.args.size() != ar) continue;
      size_t mark = trail_.size();
      std::map<std::string, int> vars;
      bool ok = true;
      for (size_t i = 0; i < ar && ok; ++i) ok = unify(build(cl.head.args[i], vars), c.args[i]);
      if (!ok) {
        undo(mark);
        continue;
      }
      Goals body = push_body(cl, vars, g->budget - 1, barrier, g->next);
      Res r = run(body, emit);
      undo(mark);
      if (r.kind == Kind::Bottom) return r;
      if (r.kind == Kind::Cut) {
        if (r.barrier == barrier) return {};
        return r;
      }
    }
    return {};
  }

  template <class Emit>
  Res guarded(bool ok, const Goals& g, Emit& emit) {
    return ok ? run(g->next, emit) : Res{};
  }

  seqai::Term read(int t, std::map<int, int>& names) const {
    t = deref(t);
    if (heap_[t].is_var) {
      auto it = names.find(t);
      if (it == names.end()) it = names.emplace(t, static_cast<int>(names.size()) + 1).first;
      return seqai::Term::v(it->second);
    }
    seqai::Term r = seqai::Term::f(heap_[t].name);
    for (int a : heap_[t].args) r.args.push_back(read(a, names));
    return r;
  }

  std::vector<Cell> heap_;
  std::vector<int> trail_;

 private:
  const std::vector<seqai::RawClause>& prog_;
  int barriers_ = 0;
};

}  // namespace

Answer solve(const std::vector<seqai::RawClause>& prog, const std::string& pred,
             const seqai::PSubst& args, int k) {
  Machine m(prog);
  std::map<int, int> vars;
  std::vector<int> cells;
  for (const auto& a : args) cells.push_back(m.build(a, vars));
  int goal = m.new_struct(pred, cells);
  Answer ans;
  auto emit = [&]() {
    std::map<int, int> names;
    seqai::PSubst s;
    for (int c : cells) s.push_back(m.read(c, names));
    ans.sols.push_back(std::move(s));
  };
  try {
    Res r = m.run(std::make_shared<const Goal>(Goal{goal, k, 0, nullptr}), emit);
    ans.incomplete = r.kind == Kind::Bottom;
  } catch (const ArithFault&) {
    ans.error = true;
  }
  return ans;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace oracle
