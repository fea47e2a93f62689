#include "seqai/concrete.hpp"

#include <algorithm>

namespace seqai {

bool Term::is_ground() const {
  if (is_var()) return false;
  return std::all_of(args.begin(), args.end(), [](const Term& a) { return a.is_ground(); });
}

std::optional<long> Term::as_int() const {
  if (is_var() || !args.empty() || fn.empty()) return std::nullopt;
  size_t i = fn[0] == '-' ? 1 : 0;
  if (i == fn.size()) return std::nullopt;
  for (size_t k = i; k < fn.size(); ++k)
    if (fn[k] < '0' || fn[k] > '9') return std::nullopt;
  return std::stol(fn);
}

int Term::depth() const {
  int d = 0;
  for (const Term& a : args) d = std::max(d, a.depth());
  return is_var() ? 0 : d + 1;
}

std::string to_string(const Term& t) {
  if (t.is_var()) return "y" + std::to_string(t.var);
  if (t.fn == "." && t.args.size() == 2) {
    std::string s = "[" + to_string(t.args[0]);
    const Term* r = &t.args[1];
    while (!r->is_var() && r->fn == "." && r->args.size() == 2) {
      s += "," + to_string(r->args[0]);
      r = &r->args[1];
    }
    if (r->is_var() || r->fn != "[]" || !r->args.empty()) s += "|" + to_string(*r);
    return s + "]";
  }
  if (t.args.empty()) return t.fn;
  std::string s = t.fn + "(";
  for (size_t i = 0; i < t.args.size(); ++i) s += (i ? "," : "") + to_string(t.args[i]);
  return s + ")";
}

void collect_vars(const Term& t, std::vector<int>& out) {
  if (t.is_var()) {
    if (std::find(out.begin(), out.end(), t.var) == out.end()) out.push_back(t.var);
    return;
  }
  for (const Term& a : t.args) collect_vars(a, out);
}

int max_var(const Term& t) {
  int m = t.var;
  for (const Term& a : t.args) m = std::max(m, max_var(a));
  return m;
}

Term substitute(const Term& t, const Bindings& s) {
  if (t.is_var()) {
    auto it = s.find(t.var);
    return it == s.end() ? t : it->second;
  }
  Term r = Term::f(t.fn);
  r.args.reserve(t.args.size());
  for (const Term& a : t.args) r.args.push_back(substitute(a, s));
  return r;
}

bool occurs(int v, const Term& t) {
  if (t.is_var()) return t.var == v;
  return std::any_of(t.args.begin(), t.args.end(), [v](const Term& a) { return occurs(v, a); });
}

namespace {

// Triangular bindings are resolved on the fly.
Term walk(const Term& t, const Bindings& s) {
  const Term* cur = &t;
  while (cur->is_var()) {
    auto it = s.find(cur->var);
    if (it == s.end()) break;
    cur = &it->second;
  }
  return *cur;
}

Term resolve(const Term& t, const Bindings& s) {
  Term w = walk(t, s);
  if (w.is_var()) return w;
  for (Term& a : w.args) a = resolve(a, s);
  return w;
}

bool occurs_resolved(int v, const Term& t, const Bindings& s) {
  Term w = walk(t, s);
  if (w.is_var()) return w.var == v;
  return std::any_of(w.args.begin(), w.args.end(),
                     [&](const Term& a) { return occurs_resolved(v, a, s); });
}

bool unify_into(const Term& a, const Term& b, Bindings& s) {
  std::vector<std::pair<Term, Term>> stack{{a, b}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    x = walk(x, s);
    y = walk(y, s);
    if (x.is_var() && y.is_var() && x.var == y.var) continue;
    if (x.is_var()) {
      if (occurs_resolved(x.var, y, s)) return false;
      s[x.var] = y;
      continue;
    }
    if (y.is_var()) {
      if (occurs_resolved(y.var, x, s)) return false;
      s[y.var] = x;
      continue;
    }
    if (x.fn != y.fn || x.args.size() != y.args.size()) return false;
    for (size_t i = 0; i < x.args.size(); ++i) stack.push_back({x.args[i], y.args[i]});
  }
  return true;
}

Bindings idempotent(const Bindings& tri) {
  Bindings out;
  for (const auto& [v, t] : tri) out[v] = resolve(t, tri);
  return out;
}

bool match_into(const Term& p, const Term& t, Bindings& s) {
  if (p.is_var()) {
    auto [it, fresh] = s.emplace(p.var, t);
    return fresh || it->second == t;
  }
  if (t.is_var() || p.fn != t.fn || p.args.size() != t.args.size()) return false;
  for (size_t i = 0; i < p.args.size(); ++i)
    if (!match_into(p.args[i], t.args[i], s)) return false;
  return true;
}

Term rename(const Term& t, const std::map<int, int>& m) {
  if (t.is_var()) return Term::v(m.at(t.var));
  Term r = Term::f(t.fn);
  for (const Term& a : t.args) r.args.push_back(rename(a, m));
  return r;
}

Term offset(const Term& t, int by) {
  if (t.is_var()) return Term::v(t.var + by);
  Term r = Term::f(t.fn);
  for (const Term& a : t.args) r.args.push_back(offset(a, by));
  return r;
}

}  // namespace

std::optional<Bindings> mgu(const Term& a, const Term& b) {
  Bindings s;
  if (!unify_into(a, b, s)) return std::nullopt;
  return idempotent(s);
}

std::optional<Bindings> match(const Term& pattern, const Term& target) {
  Bindings s;
  if (!match_into(pattern, target, s)) return std::nullopt;
  return s;
}

std::optional<Bindings> match(const PSubst& pattern, const PSubst& target) {
  if (pattern.size() != target.size()) return std::nullopt;
  Bindings s;
  for (size_t i = 0; i < pattern.size(); ++i)
    if (!match_into(pattern[i], target[i], s)) return std::nullopt;
  return s;
}

std::string to_string(const PSubst& s) {
  std::string r = "{";
  for (size_t i = 0; i < s.size(); ++i)
    r += (i ? ", x" : "x") + std::to_string(i + 1) + "/" + to_string(s[i]);
  return r + "}";
}

PSubst canonicalize(const PSubst& s) {
  std::vector<int> order;
  for (const Term& t : s) collect_vars(t, order);
  std::map<int, int> m;
  for (size_t i = 0; i < order.size(); ++i) m[order[i]] = static_cast<int>(i) + 1;
  PSubst r;
  r.reserve(s.size());
  for (const Term& t : s) r.push_back(rename(t, m));
  return r;
}

std::string key(const PSubst& s) { return to_string(canonicalize(s)); }

int max_var(const PSubst& s) {
  int m = 0;
  for (const Term& t : s) m = std::max(m, max_var(t));
  return m;
}

std::string to_string(const Sequence& s) {
  std::string r = "<";
  for (size_t i = 0; i < s.elems.size(); ++i) r += (i ? "," : "") + to_string(s.elems[i]);
  if (s.incomplete) r += s.elems.empty() ? "bot" : ",bot";
  return r + ">";
}

Sequence concat(const Sequence& a, const Sequence& b) {
  if (a.incomplete) return a;
  Sequence r = a;
  r.elems.insert(r.elems.end(), b.elems.begin(), b.elems.end());
  r.incomplete = b.incomplete;
  return r;
}

Sequence concat(const Sequence& a, CutFlag cf, const Sequence& b) {
  if (cf == CutFlag::Cut) return a;
  return concat(a, b);
}

bool seq_prefix_leq(const Sequence& a, const Sequence& b) {
  if (!a.incomplete) return a == b;
  if (a.elems.size() > b.elems.size()) return false;
  return std::equal(a.elems.begin(), a.elems.end(), b.elems.begin());
}

PSubst concrete_extc(const Clause& c, const PSubst& theta) {
  PSubst r = theta;
  int next = max_var(theta);
  for (int k = c.arity; k < c.var_count; ++k) r.push_back(Term::v(++next));
  return r;
}

Sequence concrete_restrc(const Clause& c, const Sequence& s) {
  Sequence r;
  r.incomplete = s.incomplete;
  for (const PSubst& e : s.elems)
    r.elems.push_back(canonicalize(PSubst(e.begin(), e.begin() + c.arity)));
  return r;
}

PSubst restrg_raw(const Literal& l, const PSubst& theta) {
  PSubst r;
  for (int v : l.vars()) r.push_back(theta.at(v - 1));
  return r;
}

PSubst concrete_restrg(const Literal& l, const PSubst& theta) {
  return canonicalize(restrg_raw(l, theta));
}

Sequence concrete_extg(const Literal& l, const PSubst& theta, const Sequence& s) {
  PSubst raw = restrg_raw(l, theta);
  int base = max_var(theta);
  Sequence r;
  r.incomplete = s.incomplete;
  for (const PSubst& psi : s.elems) {
    PSubst moved;
    for (const Term& t : psi) moved.push_back(offset(t, base));
    auto sigma = match(raw, moved);
    if (!sigma) throw std::logic_error("extg: " + to_string(psi) + " is not an instance of " +
                                       to_string(raw));
    PSubst out;
    out.reserve(theta.size());
    for (const Term& t : theta) out.push_back(substitute(t, *sigma));
    r.elems.push_back(canonicalize(out));
  }
  return r;
}

Sequence concrete_unify(const Literal& l, const PSubst& theta) {
  std::optional<Bindings> s;
  if (l.kind == Literal::Kind::UnifVar) {
    s = mgu(theta.at(0), theta.at(1));
  } else {
    Term f = Term::f(l.name, PSubst(theta.begin() + 1, theta.end()));
    s = mgu(theta.at(0), f);
  }
  Sequence r;
  if (!s) return r;
  PSubst out;
  for (const Term& t : theta) out.push_back(substitute(t, *s));
  r.elems.push_back(canonicalize(out));
  return r;
}

long eval_expr(const Expr& e, const PSubst& theta) {
  switch (e.op) {
    case Expr::Op::Const:
      return e.value;
    case Expr::Op::Var: {
      auto v = theta.at(e.value - 1).as_int();
      if (!v) throw ArithError("non-integer operand " + to_string(theta.at(e.value - 1)));
      return *v;
    }
    case Expr::Op::Neg:
      return -eval_expr(e.kids[0], theta);
    default:
      break;
  }
  long a = eval_expr(e.kids[0], theta), b = eval_expr(e.kids[1], theta);
  switch (e.op) {
    case Expr::Op::Add: return a + b;
    case Expr::Op::Sub: return a - b;
    case Expr::Op::Mul: return a * b;
    case Expr::Op::Div:
      if (b == 0) throw ArithError("division by zero");
      return a / b;
    case Expr::Op::Mod:
      if (b == 0) throw ArithError("division by zero");
      return ((a % b) + b) % b;
    default:
      return 0;
  }
}

Sequence concrete_builtin(const Literal& l, const PSubst& theta) {
  Sequence keep{{theta}, false};
  switch (l.kind) {
    case Literal::Kind::TypeTest: {
      const Term& t = theta.at(l.args[0] - 1);
      bool ok = l.type == TypeKind::Var      ? t.is_var()
                : l.type == TypeKind::Ground ? t.is_ground()
                                             : !t.is_var();
      return ok ? keep : Sequence{};
    }
    case Literal::Kind::ArithTest: {
      auto val = [&](const Operand& o) -> std::optional<long> {
        if (o.is_const) return o.value;
        return theta.at(o.value - 1).as_int();
      };
      auto a = val(l.lhs), b = val(l.rhs);
      return (a && b && holds(l.cmp, *a, *b)) ? keep : Sequence{};
    }
    case Literal::Kind::ArithEval: {
      long v = eval_expr(l.expr, theta);
      auto s = mgu(theta.at(l.args[0] - 1), Term::num(v));
      if (!s) return {};
      PSubst out;
      for (const Term& t : theta) out.push_back(substitute(t, *s));
      return Sequence{{canonicalize(out)}, false};
    }
    default:
      throw std::logic_error("not a builtin: " + to_string(l));
  }
}

Sequence Interpreter::call(const std::string& pred, int arity, const PSubst& theta, int k) {
  if (k <= 0) return Sequence::bottom();
  const Procedure* pr = prog_.find(pred, arity);
  if (!pr) throw std::runtime_error("unknown predicate " + pred + "/" + std::to_string(arity));
  PSubst c = canonicalize(theta);
  std::string mk = pred + "/" + std::to_string(arity) + "@" + std::to_string(k) + to_string(c);
  auto it = memo_.find(mk);
  if (it != memo_.end()) return it->second;
  Sequence r = procedure(*pr, c, k);
  memo_.emplace(mk, r);
  return r;
}

Sequence Interpreter::procedure(const Procedure& pr, const PSubst& theta, int k) {
  Sequence out;
  for (const Clause& c : pr.clauses) {
    auto [s, cf] = clause(c, theta, k);
    out.elems.insert(out.elems.end(), s.elems.begin(), s.elems.end());
    if (s.incomplete) {
      out.incomplete = true;
      return out;
    }
    if (cf == CutFlag::Cut) return out;
  }
  return out;
}

std::pair<Sequence, CutFlag> Interpreter::clause(const Clause& c, const PSubst& theta, int k) {
  std::pair<Sequence, CutFlag> cur{Sequence{{concrete_extc(c, theta)}, false}, CutFlag::NoCut};
  for (const Literal& l : c.body) cur = literal(l, std::move(cur), k);
  return {concrete_restrc(c, cur.first), cur.second};
}

std::pair<Sequence, CutFlag> Interpreter::literal(const Literal& l,
                                                  std::pair<Sequence, CutFlag> in, int k) {
  const Sequence& s = in.first;
  if (l.kind == Literal::Kind::Cut) {
    if (s.elems.empty()) return in;
    return {Sequence{{s.elems.front()}, false}, CutFlag::Cut};
  }
  Sequence out;
  for (const PSubst& theta : s.elems) {
    Sequence si;
    switch (l.kind) {
      case Literal::Kind::Call: {
        PSubst arg = concrete_restrg(l, theta);
        si = concrete_extg(l, theta, call(l.name, static_cast<int>(l.args.size()), arg, k - 1));
        break;
      }
      case Literal::Kind::UnifVar:
      case Literal::Kind::UnifFunc:
        si = concrete_extg(l, theta, concrete_unify(l.formal(), concrete_restrg(l, theta)));
        break;
      default:
        si = concrete_builtin(l, theta);
    }
    out.elems.insert(out.elems.end(), si.elems.begin(), si.elems.end());
    if (si.incomplete) {
      out.incomplete = true;
      return {out, in.second};
    }
  }
  out.incomplete = s.incomplete;
  return {out, in.second};
}

Sequence tcb_k(const NormalizedProgram& p, const PSubst& theta, const std::string& pred, int arity,
               int k) {
  Interpreter in(p);
  return in.call(pred, arity, theta, k);
}

}  // namespace seqai
