#include "seqai/absdom.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace seqai {

const char* mode_name(Mode m) {
  static const char* names[] = {"bottom", "var", "ground", "gv", "ngv", "noground", "novar", "any"};
  return names[m & 7];
}

std::optional<Mode> mode_from_letter(const std::string& s) {
  static const std::map<std::string, Mode> m = {
      {"g", kGround},  {"ground", kGround}, {"v", kVar},     {"var", kVar},
      {"a", kAny},     {"any", kAny},       {"n", kNovar},   {"novar", kNovar},
      {"ng", kNoground}, {"noground", kNoground}, {"ngv", kNgv}, {"gv", kGv}};
  auto it = m.find(s);
  if (it == m.end()) return std::nullopt;
  return it->second;
}

Mode mode_of_term(const Term& t) {
  if (t.is_var()) return kVar;
  return t.is_ground() ? kGround : kNgv;
}

namespace {

std::optional<long> parse_int(const std::string& s) {
  Term t = Term::f(s);
  return t.as_int();
}

bool nonground(Mode m) { return m & (kVar | kNgv); }

// Order constraints over indices and integer constants, closed under
// transitivity of < and <=.
class ArithClosure {
 public:
  using Key = std::pair<bool, long>;  // (is_const, value)

  static Key key(const Operand& o) { return {o.is_const, o.value}; }

  int id(const Operand& o) {
    auto [it, fresh] = ids_.emplace(key(o), static_cast<int>(keys_.size()));
    if (fresh) keys_.push_back(key(o));
    return it->second;
  }

  std::optional<int> find(const Operand& o) const {
    auto it = ids_.find(key(o));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  void add(const Operand& a, CmpOp r, const Operand& b) {
    int x = id(a), y = id(b);
    facts_.push_back({x, r, y});
    closed_ = false;
  }

  bool close() {
    size_t n = keys_.size();
    rel_.assign(n, std::vector<std::uint8_t>(n, 0));
    ne_.clear();
    for (size_t i = 0; i < n; ++i) {
      rel_[i][i] = 1;
      for (size_t j = 0; j < n; ++j)
        if (keys_[i].first && keys_[j].first && keys_[i].second < keys_[j].second) rel_[i][j] = 2;
    }
    for (auto [x, r, y] : facts_) {
      switch (r) {
        case CmpOp::Lt: rel_[x][y] = 2; break;
        case CmpOp::Le: rel_[x][y] = std::max<std::uint8_t>(rel_[x][y], 1); break;
        case CmpOp::Gt: rel_[y][x] = 2; break;
        case CmpOp::Ge: rel_[y][x] = std::max<std::uint8_t>(rel_[y][x], 1); break;
        case CmpOp::Eq:
          rel_[x][y] = std::max<std::uint8_t>(rel_[x][y], 1);
          rel_[y][x] = std::max<std::uint8_t>(rel_[y][x], 1);
          break;
        case CmpOp::Ne: ne_.insert({std::min(x, y), std::max(x, y)}); break;
      }
    }
    for (size_t k = 0; k < n; ++k)
      for (size_t i = 0; i < n; ++i) {
        if (!rel_[i][k]) continue;
        for (size_t j = 0; j < n; ++j) {
          if (!rel_[k][j]) continue;
          std::uint8_t c = std::max(rel_[i][k], rel_[k][j]);
          if (c > rel_[i][j]) rel_[i][j] = c;
        }
      }
    ok_ = true;
    for (size_t i = 0; i < n; ++i)
      if (rel_[i][i] == 2) ok_ = false;
    for (auto [x, y] : ne_)
      if (eq(x, y)) ok_ = false;
    closed_ = true;
    return ok_;
  }

  bool consistent() const { return ok_; }

  bool entails(const Operand& a, CmpOp r, const Operand& b) const {
    if (!ok_) return true;
    if (a.is_const && b.is_const) return holds(r, a.value, b.value);
    if (a == b) return r == CmpOp::Eq || r == CmpOp::Le || r == CmpOp::Ge;
    auto x = find(a), y = find(b);
    if (!x || !y) return false;
    switch (r) {
      case CmpOp::Lt: return rel_[*x][*y] == 2;
      case CmpOp::Le: return rel_[*x][*y] >= 1;
      case CmpOp::Gt: return rel_[*y][*x] == 2;
      case CmpOp::Ge: return rel_[*y][*x] >= 1;
      case CmpOp::Eq: return eq(*x, *y);
      case CmpOp::Ne: {
        if (rel_[*x][*y] == 2 || rel_[*y][*x] == 2) return true;
        for (auto [p, q] : ne_)
          if ((eq(*x, p) && eq(*y, q)) || (eq(*x, q) && eq(*y, p))) return true;
        return false;
      }
    }
    return false;
  }

  std::vector<long> constants() const {
    std::vector<long> out;
    for (const auto& k : keys_)
      if (k.first) out.push_back(k.second);
    return out;
  }

 private:
  bool eq(int x, int y) const { return rel_[x][y] >= 1 && rel_[y][x] >= 1; }

  std::map<Key, int> ids_;
  std::vector<Key> keys_;
  std::vector<std::tuple<int, CmpOp, int>> facts_;
  std::vector<std::vector<std::uint8_t>> rel_;
  std::set<std::pair<int, int>> ne_;
  bool ok_ = true;
  bool closed_ = true;
};

Operand idx(int i) { return Operand{false, i}; }
Operand cst(long c) { return Operand{true, c}; }

ArithClosure closure_of(const AbsSubst& b) {
  ArithClosure c;
  for (const Constraint& k : b.arith) c.add(idx(k.lhs), k.rel, k.rhs);
  for (size_t i = 0; i < b.nodes.size(); ++i) {
    if (b.nums.count(static_cast<int>(i))) c.id(idx(static_cast<int>(i)));
    if (auto v = b.int_value(static_cast<int>(i))) c.add(idx(static_cast<int>(i)), CmpOp::Eq, cst(*v));
  }
  c.close();
  return c;
}

constexpr CmpOp kRels[] = {CmpOp::Eq, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge, CmpOp::Ne};

}  // namespace

std::optional<long> AbsSubst::int_value(int i) const {
  const Node& n = nodes[i];
  if (!n.frm || !n.kids.empty()) return std::nullopt;
  return parse_int(n.fn);
}

bool AbsSubst::has_ps(int a, int b) const { return ps.count({std::min(a, b), std::max(a, b)}) > 0; }

std::vector<int> AbsSubst::leaves(int i) const {
  std::vector<int> out;
  std::vector<char> seen(nodes.size(), 0);
  std::vector<int> st{i};
  while (!st.empty()) {
    int x = st.back();
    st.pop_back();
    if (seen[x]) continue;
    seen[x] = 1;
    if (nodes[x].frm) {
      for (int k : nodes[x].kids) st.push_back(k);
    } else if (nonground(nodes[x].mode)) {
      out.push_back(x);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool AbsSubst::may_share(int a, int b) const {
  auto la = leaves(a), lb = leaves(b);
  for (int x : la)
    for (int y : lb)
      if (x == y || has_ps(x, y)) return true;
  return false;
}

std::string AbsSubst::key() const {
  std::ostringstream o;
  if (empty) {
    o << "E/" << sv.size();
    return o.str();
  }
  o << "sv";
  for (int s : sv) o << ' ' << s;
  o << "|";
  for (size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    if (n.frm) {
      o << i << "='" << n.fn << "'(";
      for (size_t k = 0; k < n.kids.size(); ++k) o << (k ? "," : "") << n.kids[k];
      o << ")";
    } else {
      o << i << ":" << int(n.mode);
    }
    o << ";";
  }
  o << "|ps";
  for (auto [a, b] : ps) o << ' ' << a << '-' << b;
  o << "|n";
  for (int i : nums) o << ' ' << i;
  o << "|a";
  for (const auto& c : arith)
    o << ' ' << c.lhs << to_string(c.rel) << (c.rhs.is_const ? "#" : "") << c.rhs.value;
  return o.str();
}

AbsSubst AbsSubst::bottom(int n) {
  AbsSubst b;
  b.empty = true;
  b.sv.assign(n, -1);
  return b;
}

AbsSubst AbsSubst::from_modes(const std::vector<Mode>& modes) {
  AbsSubst b;
  for (Mode m : modes) {
    b.sv.push_back(static_cast<int>(b.nodes.size()));
    Node n;
    n.mode = m;
    b.nodes.push_back(n);
  }
  return normalize(std::move(b));
}

AbsSubst normalize(AbsSubst b) {
  int n = b.size();
  if (b.empty) return AbsSubst::bottom(n);
  const int N = static_cast<int>(b.nodes.size());
  for (const Constraint& c : b.arith) {
    b.nums.insert(c.lhs);
    if (!c.rhs.is_const) b.nums.insert(static_cast<int>(c.rhs.value));
  }
  for (int i : b.nums) {
    if (b.nodes[i].frm) {
      if (!b.int_value(i)) return AbsSubst::bottom(n);
    } else {
      b.nodes[i].mode &= kGround;
    }
  }
  // Derived modes of pattern nodes.
  std::vector<int> state(N, 0);
  std::function<bool(int)> derive = [&](int i) -> bool {
    if (state[i] == 2) return true;
    if (state[i] == 1) return false;  // cycle
    state[i] = 1;
    Node& nd = b.nodes[i];
    if (nd.frm) {
      bool all_g = true, some_ng = false;
      for (int k : nd.kids) {
        if (!derive(k)) return false;
        Mode km = b.nodes[k].mode;
        all_g = all_g && (km & kGround);
        some_ng = some_ng || nonground(km);
      }
      nd.mode = (all_g ? kGround : 0) | (some_ng ? kNgv : 0);
    }
    state[i] = 2;
    return nd.mode != 0;
  };
  for (int i = 0; i < N; ++i)
    if (!derive(i)) return AbsSubst::bottom(n);

  ArithClosure cl = closure_of(b);
  if (!cl.consistent()) return AbsSubst::bottom(n);

  // Renumber reachable nodes in depth-first preorder.
  std::vector<int> renum(N, -1);
  std::vector<int> order;
  std::function<void(int)> visit = [&](int i) {
    if (renum[i] != -1) return;
    renum[i] = static_cast<int>(order.size());
    order.push_back(i);
    for (int k : b.nodes[i].kids) visit(k);
  };
  for (int s : b.sv) visit(s);

  AbsSubst r;
  for (int s : b.sv) r.sv.push_back(renum[s]);
  for (int old : order) {
    Node nd = b.nodes[old];
    for (int& k : nd.kids) k = renum[k];
    if (!nd.frm) nd.fn.clear();
    r.nodes.push_back(std::move(nd));
  }
  for (auto [x, y] : b.ps) {
    int a = renum[x], c = renum[y];
    if (a < 0 || c < 0 || a == c) continue;
    if (r.nodes[a].frm || r.nodes[c].frm) continue;
    if (!nonground(r.nodes[a].mode) || !nonground(r.nodes[c].mode)) continue;
    r.ps.insert({std::min(a, c), std::max(a, c)});
  }
  std::vector<int> numleaves;
  for (int i : b.nums)
    if (renum[i] >= 0 && !b.nodes[i].frm) {
      r.nums.insert(renum[i]);
    }
  numleaves.assign(r.nums.begin(), r.nums.end());
  std::vector<long> consts = cl.constants();
  std::sort(consts.begin(), consts.end());
  for (int a : numleaves) {
    int oa = order[a];
    for (int c : numleaves) {
      if (c <= a) continue;
      int oc = order[c];
      bool any = false;
      for (CmpOp rel : kRels) {
        if (!cl.entails(idx(oa), rel, idx(oc))) continue;
        if (rel == CmpOp::Le && cl.entails(idx(oa), CmpOp::Lt, idx(oc))) continue;
        if (rel == CmpOp::Ge && cl.entails(idx(oa), CmpOp::Gt, idx(oc))) continue;
        if (rel != CmpOp::Eq && cl.entails(idx(oa), CmpOp::Eq, idx(oc))) continue;
        if (rel == CmpOp::Ne &&
            (cl.entails(idx(oa), CmpOp::Lt, idx(oc)) || cl.entails(idx(oa), CmpOp::Gt, idx(oc))))
          continue;
        r.arith.push_back({a, rel, idx(c)});
        any = true;
      }
      (void)any;
    }
    for (long v : consts) {
      for (CmpOp rel : kRels) {
        if (!cl.entails(idx(oa), rel, cst(v))) continue;
        if (rel == CmpOp::Le && cl.entails(idx(oa), CmpOp::Lt, cst(v))) continue;
        if (rel == CmpOp::Ge && cl.entails(idx(oa), CmpOp::Gt, cst(v))) continue;
        if (rel != CmpOp::Eq && cl.entails(idx(oa), CmpOp::Eq, cst(v))) continue;
        if (rel == CmpOp::Ne &&
            (cl.entails(idx(oa), CmpOp::Lt, cst(v)) || cl.entails(idx(oa), CmpOp::Gt, cst(v))))
          continue;
        r.arith.push_back({a, rel, cst(v)});
      }
    }
  }
  return r;
}

std::optional<std::vector<int>> instance_map(const AbsSubst& gen, const AbsSubst& inst) {
  if (gen.empty || inst.empty || gen.size() != inst.size()) return std::nullopt;
  std::vector<int> im(gen.nodes.size(), -1);
  std::function<bool(int, int)> assign = [&](int i, int j) -> bool {
    if (im[i] != -1) return im[i] == j;
    im[i] = j;
    const Node& g = gen.nodes[i];
    if (!g.frm) return true;
    const Node& s = inst.nodes[j];
    if (!s.frm || s.fn != g.fn || s.kids.size() != g.kids.size()) return false;
    for (size_t k = 0; k < g.kids.size(); ++k)
      if (!assign(g.kids[k], s.kids[k])) return false;
    return true;
  };
  for (int x = 0; x < gen.size(); ++x)
    if (!assign(gen.sv[x], inst.sv[x])) return std::nullopt;
  return im;
}

bool as_leq(const AbsSubst& b1, const AbsSubst& b2) {
  if (b1.empty) return true;
  if (b2.empty) return false;
  auto im = instance_map(b2, b1);
  if (!im) return false;
  const int N = static_cast<int>(b2.nodes.size());
  for (int i = 0; i < N; ++i)
    if (b1.mode((*im)[i]) & ~b2.mode(i)) return false;
  for (int i = 0; i < N; ++i) {
    if (b2.is_frm(i) || !nonground(b2.mode(i))) continue;
    for (int j = i + 1; j < N; ++j) {
      if (b2.is_frm(j) || !nonground(b2.mode(j)) || b2.has_ps(i, j)) continue;
      if (b1.may_share((*im)[i], (*im)[j])) return false;
    }
  }
  for (int i : b2.nums)
    if (!b1.numeric((*im)[i])) return false;
  if (!b2.arith.empty()) {
    ArithClosure c1 = closure_of(b1);
    for (const Constraint& c : b2.arith) {
      Operand rhs = c.rhs.is_const ? c.rhs : idx((*im)[c.rhs.value]);
      if (!c1.entails(idx((*im)[c.lhs]), c.rel, rhs)) return false;
    }
  }
  return true;
}

AbsSubst as_union(const AbsSubst& b1, const AbsSubst& b2) {
  if (b1.empty) return b2;
  if (b2.empty) return b1;
  AbsSubst r;
  std::map<std::pair<int, int>, int> memo;
  std::vector<std::pair<int, int>> origin;
  std::function<int(int, int)> build = [&](int p, int q) -> int {
    auto it = memo.find({p, q});
    if (it != memo.end()) return it->second;
    int id = static_cast<int>(r.nodes.size());
    memo[{p, q}] = id;
    r.nodes.emplace_back();
    origin.push_back({p, q});
    const Node& a = b1.nodes[p];
    const Node& b = b2.nodes[q];
    if (a.frm && b.frm && a.fn == b.fn && a.kids.size() == b.kids.size()) {
      std::vector<int> kids;
      for (size_t k = 0; k < a.kids.size(); ++k) kids.push_back(build(a.kids[k], b.kids[k]));
      Node nd;
      nd.frm = true;
      nd.fn = a.fn;
      nd.kids = std::move(kids);
      r.nodes[id] = std::move(nd);
    } else {
      Node nd;
      nd.mode = a.mode | b.mode;
      r.nodes[id] = nd;
    }
    return id;
  };
  for (int x = 0; x < b1.size(); ++x) r.sv.push_back(build(b1.sv[x], b2.sv[x]));
  const int N = static_cast<int>(r.nodes.size());
  std::vector<int> leaves;
  for (int i = 0; i < N; ++i)
    if (!r.nodes[i].frm && nonground(r.nodes[i].mode)) leaves.push_back(i);
  for (size_t x = 0; x < leaves.size(); ++x)
    for (size_t y = x + 1; y < leaves.size(); ++y) {
      auto [p1, q1] = origin[leaves[x]];
      auto [p2, q2] = origin[leaves[y]];
      if (b1.may_share(p1, p2) || b2.may_share(q1, q2)) r.ps.insert({leaves[x], leaves[y]});
    }
  std::vector<int> numeric;
  for (int i = 0; i < N; ++i) {
    if (r.nodes[i].frm) continue;
    auto [p, q] = origin[i];
    if (b1.numeric(p) && b2.numeric(q)) {
      r.nums.insert(i);
      numeric.push_back(i);
    }
  }
  if (!numeric.empty()) {
    ArithClosure c1 = closure_of(b1), c2 = closure_of(b2);
    std::set<long> consts;
    for (long v : c1.constants()) consts.insert(v);
    for (long v : c2.constants()) consts.insert(v);
    for (size_t x = 0; x < numeric.size(); ++x) {
      auto [p, q] = origin[numeric[x]];
      for (size_t y = x + 1; y < numeric.size(); ++y) {
        auto [p2, q2] = origin[numeric[y]];
        for (CmpOp rel : kRels)
          if (c1.entails(idx(p), rel, idx(p2)) && c2.entails(idx(q), rel, idx(q2)))
            r.arith.push_back({numeric[x], rel, idx(numeric[y])});
      }
      for (long v : consts)
        for (CmpOp rel : kRels)
          if (c1.entails(idx(p), rel, cst(v)) && c2.entails(idx(q), rel, cst(v)))
            r.arith.push_back({numeric[x], rel, cst(v)});
    }
  }
  return normalize(std::move(r));
}

AbsSubst as_cap(const AbsSubst& b, int cap) {
  if (b.empty || cap <= 0) return b;
  const int N = static_cast<int>(b.nodes.size());
  std::vector<int> depth(N, -1);
  std::vector<int> queue;
  for (int s : b.sv)
    if (depth[s] == -1) {
      depth[s] = 0;
      queue.push_back(s);
    }
  for (size_t h = 0; h < queue.size(); ++h) {
    int i = queue[h];
    for (int k : b.nodes[i].kids)
      if (depth[k] == -1) {
        depth[k] = depth[i] + 1;
        queue.push_back(k);
      }
  }
  std::vector<int> cut;
  for (int i = 0; i < N; ++i)
    if (depth[i] >= cap && b.nodes[i].frm) cut.push_back(i);
  if (cut.empty()) return b;
  AbsSubst r = b;
  for (int i : cut) {
    if (auto v = b.int_value(i)) {
      r.nums.insert(i);
      r.arith.push_back({i, CmpOp::Eq, cst(*v)});
    }
    Node& nd = r.nodes[i];
    nd.frm = false;
    nd.fn.clear();
    nd.kids.clear();
  }
  // Reachable leaves of the capped form and their sharing in the old form.
  std::vector<char> reach(N, 0);
  std::function<void(int)> visit = [&](int i) {
    if (reach[i]) return;
    reach[i] = 1;
    for (int k : r.nodes[i].kids) visit(k);
  };
  for (int s : r.sv) visit(s);
  std::vector<int> lv;
  for (int i = 0; i < N; ++i)
    if (reach[i] && !r.nodes[i].frm && nonground(r.nodes[i].mode)) lv.push_back(i);
  r.ps.clear();
  for (size_t x = 0; x < lv.size(); ++x)
    for (size_t y = x + 1; y < lv.size(); ++y)
      if (b.may_share(lv[x], lv[y])) r.ps.insert({lv[x], lv[y]});
  return normalize(std::move(r));
}

AbsSubst as_widen(const AbsSubst& bnew, const AbsSubst& bold, int cap) {
  return as_cap(as_union(bnew, bold), cap);
}

AbsSubst as_extc(const Clause& c, const AbsSubst& b) {
  if (b.empty) return AbsSubst::bottom(c.var_count);
  AbsSubst r = b;
  for (int k = c.arity; k < c.var_count; ++k) {
    r.sv.push_back(static_cast<int>(r.nodes.size()));
    Node n;
    n.mode = kVar;
    r.nodes.push_back(n);
  }
  return normalize(std::move(r));
}

AbsSubst as_project(const AbsSubst& b, const std::vector<int>& vars) {
  if (b.empty) return AbsSubst::bottom(static_cast<int>(vars.size()));
  AbsSubst r = b;
  r.sv.clear();
  for (int v : vars) r.sv.push_back(b.sv[v - 1]);
  return normalize(std::move(r));
}

AbsSubst as_restrc(const Clause& c, const AbsSubst& b) {
  std::vector<int> head(c.arity);
  std::iota(head.begin(), head.end(), 1);
  return as_project(b, head);
}

AbsSubst as_restrg(const Literal& l, const AbsSubst& b, int cap) {
  AbsSubst r = as_project(b, l.vars());
  return cap > 0 ? as_cap(r, cap) : r;
}

namespace {

Mode combine(Mode a, Mode b) {
  Mode out = 0;
  for (Mode x : {kVar, kGround, kNgv})
    for (Mode y : {kVar, kGround, kNgv}) {
      if (!(a & x) || !(b & y)) continue;
      if (x == kVar) out |= y;
      else if (y == kVar) out |= x;
      else if (x == kGround || y == kGround) out |= kGround;
      else out |= kNgv | kGround;
    }
  return out;
}

// Abstract unification over a working copy with union-find on indices.
class Unifier {
 public:
  explicit Unifier(const AbsSubst& b)
      : nodes_(b.nodes), ps_(b.ps), nums_(b.nums), arith_(b.arith) {
    parent_.resize(nodes_.size());
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int add(Node n) {
    nodes_.push_back(std::move(n));
    parent_.push_back(static_cast<int>(parent_.size()));
    return static_cast<int>(nodes_.size()) - 1;
  }

  void add_num(int i) { nums_.insert(i); }
  void add_fact(const Constraint& c) { arith_.push_back(c); }
  void add_ps_raw(int a, int b) { ps_.insert({std::min(a, b), std::max(a, b)}); }
  void set_mode(int i, Mode m) { nodes_[find(i)].mode = m; }
  void fail() { failed_ = true; }

  int find(int i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }

  Mode mode(int i) {
    i = find(i);
    const Node& n = nodes_[i];
    if (!n.frm) return n.mode;
    bool all_g = true, some_ng = false;
    for (int k : n.kids) {
      Mode km = mode(k);
      all_g = all_g && (km & kGround);
      some_ng = some_ng || nonground(km);
    }
    return (all_g ? kGround : 0) | (some_ng ? kNgv : 0);
  }

  std::vector<int> reach(int i) {
    std::vector<int> out;
    std::set<int> seen;
    std::vector<int> st{find(i)};
    while (!st.empty()) {
      int x = st.back();
      st.pop_back();
      if (!seen.insert(x).second) continue;
      out.push_back(x);
      if (nodes_[x].frm)
        for (int k : nodes_[x].kids) st.push_back(find(k));
    }
    return out;
  }

  std::vector<int> leaves_of(int i, bool only_nonground = true) {
    std::vector<int> out;
    for (int x : reach(i))
      if (!nodes_[x].frm && (!only_nonground || nonground(nodes_[x].mode))) out.push_back(x);
    return out;
  }

  std::set<int> nbrs(int l) {
    std::set<int> out;
    for (auto [x, y] : ps_) {
      int a = find(x), b = find(y);
      if (a == b) continue;
      if (a == l && !nodes_[b].frm) out.insert(b);
      if (b == l && !nodes_[a].frm) out.insert(a);
    }
    return out;
  }

  bool has_ps(int a, int b) {
    for (auto [x, y] : ps_) {
      int p = find(x), q = find(y);
      if ((p == a && q == b) || (p == b && q == a)) return true;
    }
    return false;
  }

  bool may_share(int a, int b) {
    auto la = leaves_of(a), lb = leaves_of(b);
    for (int x : la)
      for (int y : lb)
        if (x == y || has_ps(x, y)) return true;
    return false;
  }

  void link(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b && !nodes_[a].frm && !nodes_[b].frm) add_ps_raw(a, b);
  }

  void drop_ps(int l) {
    for (auto it = ps_.begin(); it != ps_.end();) {
      if (find(it->first) == l || find(it->second) == l) it = ps_.erase(it);
      else ++it;
    }
  }

  // A variable inside the leaf may be bound to a term described by `to`.
  void widen_leaf(int k, Mode to) {
    k = find(k);
    Node& n = nodes_[k];
    if (n.frm) return;
    Mode m = n.mode;
    if (m & kVar) m |= to;
    if ((m & kNgv) && (to & kGround)) m |= kGround;
    n.mode = m;
  }

  void star(const std::set<int>& sh) {
    for (int a : sh)
      for (int b : sh)
        if (a < b) link(a, b);
  }

  bool reaches(int from, int to) {
    for (int x : reach(from))
      if (x == to && x != find(from)) return true;
    return false;
  }

  void unify(int a, int b) {
    if (failed_) return;
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (reaches(a, b) || reaches(b, a)) {
      failed_ = true;
      return;
    }
    bool fa = nodes_[a].frm, fb = nodes_[b].frm;
    if (fa && fb) {
      if (nodes_[a].fn != nodes_[b].fn || nodes_[a].kids.size() != nodes_[b].kids.size()) {
        failed_ = true;
        return;
      }
      std::vector<int> ka = nodes_[a].kids, kb = nodes_[b].kids;
      parent_[b] = a;
      for (size_t k = 0; k < ka.size(); ++k) unify(ka[k], kb[k]);
      return;
    }
    if (fa || fb) {
      bind_frm(fa ? b : a, fa ? a : b);
      return;
    }
    leaf_leaf(a, b);
  }

  void bind_frm(int l, int f) {
    Mode ml = nodes_[l].mode;
    if (ml == kVar) {
      if (may_share(l, f)) maybe_fail_ = true;
      Mode mf = mode(f);
      auto lf = leaves_of(f);
      for (int k : nbrs(l)) {
        for (int x : lf) link(k, x);
        widen_leaf(k, mf);
      }
      drop_ps(l);
      parent_[l] = f;
      return;
    }
    maybe_fail_ = true;
    if (ml == kGround) {
      auto all = leaves_of(f, false);
      std::set<int> inside(all.begin(), all.end());
      for (int x : all) {
        for (int k : nbrs(x))
          if (!inside.count(k)) widen_leaf(k, kGround);
        nodes_[x].mode = kGround;
      }
      parent_[l] = f;
      return;
    }
    auto lf = leaves_of(f);
    std::set<int> core(lf.begin(), lf.end());
    if (nonground(ml)) core.insert(l);
    std::set<int> sh = core;
    for (int x : core)
      for (int k : nbrs(x)) sh.insert(k);
    for (int x : lf) widen_leaf(x, kAny);
    for (int k : sh)
      if (!core.count(k)) widen_leaf(k, kAny);
    star(sh);
    drop_ps(l);
    parent_[l] = f;
  }

  void leaf_leaf(int i, int j) {
    Mode mi = nodes_[i].mode, mj = nodes_[j].mode;
    if (mi == kVar && mj == kVar) {
      auto ni = nbrs(i), nj = nbrs(j);
      for (int a : ni)
        for (int b : nj) link(a, b);
      parent_[j] = i;
      return;
    }
    if (mi == kVar || mj == kVar) {
      int v = mi == kVar ? i : j, o = mi == kVar ? j : i;
      Mode mo = nodes_[o].mode;
      if (has_ps(v, o) && (mo & kNgv)) maybe_fail_ = true;
      auto no = nbrs(o);
      for (int k : nbrs(v)) {
        if (k == o) continue;
        link(k, o);
        for (int m : no) link(k, m);
        widen_leaf(k, mo);
      }
      parent_[v] = o;
      return;
    }
    maybe_fail_ = true;
    Mode m = combine(mi, mj);
    if (!m) {
      failed_ = true;
      return;
    }
    auto ni = nbrs(i), nj = nbrs(j);
    std::set<int> ext;
    for (int k : ni)
      if (k != j) ext.insert(k);
    for (int k : nj)
      if (k != i) ext.insert(k);
    if (m == kGround) {
      for (int k : ext) widen_leaf(k, kGround);
    } else {
      for (int k : ext) widen_leaf(k, kAny);
      std::set<int> sh = ext;
      sh.insert(i);
      sh.insert(j);
      star(sh);
    }
    parent_[j] = i;
    nodes_[i].mode = m;
  }

  Outcome finish(const std::vector<int>& sv) {
    int n = static_cast<int>(sv.size());
    if (failed_) return {AbsSubst::bottom(n), false, true};
    AbsSubst r;
    r.nodes = nodes_;
    for (auto& nd : r.nodes)
      for (int& k : nd.kids) k = find(k);
    for (int s : sv) r.sv.push_back(find(s));
    for (auto [x, y] : ps_) {
      int a = find(x), b = find(y);
      if (a != b) r.ps.insert({std::min(a, b), std::max(a, b)});
    }
    for (int i : nums_) r.nums.insert(find(i));
    for (Constraint c : arith_) {
      c.lhs = find(c.lhs);
      if (!c.rhs.is_const) c.rhs.value = find(static_cast<int>(c.rhs.value));
      r.arith.push_back(c);
    }
    // Merged-away nodes still carry their old content; only representatives
    // are checked for consistency.
    for (size_t i = 0; i < r.nodes.size(); ++i)
      if (find(static_cast<int>(i)) != static_cast<int>(i)) r.nodes[i] = Node{kAny, false, {}, {}};
    AbsSubst out = normalize(std::move(r));
    if (out.empty) return {out, false, true};
    return {out, !maybe_fail_, false};
  }

  bool maybe_fail() const { return maybe_fail_; }

 private:
  std::vector<Node> nodes_;
  std::vector<int> parent_;
  std::set<std::pair<int, int>> ps_;
  std::set<int> nums_;
  std::vector<Constraint> arith_;
  bool maybe_fail_ = false;
  bool failed_ = false;
};

}  // namespace

Outcome as_unif_var(const AbsSubst& b) {
  if (b.empty) return {b, false, true};
  Unifier u(b);
  u.unify(b.sv[0], b.sv[1]);
  return u.finish(b.sv);
}

Outcome as_unif_func(const std::string& f, const AbsSubst& b) {
  if (b.empty) return {b, false, true};
  Unifier u(b);
  Node n;
  n.frm = true;
  n.fn = f;
  n.kids.assign(b.sv.begin() + 1, b.sv.end());
  int t = u.add(std::move(n));
  u.unify(b.sv[0], t);
  return u.finish(b.sv);
}

AbsSubst as_extg(const Literal& l, const AbsSubst& b1, const AbsSubst& b2) {
  if (b1.empty || b2.empty) return AbsSubst::bottom(b1.size());
  const int off = static_cast<int>(b1.nodes.size());
  AbsSubst both = b1;
  for (Node n : b2.nodes) {
    for (int& k : n.kids) k += off;
    both.nodes.push_back(std::move(n));
  }
  for (auto [x, y] : b2.ps) both.ps.insert({x + off, y + off});
  for (int i : b2.nums) both.nums.insert(i + off);
  for (Constraint c : b2.arith) {
    c.lhs += off;
    if (!c.rhs.is_const) c.rhs.value += off;
    both.arith.push_back(c);
  }
  Unifier u(both);
  auto vars = l.vars();
  for (size_t k = 0; k < vars.size(); ++k) u.unify(b1.sv[vars[k] - 1], b2.sv[k] + off);
  return u.finish(b1.sv).beta;
}

namespace {

bool non_numeric(const AbsSubst& b, int i) {
  if (!(b.mode(i) & kGround)) return true;
  return b.is_frm(i) && !b.int_value(i);
}

void expr_vars(const Expr& e, std::vector<int>& out) {
  if (e.op == Expr::Op::Var && std::find(out.begin(), out.end(), e.value) == out.end())
    out.push_back(static_cast<int>(e.value));
  for (const auto& k : e.kids) expr_vars(k, out);
}

bool has_division(const Expr& e) {
  if (e.op == Expr::Op::Div || e.op == Expr::Op::Mod) return true;
  return std::any_of(e.kids.begin(), e.kids.end(), has_division);
}

std::optional<long> const_value(const Expr& e) {
  switch (e.op) {
    case Expr::Op::Const: return e.value;
    case Expr::Op::Var: return std::nullopt;
    case Expr::Op::Neg: {
      auto v = const_value(e.kids[0]);
      if (!v) return std::nullopt;
      return -*v;
    }
    default: break;
  }
  auto a = const_value(e.kids[0]), b = const_value(e.kids[1]);
  if (!a || !b) return std::nullopt;
  switch (e.op) {
    case Expr::Op::Add: return *a + *b;
    case Expr::Op::Sub: return *a - *b;
    case Expr::Op::Mul: return *a * *b;
    case Expr::Op::Div: return *b == 0 ? std::nullopt : std::optional<long>(*a / *b);
    case Expr::Op::Mod: return *b == 0 ? std::nullopt : std::optional<long>(((*a % *b) + *b) % *b);
    default: return std::nullopt;
  }
}

// Relation between the target and an expression of the form y, y+c, c+y
// or y-c.
std::optional<std::pair<CmpOp, int>> offset_relation(const Expr& e) {
  if (e.op == Expr::Op::Var) return std::make_pair(CmpOp::Eq, static_cast<int>(e.value));
  if (e.op != Expr::Op::Add && e.op != Expr::Op::Sub) return std::nullopt;
  const Expr& l = e.kids[0];
  const Expr& r = e.kids[1];
  const Expr* var = nullptr;
  long c = 0;
  if (l.op == Expr::Op::Var && r.op == Expr::Op::Const) {
    var = &l;
    c = e.op == Expr::Op::Add ? r.value : -r.value;
  } else if (e.op == Expr::Op::Add && r.op == Expr::Op::Var && l.op == Expr::Op::Const) {
    var = &r;
    c = l.value;
  } else {
    return std::nullopt;
  }
  CmpOp rel = c > 0 ? CmpOp::Gt : c < 0 ? CmpOp::Lt : CmpOp::Eq;
  return std::make_pair(rel, static_cast<int>(var->value));
}

}  // namespace

Outcome abstract_builtin(const Literal& l, const AbsSubst& b, bool use_arith) {
  const int n = b.size();
  if (b.empty) return {b, false, true};
  auto failure = [&]() { return Outcome{AbsSubst::bottom(n), false, true}; };
  switch (l.kind) {
    case Literal::Kind::TypeTest: {
      int i = b.sv[0];
      Mode m = b.mode(i);
      AbsSubst r = b;
      bool ss = false;
      switch (l.type) {
        case TypeKind::Var:
          if (!(m & kVar)) return failure();
          ss = m == kVar;
          r.nodes[i].mode = kVar;
          break;
        case TypeKind::Ground:
          if (!(m & kGround)) return failure();
          ss = m == kGround;
          for (int x : b.leaves(i)) r.nodes[x].mode &= kGround;
          break;
        case TypeKind::Novar:
          if (m == kVar) return failure();
          ss = !(m & kVar);
          if (!r.nodes[i].frm) r.nodes[i].mode &= ~kVar;
          break;
      }
      r = normalize(std::move(r));
      if (r.empty) return failure();
      return {r, ss, false};
    }
    case Literal::Kind::ArithTest: {
      auto node = [&](const Operand& o) { return o.is_const ? -1 : b.sv[o.value - 1]; };
      int a = node(l.lhs), c = node(l.rhs);
      if ((a >= 0 && non_numeric(b, a)) || (c >= 0 && non_numeric(b, c))) return failure();
      auto as_op = [&](const Operand& o, int nd) { return o.is_const ? o : idx(nd); };
      Operand oa = as_op(l.lhs, a), oc = as_op(l.rhs, c);
      bool ss = false;
      if (use_arith) {
        ArithClosure cl = closure_of(b);
        if (cl.entails(oa, negate(l.cmp), oc)) return failure();
        bool known = (a < 0 || b.numeric(a)) && (c < 0 || b.numeric(c));
        ss = known && cl.entails(oa, l.cmp, oc);
      }
      AbsSubst r = b;
      for (int x : {a, c}) {
        if (x < 0) continue;
        if (!r.nodes[x].frm) r.nodes[x].mode &= kGround;
        if (use_arith) r.nums.insert(x);
      }
      if (use_arith) {
        if (a >= 0) r.arith.push_back({a, l.cmp, oc});
        else if (c >= 0) r.arith.push_back({c, swap_sides(l.cmp), oa});
      }
      r = normalize(std::move(r));
      if (r.empty) return failure();
      return {r, ss, false};
    }
    case Literal::Kind::ArithEval: {
      int t = b.sv[l.args[0] - 1];
      std::vector<int> ev;
      expr_vars(l.expr, ev);
      bool known = true;
      for (int v : ev) {
        int i = b.sv[v - 1];
        if (b.mode(i) == kVar || non_numeric(b, i)) return failure();
        known = known && b.numeric(i);
      }
      Mode mt = b.mode(t);
      if (!(mt & (kVar | kGround))) return failure();
      if (b.is_frm(t) && !b.int_value(t)) return failure();
      auto cv = const_value(l.expr);
      if (ev.empty() && !cv) return failure();  // constant division by zero
      Unifier u(b);
      for (int v : ev) {
        int i = b.sv[v - 1];
        if (!b.is_frm(i)) u.set_mode(i, b.mode(i) & kGround);
        if (use_arith) u.add_num(i);
      }
      Node num;
      num.mode = kGround;
      int fresh = u.add(num);
      if (use_arith) {
        u.add_num(fresh);
        if (cv) {
          u.add_fact({fresh, CmpOp::Eq, cst(*cv)});
        } else if (auto rel = offset_relation(l.expr)) {
          u.add_fact({fresh, rel->first, idx(b.sv[rel->second - 1])});
        }
      }
      u.unify(t, fresh);
      Outcome o = u.finish(b.sv);
      if (o.beta.empty) return failure();
      o.sf = false;
      o.ss = use_arith && mt == kVar && known && !has_division(l.expr);
      return o;
    }
    default:
      throw std::logic_error("not a builtin: " + to_string(l));
  }
}

Outcome abstract_local(const Literal& l, const AbsSubst& b, bool use_arith) {
  switch (l.kind) {
    case Literal::Kind::UnifVar: return as_unif_var(b);
    case Literal::Kind::UnifFunc: return as_unif_func(l.name, b);
    default: return abstract_builtin(l, b, use_arith);
  }
}

bool exclusive(const AbsSubst& b, const AbsSubst& b1, const AbsSubst& b2, bool use_arith) {
  if (b.empty || b1.empty || b2.empty) return true;
  auto im1 = instance_map(b, b1);
  auto im2 = instance_map(b, b2);
  if (!im1 || !im2) return false;
  auto direct = [&](int p, int q) {
    const Node& x = b1.nodes[p];
    const Node& y = b2.nodes[q];
    if (x.frm && y.frm) return x.fn != y.fn || x.kids.size() != y.kids.size();
    if (use_arith) {
      if (b1.nums.count(p) && y.frm && !b2.int_value(q)) return true;
      if (b2.nums.count(q) && x.frm && !b1.int_value(p)) return true;
    }
    return false;
  };
  std::function<bool(int, int)> pair_excl = [&](int p, int q) -> bool {
    if (direct(p, q)) return true;
    const Node& x = b1.nodes[p];
    const Node& y = b2.nodes[q];
    if (!x.frm || !y.frm) return false;
    for (size_t k = 0; k < x.kids.size(); ++k)
      if (pair_excl(x.kids[k], y.kids[k])) return true;
    return false;
  };
  const int N = static_cast<int>(b.nodes.size());
  std::vector<int> ground;
  for (int i = 0; i < N; ++i) {
    Mode m = b.mode(i);
    int p = (*im1)[i], q = (*im2)[i];
    if ((m == kNgv || m == kNovar) && direct(p, q)) return true;
    if (m == kGround) {
      if (pair_excl(p, q)) return true;
      ground.push_back(i);
    }
  }
  if (!use_arith || ground.empty()) return false;
  // Subterms of a ground input take the same value in both outputs.
  std::vector<std::pair<int, int>> pairs;
  std::map<std::pair<int, int>, int> pid;
  std::function<void(int, int)> align = [&](int p, int q) {
    if (!pid.emplace(std::make_pair(p, q), static_cast<int>(pairs.size())).second) return;
    pairs.push_back({p, q});
    const Node& x = b1.nodes[p];
    const Node& y = b2.nodes[q];
    if (x.frm && y.frm && x.fn == y.fn && x.kids.size() == y.kids.size())
      for (size_t k = 0; k < x.kids.size(); ++k) align(x.kids[k], y.kids[k]);
  };
  for (int i : ground) align((*im1)[i], (*im2)[i]);
  ArithClosure c1 = closure_of(b1), c2 = closure_of(b2);
  ArithClosure joint;
  std::vector<long> consts = c1.constants();
  for (long v : c2.constants()) consts.push_back(v);
  const int P = static_cast<int>(pairs.size());
  for (int x = 0; x < P; ++x) {
    auto [p, q] = pairs[x];
    bool n1 = b1.numeric(p), n2 = b2.numeric(q);
    for (int y = x + 1; y < P; ++y) {
      auto [p2, q2] = pairs[y];
      if (p == p2 || q == q2) joint.add(idx(x), CmpOp::Eq, idx(y));
      for (CmpOp rel : kRels) {
        if (n1 && b1.numeric(p2) && c1.entails(idx(p), rel, idx(p2))) joint.add(idx(x), rel, idx(y));
        if (n2 && b2.numeric(q2) && c2.entails(idx(q), rel, idx(q2))) joint.add(idx(x), rel, idx(y));
      }
    }
    for (long v : consts)
      for (CmpOp rel : kRels) {
        if (n1 && c1.entails(idx(p), rel, cst(v))) joint.add(idx(x), rel, cst(v));
        if (n2 && c2.entails(idx(q), rel, cst(v))) joint.add(idx(x), rel, cst(v));
      }
  }
  return !joint.close();
}

bool as_member(const PSubst& theta, const AbsSubst& b) {
  if (b.empty || static_cast<int>(theta.size()) != b.size()) return false;
  const int N = static_cast<int>(b.nodes.size());
  std::vector<std::optional<Term>> val(N);
  std::function<bool(int, const Term&)> assign = [&](int i, const Term& t) -> bool {
    if (val[i]) return *val[i] == t;
    val[i] = t;
    const Node& nd = b.nodes[i];
    if (!nd.frm) return true;
    if (t.is_var() || t.fn != nd.fn || t.args.size() != nd.kids.size()) return false;
    for (size_t k = 0; k < nd.kids.size(); ++k)
      if (!assign(nd.kids[k], t.args[k])) return false;
    return true;
  };
  for (int x = 0; x < b.size(); ++x)
    if (!assign(b.sv[x], theta[x])) return false;
  for (int i = 0; i < N; ++i)
    if (val[i] && !(mode_of_term(*val[i]) & b.mode(i))) return false;
  for (int i = 0; i < N; ++i) {
    if (b.is_frm(i) || !val[i]) continue;
    std::vector<int> vi;
    collect_vars(*val[i], vi);
    if (vi.empty()) continue;
    for (int j = i + 1; j < N; ++j) {
      if (b.is_frm(j) || !val[j] || b.has_ps(i, j)) continue;
      std::vector<int> vj;
      collect_vars(*val[j], vj);
      for (int v : vj)
        if (std::find(vi.begin(), vi.end(), v) != vi.end()) return false;
    }
  }
  for (int i : b.nums)
    if (!val[i] || !val[i]->as_int()) return false;
  for (const Constraint& c : b.arith) {
    auto l = val[c.lhs] ? val[c.lhs]->as_int() : std::nullopt;
    std::optional<long> r =
        c.rhs.is_const ? std::optional<long>(c.rhs.value)
                       : (val[c.rhs.value] ? val[c.rhs.value]->as_int() : std::nullopt);
    if (!l || !r || !holds(c.rel, *l, *r)) return false;
  }
  return true;
}

std::string render_arg(const AbsSubst& b, int i) {
  const Node& nd = b.nodes[i];
  if (!nd.frm) return mode_name(nd.mode);
  if (nd.fn == "." && nd.kids.size() == 2) {
    std::string s = "[" + render_arg(b, nd.kids[0]);
    int tail = nd.kids[1];
    while (b.nodes[tail].frm && b.nodes[tail].fn == "." && b.nodes[tail].kids.size() == 2) {
      s += "," + render_arg(b, b.nodes[tail].kids[0]);
      tail = b.nodes[tail].kids[1];
    }
    if (!(b.nodes[tail].frm && b.nodes[tail].fn == "[]" && b.nodes[tail].kids.empty()))
      s += "|" + render_arg(b, tail);
    return s + "]";
  }
  if (nd.kids.empty()) return nd.fn;
  std::string s = nd.fn + "(";
  for (size_t k = 0; k < nd.kids.size(); ++k) s += (k ? "," : "") + render_arg(b, nd.kids[k]);
  return s + ")";
}

std::string render(const std::string& pred, const AbsSubst& b) {
  if (b.empty) return "empty";
  if (b.sv.empty()) return pred;
  std::string s = pred + "(";
  for (int x = 0; x < b.size(); ++x) s += (x ? "," : "") + render_arg(b, b.sv[x]);
  return s + ")";
}

}  // namespace seqai
