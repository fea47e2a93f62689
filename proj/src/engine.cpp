#include "seqai/engine.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <type_traits>

namespace seqai {

std::optional<Query> parse_query(const std::string& text) {
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::string s = trim(text);
  Query q;
  auto open = s.find('(');
  if (open == std::string::npos) {
    q.pred = s;
  } else {
    if (s.back() != ')') return std::nullopt;
    q.pred = trim(s.substr(0, open));
    std::string inner = s.substr(open + 1, s.size() - open - 2);
    if (!trim(inner).empty()) {
      size_t pos = 0;
      for (;;) {
        auto comma = inner.find(',', pos);
        auto m = mode_from_letter(trim(inner.substr(pos, comma - pos)));
        if (!m) return std::nullopt;
        q.modes.push_back(*m);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
  }
  if (q.pred.empty() || !std::islower(static_cast<unsigned char>(q.pred[0]))) return std::nullopt;
  for (char c : q.pred)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return std::nullopt;
  return q;
}

const EntryResult* AnalysisResult::root(const std::string& pred, int arity) const {
  for (const auto& e : entries)
    if (e.root && e.pred == pred && e.arity == arity) return &e;
  return nullptr;
}

const EntryResult* AnalysisResult::root(const Query& q) const {
  if (domain == DomainKind::Sahlin) return root(q.pred, q.arity());
  AbsSubst in = normalize(AbsSubst::from_modes(q.modes));
  for (const auto& e : entries)
    if (e.root && e.pred == q.pred && e.arity == q.arity() && e.card_input == in) return &e;
  return nullptr;
}

bool AnalysisResult::is_dead(const std::string& pred, int arity, int clause) const {
  return std::find(dead_clauses.begin(), dead_clauses.end(), DeadClause{pred, arity, clause}) !=
         dead_clauses.end();
}

namespace {

constexpr size_t kNone = std::numeric_limits<size_t>::max();

std::string pred_label(const std::string& p, int n) { return p + "/" + std::to_string(n); }

struct CardDomain {
  using Input = AbsSubst;
  using Seq = AbsSeq;
  using SeqC = AbsSeqC;
  using Enh = EnhSeq;
  struct Widen {};

  int cap;
  bool arith;

  Input root(const std::vector<Mode>& modes) const { return normalize(AbsSubst::from_modes(modes)); }
  std::string key(const Input& b) const { return b.key(); }
  Seq bottom(int n) const { return AbsSeq::bottom(n); }
  SeqC extc(const Clause& c, const Input& b) const { return seq_extc(c, b); }
  SeqC cut(const SeqC& c) const { return ai_cut(c); }

  SeqC fail(const Literal& l, const SeqC& c) const {
    return extgs(l, c, AbsSeq{AbsSubst::bottom(static_cast<int>(l.vars().size())), 0, 0, TermInfo::St});
  }

  SeqC local(const Literal& l, const SeqC& c) const {
    AbsSubst in = as_restrg(l, c.b.beta);
    if (in.empty) return fail(l, c);
    return extgs(l, c, lift_unify(abstract_local(l.formal(), in, arith)));
  }

  std::optional<Input> call_input(const Literal& l, const SeqC& c) const {
    AbsSubst in = as_restrg(l, c.b.beta, cap);
    if (in.empty) return std::nullopt;
    return in;
  }

  SeqC call_exit(const Literal& l, const SeqC& c, const Seq& b) const { return extgs(l, c, b); }
  SeqC restrc(const Clause& cl, const SeqC& c) const { return seq_restrc(cl, c); }
  bool ignores_rest(const SeqC& c) const { return conc_ignores_rest(c); }
  Enh last(const SeqC& c) const { return split1(c.b); }
  Enh conc(const Input& b, const SeqC& c, const Enh& rest) const {
    return seqai::conc(b, c, rest, arith);
  }
  Seq merge(const Enh& e, int n) const { return seqai::merge(e, n); }
  bool leq(const Seq& a, const Seq& b) const { return seq_leq(a, b); }
  Seq widen(const Seq& bnew, const Seq& bold, Widen&) const { return seq_widen(bnew, bold, cap); }
  bool prefix(const Sequence& s, const Seq& b) const { return cc_prefix(s, b); }
  std::string show(const std::string& pred, const Seq& b) const { return render(pred, b); }
};

struct SahlinDomain {
  struct Input {};
  using Seq = sahlin::Seq;
  using SeqC = sahlin::SeqC;
  using Enh = sahlin::Seq;
  struct Widen {
    bool crude = false;
  };

  Input root(const std::vector<Mode>&) const { return {}; }
  std::string key(const Input&) const { return ""; }
  Seq bottom(int) const { return sahlin::bit(sahlin::L); }
  SeqC extc(const Clause&, const Input&) const { return sahlin::extc(); }
  SeqC cut(const SeqC& c) const { return sahlin::cut(c); }
  SeqC fail(const Literal&, const SeqC& c) const { return sahlin::extgs(c, sahlin::bit(sahlin::A0)); }
  SeqC local(const Literal&, const SeqC& c) const { return sahlin::extgs(c, sahlin::local()); }
  std::optional<Input> call_input(const Literal&, const SeqC&) const { return Input{}; }
  SeqC call_exit(const Literal&, const SeqC& c, const Seq& b) const { return sahlin::extgs(c, b); }
  SeqC restrc(const Clause&, const SeqC& c) const { return c; }
  bool ignores_rest(const SeqC& c) const { return sahlin::conc_ignores_rest(c); }
  Enh last(const SeqC& c) const { return sahlin::seq_of(c); }
  Enh conc(const Input&, const SeqC& c, const Enh& rest) const { return sahlin::conc(c, rest); }
  Seq merge(const Enh& e, int) const { return e; }
  bool leq(const Seq& a, const Seq& b) const { return (a & b) == a; }
  Seq widen(const Seq& bnew, const Seq& bold, Widen& w) const { return sahlin::widen(bnew, bold, w.crude); }
  bool prefix(const Sequence& s, const Seq& b) const { return sahlin::prefix(s, b); }
  std::string show(const std::string& pred, const Seq& b) const { return "<" + pred + "," + sahlin::render(b) + ">"; }
};

template <class D>
class Engine {
 public:
  using Input = typename D::Input;
  using Seq = typename D::Seq;
  using SeqC = typename D::SeqC;
  using Enh = typename D::Enh;

  struct Entry {
    const Procedure* proc = nullptr;
    Input in;
    Seq value;
    bool dirty = false;
    bool active = false;
    bool root = false;
    std::set<size_t> readers;
    std::vector<std::pair<Seq, Seq>> trace;
    int evals = 0;
    typename D::Widen w;
  };

  Engine(const NormalizedProgram& p, D d, int max_iter) : prog_(p), d_(std::move(d)), max_iter_(max_iter) {}

  size_t solve(const std::string& pred, int arity, const Input& in) {
    size_t e = lookup(pred, arity, in, kNone);
    entries_[e].root = true;
    while (!worklist_.empty()) {
      size_t r = worklist_.front();
      worklist_.pop_front();
      if (entries_[r].dirty && !entries_[r].active) iterate(r);
    }
    return e;
  }

  // One more evaluation of every entry against the stored values.
  std::vector<size_t> post_check() {
    frozen_ = true;
    std::vector<size_t> bad;
    for (size_t e = 0; e < entries_.size(); ++e)
      if (!d_.leq(eval_proc(e, &clause_results_[e]), entries_[e].value)) bad.push_back(e);
    frozen_ = false;
    return bad;
  }

  const std::vector<Entry>& entries() const { return entries_; }
  const std::set<std::pair<const Procedure*, size_t>>& evaluated() const { return evaluated_; }
  const std::vector<SeqC>& clause_results(size_t e) const { return clause_results_.at(e); }
  const D& domain() const { return d_; }

 private:
  size_t lookup(const std::string& pred, int arity, const Input& in, size_t reader) {
    const Procedure* pr = prog_.find(pred, arity);
    if (!pr) throw AnalysisError("unknown predicate " + pred_label(pred, arity));
    std::string k = pred_label(pred, arity) + "|" + d_.key(in);
    auto it = index_.find(k);
    bool created = it == index_.end();
    size_t e;
    if (created) {
      if (frozen_) throw std::logic_error("new call pattern after the fixpoint: " + k);
      e = entries_.size();
      Entry en;
      en.proc = pr;
      en.in = in;
      en.value = d_.bottom(arity);
      entries_.push_back(std::move(en));
      index_.emplace(k, e);
    } else {
      e = it->second;
    }
    if (reader != kNone) entries_[e].readers.insert(reader);
    if (frozen_) return e;
    if (created || (entries_[e].dirty && !entries_[e].active)) iterate(e);
    return e;
  }

  void iterate(size_t e) {
    entries_[e].active = true;
    for (;;) {
      if (++entries_[e].evals > max_iter_)
        throw AnalysisError("iteration limit exceeded for " +
                            pred_label(entries_[e].proc->name, entries_[e].proc->arity));
      entries_[e].dirty = false;
      Seq b = eval_proc(e);
      Entry& en = entries_[e];
      if (d_.leq(b, en.value)) {
        en.trace.emplace_back(b, en.value);
        if (!en.dirty) break;
        continue;
      }
      en.value = d_.widen(b, en.value, en.w);
      en.trace.emplace_back(b, en.value);
      for (size_t r : en.readers) {
        if (r == e) continue;
        entries_[r].dirty = true;
        if (!entries_[r].active) worklist_.push_back(r);
      }
    }
    entries_[e].active = false;
  }

  Seq eval_proc(size_t e, std::vector<SeqC>* record = nullptr) {
    const Procedure* pr = entries_[e].proc;
    Input in = entries_[e].in;
    std::vector<SeqC> cs;
    for (size_t i = 0; i < pr->clauses.size(); ++i) {
      if (frozen_) evaluated_.insert({pr, i});
      cs.push_back(eval_clause(pr->clauses[i], in, e));
      if (d_.ignores_rest(cs.back())) break;
    }
    if (record) *record = cs;
    if (cs.empty()) return d_.merge(Enh{}, pr->arity);
    Enh sb = d_.last(cs.back());
    for (size_t i = cs.size() - 1; i-- > 0;) sb = d_.conc(in, cs[i], sb);
    return d_.merge(sb, pr->arity);
  }

  SeqC eval_clause(const Clause& c, const Input& in, size_t e) {
    SeqC cur = d_.extc(c, in);
    for (const Literal& l : c.body) {
      if (l.kind == Literal::Kind::Cut) {
        cur = d_.cut(cur);
      } else if (l.kind == Literal::Kind::Call) {
        auto ci = d_.call_input(l, cur);
        if (!ci) {
          cur = d_.fail(l, cur);
          continue;
        }
        size_t k = lookup(l.name, static_cast<int>(l.args.size()), *ci, e);
        cur = d_.call_exit(l, cur, entries_[k].value);
      } else {
        cur = d_.local(l, cur);
      }
    }
    return d_.restrc(c, cur);
  }

  const NormalizedProgram& prog_;
  D d_;
  int max_iter_;
  std::vector<Entry> entries_;
  std::map<std::string, size_t> index_;
  std::deque<size_t> worklist_;
  bool frozen_ = false;
  std::set<std::pair<const Procedure*, size_t>> evaluated_;
  std::map<size_t, std::vector<SeqC>> clause_results_;
};

void summarize(EntryResult& r, const AbsSeq& b) {
  r.m = b.m;
  r.M = b.M;
  r.t = b.t;
}

void summarize(EntryResult& r, sahlin::Seq s) {
  using namespace sahlin;
  Card lo = kInf, hi = 0;
  bool inc = false, comp = false;
  for (int a = 0; a < kAtoms; ++a) {
    if (!has(s, Atom(a))) continue;
    Card n = count(Atom(a));
    lo = std::min(lo, n);
    hi = std::max(hi, n == 2 ? kInf : n);
    (incomplete(Atom(a)) ? inc : comp) = true;
  }
  if (s == 0) {
    lo = 1;
    hi = 0;
  }
  r.m = lo;
  r.M = hi;
  r.t = inc && comp ? TermInfo::Pt : inc ? TermInfo::Snt : TermInfo::St;
}

template <class D>
AnalysisResult run(const NormalizedProgram& prog, const std::vector<Query>& queries, D dom,
                   const EngineConfig& cfg) {
  Engine<D> eng(prog, dom, cfg.max_iter);
  for (const auto& q : queries) {
    if (!prog.find(q.pred, q.arity()))
      throw AnalysisError("unknown predicate " + pred_label(q.pred, q.arity()));
    eng.solve(q.pred, q.arity(), dom.root(q.modes));
  }
  AnalysisResult res;
  auto bad = eng.post_check();
  const auto& es = eng.entries();
  for (size_t b : bad)
    res.post_violations.push_back(pred_label(es[b].proc->name, es[b].proc->arity));

  std::map<const Procedure*, bool> det;
  for (size_t ei = 0; ei < es.size(); ++ei) {
    const auto& e = es[ei];
    EntryResult r;
    r.pred = e.proc->name;
    r.arity = e.proc->arity;
    r.root = e.root;
    r.text = dom.show(r.pred, e.value);
    r.evaluations = e.evals;
    summarize(r, e.value);
    for (const auto& [b, bp] : e.trace) r.trace.emplace_back(dom.show(r.pred, b), dom.show(r.pred, bp));
    if constexpr (std::is_same_v<D, CardDomain>) {
      r.card_input = e.in;
      r.card_value = e.value;
      r.card_trace = e.trace;
      r.input = render(r.pred, e.in);
      std::string ints;
      std::set<int> seen;
      std::function<void(int, const std::string&)> walk = [&](int i, const std::string& path) {
        if (e.in.nums.count(i) && seen.insert(i).second) ints += (ints.empty() ? "" : ",") + path;
        const auto& n = e.in.nodes[i];
        if (n.frm)
          for (size_t k = 0; k < n.kids.size(); ++k) walk(n.kids[k], path + "." + std::to_string(k + 1));
      };
      for (int x = 0; x < e.in.size(); ++x) walk(e.in.sv[x], "x" + std::to_string(x + 1));
      if (!e.in.arith.empty()) ints += ints.empty() ? "order" : ",order";
      if (!ints.empty()) r.input += " {int " + ints + "}";
      r.output = render(r.pred, e.value.beta);
      const auto& cs = eng.clause_results(ei);
      for (size_t i = 0; i < cs.size(); ++i)
        r.clauses.push_back({static_cast<int>(i) + 1, cs[i].b, cs[i].acf});
    } else {
      r.sahlin_value = e.value;
      r.input = r.pred;
      r.output = sahlin::render(e.value);
    }
    r.deterministic = r.M <= 1;
    r.fully_deterministic = r.m == 1 && r.M == 1 && r.t == TermInfo::St;
    auto [it, fresh] = det.emplace(e.proc, r.deterministic);
    if (!fresh) it->second = it->second && r.deterministic;
    res.entries.push_back(std::move(r));
  }
  // Root inputs for the Sahlin domain come from the query patterns.
  if constexpr (std::is_same_v<D, SahlinDomain>) {
    for (const auto& q : queries)
      for (auto& r : res.entries)
        if (r.root && r.pred == q.pred && r.arity == q.arity())
          r.input = render(q.pred, AbsSubst::from_modes(q.modes));
  }
  res.np = static_cast<int>(det.size());
  for (const auto& [p, d] : det) res.d += d;

  for (const auto& pr : prog.procs)
    for (size_t i = 0; i < pr.clauses.size(); ++i)
      if (!eng.evaluated().count({&pr, i}))
        res.dead_clauses.push_back({pr.name, pr.arity, static_cast<int>(i) + 1});
  return res;
}

}  // namespace

AnalysisResult analyze(const NormalizedProgram& prog, const std::vector<Query>& queries,
                       const EngineConfig& cfg) {
  AnalysisResult res;
  if (cfg.domain == DomainKind::Card)
    res = run(prog, queries, CardDomain{cfg.widening_depth, cfg.use_arith}, cfg);
  else
    res = run(prog, queries, SahlinDomain{}, cfg);
  res.domain = cfg.domain;
  return res;
}

namespace {

// All terms over the universe with variables first..first+nv-1.
std::vector<Term> all_terms(const Universe& u, int depth, int first) {
  std::vector<Term> leaves;
  for (const auto& c : u.constants) leaves.push_back(Term::f(c));
  for (int v = 0; v < u.vars_per_arg; ++v) leaves.push_back(Term::v(first + v));
  std::vector<Term> cur = leaves;
  for (int d = 2; d <= depth; ++d) {
    std::vector<Term> next = leaves;
    for (const auto& f : u.functors)
      for (const auto& a : cur)
        for (const auto& b : cur) next.push_back(Term::f(f, {a, b}));
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

std::vector<PSubst> enumerate_inputs(const std::vector<Mode>& modes, const Universe& u) {
  std::vector<std::vector<Term>> per;
  for (size_t i = 0; i < modes.size(); ++i) {
    std::vector<Term> ok;
    for (auto& t : all_terms(u, u.depth, 1 + static_cast<int>(i) * u.vars_per_arg))
      if (modes[i] & mode_of_term(t)) ok.push_back(std::move(t));
    per.push_back(std::move(ok));
  }
  std::vector<PSubst> out;
  std::set<std::string> seen;
  PSubst cur(modes.size());
  std::function<void(size_t)> go = [&](size_t i) {
    if (i == modes.size()) {
      PSubst c = canonicalize(cur);
      if (seen.insert(key(c)).second) out.push_back(c);
      return;
    }
    for (const auto& t : per[i]) {
      cur[i] = t;
      go(i + 1);
    }
  };
  go(0);
  return out;
}

SafetyReport check_safety(const NormalizedProgram& prog, const std::vector<Query>& queries,
                          const AnalysisResult& res, const SafetyConfig& cfg) {
  SafetyReport rep;
  for (const auto& q : queries) {
    const EntryResult* e = res.root(q);
    if (!e) {
      rep.violations.push_back("no result for " + pred_label(q.pred, q.arity()));
      continue;
    }
    Interpreter interp(prog);
    for (const auto& theta : enumerate_inputs(q.modes, cfg.universe)) {
      for (int k = 1; k <= cfg.max_k; ++k) {
        Sequence s;
        try {
          s = interp.call(q.pred, q.arity(), theta, k);
        } catch (const ArithError&) {
          ++rep.skipped;
          continue;
        }
        ++rep.checked;
        if (!s.incomplete) ++rep.complete;
        bool ok = res.domain == DomainKind::Card ? cc_prefix(s, e->card_value)
                                                  : sahlin::prefix(s, e->sahlin_value);
        if (!ok)
          rep.violations.push_back(q.pred + " k=" + std::to_string(k) + " input " + to_string(theta) +
                                   " gives " + to_string(s) + " outside " + e->text);
      }
    }
  }
  return rep;
}

}  // namespace seqai
