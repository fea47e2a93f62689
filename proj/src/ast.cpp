#include "seqai/ast.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace seqai {

RawTerm RawTerm::var(std::string n) {
  RawTerm t;
  t.kind = Kind::Var;
  t.name = std::move(n);
  return t;
}

RawTerm RawTerm::integer(long v) {
  RawTerm t;
  t.kind = Kind::Int;
  t.value = v;
  t.name = std::to_string(v);
  return t;
}

RawTerm RawTerm::func(std::string n, std::vector<RawTerm> a) {
  RawTerm t;
  t.kind = Kind::Func;
  t.name = std::move(n);
  t.args = std::move(a);
  return t;
}

std::string to_string(const RawTerm& t) {
  if (t.kind != RawTerm::Kind::Func || t.args.empty()) return t.name;
  std::string s = t.name + "(";
  for (size_t i = 0; i < t.args.size(); ++i) {
    if (i) s += ",";
    s += to_string(t.args[i]);
  }
  return s + ")";
}

ParseError::ParseError(const std::string& msg, int l, int c)
    : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
      line(l),
      col(c) {}

namespace {

struct Token {
  enum class Kind { Var, Int, Atom, Punct, End, Eof };
  Kind kind = Kind::Eof;
  std::string text;
  long value = 0;
  int line = 1, col = 1;
  bool quoted = false;
  bool open_follows = false;  // '(' immediately after, no whitespace
};

bool is_symbol_char(char c) {
  return std::string_view("+-*/\\^<>=~:.?@#&$").find(c) != std::string_view::npos;
}

class Lexer {
 public:
  explicit Lexer(const std::string& s) : src_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_layout();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= src_.size()) {
        t.kind = Token::Kind::Eof;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t b = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        t.kind = Token::Kind::Int;
        t.text = src_.substr(b, pos_ - b);
        t.value = std::stol(t.text);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t b = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        t.text = src_.substr(b, pos_ - b);
        t.kind = (std::isupper(static_cast<unsigned char>(c)) || c == '_') ? Token::Kind::Var
                                                                         : Token::Kind::Atom;
      } else if (c == '\'') {
        advance();
        std::string s;
        for (;;) {
          if (pos_ >= src_.size()) throw ParseError("unterminated quoted atom", t.line, t.col);
          char d = src_[pos_];
          advance();
          if (d == '\'') {
            if (pos_ < src_.size() && src_[pos_] == '\'') {
              s += '\'';
              advance();
              continue;
            }
            break;
          }
          s += d;
        }
        t.kind = Token::Kind::Atom;
        t.text = s;
        t.quoted = true;
      } else if (c == '(' || c == ')' || c == '[' || c == ']' || c == '|' || c == ',') {
        advance();
        t.kind = Token::Kind::Punct;
        t.text = std::string(1, c);
      } else if (c == '!' || c == ';') {
        advance();
        t.kind = Token::Kind::Atom;
        t.text = std::string(1, c);
      } else if (c == '.' && end_follows(pos_ + 1)) {
        advance();
        t.kind = Token::Kind::End;
        t.text = ".";
      } else if (is_symbol_char(c)) {
        size_t b = pos_;
        while (pos_ < src_.size() && is_symbol_char(src_[pos_])) {
          if (src_[pos_] == '.' && pos_ > b && end_follows(pos_ + 1)) break;
          advance();
        }
        t.kind = Token::Kind::Atom;
        t.text = src_.substr(b, pos_ - b);
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.col);
      }
      t.open_follows = pos_ < src_.size() && src_[pos_] == '(';
      out.push_back(t);
    }
  }

 private:
  bool end_follows(size_t p) const {
    return p >= src_.size() || std::isspace(static_cast<unsigned char>(src_[p])) || src_[p] == '%';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_layout() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        int l = line_, cl = col_;
        advance();
        advance();
        while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) advance();
        if (pos_ + 1 >= src_.size()) throw ParseError("unterminated comment", l, cl);
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

struct OpDef {
  int prec;
  int left_max;
  int right_max;
};

// Infix operators understood in clause bodies and arguments.
const std::map<std::string, OpDef>& infix_ops() {
  static const std::map<std::string, OpDef> ops = {
      {":-", {1200, 1199, 1199}}, {"->", {1050, 1049, 1050}}, {";", {1100, 1099, 1100}},
      {"=", {700, 699, 699}},     {"<", {700, 699, 699}},     {">", {700, 699, 699}},
      {"=<", {700, 699, 699}},    {">=", {700, 699, 699}},    {":=", {700, 699, 699}},
      {"<>", {700, 699, 699}},    {"is", {700, 699, 699}},    {"=:=", {700, 699, 699}},
      {"=\\=", {700, 699, 699}},  {"==", {700, 699, 699}},    {"\\==", {700, 699, 699}},
      {"+", {500, 500, 499}},     {"-", {500, 500, 499}},     {"*", {400, 400, 399}},
      {"//", {400, 400, 399}},    {"/", {400, 400, 399}},     {"mod", {400, 400, 399}},
  };
  return ops;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::vector<RawClause> clauses() {
    std::vector<RawClause> out;
    while (peek().kind != Token::Kind::Eof) {
      int line = peek().line;
      if (peek().kind == Token::Kind::Atom && peek().text == ":-" )
        throw ParseError("directives are not supported", peek().line, peek().col);
      RawTerm t = term(1200);
      expect_end();
      RawClause c;
      c.line = line;
      if (t.kind == RawTerm::Kind::Func && t.name == ":-" && t.args.size() == 2) {
        c.head = t.args[0];
        flatten_body(t.args[1], c.body);
      } else {
        c.head = t;
      }
      if (c.head.kind != RawTerm::Kind::Func)
        throw ParseError("clause head must be an atom or compound term", line, 1);
      out.push_back(std::move(c));
    }
    return out;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().col);
  }

  void expect_punct(const char* p) {
    if (peek().kind != Token::Kind::Punct || peek().text != p)
      fail(std::string("expected '") + p + "'");
    ++pos_;
  }

  void expect_end() {
    if (peek().kind != Token::Kind::End) fail("expected '.' at end of clause");
    ++pos_;
  }

  void flatten_body(const RawTerm& t, std::vector<RawTerm>& out) {
    if (t.kind == RawTerm::Kind::Func && t.name == "," && t.args.size() == 2) {
      flatten_body(t.args[0], out);
      flatten_body(t.args[1], out);
      return;
    }
    out.push_back(t);
  }

  // Precedence-climbing parser; ',' is an operator of priority 1000 only
  // when max >= 1000.
  RawTerm term(int max) {
    auto [left, lprec] = primary(max);
    for (;;) {
      const Token& t = peek();
      std::string op;
      if (t.kind == Token::Kind::Atom && !t.quoted) op = t.text;
      else if (t.kind == Token::Kind::Punct && t.text == ",") op = ",";
      else break;
      OpDef d;
      if (op == ",") {
        d = {1000, 999, 1000};
      } else {
        auto it = infix_ops().find(op);
        if (it == infix_ops().end()) break;
        d = it->second;
      }
      if (d.prec > max || lprec > d.left_max) break;
      ++pos_;
      RawTerm right = term(d.right_max);
      left = RawTerm::func(op, {left, right});
      lprec = d.prec;
    }
    return left;
  }

  std::pair<RawTerm, int> primary(int max) {
    Token t = next();
    switch (t.kind) {
      case Token::Kind::Var:
        return {RawTerm::var(t.text), 0};
      case Token::Kind::Int:
        return {RawTerm::integer(t.value), 0};
      case Token::Kind::Punct:
        if (t.text == "(") {
          RawTerm r = term(1200);
          expect_punct(")");
          return {r, 0};
        }
        if (t.text == "[") return {list(), 0};
        --pos_;
        fail("unexpected '" + t.text + "'");
      case Token::Kind::Atom: {
        if (!t.quoted && t.text == "-" && peek().kind == Token::Kind::Int &&
            peek().line == t.line && peek().col == t.col + 1) {
          Token n = next();
          return {RawTerm::integer(-n.value), 0};
        }
        if (!t.quoted && (t.text == "\\+" ) ) {
          --pos_;
          fail("negation '\\+' is not supported");
        }
        if (t.open_follows) {
          ++pos_;  // '('
          std::vector<RawTerm> args;
          args.push_back(term(999));
          while (peek().kind == Token::Kind::Punct && peek().text == ",") {
            ++pos_;
            args.push_back(term(999));
          }
          expect_punct(")");
          return {RawTerm::func(t.text, std::move(args)), 0};
        }
        if (!t.quoted && t.text == "-" && max >= 200) {
          RawTerm a = term(200);
          return {RawTerm::func("-", {a}), 200};
        }
        int p = 0;
        if (!t.quoted) {
          auto it = infix_ops().find(t.text);
          if (it != infix_ops().end()) p = std::min(it->second.prec, max);
        }
        return {RawTerm::func(t.text), p};
      }
      case Token::Kind::End:
        --pos_;
        fail("unexpected end of clause");
      case Token::Kind::Eof:
        --pos_;
        fail("unexpected end of input");
    }
    fail("unreachable");
  }

  RawTerm list() {
    if (peek().kind == Token::Kind::Punct && peek().text == "]") {
      ++pos_;
      return RawTerm::func("[]");
    }
    std::vector<RawTerm> items;
    items.push_back(term(999));
    while (peek().kind == Token::Kind::Punct && peek().text == ",") {
      ++pos_;
      items.push_back(term(999));
    }
    RawTerm tail = RawTerm::func("[]");
    if (peek().kind == Token::Kind::Punct && peek().text == "|") {
      ++pos_;
      tail = term(999);
    }
    expect_punct("]");
    for (auto it = items.rbegin(); it != items.rend(); ++it)
      tail = RawTerm::func(".", {*it, tail});
    return tail;
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<RawClause> parse(const std::string& text) {
  Lexer lx(text);
  Parser p(lx.run());
  return p.clauses();
}

const char* to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "=<";
    case CmpOp::Eq: return "=:=";
    case CmpOp::Ne: return "=\\=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

CmpOp negate(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Ge: return CmpOp::Lt;
    case CmpOp::Gt: return CmpOp::Le;
  }
  return op;
}

CmpOp swap_sides(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Gt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Ge: return CmpOp::Le;
    case CmpOp::Gt: return CmpOp::Lt;
    default: return op;
  }
}

bool holds(CmpOp op, long a, long b) {
  switch (op) {
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    case CmpOp::Ge: return a >= b;
    case CmpOp::Gt: return a > b;
  }
  return false;
}

Literal Literal::call(std::string p, std::vector<int> a) {
  Literal l;
  l.kind = Kind::Call;
  l.name = std::move(p);
  l.args = std::move(a);
  return l;
}

Literal Literal::unif_var(int i, int j) {
  Literal l;
  l.kind = Kind::UnifVar;
  l.args = {i, j};
  return l;
}

Literal Literal::unif_func(int i, std::string f, std::vector<int> a) {
  Literal l;
  l.kind = Kind::UnifFunc;
  l.name = std::move(f);
  l.args.push_back(i);
  l.args.insert(l.args.end(), a.begin(), a.end());
  return l;
}

Literal Literal::cut() { return Literal{}; }

Literal Literal::arith_test(CmpOp op, Operand lhs, Operand rhs) {
  Literal l;
  l.kind = Kind::ArithTest;
  l.cmp = op;
  l.lhs = lhs;
  l.rhs = rhs;
  return l;
}

Literal Literal::arith_eval(int target, Expr e) {
  Literal l;
  l.kind = Kind::ArithEval;
  l.args = {target};
  l.expr = std::move(e);
  return l;
}

Literal Literal::type_test(TypeKind k, int i) {
  Literal l;
  l.kind = Kind::TypeTest;
  l.type = k;
  l.args = {i};
  return l;
}

namespace {

void expr_vars(const Expr& e, std::vector<int>& out) {
  if (e.op == Expr::Op::Var) {
    int v = static_cast<int>(e.value);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  for (const auto& k : e.kids) expr_vars(k, out);
}

void expr_rename(Expr& e, const std::map<int, int>& m) {
  if (e.op == Expr::Op::Var) e.value = m.at(static_cast<int>(e.value));
  for (auto& k : e.kids) expr_rename(k, m);
}

std::string expr_string(const Expr& e) {
  switch (e.op) {
    case Expr::Op::Var: return "x" + std::to_string(e.value);
    case Expr::Op::Const: return std::to_string(e.value);
    case Expr::Op::Neg: return "-(" + expr_string(e.kids[0]) + ")";
    default: break;
  }
  const char* op = e.op == Expr::Op::Add   ? "+"
                   : e.op == Expr::Op::Sub ? "-"
                   : e.op == Expr::Op::Mul ? "*"
                   : e.op == Expr::Op::Div ? "//"
                                           : " mod ";
  return "(" + expr_string(e.kids[0]) + op + expr_string(e.kids[1]) + ")";
}

std::string operand_string(const Operand& o) {
  return o.is_const ? std::to_string(o.value) : "x" + std::to_string(o.value);
}

}  // namespace

std::vector<int> Literal::vars() const {
  std::vector<int> out;
  auto add = [&](int v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  switch (kind) {
    case Kind::Cut:
      break;
    case Kind::ArithTest:
      if (!lhs.is_const) add(static_cast<int>(lhs.value));
      if (!rhs.is_const) add(static_cast<int>(rhs.value));
      break;
    case Kind::ArithEval:
      add(args[0]);
      expr_vars(expr, out);
      break;
    default:
      for (int a : args) add(a);
  }
  return out;
}

Literal Literal::formal() const {
  std::map<int, int> m;
  auto vs = vars();
  for (size_t k = 0; k < vs.size(); ++k) m[vs[k]] = static_cast<int>(k) + 1;
  Literal l = *this;
  for (int& a : l.args) a = m.at(a);
  if (!l.lhs.is_const && kind == Kind::ArithTest) l.lhs.value = m.at(static_cast<int>(l.lhs.value));
  if (!l.rhs.is_const && kind == Kind::ArithTest) l.rhs.value = m.at(static_cast<int>(l.rhs.value));
  if (kind == Kind::ArithEval) expr_rename(l.expr, m);
  return l;
}

std::string to_string(const Literal& l) {
  auto x = [](int i) { return "x" + std::to_string(i); };
  switch (l.kind) {
    case Literal::Kind::Cut:
      return "!";
    case Literal::Kind::UnifVar:
      return x(l.args[0]) + " = " + x(l.args[1]);
    case Literal::Kind::UnifFunc: {
      std::string s = x(l.args[0]) + " = '" + l.name + "'";
      if (l.args.size() > 1) {
        s += "(";
        for (size_t i = 1; i < l.args.size(); ++i) s += (i > 1 ? "," : "") + x(l.args[i]);
        s += ")";
      }
      return s;
    }
    case Literal::Kind::Call: {
      std::string s = l.name;
      if (!l.args.empty()) {
        s += "(";
        for (size_t i = 0; i < l.args.size(); ++i) s += (i ? "," : "") + x(l.args[i]);
        s += ")";
      }
      return s;
    }
    case Literal::Kind::ArithTest:
      return operand_string(l.lhs) + " " + to_string(l.cmp) + " " + operand_string(l.rhs);
    case Literal::Kind::ArithEval:
      return x(l.args[0]) + " is " + expr_string(l.expr);
    case Literal::Kind::TypeTest: {
      const char* n = l.type == TypeKind::Var ? "var" : l.type == TypeKind::Ground ? "ground" : "nonvar";
      return std::string(n) + "(" + x(l.args[0]) + ")";
    }
  }
  return "?";
}

std::string to_string(const Clause& c) {
  std::string s = c.name;
  if (c.arity) {
    s += "(";
    for (int i = 1; i <= c.arity; ++i) s += (i > 1 ? "," : "") + ("x" + std::to_string(i));
    s += ")";
  }
  if (c.body.empty()) return s + ".";
  s += " :- ";
  for (size_t i = 0; i < c.body.size(); ++i) s += (i ? ", " : "") + to_string(c.body[i]);
  return s + ".";
}

const Procedure* NormalizedProgram::find(const std::string& name, int arity) const {
  auto it = index.find({name, arity});
  return it == index.end() ? nullptr : &procs[it->second];
}

namespace {

const std::map<std::string, CmpOp>& cmp_ops() {
  static const std::map<std::string, CmpOp> ops = {
      {"<", CmpOp::Lt},    {"=<", CmpOp::Le}, {">", CmpOp::Gt},     {">=", CmpOp::Ge},
      {"=:=", CmpOp::Eq},  {"<>", CmpOp::Ne}, {"=\\=", CmpOp::Ne},
  };
  return ops;
}

class ClauseNormalizer {
 public:
  ClauseNormalizer(const RawClause& rc) : rc_(rc) {}

  Clause run() {
    Clause c;
    c.name = rc_.head.name;
    c.arity = static_cast<int>(rc_.head.args.size());
    c.line = rc_.line;
    next_ = c.arity + 1;
    for (int i = 0; i < c.arity; ++i) {
      const RawTerm& a = rc_.head.args[i];
      int xi = i + 1;
      if (a.is_var() && a.name != "_" && !names_.count(a.name)) {
        names_[a.name] = xi;
      } else if (a.is_var() && a.name == "_") {
      } else if (a.is_var()) {
        out_.push_back(Literal::unif_var(names_[a.name], xi));
      } else {
        flatten(xi, a);
      }
    }
    for (const RawTerm& g : rc_.body) goal(g);
    c.body = std::move(out_);
    c.var_count = next_ - 1;
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, rc_.line, 1); }

  int fresh() { return next_++; }

  // Variable index for a source variable occurrence; '_' is always fresh.
  int lookup(const RawTerm& v, bool* seen = nullptr) {
    if (v.name == "_") {
      if (seen) *seen = false;
      return fresh();
    }
    auto it = names_.find(v.name);
    if (seen) *seen = it != names_.end();
    if (it != names_.end()) return it->second;
    int k = fresh();
    names_[v.name] = k;
    return k;
  }

  // Emits literals making x_target equal to the non-variable term t.
  void flatten(int target, const RawTerm& t) {
    if (t.kind == RawTerm::Kind::Int) {
      out_.push_back(Literal::unif_func(target, t.name, {}));
      return;
    }
    std::vector<int> args;
    std::vector<std::pair<int, int>> repeats;  // (original, fresh)
    std::set<int> used = {target};
    for (const RawTerm& a : t.args) {
      if (a.is_var()) {
        int v = lookup(a);
        if (used.count(v)) {
          int f = fresh();
          repeats.push_back({v, f});
          args.push_back(f);
          continue;
        }
        used.insert(v);
        args.push_back(v);
      } else {
        int f = fresh();
        used.insert(f);
        args.push_back(f);
      }
    }
    out_.push_back(Literal::unif_func(target, t.name, args));
    size_t r = 0;
    for (size_t k = 0; k < t.args.size(); ++k) {
      const RawTerm& a = t.args[k];
      if (!a.is_var()) {
        flatten(args[k], a);
      } else if (r < repeats.size() && repeats[r].second == args[k]) {
        out_.push_back(Literal::unif_var(repeats[r].first, args[k]));
        ++r;
      }
    }
  }

  // Index holding the value of t, emitting literals before the use site.
  int as_var(const RawTerm& t, std::set<int>& used) {
    if (t.is_var()) {
      int v = lookup(t);
      if (!used.count(v)) {
        used.insert(v);
        return v;
      }
      int f = fresh();
      out_.push_back(Literal::unif_var(v, f));
      used.insert(f);
      return f;
    }
    int f = fresh();
    flatten(f, t);
    used.insert(f);
    return f;
  }

  Expr expr(const RawTerm& t) {
    Expr e;
    if (t.is_var()) {
      e.op = Expr::Op::Var;
      e.value = lookup(t);
      return e;
    }
    if (t.kind == RawTerm::Kind::Int) {
      e.op = Expr::Op::Const;
      e.value = t.value;
      return e;
    }
    if (t.args.size() == 1 && t.name == "-") {
      e.op = Expr::Op::Neg;
      e.kids.push_back(expr(t.args[0]));
      return e;
    }
    if (t.args.size() == 2) {
      static const std::map<std::string, Expr::Op> bin = {
          {"+", Expr::Op::Add}, {"-", Expr::Op::Sub}, {"*", Expr::Op::Mul},
          {"//", Expr::Op::Div}, {"mod", Expr::Op::Mod}};
      auto it = bin.find(t.name);
      if (it != bin.end()) {
        e.op = it->second;
        e.kids.push_back(expr(t.args[0]));
        e.kids.push_back(expr(t.args[1]));
        return e;
      }
    }
    fail("unsupported arithmetic expression '" + to_string(t) + "'");
  }

  Operand operand(const RawTerm& t) {
    Operand o;
    if (t.kind == RawTerm::Kind::Int) {
      o.is_const = true;
      o.value = t.value;
    } else if (t.is_var()) {
      o.value = lookup(t);
    } else {
      int f = fresh();
      out_.push_back(Literal::arith_eval(f, expr(t)));
      o.value = f;
    }
    return o;
  }

  void goal(const RawTerm& g) {
    if (g.is_var()) fail("variable goals are not supported");
    if (g.kind == RawTerm::Kind::Int) fail("integer used as a goal");
    const std::string& n = g.name;
    size_t ar = g.args.size();
    if (ar == 0 && n == "!") {
      out_.push_back(Literal::cut());
      return;
    }
    if (ar == 0 && n == "true") return;
    if ((n == ";" || n == "->") && ar == 2) fail("unsupported construct '" + n + "'");
    if (n == "\\+" || n == "not") fail("negation is not supported");
    if ((n == "assert" || n == "asserta" || n == "assertz" || n == "retract") && ar == 1)
      fail("unsupported construct '" + n + "'");
    if (ar == 2 && n == "=") {
      unify(g.args[0], g.args[1]);
      return;
    }
    if (ar == 2 && (n == "is" || n == ":=")) {
      Expr e = expr(g.args[1]);
      std::vector<int> ev;
      expr_vars(e, ev);
      const RawTerm& lhs = g.args[0];
      if (lhs.is_var() && lhs.name != "_") {
        bool seen = false;
        int v = lookup(lhs, &seen);
        if (std::find(ev.begin(), ev.end(), v) == ev.end()) {
          out_.push_back(Literal::arith_eval(v, std::move(e)));
          return;
        }
        int f = fresh();
        out_.push_back(Literal::arith_eval(f, std::move(e)));
        out_.push_back(Literal::unif_var(v, f));
        return;
      }
      int f = fresh();
      out_.push_back(Literal::arith_eval(f, std::move(e)));
      if (!lhs.is_var()) flatten(f, lhs);
      return;
    }
    if (ar == 2 && cmp_ops().count(n)) {
      Operand l = operand(g.args[0]);
      Operand r = operand(g.args[1]);
      if (!l.is_const && !r.is_const && l.value == r.value) {
        int f = fresh();
        out_.push_back(Literal::unif_var(static_cast<int>(l.value), f));
        r.value = f;
      }
      out_.push_back(Literal::arith_test(cmp_ops().at(n), l, r));
      return;
    }
    if (ar == 1 && (n == "var" || n == "ground" || n == "nonvar")) {
      std::set<int> used;
      int v = as_var(g.args[0], used);
      TypeKind k = n == "var" ? TypeKind::Var : n == "ground" ? TypeKind::Ground : TypeKind::Novar;
      out_.push_back(Literal::type_test(k, v));
      return;
    }
    std::set<int> used;
    std::vector<int> args;
    for (const RawTerm& a : g.args) args.push_back(as_var(a, used));
    out_.push_back(Literal::call(n, std::move(args)));
  }

  void unify(const RawTerm& a, const RawTerm& b) {
    if (a.is_var() && b.is_var()) {
      int i = lookup(a), j = lookup(b);
      if (i != j) out_.push_back(Literal::unif_var(i, j));
      return;
    }
    if (a.is_var()) return flatten(lookup(a), b);
    if (b.is_var()) return flatten(lookup(b), a);
    int f = fresh();
    flatten(f, a);
    flatten(f, b);
  }

  const RawClause& rc_;
  std::map<std::string, int> names_;
  std::vector<Literal> out_;
  int next_ = 1;
};

}  // namespace

NormalizedProgram normalize(const std::vector<RawClause>& raw) {
  NormalizedProgram p;
  for (const RawClause& rc : raw) {
    Clause c = ClauseNormalizer(rc).run();
    PredKey key{c.name, c.arity};
    auto it = p.index.find(key);
    if (it == p.index.end()) {
      it = p.index.emplace(key, p.procs.size()).first;
      p.procs.push_back(Procedure{c.name, c.arity, {}});
    }
    p.procs[it->second].clauses.push_back(std::move(c));
  }
  return p;
}

NormalizedProgram parse_program(const std::string& text) { return normalize(parse(text)); }

std::string validate(const NormalizedProgram& p) {
  for (const Procedure& pr : p.procs) {
    for (size_t ci = 0; ci < pr.clauses.size(); ++ci) {
      const Clause& c = pr.clauses[ci];
      std::string where = pr.name + "/" + std::to_string(pr.arity) + " clause " + std::to_string(ci + 1);
      if (c.name != pr.name || c.arity != pr.arity) return where + ": head shape differs";
      if (c.arity > c.var_count) return where + ": arity exceeds var_count";
      for (const Literal& l : c.body) {
        std::vector<int> all;
        switch (l.kind) {
          case Literal::Kind::ArithTest:
            if (!l.lhs.is_const) all.push_back(static_cast<int>(l.lhs.value));
            if (!l.rhs.is_const) all.push_back(static_cast<int>(l.rhs.value));
            break;
          case Literal::Kind::ArithEval: {
            std::vector<int> ev;
            expr_vars(l.expr, ev);
            if (std::find(ev.begin(), ev.end(), l.args[0]) != ev.end())
              return where + ": target occurs in expression";
            all = l.args;
            break;
          }
          default:
            all = l.args;
        }
        std::set<int> seen;
        for (int v : all) {
          if (v < 1 || v > c.var_count) return where + ": index out of range in " + to_string(l);
          if (!seen.insert(v).second) return where + ": repeated variable in " + to_string(l);
        }
        if (l.kind == Literal::Kind::UnifVar && l.args.size() != 2)
          return where + ": malformed unification";
        if (l.kind == Literal::Kind::UnifFunc && (l.args.empty() || l.name.empty()))
          return where + ": malformed functor unification";
      }
    }
  }
  return {};
}

}  // namespace seqai
