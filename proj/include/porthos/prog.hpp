#pragma once

// Thread-structured while-language programs: parsing, validation,
// desugaring and loop unrolling into acyclic form.

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "porthos/diag.hpp"

namespace porthos::prog {

using Iid = int;

enum class FenceKind { mfence, sync, lwsync, isync };

inline const char* fence_name(FenceKind k) {
  switch (k) {
  case FenceKind::mfence: return "mfence";
  case FenceKind::sync: return "sync";
  case FenceKind::lwsync: return "lwsync";
  case FenceKind::isync: return "isync";
  }
  return "?";
}

//----------------------------------------------------------------------------
// Expressions and predicates (registers and integer constants only)

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { constant, reg, add, sub, mul };
  Kind kind;
  long value = 0;   // constant
  std::string reg;  // reg
  ExprPtr a, b;     // binary

  static ExprPtr constant(long v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::constant;
    e->value = v;
    return e;
  }
  static ExprPtr make_reg(std::string r) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::reg;
    e->reg = std::move(r);
    return e;
  }
  static ExprPtr binary(Kind k, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
  }
};

struct Pred;
using PredPtr = std::shared_ptr<const Pred>;

struct Pred {
  enum class Kind { cmp_eq, cmp_ne, cmp_lt, cmp_le, land, lor, lnot, constant };
  Kind kind;
  bool bvalue = false; // constant
  ExprPtr ea, eb;      // comparisons
  PredPtr pa, pb;      // connectives

  static PredPtr constant(bool v) {
    auto p = std::make_shared<Pred>();
    p->kind = Kind::constant;
    p->bvalue = v;
    return p;
  }
  static PredPtr cmp(Kind k, ExprPtr a, ExprPtr b) {
    auto p = std::make_shared<Pred>();
    p->kind = k;
    p->ea = std::move(a);
    p->eb = std::move(b);
    return p;
  }
  static PredPtr land_(PredPtr a, PredPtr b) {
    auto p = std::make_shared<Pred>();
    p->kind = Kind::land;
    p->pa = std::move(a);
    p->pb = std::move(b);
    return p;
  }
  static PredPtr lor_(PredPtr a, PredPtr b) {
    auto p = std::make_shared<Pred>();
    p->kind = Kind::lor;
    p->pa = std::move(a);
    p->pb = std::move(b);
    return p;
  }
  static PredPtr lnot_(PredPtr a) {
    auto p = std::make_shared<Pred>();
    p->kind = Kind::lnot;
    p->pa = std::move(a);
    return p;
  }
};

inline void expr_registers(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::reg) out.insert(e->reg);
  expr_registers(e->a, out);
  expr_registers(e->b, out);
}

inline void pred_registers(const PredPtr& p, std::set<std::string>& out) {
  if (!p) return;
  expr_registers(p->ea, out);
  expr_registers(p->eb, out);
  pred_registers(p->pa, out);
  pred_registers(p->pb, out);
}

//----------------------------------------------------------------------------
// Instructions

struct Instr;
using InstrPtr = std::unique_ptr<Instr>;

struct Instr {
  enum class Kind { local, load, store, fence, seq, branch, loop, skip };
  Kind kind;
  Iid iid = -1;
  int hl_label = -1; // optional high-level origin (@hl=), -1 if absent

  std::string reg; // local/load target, store source
  std::string loc; // load source, store target
  ExprPtr expr;    // local rhs; for a not-yet-desugared constant store
  FenceKind fence = FenceKind::mfence;
  PredPtr pred;  // branch/loop
  InstrPtr a, b; // seq: a;b   branch: then/else   loop: body

  InstrPtr clone() const {
    auto n = std::make_unique<Instr>();
    n->kind = kind;
    n->iid = iid;
    n->hl_label = hl_label;
    n->reg = reg;
    n->loc = loc;
    n->expr = expr;
    n->fence = fence;
    n->pred = pred;
    if (a) n->a = a->clone();
    if (b) n->b = b->clone();
    return n;
  }

  static InstrPtr mk(Kind k) {
    auto n = std::make_unique<Instr>();
    n->kind = k;
    return n;
  }
  static InstrPtr skip() { return mk(Kind::skip); }
  static InstrPtr local(std::string r, ExprPtr e) {
    auto n = mk(Kind::local);
    n->reg = std::move(r);
    n->expr = std::move(e);
    return n;
  }
  static InstrPtr load(std::string r, std::string l) {
    auto n = mk(Kind::load);
    n->reg = std::move(r);
    n->loc = std::move(l);
    return n;
  }
  static InstrPtr store(std::string l, std::string r) {
    auto n = mk(Kind::store);
    n->loc = std::move(l);
    n->reg = std::move(r);
    return n;
  }
  static InstrPtr store_const(std::string l, long v) {
    auto n = mk(Kind::store);
    n->loc = std::move(l);
    n->expr = Expr::constant(v); // removed by desugaring
    return n;
  }
  static InstrPtr fence_(FenceKind k) {
    auto n = mk(Kind::fence);
    n->fence = k;
    return n;
  }
  static InstrPtr seq(InstrPtr x, InstrPtr y) {
    auto n = mk(Kind::seq);
    n->a = std::move(x);
    n->b = std::move(y);
    return n;
  }
  static InstrPtr branch(PredPtr p, InstrPtr t, InstrPtr e) {
    auto n = mk(Kind::branch);
    n->pred = std::move(p);
    n->a = std::move(t);
    n->b = std::move(e);
    return n;
  }
  static InstrPtr loop(PredPtr p, InstrPtr body) {
    auto n = mk(Kind::loop);
    n->pred = std::move(p);
    n->a = std::move(body);
    return n;
  }
};

struct Thread {
  std::string tid;
  InstrPtr body;
};

struct Program {
  std::string name;
  std::vector<Thread> threads;
  std::map<std::string, long> init; // referenced locations default to 0

  Program() = default;
  Program(Program&&) = default;
  Program& operator=(Program&&) = default;
  Program(const Program& o) : name(o.name), init(o.init) {
    threads.reserve(o.threads.size());
    for (auto& t : o.threads) threads.push_back({t.tid, t.body ? t.body->clone() : nullptr});
  }
  Program& operator=(const Program& o) {
    if (this != &o) *this = Program(o);
    return *this;
  }
};

//----------------------------------------------------------------------------
// Traversal helpers

template <class F> void for_each_instr(Instr& i, F&& f) {
  f(i);
  if (i.a) for_each_instr(*i.a, f);
  if (i.b) for_each_instr(*i.b, f);
}

template <class F> void for_each_instr(const Instr& i, F&& f) {
  f(i);
  if (i.a) for_each_instr(*i.a, f);
  if (i.b) for_each_instr(*i.b, f);
}

template <class F> void for_each_instr(Program& p, F&& f) {
  for (auto& t : p.threads)
    if (t.body) for_each_instr(*t.body, f);
}

template <class F> void for_each_instr(const Program& p, F&& f) {
  for (auto& t : p.threads)
    if (t.body) for_each_instr(*t.body, f);
}

inline bool has_loop(const Program& p) {
  bool found = false;
  for_each_instr(p, [&](const Instr& i) {
    if (i.kind == Instr::Kind::loop) found = true;
  });
  return found;
}

/// Pre-order renumbering; makes iids unique and stable across clones.
inline void renumber_iids(Program& p) {
  Iid next = 0;
  for (auto& t : p.threads)
    if (t.body) for_each_instr(*t.body, [&](Instr& i) { i.iid = next++; });
}

inline std::set<std::string> thread_registers(const Thread& t) {
  std::set<std::string> regs;
  if (!t.body) return regs;
  for_each_instr(*t.body, [&](const Instr& i) {
    if (!i.reg.empty()) regs.insert(i.reg);
    expr_registers(i.expr, regs);
    pred_registers(i.pred, regs);
  });
  return regs;
}

inline std::set<std::string> program_locations(const Program& p) {
  std::set<std::string> locs;
  for (auto& [l, v] : p.init) locs.insert(l);
  for_each_instr(p, [&](const Instr& i) {
    if (!i.loc.empty()) locs.insert(i.loc);
  });
  return locs;
}

inline bool is_register_name(const std::string& s) {
  if (s.empty() || s[0] != 'r') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

inline bool is_location_name(const std::string& s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

//----------------------------------------------------------------------------
// Lexer for the .lit format

namespace detail {

struct Token {
  enum class Kind { ident, number, punct, hl, eof };
  Kind kind = Kind::eof;
  std::string text;
  long value = 0;
  int line = 1, column = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw parse_error(msg, tok_.line, tok_.column);
  }

  size_t mark() const { return pos_; }
  Token mark_tok() const { return tok_; }
  void rewind(size_t pos, const Token& tok) {
    pos_ = pos;
    tok_ = tok;
  }

private:
  void advance() {
    skip_ws();
    tok_.line = line_;
    tok_.column = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = Token::Kind::eof;
      tok_.text.clear();
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t s = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        bump();
      tok_.kind = Token::Kind::ident;
      tok_.text = src_.substr(s, pos_ - s);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) && numeric_minus_ok())) {
      size_t s = pos_;
      if (c == '-') bump();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
      tok_.kind = Token::Kind::number;
      tok_.text = src_.substr(s, pos_ - s);
      tok_.value = std::stol(tok_.text);
      return;
    }
    if (c == '@') {
      // @hl=
      if (src_.compare(pos_, 4, "@hl=") == 0) {
        bump(); bump(); bump(); bump();
        tok_.kind = Token::Kind::hl;
        tok_.text = "@hl=";
        return;
      }
      throw parse_error("stray '@'", line_, col_);
    }
    static const char* puncts[] = {":=", "<-", "<=", "==", "!=", "&&", "||", "/\\", "\\/",
                                   ";",  "{",  "}",  "(",  ")",  "=",  "<",  "!",  "~",
                                   "&",  "|",  "+",  "-",  "*"};
    for (const char* p : puncts) {
      size_t n = std::char_traits<char>::length(p);
      if (src_.compare(pos_, n, p) == 0) {
        for (size_t k = 0; k < n; k++) bump();
        tok_.kind = Token::Kind::punct;
        tok_.text = p;
        return;
      }
    }
    throw parse_error(std::string("unexpected character '") + c + "'", line_, col_);
  }

  // '-' starts a numeric literal only where a value may begin
  bool numeric_minus_ok() const {
    return tok_.kind != Token::Kind::number && tok_.kind != Token::Kind::ident &&
           tok_.text != ")";
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      line_++;
      col_ = 1;
    } else {
      col_++;
    }
    pos_++;
  }

  std::string src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class LitParser {
public:
  explicit LitParser(const std::string& src) : lx_(src) {}

  Program parse() {
    Program p;
    expect_ident("program");
    p.name = expect_any_ident("program name");
    while (at_ident("init")) {
      lx_.next();
      std::string loc = expect_any_ident("location");
      if (!is_location_name(loc)) lx_.fail("'" + loc + "' is not a valid location name");
      expect_punct("=");
      long v = expect_number();
      p.init[loc] = v;
    }
    std::set<std::string> tids;
    while (at_ident("thread")) {
      lx_.next();
      std::string tid = expect_any_ident("thread id");
      if (!tids.insert(tid).second)
        throw parse_error("duplicate thread id '" + tid + "'", lx_.peek().line,
                          lx_.peek().column);
      Thread t;
      t.tid = tid;
      t.body = parse_stmt();
      p.threads.push_back(std::move(t));
    }
    if (lx_.peek().kind != Token::Kind::eof) lx_.fail("expected 'thread' or end of input");
    if (p.threads.empty()) lx_.fail("program has no threads");
    return p;
  }

private:
  using Token = detail::Token;

  InstrPtr parse_stmt() {
    InstrPtr first = parse_unit();
    if (at_punct(";")) {
      lx_.next();
      InstrPtr rest = parse_stmt();
      return Instr::seq(std::move(first), std::move(rest));
    }
    return first;
  }

  InstrPtr parse_unit() {
    const Token& t = lx_.peek();
    if (t.kind == Token::Kind::ident) {
      if (t.text == "skip") {
        lx_.next();
        return Instr::skip();
      }
      if (t.text == "if") return parse_if();
      if (t.text == "while") return parse_while();
      if (t.text == "mfence" || t.text == "sync" || t.text == "lwsync" || t.text == "isync") {
        std::string f = lx_.next().text;
        FenceKind k = f == "mfence"  ? FenceKind::mfence
                      : f == "sync"  ? FenceKind::sync
                      : f == "lwsync" ? FenceKind::lwsync
                                      : FenceKind::isync;
        return with_hl(Instr::fence_(k));
      }
      return parse_atom();
    }
    lx_.fail("expected statement");
  }

  InstrPtr parse_if() {
    lx_.next(); // if
    expect_punct("(");
    PredPtr p = parse_pred();
    expect_punct(")");
    expect_punct("{");
    InstrPtr then_ = parse_stmt();
    expect_punct("}");
    InstrPtr else_;
    if (at_ident("else")) {
      lx_.next();
      expect_punct("{");
      else_ = parse_stmt();
      expect_punct("}");
    } else {
      else_ = Instr::skip(); // if without else gains else skip
    }
    return Instr::branch(std::move(p), std::move(then_), std::move(else_));
  }

  InstrPtr parse_while() {
    lx_.next(); // while
    expect_punct("(");
    PredPtr p = parse_pred();
    expect_punct(")");
    expect_punct("{");
    InstrPtr body = parse_stmt();
    expect_punct("}");
    return Instr::loop(std::move(p), std::move(body));
  }

  InstrPtr parse_atom() {
    std::string id = expect_any_ident("identifier");
    if (at_punct("=")) {
      lx_.next();
      if (!is_register_name(id)) lx_.fail("'" + id + "' is not a register (r...)");
      ExprPtr e = parse_expr();
      return with_hl(Instr::local(id, std::move(e)));
    }
    if (at_punct("<-")) {
      lx_.next();
      if (!is_register_name(id)) lx_.fail("'" + id + "' is not a register (r...)");
      std::string loc = expect_any_ident("location");
      if (!is_location_name(loc)) lx_.fail("'" + loc + "' is not a valid location name");
      return with_hl(Instr::load(id, loc));
    }
    if (at_punct(":=")) {
      lx_.next();
      if (!is_location_name(id)) lx_.fail("'" + id + "' is not a valid location name");
      const Token& t = lx_.peek();
      if (t.kind == Token::Kind::number) {
        long v = lx_.next().value;
        return with_hl(Instr::store_const(id, v));
      }
      std::string reg = expect_any_ident("register");
      if (!is_register_name(reg)) lx_.fail("'" + reg + "' is not a register (r...)");
      return with_hl(Instr::store(id, reg));
    }
    lx_.fail("expected '=', '<-' or ':=' after '" + id + "'");
  }

  InstrPtr with_hl(InstrPtr i) {
    if (lx_.peek().kind == Token::Kind::hl) {
      lx_.next();
      i->hl_label = static_cast<int>(expect_number());
    }
    return i;
  }

  // pred ::= conj ('||' conj)*      (aliases: '|' '\/')
  // conj ::= neg  ('&&' neg)*       (aliases: '&' '/\')
  // neg  ::= '!' neg | 'true' | 'false' | cmp | '(' pred ')'
  PredPtr parse_pred() {
    PredPtr a = parse_conj();
    while (at_punct("||") || at_punct("|") || at_punct("\\/")) {
      lx_.next();
      a = Pred::lor_(a, parse_conj());
    }
    return a;
  }

  PredPtr parse_conj() {
    PredPtr a = parse_neg();
    while (at_punct("&&") || at_punct("&") || at_punct("/\\")) {
      lx_.next();
      a = Pred::land_(a, parse_neg());
    }
    return a;
  }

  PredPtr parse_neg() {
    if (at_punct("!") || at_punct("~")) {
      lx_.next();
      return Pred::lnot_(parse_neg());
    }
    if (at_ident("true")) {
      lx_.next();
      return Pred::constant(true);
    }
    if (at_ident("false")) {
      lx_.next();
      return Pred::constant(false);
    }
    if (at_punct("(")) {
      // either a parenthesised predicate or a comparison with a
      // parenthesised left expression; try the comparison first
      size_t m = lx_.mark();
      Token mt = lx_.mark_tok();
      try {
        return parse_cmp();
      } catch (const parse_error&) {
        lx_.rewind(m, mt);
      }
      lx_.next(); // (
      PredPtr p = parse_pred();
      expect_punct(")");
      return p;
    }
    return parse_cmp();
  }

  PredPtr parse_cmp() {
    ExprPtr a = parse_expr();
    Pred::Kind k;
    if (at_punct("=") || at_punct("==")) k = Pred::Kind::cmp_eq;
    else if (at_punct("!=")) k = Pred::Kind::cmp_ne;
    else if (at_punct("<")) k = Pred::Kind::cmp_lt;
    else if (at_punct("<=")) k = Pred::Kind::cmp_le;
    else lx_.fail("expected comparison operator");
    lx_.next();
    ExprPtr b = parse_expr();
    return Pred::cmp(k, std::move(a), std::move(b));
  }

  ExprPtr parse_expr() {
    ExprPtr a = parse_term();
    while (at_punct("+") || at_punct("-")) {
      bool add = lx_.next().text == "+";
      a = Expr::binary(add ? Expr::Kind::add : Expr::Kind::sub, a, parse_term());
    }
    return a;
  }

  ExprPtr parse_term() {
    ExprPtr a = parse_factor();
    while (at_punct("*")) {
      lx_.next();
      a = Expr::binary(Expr::Kind::mul, a, parse_factor());
    }
    return a;
  }

  ExprPtr parse_factor() {
    const Token& t = lx_.peek();
    if (t.kind == Token::Kind::number) return Expr::constant(lx_.next().value);
    if (t.kind == Token::Kind::ident) {
      std::string id = lx_.next().text;
      if (!is_register_name(id))
        throw parse_error("'" + id + "' is not a register (r...)", t.line, t.column);
      return Expr::make_reg(id);
    }
    if (at_punct("(")) {
      lx_.next();
      ExprPtr e = parse_expr();
      expect_punct(")");
      return e;
    }
    lx_.fail("expected expression");
  }

  bool at_ident(const char* s) const {
    return lx_.peek().kind == Token::Kind::ident && lx_.peek().text == s;
  }
  bool at_punct(const char* s) const {
    return lx_.peek().kind == Token::Kind::punct && lx_.peek().text == s;
  }
  void expect_ident(const char* s) {
    if (!at_ident(s)) lx_.fail(std::string("expected '") + s + "'");
    lx_.next();
  }
  std::string expect_any_ident(const char* what) {
    if (lx_.peek().kind != Token::Kind::ident) lx_.fail(std::string("expected ") + what);
    return lx_.next().text;
  }
  void expect_punct(const char* s) {
    if (!at_punct(s)) lx_.fail(std::string("expected '") + s + "'");
    lx_.next();
  }
  long expect_number() {
    if (lx_.peek().kind != Token::Kind::number) lx_.fail("expected integer");
    return lx_.next().value;
  }

  Lexer lx_;
};

} // namespace detail

//----------------------------------------------------------------------------
// Desugaring and warnings

namespace detail {

// x := <const>  ~>  r_fresh = <const>; x := r_fresh
inline InstrPtr desugar_stores(InstrPtr i, const std::set<std::string>& used, int& counter) {
  if (!i) return i;
  if (i->kind == Instr::Kind::store && i->expr) {
    std::string fresh;
    do {
      fresh = "r_imm" + std::to_string(counter++);
    } while (used.count(fresh));
    auto local = Instr::local(fresh, i->expr);
    auto store = Instr::store(i->loc, fresh);
    store->hl_label = i->hl_label;
    return Instr::seq(std::move(local), std::move(store));
  }
  if (i->a) i->a = desugar_stores(std::move(i->a), used, counter);
  if (i->b) i->b = desugar_stores(std::move(i->b), used, counter);
  return i;
}

inline void warn_uses(const InstrPtr& i, std::set<std::string>& defined,
                      std::set<std::string>& warned, const std::string& tid,
                      std::vector<Diagnostic>& diags) {
  if (!i) return;
  auto check = [&](const std::set<std::string>& used) {
    for (auto& r : used)
      if (!defined.count(r) && warned.insert(r).second)
        diags.push_back({Diagnostic::Severity::warning,
                         "register '" + r + "' read before any definition in thread '" + tid +
                             "' (reads 0)"});
  };
  switch (i->kind) {
  case Instr::Kind::local: {
    std::set<std::string> used;
    expr_registers(i->expr, used);
    check(used);
    defined.insert(i->reg);
    break;
  }
  case Instr::Kind::load:
    defined.insert(i->reg);
    break;
  case Instr::Kind::store:
    if (!i->reg.empty()) check({i->reg});
    break;
  case Instr::Kind::seq:
    warn_uses(i->a, defined, warned, tid, diags);
    warn_uses(i->b, defined, warned, tid, diags);
    break;
  case Instr::Kind::branch: {
    std::set<std::string> used;
    pred_registers(i->pred, used);
    check(used);
    auto d1 = defined, d2 = defined;
    warn_uses(i->a, d1, warned, tid, diags);
    warn_uses(i->b, d2, warned, tid, diags);
    for (auto& r : d1)
      if (d2.count(r)) defined.insert(r);
    break;
  }
  case Instr::Kind::loop: {
    std::set<std::string> used;
    pred_registers(i->pred, used);
    check(used);
    auto d = defined;
    warn_uses(i->a, d, warned, tid, diags);
    break;
  }
  default: break;
  }
}

} // namespace detail

//----------------------------------------------------------------------------
// Public operations

inline Program parse_program(const std::string& text, std::vector<Diagnostic>* warnings = nullptr) {
  detail::LitParser parser(text);
  Program p = parser.parse();
  for (auto& t : p.threads) {
    auto used = thread_registers(t);
    int counter = 0;
    t.body = detail::desugar_stores(std::move(t.body), used, counter);
  }
  renumber_iids(p);
  std::vector<Diagnostic> diags;
  for (auto& t : p.threads) {
    std::set<std::string> defined, warned;
    detail::warn_uses(t.body, defined, warned, t.tid, diags);
  }
  if (warnings) *warnings = std::move(diags);
  return p;
}

inline std::vector<Diagnostic> validate(const Program& p, bool require_acyclic = false) {
  std::vector<Diagnostic> out;
  if (p.threads.empty())
    out.push_back({Diagnostic::Severity::error, "program has no threads"});
  std::set<std::string> tids;
  for (auto& t : p.threads) {
    if (!tids.insert(t.tid).second)
      out.push_back({Diagnostic::Severity::error, "duplicate thread id '" + t.tid + "'"});
    if (!t.body)
      out.push_back({Diagnostic::Severity::error, "thread '" + t.tid + "' has no body"});
  }
  std::set<Iid> iids;
  for_each_instr(p, [&](const Instr& i) {
    if (!iids.insert(i.iid).second)
      out.push_back({Diagnostic::Severity::error,
                     "duplicate instruction id " + std::to_string(i.iid)});
    if (i.kind == Instr::Kind::store && i.expr)
      out.push_back({Diagnostic::Severity::error,
                     "constant store not desugared at iid " + std::to_string(i.iid)});
  });
  if (require_acyclic)
    for_each_instr(p, [&](const Instr& i) {
      if (i.kind == Instr::Kind::loop)
        out.push_back({Diagnostic::Severity::error,
                       "while loop present (iid " + std::to_string(i.iid) +
                           ") but acyclic program required"});
    });
  return out;
}

namespace detail {

inline InstrPtr unroll_instr(const Instr& i, int k);

// while(b) S  ~>  if(b) { S; if(b) { ... } }  with k levels, innermost else skip
inline InstrPtr unroll_loop(const Instr& loop, int k) {
  InstrPtr body = unroll_instr(*loop.a, k);
  if (k == 1) return Instr::branch(loop.pred, std::move(body), Instr::skip());
  InstrPtr inner = unroll_loop(loop, k - 1);
  return Instr::branch(loop.pred, Instr::seq(std::move(body), std::move(inner)), Instr::skip());
}

inline InstrPtr unroll_instr(const Instr& i, int k) {
  if (i.kind == Instr::Kind::loop) return unroll_loop(i, k);
  auto n = std::make_unique<Instr>();
  n->kind = i.kind;
  n->iid = i.iid;
  n->hl_label = i.hl_label;
  n->reg = i.reg;
  n->loc = i.loc;
  n->expr = i.expr;
  n->fence = i.fence;
  n->pred = i.pred;
  if (i.a) n->a = unroll_instr(*i.a, k);
  if (i.b) n->b = unroll_instr(*i.b, k);
  return n;
}

} // namespace detail

inline Program unroll(const Program& p, int k) {
  if (k < 1) throw std::invalid_argument("unroll bound must be >= 1");
  Program out;
  out.name = p.name;
  out.init = p.init;
  for (auto& t : p.threads) {
    Thread nt;
    nt.tid = t.tid;
    nt.body = t.body ? detail::unroll_instr(*t.body, k) : nullptr;
    out.threads.push_back(std::move(nt));
  }
  renumber_iids(out);
  return out;
}

/// Inserts a fence between consecutive statements of every sequence.
inline Program fence_everywhere(const Program& p, FenceKind kind) {
  Program out(p);
  struct Rec {
    FenceKind kind;
    InstrPtr walk(InstrPtr i) {
      if (!i) return i;
      if (i->kind == Instr::Kind::seq) {
        i->a = walk(std::move(i->a));
        i->b = walk(std::move(i->b));
        return Instr::seq(std::move(i->a), Instr::seq(Instr::fence_(kind), std::move(i->b)));
      }
      if (i->a) i->a = walk(std::move(i->a));
      if (i->b) i->b = walk(std::move(i->b));
      return i;
    }
  } rec{kind};
  for (auto& t : out.threads) t.body = rec.walk(std::move(t.body));
  renumber_iids(out);
  return out;
}

//----------------------------------------------------------------------------
// Printer (inverse of the parser, up to desugaring and iids)

namespace detail {

inline void print_expr(std::ostream& os, const ExprPtr& e, int prec = 0) {
  switch (e->kind) {
  case Expr::Kind::constant: os << e->value; break;
  case Expr::Kind::reg: os << e->reg; break;
  case Expr::Kind::add:
  case Expr::Kind::sub: {
    bool paren = prec > 0;
    if (paren) os << "(";
    print_expr(os, e->a, 0);
    os << (e->kind == Expr::Kind::add ? " + " : " - ");
    print_expr(os, e->b, 1);
    if (paren) os << ")";
    break;
  }
  case Expr::Kind::mul:
    print_expr(os, e->a, 1);
    os << " * ";
    print_expr(os, e->b, 1);
    break;
  }
}

inline void print_pred(std::ostream& os, const PredPtr& p, int prec = 0) {
  switch (p->kind) {
  case Pred::Kind::constant: os << (p->bvalue ? "true" : "false"); break;
  case Pred::Kind::cmp_eq:
  case Pred::Kind::cmp_ne:
  case Pred::Kind::cmp_lt:
  case Pred::Kind::cmp_le: {
    print_expr(os, p->ea);
    const char* op = p->kind == Pred::Kind::cmp_eq   ? " = "
                     : p->kind == Pred::Kind::cmp_ne ? " != "
                     : p->kind == Pred::Kind::cmp_lt ? " < "
                                                     : " <= ";
    os << op;
    print_expr(os, p->eb);
    break;
  }
  case Pred::Kind::lor: {
    bool paren = prec > 0;
    if (paren) os << "(";
    print_pred(os, p->pa, 0);
    os << " || ";
    print_pred(os, p->pb, 0);
    if (paren) os << ")";
    break;
  }
  case Pred::Kind::land: {
    bool paren = prec > 1;
    if (paren) os << "(";
    print_pred(os, p->pa, 1);
    os << " && ";
    print_pred(os, p->pb, 1);
    if (paren) os << ")";
    break;
  }
  case Pred::Kind::lnot:
    os << "!(";
    print_pred(os, p->pa, 0);
    os << ")";
    break;
  }
}

inline void print_instr(std::ostream& os, const Instr& i, int indent) {
  std::string pad(static_cast<size_t>(indent), ' ');
  auto hl = [&]() {
    if (i.hl_label >= 0) os << " @hl=" << i.hl_label;
  };
  switch (i.kind) {
  case Instr::Kind::seq:
    print_instr(os, *i.a, indent);
    os << ";\n";
    print_instr(os, *i.b, indent);
    break;
  case Instr::Kind::skip: os << pad << "skip"; break;
  case Instr::Kind::local:
    os << pad << i.reg << " = ";
    print_expr(os, i.expr);
    hl();
    break;
  case Instr::Kind::load:
    os << pad << i.reg << " <- " << i.loc;
    hl();
    break;
  case Instr::Kind::store:
    os << pad << i.loc << " := " << i.reg;
    hl();
    break;
  case Instr::Kind::fence:
    os << pad << fence_name(i.fence);
    hl();
    break;
  case Instr::Kind::branch:
    os << pad << "if (";
    print_pred(os, i.pred);
    os << ") {\n";
    print_instr(os, *i.a, indent + 2);
    os << "\n" << pad << "}";
    if (!(i.b->kind == Instr::Kind::skip)) {
      os << " else {\n";
      print_instr(os, *i.b, indent + 2);
      os << "\n" << pad << "}";
    }
    break;
  case Instr::Kind::loop:
    os << pad << "while (";
    print_pred(os, i.pred);
    os << ") {\n";
    print_instr(os, *i.a, indent + 2);
    os << "\n" << pad << "}";
    break;
  }
}

} // namespace detail

inline std::string print_program(const Program& p) {
  std::ostringstream os;
  os << "program " << p.name << "\n";
  for (auto& [l, v] : p.init) os << "init " << l << " = " << v << "\n";
  for (auto& t : p.threads) {
    os << "thread " << t.tid << "\n";
    detail::print_instr(os, *t.body, 1);
    os << "\n";
  }
  return os.str();
}

/// Structural equality ignoring iids (used by the parse/print round-trip).
inline bool equal_modulo_iids(const Instr& a, const Instr& b);

namespace detail {
inline bool equal_expr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
  case Expr::Kind::constant: return a->value == b->value;
  case Expr::Kind::reg: return a->reg == b->reg;
  default: return equal_expr(a->a, b->a) && equal_expr(a->b, b->b);
  }
}
inline bool equal_pred(const PredPtr& a, const PredPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  if (a->kind == Pred::Kind::constant) return a->bvalue == b->bvalue;
  return equal_expr(a->ea, b->ea) && equal_expr(a->eb, b->eb) && equal_pred(a->pa, b->pa) &&
         equal_pred(a->pb, b->pb);
}
} // namespace detail

namespace detail {
inline void flatten_seq(const Instr& i, std::vector<const Instr*>& out) {
  if (i.kind == Instr::Kind::seq) {
    flatten_seq(*i.a, out);
    flatten_seq(*i.b, out);
  } else {
    out.push_back(&i);
  }
}
} // namespace detail

// sequences compare flattened, so nesting shape does not matter
inline bool equal_modulo_iids(const Instr& a, const Instr& b) {
  if (a.kind == Instr::Kind::seq || b.kind == Instr::Kind::seq) {
    std::vector<const Instr*> fa, fb;
    detail::flatten_seq(a, fa);
    detail::flatten_seq(b, fb);
    if (fa.size() != fb.size()) return false;
    for (size_t k = 0; k < fa.size(); k++)
      if (!equal_modulo_iids(*fa[k], *fb[k])) return false;
    return true;
  }
  if (a.kind != b.kind || a.reg != b.reg || a.loc != b.loc || a.hl_label != b.hl_label)
    return false;
  if (a.kind == Instr::Kind::fence && a.fence != b.fence) return false;
  if (!detail::equal_expr(a.expr, b.expr) || !detail::equal_pred(a.pred, b.pred)) return false;
  if (!!a.a != !!b.a || !!a.b != !!b.b) return false;
  if (a.a && !equal_modulo_iids(*a.a, *b.a)) return false;
  if (a.b && !equal_modulo_iids(*a.b, *b.b)) return false;
  return true;
}

inline bool equal_modulo_iids(const Program& a, const Program& b) {
  if (a.name != b.name || a.init != b.init || a.threads.size() != b.threads.size()) return false;
  for (size_t i = 0; i < a.threads.size(); i++) {
    if (a.threads[i].tid != b.threads[i].tid) return false;
    if (!equal_modulo_iids(*a.threads[i].body, *b.threads[i].body)) return false;
  }
  return true;
}

} // namespace porthos::prog
