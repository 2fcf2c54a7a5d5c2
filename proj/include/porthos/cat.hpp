#pragma once

// CAT-core memory models: parsing, recursion analysis and semantic
// evaluation of relation terms on concrete executions (Kleene iteration).

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "porthos/diag.hpp"

namespace porthos::cat {

enum class BaseRel { po, rf, co, ad, dd, cd, sthd, sloc, mfence, sync, lwsync, isync };

inline const char* base_name(BaseRel b) {
  switch (b) {
  case BaseRel::po: return "po";
  case BaseRel::rf: return "rf";
  case BaseRel::co: return "co";
  case BaseRel::ad: return "ad";
  case BaseRel::dd: return "dd";
  case BaseRel::cd: return "cd";
  case BaseRel::sthd: return "int";
  case BaseRel::sloc: return "loc";
  case BaseRel::mfence: return "mfence";
  case BaseRel::sync: return "sync";
  case BaseRel::lwsync: return "lwsync";
  case BaseRel::isync: return "isync";
  }
  return "?";
}

enum class EventSet { ev, w, r };

inline const char* event_set_name(EventSet s) {
  switch (s) {
  case EventSet::ev: return "EV";
  case EventSet::w: return "W";
  case EventSet::r: return "R";
  }
  return "?";
}

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind {
    base,      // po, rf, ...
    name,      // defined relation
    union_,    // a | b
    inter,     // a & b
    diff,      // a \ b
    seq,       // a ; b
    inverse,   // a^-1
    plus,      // a^+
    star,      // a^*
    opt,       // a^?
    idset,     // id(EV|W|R)
    cartesian, // W*R
    empty      // 0
  };
  Kind kind;
  BaseRel base = BaseRel::po;
  std::string name;
  TermPtr a, b;
  EventSet s1 = EventSet::ev, s2 = EventSet::ev;

  static TermPtr mk(Kind k) {
    auto t = std::make_shared<Term>();
    t->kind = k;
    return t;
  }
  static TermPtr mk_base(BaseRel b) {
    auto t = mk(Kind::base);
    const_cast<Term&>(*t).base = b;
    return t;
  }
  static TermPtr mk_name(std::string n) {
    auto t = mk(Kind::name);
    const_cast<Term&>(*t).name = std::move(n);
    return t;
  }
  static TermPtr mk_bin(Kind k, TermPtr a, TermPtr b) {
    auto t = mk(k);
    const_cast<Term&>(*t).a = std::move(a);
    const_cast<Term&>(*t).b = std::move(b);
    return t;
  }
  static TermPtr mk_un(Kind k, TermPtr a) {
    auto t = mk(k);
    const_cast<Term&>(*t).a = std::move(a);
    return t;
  }
  static TermPtr mk_idset(EventSet s) {
    auto t = mk(Kind::idset);
    const_cast<Term&>(*t).s1 = s;
    return t;
  }
  static TermPtr mk_cartesian(EventSet s1, EventSet s2) {
    auto t = mk(Kind::cartesian);
    const_cast<Term&>(*t).s1 = s1;
    const_cast<Term&>(*t).s2 = s2;
    return t;
  }
};

inline std::string term_str(const TermPtr& t) {
  std::ostringstream os;
  struct P {
    std::ostream& os;
    // precedence: | < & < \ < ; < postfix
    void pr(const TermPtr& t, int prec) {
      switch (t->kind) {
      case Term::Kind::base: os << base_name(t->base); break;
      case Term::Kind::name: os << t->name; break;
      case Term::Kind::empty: os << "0"; break;
      case Term::Kind::idset: os << "id(" << event_set_name(t->s1) << ")"; break;
      case Term::Kind::cartesian:
        os << event_set_name(t->s1) << "*" << event_set_name(t->s2);
        break;
      case Term::Kind::union_: bin(t, 0, " | ", prec); break;
      case Term::Kind::inter: bin(t, 1, " & ", prec); break;
      case Term::Kind::diff: bin(t, 2, " \\ ", prec); break;
      case Term::Kind::seq: bin(t, 3, ";", prec); break;
      case Term::Kind::inverse: post(t, "^-1", prec); break;
      case Term::Kind::plus: post(t, "^+", prec); break;
      case Term::Kind::star: post(t, "^*", prec); break;
      case Term::Kind::opt: post(t, "^?", prec); break;
      }
    }
    void bin(const TermPtr& t, int myprec, const char* op, int prec) {
      bool paren = prec > myprec;
      if (paren) os << "(";
      pr(t->a, myprec);
      os << op;
      pr(t->b, myprec + 1);
      if (paren) os << ")";
    }
    void post(const TermPtr& t, const char* op, int) {
      pr(t->a, 4);
      os << op;
    }
  } p{os};
  p.pr(t, 0);
  return os.str();
}

struct Axiom {
  enum class Kind { acyclic, irreflexive };
  Kind kind;
  TermPtr term;
  std::string label;
};

struct MemoryModel {
  std::string name;
  std::vector<std::pair<std::string, TermPtr>> defs; // in elaboration-relevant order
  std::vector<Axiom> axioms;

  const TermPtr* find_def(const std::string& n) const {
    for (auto& [dn, t] : defs)
      if (dn == n) return &t;
    return nullptr;
  }
};

//----------------------------------------------------------------------------
// Parsing

namespace detail {

class CatLexer {
public:
  explicit CatLexer(const std::string& src) : src_(src) { advance(); }

  struct Tok {
    enum class Kind { ident, number, punct, eof };
    Kind kind = Kind::eof;
    std::string text;
    int line = 1, col = 1;
  };

  const Tok& peek() const { return tok_; }
  Tok next() {
    Tok t = tok_;
    advance();
    return t;
  }
  [[noreturn]] void fail(const std::string& m) const { throw parse_error(m, tok_.line, tok_.col); }

private:
  void advance() {
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
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = Tok::Kind::eof;
      tok_.text.clear();
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t s = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
              src_[pos_] == '-')) {
        // allow hyphenated names like cd-isync when they lex as one word
        if (src_[pos_] == '-' &&
            (pos_ + 1 >= src_.size() || !std::isalpha(static_cast<unsigned char>(src_[pos_ + 1]))))
          break;
        bump();
      }
      tok_.kind = Tok::Kind::ident;
      tok_.text = src_.substr(s, pos_ - s);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t s = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
      tok_.kind = Tok::Kind::number;
      tok_.text = src_.substr(s, pos_ - s);
      return;
    }
    static const char* puncts[] = {":=", "^-1", "^+", "^*", "^?", ";", "\\", "&",
                                   "|",  "(",   ")",  "*"};
    for (const char* p : puncts) {
      size_t n = std::char_traits<char>::length(p);
      if (src_.compare(pos_, n, p) == 0) {
        for (size_t k = 0; k < n; k++) bump();
        tok_.kind = Tok::Kind::punct;
        tok_.text = p;
        return;
      }
    }
    throw parse_error(std::string("unexpected character '") + c + "'", line_, col_);
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
  Tok tok_;
};

inline bool lookup_base(const std::string& s, BaseRel& out) {
  static const std::pair<const char*, BaseRel> table[] = {
      {"po", BaseRel::po},         {"rf", BaseRel::rf},     {"co", BaseRel::co},
      {"ad", BaseRel::ad},         {"dd", BaseRel::dd},     {"cd", BaseRel::cd},
      {"int", BaseRel::sthd},      {"sthd", BaseRel::sthd}, {"loc", BaseRel::sloc},
      {"sloc", BaseRel::sloc},     {"mfence", BaseRel::mfence}, {"sync", BaseRel::sync},
      {"lwsync", BaseRel::lwsync}, {"isync", BaseRel::isync}};
  for (auto& [n, b] : table)
    if (s == n) {
      out = b;
      return true;
    }
  return false;
}

inline bool lookup_event_set(const std::string& s, EventSet& out) {
  if (s == "EV") out = EventSet::ev;
  else if (s == "W") out = EventSet::w;
  else if (s == "R") out = EventSet::r;
  else return false;
  return true;
}

class CatParser {
public:
  explicit CatParser(const std::string& src) : lx_(src) {}

  MemoryModel parse() {
    MemoryModel m;
    expect_ident("model");
    m.name = expect_any_ident("model name");
    while (lx_.peek().kind != CatLexer::Tok::Kind::eof) {
      if (at_ident("acyclic") || at_ident("irreflexive")) {
        bool acy = lx_.next().text == "acyclic";
        TermPtr t = parse_term();
        expect_ident("as");
        std::string label = expect_any_ident("axiom label");
        m.axioms.push_back(
            {acy ? Axiom::Kind::acyclic : Axiom::Kind::irreflexive, std::move(t), label});
      } else {
        std::string name = expect_any_ident("relation name");
        expect_punct(":=");
        TermPtr t = parse_term();
        m.defs.emplace_back(std::move(name), std::move(t));
      }
    }
    return m;
  }

  // exposed for ad-hoc term parsing in tests
  TermPtr parse_term() { return parse_union(); }

private:
  TermPtr parse_union() {
    TermPtr a = parse_inter();
    while (at_punct("|")) {
      lx_.next();
      a = Term::mk_bin(Term::Kind::union_, a, parse_inter());
    }
    return a;
  }
  TermPtr parse_inter() {
    TermPtr a = parse_diff();
    while (at_punct("&")) {
      lx_.next();
      a = Term::mk_bin(Term::Kind::inter, a, parse_diff());
    }
    return a;
  }
  TermPtr parse_diff() {
    TermPtr a = parse_seq();
    while (at_punct("\\")) {
      lx_.next();
      a = Term::mk_bin(Term::Kind::diff, a, parse_seq());
    }
    return a;
  }
  TermPtr parse_seq() {
    TermPtr a = parse_postfix();
    while (at_punct(";")) {
      lx_.next();
      a = Term::mk_bin(Term::Kind::seq, a, parse_postfix());
    }
    return a;
  }
  TermPtr parse_postfix() {
    TermPtr a = parse_atom();
    for (;;) {
      if (at_punct("^-1")) a = (lx_.next(), Term::mk_un(Term::Kind::inverse, a));
      else if (at_punct("^+")) a = (lx_.next(), Term::mk_un(Term::Kind::plus, a));
      else if (at_punct("^*")) a = (lx_.next(), Term::mk_un(Term::Kind::star, a));
      else if (at_punct("^?")) a = (lx_.next(), Term::mk_un(Term::Kind::opt, a));
      else break;
    }
    return a;
  }
  TermPtr parse_atom() {
    auto& t = lx_.peek();
    if (t.kind == CatLexer::Tok::Kind::number) {
      if (t.text != "0") lx_.fail("only '0' (empty relation) is a valid numeric atom");
      lx_.next();
      return Term::mk(Term::Kind::empty);
    }
    if (at_punct("(")) {
      lx_.next();
      TermPtr a = parse_union();
      expect_punct(")");
      return a;
    }
    if (t.kind != CatLexer::Tok::Kind::ident) lx_.fail("expected relation term");
    std::string id = lx_.next().text;
    if (id == "id") {
      expect_punct("(");
      EventSet s;
      std::string sn = expect_any_ident("event set");
      if (!lookup_event_set(sn, s)) lx_.fail("expected EV, W or R");
      expect_punct(")");
      return Term::mk_idset(s);
    }
    EventSet s1;
    if (lookup_event_set(id, s1)) {
      expect_punct("*");
      EventSet s2;
      std::string sn = expect_any_ident("event set");
      if (!lookup_event_set(sn, s2)) lx_.fail("expected EV, W or R");
      return Term::mk_cartesian(s1, s2);
    }
    BaseRel b;
    if (lookup_base(id, b)) return Term::mk_base(b);
    // hyphenated identifiers become plain names (e.g. cd-isync in files
    // would be a name; the shipped models spell it as cd & isync)
    return Term::mk_name(id);
  }

  bool at_ident(const char* s) const {
    return lx_.peek().kind == CatLexer::Tok::Kind::ident && lx_.peek().text == s;
  }
  bool at_punct(const char* s) const {
    return lx_.peek().kind == CatLexer::Tok::Kind::punct && lx_.peek().text == s;
  }
  void expect_ident(const char* s) {
    if (!at_ident(s)) lx_.fail(std::string("expected '") + s + "'");
    lx_.next();
  }
  std::string expect_any_ident(const char* what) {
    if (lx_.peek().kind != CatLexer::Tok::Kind::ident)
      lx_.fail(std::string("expected ") + what);
    return lx_.next().text;
  }
  void expect_punct(const char* s) {
    if (!at_punct(s)) lx_.fail(std::string("expected '") + s + "'");
    lx_.next();
  }

  CatLexer lx_;
};

inline void collect_names(const TermPtr& t, std::set<std::string>& out) {
  if (!t) return;
  if (t->kind == Term::Kind::name) out.insert(t->name);
  collect_names(t->a, out);
  collect_names(t->b, out);
}

} // namespace detail

/// Derived relations every model may use without defining them.
inline const char* prelude_text() {
  return "fr := rf^-1;co\n"
         "rfe := rf \\ int\n"
         "rfi := rf & int\n"
         "coe := co \\ int\n"
         "coi := co & int\n"
         "fre := fr \\ int\n"
         "fri := fr & int\n"
         "com := rf | co | fr\n"
         "poloc := po & loc\n";
}

inline TermPtr parse_term(const std::string& text) {
  detail::CatParser p(text);
  return p.parse_term();
}

inline MemoryModel parse_cat(const std::string& text) {
  detail::CatParser parser(text);
  MemoryModel m = parser.parse();

  // inject prelude definitions unless shadowed
  detail::CatParser pp("model prelude\n" + std::string(prelude_text()));
  MemoryModel prelude = pp.parse();
  std::set<std::string> defined;
  for (auto& [n, t] : m.defs) {
    if (!defined.insert(n).second) throw parse_error("duplicate definition of '" + n + "'");
  }
  std::vector<std::pair<std::string, TermPtr>> defs;
  for (auto& [n, t] : prelude.defs)
    if (!defined.count(n)) defs.emplace_back(n, t);
  for (auto& [n, t] : m.defs) defs.emplace_back(n, t);
  m.defs = std::move(defs);

  // every referenced name must be defined
  std::set<std::string> all;
  for (auto& [n, t] : m.defs) all.insert(n);
  std::set<std::string> used;
  for (auto& [n, t] : m.defs) detail::collect_names(t, used);
  for (auto& ax : m.axioms) detail::collect_names(ax.term, used);
  for (auto& n : used)
    if (!all.count(n)) throw parse_error("undefined relation name '" + n + "'");

  std::set<std::string> labels;
  for (auto& ax : m.axioms)
    if (!labels.insert(ax.label).second)
      throw parse_error("duplicate axiom label '" + ax.label + "'");
  return m;
}

//----------------------------------------------------------------------------
// Recursion structure (SCCs of the name-reference graph)

struct RecursionPlan {
  // SCCs in dependency (elaboration) order; singletons first where possible
  std::vector<std::vector<std::string>> sccs;
  std::map<std::string, bool> recursive;

  bool is_recursive(const std::string& n) const {
    auto it = recursive.find(n);
    return it != recursive.end() && it->second;
  }
};

inline RecursionPlan recursion_plan(const MemoryModel& m) {
  std::vector<std::string> names;
  std::map<std::string, int> index;
  for (auto& [n, t] : m.defs) {
    index[n] = static_cast<int>(names.size());
    names.push_back(n);
  }
  int n = static_cast<int>(names.size());
  std::vector<std::vector<int>> adj(n);
  std::vector<std::set<int>> adjset(n);
  for (auto& [dn, t] : m.defs) {
    std::set<std::string> used;
    detail::collect_names(t, used);
    for (auto& u : used)
      if (index.count(u) && adjset[index[dn]].insert(index[u]).second)
        adj[index[dn]].push_back(index[u]);
  }

  // Tarjan
  std::vector<int> low(n, -1), num(n, -1), comp(n, -1), stack;
  std::vector<char> onstack(n, 0);
  int counter = 0, ncomp = 0;
  std::vector<std::vector<int>> comps;

  struct Frame {
    int v;
    size_t ei;
  };
  for (int s = 0; s < n; s++) {
    if (num[s] != -1) continue;
    std::vector<Frame> st{{s, 0}};
    num[s] = low[s] = counter++;
    stack.push_back(s);
    onstack[s] = 1;
    while (!st.empty()) {
      auto& fr = st.back();
      if (fr.ei < adj[fr.v].size()) {
        int w = adj[fr.v][fr.ei++];
        if (num[w] == -1) {
          num[w] = low[w] = counter++;
          stack.push_back(w);
          onstack[w] = 1;
          st.push_back({w, 0});
        } else if (onstack[w]) {
          low[fr.v] = std::min(low[fr.v], num[w]);
        }
      } else {
        int v = fr.v;
        st.pop_back();
        if (!st.empty()) st.back().ei = st.back().ei; // no-op, keep structure clear
        if (low[v] == num[v]) {
          std::vector<int> scc;
          for (;;) {
            int w = stack.back();
            stack.pop_back();
            onstack[w] = 0;
            comp[w] = ncomp;
            scc.push_back(w);
            if (w == v) break;
          }
          comps.push_back(std::move(scc));
          ncomp++;
        }
        if (!st.empty()) low[st.back().v] = std::min(low[st.back().v], low[v]);
      }
    }
  }

  // Tarjan emits SCCs in reverse topological order of the reference graph;
  // since edges point at dependencies, that order is already usable for
  // elaboration once reversed per definition order. Sort SCCs by the minimal
  // definition index of their members to keep file order stable.
  RecursionPlan plan;
  std::sort(comps.begin(), comps.end(), [&](const auto& a, const auto& b) {
    int ma = *std::min_element(a.begin(), a.end());
    int mb = *std::min_element(b.begin(), b.end());
    return ma < mb;
  });
  // re-topologize: dependencies must come first
  std::vector<int> compOrder;
  std::vector<char> emitted(comps.size(), 0);
  std::vector<std::set<int>> compDeps(comps.size());
  std::map<int, int> vertComp;
  for (size_t ci = 0; ci < comps.size(); ci++)
    for (int v : comps[ci]) vertComp[v] = static_cast<int>(ci);
  for (size_t ci = 0; ci < comps.size(); ci++)
    for (int v : comps[ci])
      for (int w : adj[v])
        if (vertComp[w] != static_cast<int>(ci)) compDeps[ci].insert(vertComp[w]);
  // Kahn with stable order
  for (;;) {
    bool progress = false;
    for (size_t ci = 0; ci < comps.size(); ci++) {
      if (emitted[ci]) continue;
      bool ready = true;
      for (int d : compDeps[ci])
        if (!emitted[d]) ready = false;
      if (ready) {
        emitted[ci] = 1;
        compOrder.push_back(static_cast<int>(ci));
        progress = true;
      }
    }
    if (!progress) break;
  }

  for (int ci : compOrder) {
    std::vector<std::string> scc;
    std::sort(comps[ci].begin(), comps[ci].end());
    for (int v : comps[ci]) scc.push_back(names[v]);
    bool rec = scc.size() > 1;
    if (!rec) {
      int v = comps[ci][0];
      for (int w : adj[v])
        if (w == v) rec = true; // self-referential
    }
    for (auto& nm : scc) plan.recursive[nm] = rec;
    plan.sccs.push_back(std::move(scc));
  }
  return plan;
}

//----------------------------------------------------------------------------
// Relation matrices and evaluation

/// Dense bit-matrix over event indices 0..n-1.
struct RelMat {
  int n = 0;
  std::vector<uint64_t> bits;

  RelMat() = default;
  explicit RelMat(int n_) : n(n_), bits(static_cast<size_t>(n_) * words_per_row(n_), 0) {}

  static size_t words_per_row(int n) { return static_cast<size_t>((n + 63) / 64); }
  size_t wpr() const { return words_per_row(n); }

  bool get(int i, int j) const {
    return (bits[static_cast<size_t>(i) * wpr() + static_cast<size_t>(j) / 64] >>
            (static_cast<size_t>(j) % 64)) &
           1;
  }
  void set(int i, int j, bool v = true) {
    auto& w = bits[static_cast<size_t>(i) * wpr() + static_cast<size_t>(j) / 64];
    uint64_t m = uint64_t(1) << (static_cast<size_t>(j) % 64);
    if (v) w |= m;
    else w &= ~m;
  }

  bool operator==(const RelMat& o) const { return n == o.n && bits == o.bits; }
  bool operator!=(const RelMat& o) const { return !(*this == o); }

  RelMat& operator|=(const RelMat& o) {
    for (size_t i = 0; i < bits.size(); i++) bits[i] |= o.bits[i];
    return *this;
  }
  RelMat& operator&=(const RelMat& o) {
    for (size_t i = 0; i < bits.size(); i++) bits[i] &= o.bits[i];
    return *this;
  }
  RelMat& subtract(const RelMat& o) {
    for (size_t i = 0; i < bits.size(); i++) bits[i] &= ~o.bits[i];
    return *this;
  }

  RelMat transpose() const {
    RelMat r(n);
    for (int i = 0; i < n; i++)
      for (int j = 0; j < n; j++)
        if (get(i, j)) r.set(j, i);
    return r;
  }

  /// r ; o  — row i of result = union of o's rows j with (i,j) in r
  RelMat compose(const RelMat& o) const {
    RelMat r(n);
    size_t w = wpr();
    for (int i = 0; i < n; i++) {
      for (int j = 0; j < n; j++) {
        if (!get(i, j)) continue;
        const uint64_t* src = &o.bits[static_cast<size_t>(j) * w];
        uint64_t* dst = &r.bits[static_cast<size_t>(i) * w];
        for (size_t k = 0; k < w; k++) dst[k] |= src[k];
      }
    }
    return r;
  }

  /// Transitive closure by repeated squaring.
  RelMat closure() const {
    RelMat r = *this;
    for (;;) {
      RelMat next = r;
      next |= r.compose(r);
      if (next == r) return r;
      r = std::move(next);
    }
  }

  bool empty() const {
    for (uint64_t w : bits)
      if (w) return false;
    return true;
  }

  bool has_cycle() const {
    // Kahn: repeatedly strip nodes without incoming edges
    std::vector<int> indeg(static_cast<size_t>(n), 0);
    for (int i = 0; i < n; i++)
      for (int j = 0; j < n; j++)
        if (get(i, j)) indeg[static_cast<size_t>(j)]++;
    std::vector<int> queue;
    for (int i = 0; i < n; i++)
      if (indeg[static_cast<size_t>(i)] == 0) queue.push_back(i);
    int removed = 0;
    while (!queue.empty()) {
      int v = queue.back();
      queue.pop_back();
      removed++;
      for (int j = 0; j < n; j++)
        if (get(v, j) && --indeg[static_cast<size_t>(j)] == 0) queue.push_back(j);
    }
    return removed != n;
  }

  bool has_diagonal() const {
    for (int i = 0; i < n; i++)
      if (get(i, i)) return true;
    return false;
  }

  std::set<std::pair<int, int>> pairs() const {
    std::set<std::pair<int, int>> out;
    for (int i = 0; i < n; i++)
      for (int j = 0; j < n; j++)
        if (get(i, j)) out.insert({i, j});
    return out;
  }
};

/// Base relations and event classification of one concrete execution,
/// restricted to executed events (the evaluator sees nothing else).
struct EvalInput {
  int n = 0;                   // events are 0..n-1
  std::vector<char> executed;  // mask
  std::vector<char> is_write;  // event kinds (init writes are writes)
  std::vector<char> is_read;
  std::map<BaseRel, RelMat> base;

  RelMat masked(const RelMat& m) const {
    RelMat r(n);
    for (int i = 0; i < n; i++) {
      if (!executed[i]) continue;
      for (int j = 0; j < n; j++)
        if (executed[j] && m.get(i, j)) r.set(i, j);
    }
    return r;
  }

  RelMat base_rel(BaseRel b) const {
    auto it = base.find(b);
    return it == base.end() ? RelMat(n) : it->second;
  }

  bool in_set(int e, EventSet s) const {
    switch (s) {
    case EventSet::ev: return true;
    case EventSet::w: return is_write[static_cast<size_t>(e)];
    case EventSet::r: return is_read[static_cast<size_t>(e)];
    }
    return false;
  }
};

using NameEnv = std::map<std::string, RelMat>;

inline RelMat eval_term(const TermPtr& t, const EvalInput& in, const NameEnv& env) {
  switch (t->kind) {
  case Term::Kind::base: return in.base_rel(t->base);
  case Term::Kind::name: {
    auto it = env.find(t->name);
    if (it == env.end()) throw std::runtime_error("eval: unbound name " + t->name);
    return it->second;
  }
  case Term::Kind::empty: return RelMat(in.n);
  case Term::Kind::union_: {
    RelMat a = eval_term(t->a, in, env);
    a |= eval_term(t->b, in, env);
    return a;
  }
  case Term::Kind::inter: {
    RelMat a = eval_term(t->a, in, env);
    a &= eval_term(t->b, in, env);
    return a;
  }
  case Term::Kind::diff: {
    RelMat a = eval_term(t->a, in, env);
    a.subtract(eval_term(t->b, in, env));
    return a;
  }
  case Term::Kind::seq: return eval_term(t->a, in, env).compose(eval_term(t->b, in, env));
  case Term::Kind::inverse: return eval_term(t->a, in, env).transpose();
  case Term::Kind::plus: return eval_term(t->a, in, env).closure();
  case Term::Kind::star: {
    RelMat a = eval_term(t->a, in, env).closure();
    for (int e = 0; e < in.n; e++)
      if (in.executed[static_cast<size_t>(e)]) a.set(e, e);
    return a;
  }
  case Term::Kind::opt: {
    RelMat a = eval_term(t->a, in, env);
    for (int e = 0; e < in.n; e++)
      if (in.executed[static_cast<size_t>(e)]) a.set(e, e);
    return a;
  }
  case Term::Kind::idset: {
    RelMat r(in.n);
    for (int e = 0; e < in.n; e++)
      if (in.executed[static_cast<size_t>(e)] && in.in_set(e, t->s1)) r.set(e, e);
    return r;
  }
  case Term::Kind::cartesian: {
    RelMat r(in.n);
    for (int i = 0; i < in.n; i++) {
      if (!in.executed[static_cast<size_t>(i)] || !in.in_set(i, t->s1)) continue;
      for (int j = 0; j < in.n; j++)
        if (in.executed[static_cast<size_t>(j)] && in.in_set(j, t->s2)) r.set(i, j);
    }
    return r;
  }
  }
  throw std::runtime_error("eval: bad term");
}

/// Least solution of all definitions by Kleene iteration.
inline NameEnv eval_definitions(const MemoryModel& m, const EvalInput& in,
                                const RecursionPlan& plan) {
  NameEnv env;
  for (auto& scc : plan.sccs) {
    for (auto& n : scc) env[n] = RelMat(in.n);
    for (;;) {
      bool changed = false;
      for (auto& n : scc) {
        const TermPtr* def = m.find_def(n);
        RelMat v = eval_term(*def, in, env);
        if (v != env[n]) {
          env[n] = std::move(v);
          changed = true;
        }
      }
      if (!changed) break;
    }
  }
  return env;
}

struct AxiomResult {
  std::string label;
  bool passed = false;
};

struct EvalResult {
  NameEnv names;
  std::vector<AxiomResult> axioms;
  bool consistent = true;
};

inline EvalResult eval_model(const MemoryModel& m, const EvalInput& in) {
  RecursionPlan plan = recursion_plan(m);
  EvalResult res;
  res.names = eval_definitions(m, in, plan);
  for (auto& ax : m.axioms) {
    RelMat v = eval_term(ax.term, in, res.names);
    bool ok = ax.kind == Axiom::Kind::acyclic ? !v.has_cycle() : !v.has_diagonal();
    res.axioms.push_back({ax.label, ok});
    if (!ok) res.consistent = false;
  }
  return res;
}

/// Fast path for the oracle: axiom pass/fail only.
inline bool check_consistent(const MemoryModel& m, const RecursionPlan& plan,
                             const EvalInput& in) {
  NameEnv env = eval_definitions(m, in, plan);
  for (auto& ax : m.axioms) {
    RelMat v = eval_term(ax.term, in, env);
    if (ax.kind == Axiom::Kind::acyclic ? v.has_cycle() : v.has_diagonal()) return false;
  }
  return true;
}

} // namespace porthos::cat
