// minisolve — a small SMT solver for quantifier-free formulas over Booleans
// and integer difference constraints (QF_IDL and the difference-shaped part
// of QF_LIA). CDCL SAT core with a lazy Bellman-Ford theory check.
//
// Accepts the SMT-LIB 2 subset:
//   set-logic/set-info/set-option, declare-fun/declare-const (Bool / Int),
//   assert, check-sat, get-value, exit
// with terms over and/or/not/=>/= /distinct/< /<= /> />= /+ /- /* and
// integer literals. Answers "unknown" when an assertion falls outside the
// difference fragment (e.g. products of variables).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

//----------------------------------------------------------------------------
// s-expressions

struct Sexp {
  bool atom = false;
  std::string text;
  std::vector<Sexp> kids;
};

struct Reader {
  const std::string& s;
  size_t i = 0;

  explicit Reader(const std::string& src) : s(src) {}

  void skip() {
    for (;;) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) i++;
      if (i < s.size() && s[i] == ';') {
        while (i < s.size() && s[i] != '\n') i++;
        continue;
      }
      break;
    }
  }

  bool at_end() {
    skip();
    return i >= s.size();
  }

  Sexp read() {
    skip();
    if (i >= s.size()) throw std::runtime_error("unexpected end of input");
    if (s[i] == '(') {
      i++;
      Sexp e;
      for (;;) {
        skip();
        if (i >= s.size()) throw std::runtime_error("unbalanced '('");
        if (s[i] == ')') {
          i++;
          return e;
        }
        e.kids.push_back(read());
      }
    }
    if (s[i] == '"' || s[i] == '|') {
      char q = s[i];
      size_t j = i + 1;
      while (j < s.size() && s[j] != q) j++;
      Sexp e;
      e.atom = true;
      e.text = s.substr(i, j - i + 1);
      i = j + 1;
      return e;
    }
    size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '(' &&
           s[j] != ')' && s[j] != ';')
      j++;
    Sexp e;
    e.atom = true;
    e.text = s.substr(i, j - i);
    i = j;
    return e;
  }
};

//----------------------------------------------------------------------------
// linear terms over int variables

struct Lin {
  std::map<int, long> coef; // var -> coefficient
  long k = 0;

  void add(const Lin& o, long scale) {
    for (auto& [v, c] : o.coef) {
      coef[v] += c * scale;
      if (coef[v] == 0) coef.erase(v);
    }
    k += o.k * scale;
  }
};

//----------------------------------------------------------------------------
// CDCL SAT core

using Lit = int; // var<<1 | sign, sign 1 = negated
inline Lit mklit(int var, bool neg) { return var * 2 + (neg ? 1 : 0); }
inline int litvar(Lit l) { return l >> 1; }
inline bool litneg(Lit l) { return l & 1; }
inline Lit litnot(Lit l) { return l ^ 1; }

struct Solver {
  int nvars = 0;
  std::vector<std::vector<int>> clauses; // literal lists
  std::vector<std::vector<int>> watches; // per literal: clause indices
  std::vector<int8_t> assign;            // per var: -1 unset, 0 false, 1 true
  std::vector<int> level;
  std::vector<int> reason; // clause index or -1
  std::vector<Lit> trail;
  std::vector<size_t> trail_lim;
  size_t qhead = 0;
  std::vector<double> activity;
  double act_inc = 1.0;
  std::vector<int8_t> phase;
  std::vector<char> seen;
  long conflicts = 0;

  int new_var() {
    watches.emplace_back();
    watches.emplace_back();
    assign.push_back(-1);
    level.push_back(0);
    reason.push_back(-1);
    activity.push_back(0.0);
    phase.push_back(0);
    seen.push_back(0);
    int v = nvars++;
    heap_push(v);
    return v;
  }

  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  bool value_true(Lit l) const {
    int8_t a = assign[litvar(l)];
    return a >= 0 && (a == 1) != litneg(l);
  }
  bool value_false(Lit l) const {
    int8_t a = assign[litvar(l)];
    return a >= 0 && (a == 1) == litneg(l);
  }
  bool value_unset(Lit l) const { return assign[litvar(l)] < 0; }

  void enqueue(Lit l, int why) {
    int v = litvar(l);
    assign[v] = litneg(l) ? 0 : 1;
    level[v] = decision_level();
    reason[v] = why;
    trail.push_back(l);
  }

  bool add_clause(std::vector<int> lits) {
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (size_t a = 0; a + 1 < lits.size(); a++)
      if (lits[a] == litnot(lits[a + 1])) return true; // tautology
    // drop false literals fixed at level 0, shortcut satisfied clauses
    std::vector<int> out;
    for (int l : lits) {
      if (value_true(l) && level[litvar(l)] == 0) return true;
      if (value_false(l) && level[litvar(l)] == 0) continue;
      out.push_back(l);
    }
    if (out.empty()) return false; // conflict at level 0
    if (out.size() == 1) {
      if (value_false(out[0])) return false;
      if (value_unset(out[0])) enqueue(out[0], -1);
      return true;
    }
    int ci = static_cast<int>(clauses.size());
    clauses.push_back(out);
    watches[static_cast<size_t>(out[0])].push_back(ci);
    watches[static_cast<size_t>(out[1])].push_back(ci);
    return true;
  }

  // returns conflicting clause index or -1
  int propagate() {
    while (qhead < trail.size()) {
      Lit p = trail[qhead++];
      Lit np = litnot(p);
      auto& ws = watches[static_cast<size_t>(np)];
      size_t iw = 0;
      while (iw < ws.size()) {
        int ci = ws[iw];
        auto& c = clauses[static_cast<size_t>(ci)];
        // ensure np is at position 1
        if (c[0] == np) std::swap(c[0], c[1]);
        if (value_true(c[0])) {
          iw++;
          continue;
        }
        bool moved = false;
        for (size_t k = 2; k < c.size(); k++) {
          if (!value_false(c[k])) {
            std::swap(c[1], c[k]);
            watches[static_cast<size_t>(c[1])].push_back(ci);
            ws[iw] = ws.back();
            ws.pop_back();
            moved = true;
            break;
          }
        }
        if (moved) continue;
        if (value_false(c[0])) return ci; // conflict
        enqueue(c[0], ci);
        iw++;
      }
    }
    return -1;
  }

  void bump(int v) {
    activity[v] += act_inc;
    if (activity[v] > 1e100) {
      for (auto& a : activity) a *= 1e-100;
      act_inc *= 1e-100;
    }
    if (assign[v] < 0) heap_push(v);
  }

  void analyze(int confl, std::vector<int>& learnt, int& btlevel) {
    learnt.clear();
    learnt.push_back(0); // placeholder for the asserting literal
    int counter = 0;
    Lit p = -1;
    size_t idx = trail.size();
    std::vector<int> touched;
    for (;;) {
      auto& c = clauses[static_cast<size_t>(confl)];
      for (size_t k = (p == -1 ? 0 : 1); k < c.size(); k++) {
        Lit q = c[k];
        int v = litvar(q);
        if (!seen[v] && level[v] > 0) {
          seen[v] = 1;
          touched.push_back(v);
          bump(v);
          if (level[v] >= decision_level()) counter++;
          else learnt.push_back(q);
        }
      }
      do {
        p = trail[--idx];
      } while (!seen[litvar(p)]);
      counter--;
      seen[litvar(p)] = 0;
      if (counter == 0) break;
      confl = reason[litvar(p)];
    }
    for (int v : touched) seen[v] = 0;
    learnt[0] = litnot(p);
    btlevel = 0;
    if (learnt.size() > 1) {
      size_t mi = 1;
      for (size_t k = 2; k < learnt.size(); k++)
        if (level[litvar(learnt[k])] > level[litvar(learnt[mi])]) mi = k;
      std::swap(learnt[1], learnt[mi]);
      btlevel = level[litvar(learnt[1])];
    }
  }

  void backtrack(int lvl) {
    if (decision_level() <= lvl) return;
    size_t lim = trail_lim[static_cast<size_t>(lvl)];
    for (size_t k = trail.size(); k-- > lim;) {
      int v = litvar(trail[k]);
      phase[v] = assign[v];
      assign[v] = -1;
      reason[v] = -1;
      heap_push(v);
    }
    trail.resize(lim);
    trail_lim.resize(static_cast<size_t>(lvl));
    qhead = trail.size();
  }

  // lazy max-heap over (activity-at-push, var); stale entries skipped
  std::vector<std::pair<double, int>> heap;

  void heap_push(int v) {
    if (heap.size() > static_cast<size_t>(8 * nvars + 1024)) {
      heap.clear();
      for (int u = 0; u < nvars; u++)
        if (assign[u] < 0) heap.emplace_back(activity[u], u);
      std::make_heap(heap.begin(), heap.end());
    }
    heap.emplace_back(activity[v], v);
    std::push_heap(heap.begin(), heap.end());
  }

  int pick_branch() {
    while (!heap.empty()) {
      auto [act, v] = heap.front();
      std::pop_heap(heap.begin(), heap.end());
      heap.pop_back();
      if (assign[v] < 0) {
        if (act + 1e-12 < activity[v]) {
          heap_push(v); // stale entry, requeue with fresh activity
          continue;
        }
        return v;
      }
    }
    for (int v = 0; v < nvars; v++)
      if (assign[v] < 0) return v;
    return -1;
  }

  static long luby(long x) {
    long size = 1, seq = 0;
    while (size < x + 1) {
      seq++;
      size = 2 * size + 1;
    }
    while (size - 1 != x) {
      size = (size - 1) >> 1;
      seq--;
      x = x % size;
    }
    return 1L << seq;
  }

  // returns true=sat (full assignment), false=unsat
  bool search() {
    long restart_count = 0;
    long budget = 100 * luby(restart_count);
    for (;;) {
      int confl = propagate();
      if (confl >= 0) {
        conflicts++;
        budget--;
        if (decision_level() == 0) return false;
        std::vector<int> learnt;
        int btlevel = 0;
        analyze(confl, learnt, btlevel);
        backtrack(btlevel);
        if (learnt.size() == 1) {
          enqueue(learnt[0], -1);
        } else {
          int ci = static_cast<int>(clauses.size());
          clauses.push_back(learnt);
          watches[static_cast<size_t>(learnt[0])].push_back(ci);
          watches[static_cast<size_t>(learnt[1])].push_back(ci);
          enqueue(learnt[0], ci);
        }
        act_inc /= 0.95;
        continue;
      }
      if (budget <= 0) {
        restart_count++;
        budget = 100 * luby(restart_count);
        backtrack(0);
        continue;
      }
      int v = pick_branch();
      if (v < 0) return true;
      trail_lim.push_back(trail.size());
      enqueue(mklit(v, phase[v] == 0), -1);
    }
  }
};

//----------------------------------------------------------------------------
// theory: difference constraints  x - y <= k

struct DiffAtom {
  int x = -1; // -1 = the zero node
  int y = -1;
  long k = 0;
};

struct Theory {
  int n_int_vars = 0;
  std::vector<DiffAtom> atoms;     // by theory atom index
  std::vector<int> atom_bool;      // SAT var per atom
  std::vector<long> model;         // per int var, valid after a sat check

  struct Edge {
    int from, to;
    long w;
    int lit; // SAT literal responsible
  };

  // checks the current full SAT assignment; fills `conflict` with a
  // blocking clause on failure
  bool check(const Solver& s, std::vector<int>& conflict) {
    int n = n_int_vars + 1; // node 0 is the zero constant
    std::vector<Edge> edges;
    for (size_t ai = 0; ai < atoms.size(); ai++) {
      int bv = atom_bool[ai];
      if (s.assign[bv] < 0) continue;
      const DiffAtom& a = atoms[ai];
      int x = a.x + 1, y = a.y + 1;
      if (s.assign[bv] == 1) {
        // x - y <= k : edge y -> x weight k
        edges.push_back({y, x, a.k, mklit(bv, false)});
      } else {
        // not (x - y <= k) : y - x <= -k-1 : edge x -> y weight -k-1
        edges.push_back({x, y, -a.k - 1, mklit(bv, true)});
      }
    }
    // Bellman-Ford from a virtual source (distance 0 to every node)
    std::vector<long> dist(static_cast<size_t>(n), 0);
    std::vector<int> parent(static_cast<size_t>(n), -1); // edge index
    int last_relaxed = -1;
    for (int round = 0; round < n; round++) {
      last_relaxed = -1;
      for (size_t ei = 0; ei < edges.size(); ei++) {
        auto& e = edges[ei];
        if (dist[static_cast<size_t>(e.from)] + e.w < dist[static_cast<size_t>(e.to)]) {
          dist[static_cast<size_t>(e.to)] = dist[static_cast<size_t>(e.from)] + e.w;
          parent[static_cast<size_t>(e.to)] = static_cast<int>(ei);
          last_relaxed = e.to;
        }
      }
      if (last_relaxed < 0) break;
    }
    if (last_relaxed >= 0) {
      // negative cycle: walk parents n times to land inside the cycle
      int v = last_relaxed;
      for (int k = 0; k < n; k++) v = edges[static_cast<size_t>(parent[static_cast<size_t>(v)])].from;
      conflict.clear();
      int u = v;
      do {
        int ei = parent[static_cast<size_t>(u)];
        conflict.push_back(litnot(edges[static_cast<size_t>(ei)].lit));
        u = edges[static_cast<size_t>(ei)].from;
      } while (u != v);
      std::sort(conflict.begin(), conflict.end());
      conflict.erase(std::unique(conflict.begin(), conflict.end()), conflict.end());
      return false;
    }
    // model: value(v) = dist(v) - dist(zero)
    model.assign(static_cast<size_t>(n_int_vars), 0);
    for (int v = 0; v < n_int_vars; v++) model[static_cast<size_t>(v)] = dist[static_cast<size_t>(v + 1)] - dist[0];
    return true;
  }
};

//----------------------------------------------------------------------------
// SMT front end

struct Smt {
  Solver sat;
  Theory theory;
  bool fragment_ok = true;

  std::map<std::string, int> bool_vars; // name -> SAT var
  std::map<std::string, int> int_vars;  // name -> int var index
  std::map<std::string, int> atom_index; // normalized key -> theory atom
  std::vector<std::string> decl_order;
  std::string status;
  bool have_model = false;

  int get_bool_var(const std::string& n) {
    auto it = bool_vars.find(n);
    if (it != bool_vars.end()) return it->second;
    int v = sat.new_var();
    bool_vars[n] = v;
    return v;
  }
  int get_int_var(const std::string& n) {
    auto it = int_vars.find(n);
    if (it != int_vars.end()) return it->second;
    int v = theory.n_int_vars++;
    int_vars[n] = v;
    return v;
  }

  // theory atom for x - y <= k (x or y may be -1 = zero), returns SAT literal
  Lit atom_le(int x, int y, long k) {
    std::string key =
        std::to_string(x) + "|" + std::to_string(y) + "|" + std::to_string(k);
    auto it = atom_index.find(key);
    if (it != atom_index.end()) return mklit(theory.atom_bool[static_cast<size_t>(it->second)], false);
    int bv = sat.new_var();
    int ai = static_cast<int>(theory.atoms.size());
    theory.atoms.push_back({x, y, k});
    theory.atom_bool.push_back(bv);
    atom_index[key] = ai;
    return mklit(bv, false);
  }

  // --- term translation -----------------------------------------------------

  bool is_int_term(const Sexp& e) {
    if (e.atom) {
      if (!e.text.empty() &&
          (std::isdigit(static_cast<unsigned char>(e.text[0])) || e.text[0] == '-'))
        return true;
      return int_vars.count(e.text) > 0;
    }
    if (e.kids.empty()) return false;
    const std::string& op = e.kids[0].text;
    if (op == "+" || op == "-" || op == "*") return true;
    return false;
  }

  Lin lin_of(const Sexp& e) {
    Lin out;
    if (e.atom) {
      if (std::isdigit(static_cast<unsigned char>(e.text[0])) ||
          (e.text[0] == '-' && e.text.size() > 1)) {
        out.k = std::stol(e.text);
        return out;
      }
      auto it = int_vars.find(e.text);
      if (it == int_vars.end()) throw std::runtime_error("unknown int symbol " + e.text);
      out.coef[it->second] = 1;
      return out;
    }
    const std::string& op = e.kids[0].text;
    if (op == "+") {
      for (size_t i = 1; i < e.kids.size(); i++) out.add(lin_of(e.kids[i]), 1);
      return out;
    }
    if (op == "-") {
      if (e.kids.size() == 2) {
        out.add(lin_of(e.kids[1]), -1);
        return out;
      }
      out.add(lin_of(e.kids[1]), 1);
      for (size_t i = 2; i < e.kids.size(); i++) out.add(lin_of(e.kids[i]), -1);
      return out;
    }
    if (op == "*") {
      // constant * linear only
      Lin a = lin_of(e.kids[1]);
      Lin b = lin_of(e.kids[2]);
      if (a.coef.empty()) {
        b.k *= a.k;
        for (auto& [v, c] : b.coef) b.coef[v] = c * a.k;
        return b;
      }
      if (b.coef.empty()) {
        a.k *= b.k;
        for (auto& [v, c] : a.coef) a.coef[v] = c * b.k;
        return a;
      }
      fragment_ok = false;
      return out;
    }
    throw std::runtime_error("unsupported int operator " + op);
  }

  // lhs <= rhs as a literal; out-of-fragment combos poison fragment_ok
  Lit le_lit(Lin l) {
    // l.coef * x + l.k <= 0
    if (l.coef.empty()) return l.k <= 0 ? lit_true() : lit_false();
    if (l.coef.size() == 1) {
      auto [v, c] = *l.coef.begin();
      if (c == 1) return atom_le(v, -1, -l.k);  // x + k <= 0 : x - 0 <= -k
      if (c == -1) return atom_le(-1, v, -l.k); // -x + k <= 0 : 0 - x <= -k
    } else if (l.coef.size() == 2) {
      auto it = l.coef.begin();
      auto [v1, c1] = *it++;
      auto [v2, c2] = *it;
      if (c1 == 1 && c2 == -1) return atom_le(v1, v2, -l.k);
      if (c1 == -1 && c2 == 1) return atom_le(v2, v1, -l.k);
    }
    fragment_ok = false;
    return lit_true();
  }

  Lit lit_true() {
    if (true_lit_ < 0) {
      int v = sat.new_var();
      sat.add_clause({mklit(v, false)});
      true_lit_ = mklit(v, false);
    }
    return true_lit_;
  }
  Lit lit_false() { return litnot(lit_true()); }

  Lit tseitin_and(std::vector<Lit> ls) {
    int v = sat.new_var();
    Lit out = mklit(v, false);
    std::vector<int> big{out};
    for (Lit l : ls) {
      sat.add_clause({litnot(out), l});
      big.push_back(litnot(l));
    }
    sat.add_clause(big);
    return out;
  }
  Lit tseitin_or(std::vector<Lit> ls) {
    int v = sat.new_var();
    Lit out = mklit(v, false);
    std::vector<int> big{litnot(out)};
    for (Lit l : ls) {
      sat.add_clause({out, litnot(l)});
      big.push_back(l);
    }
    sat.add_clause(big);
    return out;
  }

  Lit translate(const Sexp& e) {
    if (e.atom) {
      if (e.text == "true") return lit_true();
      if (e.text == "false") return lit_false();
      auto it = bool_vars.find(e.text);
      if (it == bool_vars.end()) throw std::runtime_error("unknown bool symbol " + e.text);
      return mklit(it->second, false);
    }
    if (e.kids.empty()) throw std::runtime_error("empty term");
    const std::string& op = e.kids[0].text;
    if (op == "and") {
      std::vector<Lit> ls;
      for (size_t i = 1; i < e.kids.size(); i++) ls.push_back(translate(e.kids[i]));
      return tseitin_and(std::move(ls));
    }
    if (op == "or") {
      std::vector<Lit> ls;
      for (size_t i = 1; i < e.kids.size(); i++) ls.push_back(translate(e.kids[i]));
      return tseitin_or(std::move(ls));
    }
    if (op == "not") return litnot(translate(e.kids[1]));
    if (op == "=>") {
      std::vector<Lit> ls;
      for (size_t i = 1; i + 1 < e.kids.size(); i++) ls.push_back(litnot(translate(e.kids[i])));
      ls.push_back(translate(e.kids.back()));
      return tseitin_or(std::move(ls));
    }
    if (op == "=" || op == "distinct") {
      bool int_args = is_int_term(e.kids[1]);
      Lit eq;
      if (int_args) {
        Lin d = lin_of(e.kids[1]);
        d.add(lin_of(e.kids[2]), -1);
        Lin nd;
        nd.add(d, -1);
        eq = tseitin_and({le_lit(d), le_lit(nd)});
      } else {
        Lit a = translate(e.kids[1]);
        Lit b = translate(e.kids[2]);
        eq = tseitin_and({tseitin_or({litnot(a), b}), tseitin_or({a, litnot(b)})});
      }
      return op == "=" ? eq : litnot(eq);
    }
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
      Lin a = lin_of(e.kids[1]);
      Lin b = lin_of(e.kids[2]);
      Lin d;
      if (op == "<" || op == "<=") {
        d.add(a, 1);
        d.add(b, -1); // a - b <= 0 or < 0
        if (op == "<") d.k += 1;
      } else {
        d.add(b, 1);
        d.add(a, -1);
        if (op == ">") d.k += 1;
      }
      return le_lit(std::move(d));
    }
    if (op == "ite") {
      Lit c = translate(e.kids[1]);
      Lit t = translate(e.kids[2]);
      Lit f = translate(e.kids[3]);
      return tseitin_and({tseitin_or({litnot(c), t}), tseitin_or({c, f})});
    }
    throw std::runtime_error("unsupported operator " + op);
  }

  // --- commands --------------------------------------------------------------

  void run(const std::string& src) {
    Reader rd(src);
    while (!rd.at_end()) {
      Sexp cmd = rd.read();
      if (cmd.atom || cmd.kids.empty()) continue;
      const std::string& c = cmd.kids[0].text;
      if (c == "set-logic" || c == "set-info" || c == "set-option") continue;
      if (c == "declare-fun" || c == "declare-const") {
        const std::string& name = cmd.kids[1].text;
        const Sexp& sort = cmd.kids.back();
        decl_order.push_back(name);
        if (sort.atom && sort.text == "Bool") get_bool_var(name);
        else if (sort.atom && sort.text == "Int") get_int_var(name);
        else throw std::runtime_error("unsupported sort for " + name);
        continue;
      }
      if (c == "assert") {
        Lit l = translate(cmd.kids[1]);
        if (!sat.add_clause({l})) root_conflict = true;
        continue;
      }
      if (c == "check-sat") {
        check_sat();
        std::cout << status << "\n";
        continue;
      }
      if (c == "get-value") {
        print_values(cmd.kids[1]);
        continue;
      }
      if (c == "exit") break;
    }
  }

  bool root_conflict = false;

  void check_sat() {
    if (!fragment_ok) {
      status = "unknown";
      return;
    }
    if (root_conflict) {
      status = "unsat";
      return;
    }
    for (;;) {
      if (!sat.search()) {
        status = "unsat";
        return;
      }
      std::vector<int> conflict;
      if (theory.check(sat, conflict)) {
        status = "sat";
        have_model = true;
        return;
      }
      // conflict-driven backjump on the theory clause instead of a restart
      int maxlvl = 0;
      for (int l : conflict) maxlvl = std::max(maxlvl, sat.level[litvar(l)]);
      if (maxlvl == 0) {
        status = "unsat";
        return;
      }
      sat.backtrack(maxlvl);
      std::sort(conflict.begin(), conflict.end(),
                [&](int a, int b) { return sat.level[litvar(a)] > sat.level[litvar(b)]; });
      if (conflict.size() == 1) {
        sat.backtrack(0);
        if (sat.value_false(conflict[0])) {
          status = "unsat";
          return;
        }
        if (sat.value_unset(conflict[0])) sat.enqueue(conflict[0], -1);
        continue;
      }
      int ci = static_cast<int>(sat.clauses.size());
      sat.clauses.push_back(conflict);
      sat.watches[static_cast<size_t>(conflict[0])].push_back(ci);
      sat.watches[static_cast<size_t>(conflict[1])].push_back(ci);
      sat.conflicts++;
      std::vector<int> learnt;
      int btlevel = 0;
      sat.analyze(ci, learnt, btlevel);
      sat.backtrack(btlevel);
      if (learnt.size() == 1) {
        sat.enqueue(learnt[0], -1);
      } else {
        int li = static_cast<int>(sat.clauses.size());
        sat.clauses.push_back(learnt);
        sat.watches[static_cast<size_t>(learnt[0])].push_back(li);
        sat.watches[static_cast<size_t>(learnt[1])].push_back(li);
        sat.enqueue(learnt[0], li);
      }
      sat.act_inc /= 0.95;
    }
  }

  void print_values(const Sexp& list) {
    if (status != "sat" || !have_model) {
      std::cout << "(error \"model is not available\")\n";
      return;
    }
    std::cout << "(";
    bool first = true;
    for (auto& e : list.kids) {
      if (!e.atom) continue;
      if (!first) std::cout << "\n ";
      first = false;
      const std::string& n = e.text;
      std::cout << "(" << n << " ";
      auto bi = bool_vars.find(n);
      if (bi != bool_vars.end()) {
        std::cout << (sat.assign[bi->second] == 1 ? "true" : "false");
      } else {
        auto ii = int_vars.find(n);
        if (ii == int_vars.end()) {
          std::cout << "0";
        } else {
          long v = ii->second < static_cast<int>(theory.model.size())
                       ? theory.model[static_cast<size_t>(ii->second)]
                       : 0;
          if (v < 0) std::cout << "(- " << -v << ")";
          else std::cout << v;
        }
      }
      std::cout << ")";
    }
    std::cout << ")\n";
  }

private:
  Lit true_lit_ = -1;
};

} // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  std::string src;
  if (argc > 1 && std::strcmp(argv[1], "-") != 0) {
    std::ifstream in(argv[1]);
    if (!in) {
      std::cerr << "minisolve: cannot open " << argv[1] << "\n";
      return 2;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    src = ss.str();
  } else {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    src = ss.str();
  }
  try {
    Smt smt;
    smt.run(src);
  } catch (const std::exception& e) {
    std::cout << "unknown\n";
    std::cerr << "minisolve: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
