#pragma once

// Generators for the reduction programs: P_psi / P_forall-psi (portability
// hardness) and P_s (state-portability hardness), emitted as .lit text.

#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "porthos/prog.hpp"

namespace porthos::gen {

//----------------------------------------------------------------------------
// small Boolean formulas over named variables

struct BoolExpr;
using BoolPtr = std::shared_ptr<const BoolExpr>;

struct BoolExpr {
  enum class Kind { var, constant, band, bor, bnot };
  Kind kind;
  std::string var;
  bool value = false;
  BoolPtr a, b;

  static BoolPtr mk_var(std::string v) {
    auto e = std::make_shared<BoolExpr>();
    e->kind = Kind::var;
    e->var = std::move(v);
    return e;
  }
  static BoolPtr mk_const(bool v) {
    auto e = std::make_shared<BoolExpr>();
    e->kind = Kind::constant;
    e->value = v;
    return e;
  }
  static BoolPtr mk_and(BoolPtr x, BoolPtr y) {
    auto e = std::make_shared<BoolExpr>();
    e->kind = Kind::band;
    e->a = std::move(x);
    e->b = std::move(y);
    return e;
  }
  static BoolPtr mk_or(BoolPtr x, BoolPtr y) {
    auto e = std::make_shared<BoolExpr>();
    e->kind = Kind::bor;
    e->a = std::move(x);
    e->b = std::move(y);
    return e;
  }
  static BoolPtr mk_not(BoolPtr x) {
    auto e = std::make_shared<BoolExpr>();
    e->kind = Kind::bnot;
    e->a = std::move(x);
    return e;
  }
};

inline void bool_vars(const BoolPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == BoolExpr::Kind::var) out.insert(e->var);
  bool_vars(e->a, out);
  bool_vars(e->b, out);
}

inline bool eval_bool(const BoolPtr& e, const std::map<std::string, bool>& env) {
  switch (e->kind) {
  case BoolExpr::Kind::var: return env.at(e->var);
  case BoolExpr::Kind::constant: return e->value;
  case BoolExpr::Kind::band: return eval_bool(e->a, env) && eval_bool(e->b, env);
  case BoolExpr::Kind::bor: return eval_bool(e->a, env) || eval_bool(e->b, env);
  case BoolExpr::Kind::bnot: return !eval_bool(e->a, env);
  }
  return false;
}

/// Parses "x1 & (!x2 | x3)", also accepting true/false.
inline BoolPtr parse_psi(const std::string& text) {
  struct P {
    const std::string& s;
    size_t i = 0;
    void skip() {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) i++;
    }
    bool eat(char c) {
      skip();
      if (i < s.size() && s[i] == c) {
        i++;
        return true;
      }
      return false;
    }
    BoolPtr parse_or() {
      BoolPtr a = parse_and();
      while (eat('|')) a = BoolExpr::mk_or(a, parse_and());
      return a;
    }
    BoolPtr parse_and() {
      BoolPtr a = parse_not();
      while (eat('&')) a = BoolExpr::mk_and(a, parse_not());
      return a;
    }
    BoolPtr parse_not() {
      if (eat('!') || eat('~')) return BoolExpr::mk_not(parse_not());
      if (eat('(')) {
        BoolPtr a = parse_or();
        if (!eat(')')) throw parse_error("expected ')' in formula");
        return a;
      }
      skip();
      size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) j++;
      if (j == i) throw parse_error("expected variable in formula");
      std::string id = s.substr(i, j - i);
      i = j;
      if (id == "true") return BoolExpr::mk_const(true);
      if (id == "false") return BoolExpr::mk_const(false);
      return BoolExpr::mk_var(id);
    }
  } p{text};
  BoolPtr e = p.parse_or();
  p.skip();
  if (p.i != text.size()) throw parse_error("trailing input in formula");
  return e;
}

/// Formula for one truth-table row set: disjunction of minterms.
inline BoolPtr from_truth_table(const std::vector<std::string>& vars,
                                const std::vector<bool>& table) {
  BoolPtr out = BoolExpr::mk_const(false);
  bool any = false;
  for (size_t row = 0; row < table.size(); row++) {
    if (!table[row]) continue;
    BoolPtr minterm = BoolExpr::mk_const(true);
    bool first = true;
    for (size_t v = 0; v < vars.size(); v++) {
      bool bit = (row >> v) & 1;
      BoolPtr lit = BoolExpr::mk_var(vars[v]);
      if (!bit) lit = BoolExpr::mk_not(lit);
      minterm = first ? lit : BoolExpr::mk_and(minterm, lit);
      first = false;
    }
    out = any ? BoolExpr::mk_or(out, minterm) : minterm;
    any = true;
  }
  return any ? out : BoolExpr::mk_const(false);
}

namespace detail {

// psi as a .lit predicate, variable v reads as "register(v) = 1"
inline std::string psi_pred(const BoolPtr& e, const std::map<std::string, std::string>& reg) {
  switch (e->kind) {
  case BoolExpr::Kind::var: return "(" + reg.at(e->var) + " = 1)";
  case BoolExpr::Kind::constant: return e->value ? "true" : "false";
  case BoolExpr::Kind::band:
    return "(" + psi_pred(e->a, reg) + " && " + psi_pred(e->b, reg) + ")";
  case BoolExpr::Kind::bor:
    return "(" + psi_pred(e->a, reg) + " || " + psi_pred(e->b, reg) + ")";
  case BoolExpr::Kind::bnot: return "!" + psi_pred(e->a, reg);
  }
  return "false";
}

// p_np threads re-rendered with np_-prefixed locations and rnp_-prefixed
// registers so they cannot clash with the generated harness
inline void print_np_instr(std::ostringstream& os, const prog::Instr& i, int indent);

inline std::string np_expr(const prog::ExprPtr& e) {
  using K = prog::Expr::Kind;
  switch (e->kind) {
  case K::constant: return std::to_string(e->value);
  case K::reg: return "rnp_" + e->reg;
  case K::add: return "(" + np_expr(e->a) + " + " + np_expr(e->b) + ")";
  case K::sub: return "(" + np_expr(e->a) + " - " + np_expr(e->b) + ")";
  case K::mul: return "(" + np_expr(e->a) + " * " + np_expr(e->b) + ")";
  }
  return "0";
}

inline std::string np_pred(const prog::PredPtr& p) {
  using K = prog::Pred::Kind;
  switch (p->kind) {
  case K::constant: return p->bvalue ? "true" : "false";
  case K::cmp_eq: return "(" + np_expr(p->ea) + " = " + np_expr(p->eb) + ")";
  case K::cmp_ne: return "(" + np_expr(p->ea) + " != " + np_expr(p->eb) + ")";
  case K::cmp_lt: return "(" + np_expr(p->ea) + " < " + np_expr(p->eb) + ")";
  case K::cmp_le: return "(" + np_expr(p->ea) + " <= " + np_expr(p->eb) + ")";
  case K::land: return "(" + np_pred(p->pa) + " && " + np_pred(p->pb) + ")";
  case K::lor: return "(" + np_pred(p->pa) + " || " + np_pred(p->pb) + ")";
  case K::lnot: return "!" + np_pred(p->pa);
  }
  return "false";
}

inline void print_np_instr(std::ostringstream& os, const prog::Instr& i, int indent) {
  std::string pad(static_cast<size_t>(indent), ' ');
  using K = prog::Instr::Kind;
  switch (i.kind) {
  case K::seq:
    print_np_instr(os, *i.a, indent);
    os << ";\n";
    print_np_instr(os, *i.b, indent);
    break;
  case K::skip: os << pad << "skip"; break;
  case K::local: os << pad << "rnp_" << i.reg << " = " << np_expr(i.expr); break;
  case K::load: os << pad << "rnp_" << i.reg << " <- np_" << i.loc; break;
  case K::store: os << pad << "np_" << i.loc << " := rnp_" << i.reg; break;
  case K::fence: os << pad << prog::fence_name(i.fence); break;
  case K::branch:
    os << pad << "if (" << np_pred(i.pred) << ") {\n";
    print_np_instr(os, *i.a, indent + 2);
    os << "\n" << pad << "}";
    if (i.b->kind != K::skip) {
      os << " else {\n";
      print_np_instr(os, *i.b, indent + 2);
      os << "\n" << pad << "}";
    }
    break;
  case K::loop:
    os << pad << "while (" << np_pred(i.pred) << ") {\n";
    print_np_instr(os, *i.a, indent + 2);
    os << "\n" << pad << "}";
    break;
  }
}

} // namespace detail

//----------------------------------------------------------------------------
// P_forall-psi: portable from the source iff psi is a tautology

/// psi ranges over variables x1..xm; p_np is the non-portable seed (its
/// locations/registers are renamed apart).
inline std::string gen_forall_text(const BoolPtr& psi, int m, const prog::Program& p_np) {
  std::map<std::string, std::string> reg;
  for (int i = 1; i <= m; i++) reg["x" + std::to_string(i)] = "r" + std::to_string(i);
  std::set<std::string> used;
  bool_vars(psi, used);
  for (auto& v : used)
    if (!reg.count(v))
      throw std::invalid_argument("psi variable " + v + " out of range x1..x" + std::to_string(m));

  size_t k = std::max<size_t>(2, p_np.threads.size());
  std::ostringstream os;
  os << "program forall_psi\n";
  for (auto& [l, v] : p_np.init) os << "init np_" << l << " = " << v << "\n";

  for (size_t i = 0; i < k; i++) {
    os << "thread t" << i << "\n";
    // t_i of P_psi (skip for i >= 2)
    if (i == 0) {
      os << " r_c0 = 0;\n r_c1 = 1;\n r_c2 = 2;\n";
      for (int v = 1; v <= m; v++) os << " x" << v << " := r_c0;\n";
      // the fence keeps the assignment guess itself portable: without it,
      // reading back the x-locations under a write buffer admits executions
      // no interleaving produces, for any psi
      if (m > 0) os << " mfence;\n";
      for (int v = 1; v <= m; v++) os << " r" << v << " <- x" << v << ";\n";
      os << " if (" << detail::psi_pred(psi, reg) << ") {\n  y := r_c2\n } else {\n  y := r_c1\n };\n";
    } else if (i == 1) {
      os << " r_c1 = 1;\n";
      for (int v = 1; v <= m; v++) os << " x" << v << " := r_c1;\n";
    }
    // wrapper: read y, run the non-portable part when psi failed
    os << " ry <- y";
    if (i < p_np.threads.size()) {
      os << ";\n if (ry = 1) {\n";
      detail::print_np_instr(os, *p_np.threads[i].body, 2);
      os << "\n }\n";
    } else {
      os << "\n";
    }
  }
  return os.str();
}

inline prog::Program gen_forall(const BoolPtr& psi, int m, const prog::Program& p_np) {
  return prog::parse_program(gen_forall_text(psi, m, p_np));
}

//----------------------------------------------------------------------------
// P_s: state portable from SC to the target iff forall x exists y: psi

/// psi ranges over x1..xn (universal) and y1..ym (existential). The
/// non-portable component is a fixed store-buffering gadget that can set z
/// under the target of the (sc, tso) pair; it resets its locations to their
/// initial value 3 so only z and y can distinguish runs.
inline std::string gen_state_text(const BoolPtr& psi, int n, int m) {
  int M = n + m;
  std::vector<std::string> vloc;
  std::map<std::string, std::string> reg;
  for (int i = 1; i <= n; i++) vloc.push_back("x" + std::to_string(i));
  for (int i = 1; i <= m; i++) vloc.push_back("y" + std::to_string(i));
  for (int i = 0; i < M; i++) reg[vloc[static_cast<size_t>(i)]] = "r" + std::to_string(i + 1);
  std::set<std::string> used;
  bool_vars(psi, used);
  for (auto& v : used)
    if (!reg.count(v)) throw std::invalid_argument("psi variable " + v + " out of range");

  std::ostringstream os;
  os << "program p_state\n";
  for (int i = 0; i < M; i++) os << "init " << vloc[static_cast<size_t>(i)] << " = 3\n";
  for (int i = 1; i <= M; i++) os << "init xs" << i << " = 3\n";
  os << "init z = 3\ninit np_x = 3\ninit np_y = 3\ninit np_a = 3\n";

  // thread 1: try an assignment, check it, maybe run the gadget and pretend
  os << "thread t0\n";
  os << " r_c0 = 0;\n r_c1 = 1;\n r_c2 = 2;\n r_c3 = 3;\n";
  for (int i = 0; i < M; i++) os << " " << vloc[static_cast<size_t>(i)] << " := r_c0;\n";
  for (int i = 1; i <= M; i++) os << " rp" << i << " <- xs" << i << ";\n";
  for (int i = 0; i < M; i++)
    os << " r" << i + 1 << " <- " << vloc[static_cast<size_t>(i)] << ";\n";
  os << " if (!(";
  for (int i = 1; i <= M; i++) os << (i > 1 ? " && " : "") << "(r" << i << " = rp" << i << ")";
  if (M == 0) os << "true";
  os << ")) {\n  y := r_c2\n } else {\n";
  os << "  if (" << detail::psi_pred(psi, reg) << ") {\n   y := r_c1\n  } else {\n   y := r_c0\n  }\n };\n";
  os << " ry <- y;\n";
  os << " if (ry = 0) {\n";
  os << "  np_x := r_c1;\n  rnp0 <- np_y;\n";
  os << "  if (rnp0 = 3) {\n   rnpa <- np_a;\n   if (rnpa = 1) {\n    z := r_c1\n   }\n  };\n";
  os << "  np_x := r_c3;\n";
  os << "  rz <- z;\n";
  os << "  if (rz = 1) {\n   z := r_c3;\n   y := r_c1\n  }\n };\n";
  if (m > 0) {
    for (int i = 1; i <= m; i++)
      os << " y" << i << " := r_c1" << (i < m ? ";\n" : "\n");
  } else {
    os << " skip\n";
  }

  // thread 2: the opposite assignment, the synchronization echo, the gadget
  os << "thread t1\n";
  os << " r_c1 = 1;\n r_c3 = 3;\n";
  for (int i = 0; i < M; i++) os << " " << vloc[static_cast<size_t>(i)] << " := r_c1;\n";
  for (int i = 0; i < M; i++)
    os << " rb" << i + 1 << " <- " << vloc[static_cast<size_t>(i)] << ";\n";
  for (int i = 1; i <= M; i++) os << " xs" << i << " := rb" << i << ";\n";
  for (int i = 1; i <= M; i++) os << " xs" << i << " := r_c3;\n";
  os << " ry <- y;\n";
  os << " if (ry = 0) {\n";
  os << "  np_y := r_c1;\n  rnp1 <- np_x;\n";
  os << "  if (rnp1 = 3) {\n   np_a := r_c1\n  };\n";
  os << "  np_a := r_c3;\n  np_y := r_c3\n }\n";
  return os.str();
}

inline prog::Program gen_state(const BoolPtr& psi, int n, int m) {
  return prog::parse_program(gen_state_text(psi, n, m));
}

} // namespace porthos::gen
