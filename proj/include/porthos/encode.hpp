#pragma once

// The SMT encoding: control flow, SSA data flow, execution axioms, relation
// elaboration (including recursive definitions via iteration certificates),
// acyclicity ranks, cycle guessing, deadness, and final-state constraints.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "porthos/cat.hpp"
#include "porthos/events.hpp"
#include "porthos/formula.hpp"
#include "porthos/state.hpp"

namespace porthos::encode {

using formula::Formula;
using formula::NodePtr;
using events::EventGraph;
using events::PairSet;

struct PortabilityOptions {
  bool dead = false;
  bool dead_strict = false; // exclude init writes from range(rf) in deadness
  bool with_sigma = false;  // declare final-state variables
};

struct EncodingInfo {
  // qualified relation name ("tgt.hb") -> candidate pairs with variables
  std::map<std::string, std::vector<std::pair<int, int>>> named_rels;

  struct AxiomInfo {
    std::string qual; // "src.tso"
    std::string label;
    cat::Axiom::Kind kind = cat::Axiom::Kind::acyclic;
    std::vector<std::pair<int, int>> may_pairs;
  };
  std::vector<AxiomInfo> src_axioms;

  std::map<std::string, std::string> reg_final; // "tid.reg" -> final SSA variable
  std::vector<std::string> sigma_locs;
  size_t subterm_count = 0;
  std::string prefix; // variable prefix, used by the two-program encoding
};

//----------------------------------------------------------------------------

class Encoder {
public:
  /// One elaborated (sub)term: its variable family and candidate pairs.
  struct Entry {
    std::string relname;
    PairSet may;
    bool is_base = false;
    cat::BaseRel base = cat::BaseRel::po;
  };

  Encoder(Formula& f, const EventGraph& g, std::string prefix = "")
      : f_(f), g_(g), prefix_(std::move(prefix)) {
    info_.prefix = prefix_;
  }

  const EncodingInfo& info() const { return info_; }
  EncodingInfo take_info() { return std::move(info_); }

  // -- names -----------------------------------------------------------------
  std::string cf_name(prog::Iid iid) const { return prefix_ + "cf_" + std::to_string(iid); }
  std::string ex_name(int eid) const { return prefix_ + "ex_" + std::to_string(eid); }
  std::string clk_name(int eid) const { return prefix_ + "clk_" + std::to_string(eid); }
  std::string val_name(int eid) const { return prefix_ + "val_ev" + std::to_string(eid); }
  std::string reg_name(const std::string& tid, const std::string& reg, int idx) const {
    return prefix_ + "val_" + tid + "." + reg + "." + std::to_string(idx);
  }
  std::string rel_name(const std::string& rel, int e1, int e2) const {
    return prefix_ + "rel_" + rel + "_" + std::to_string(e1) + "_" + std::to_string(e2);
  }
  std::string phi_name(const std::string& rel, int e1, int e2) const {
    return prefix_ + "phi_" + rel + "_" + std::to_string(e1) + "_" + std::to_string(e2);
  }
  std::string psi_name(const std::string& label, int e) const {
    return prefix_ + "psi_" + label + "_" + std::to_string(e);
  }
  std::string cnode_name(const std::string& label, int e) const {
    return prefix_ + "C_" + label + "_" + std::to_string(e);
  }
  std::string cedge_name(const std::string& label, int e1, int e2) const {
    return prefix_ + "Cedge_" + label + "_" + std::to_string(e1) + "_" + std::to_string(e2);
  }
  std::string viol_name(const std::string& label) const { return prefix_ + "viol_" + label; }
  std::string sigma_name(const std::string& loc) const { return prefix_ + "sigma_" + loc; }

  NodePtr ex(int eid) { return f_.bv(ex_name(eid)); }
  NodePtr cf(prog::Iid iid) { return f_.bv(cf_name(iid)); }

  // -- control flow -----------------------------------------------------------
  void control_flow() {
    for (auto& t : g_.program.threads) {
      declare_cf(*t.body);
      f_.assert_(cf(t.body->iid)); // top-level instruction executes
    }
    for (auto& e : g_.events) {
      if (e.is_init()) f_.assert_(ex(e.eid));
      else f_.assert_(Formula::iff(ex(e.eid), cf(e.iid)));
    }
  }

  // -- data flow (SSA with branch balancing) ----------------------------------
  void data_flow() {
    for (auto& [l, eid] : g_.init_event)
      f_.assert_(f_.eq(f_.iv(val_name(eid)), Formula::ic(g_.init_values.at(l))));
    for (auto& t : g_.program.threads) {
      Versions vs;
      walk_df(*t.body, t.tid, vs);
      for (auto& [reg, idx] : vs)
        info_.reg_final[t.tid + "." + reg] = reg_name(t.tid, reg, idx);
    }
    // memory data flow: a read agrees with the write it reads from
    for (auto& [w, r] : g_.rf_may)
      f_.assert_(Formula::implies(f_.bv(rel_name("rf", w, r)),
                                  f_.eq(f_.iv(val_name(w)), f_.iv(val_name(r)))));
  }

  // -- execution axioms: rf functional and total, co a per-location order ------
  void base_axioms() {
    // rf: per executed read exactly one source, endpoints executed
    std::map<int, std::vector<int>> cands;
    for (auto& [w, r] : g_.rf_may) cands[r].push_back(w);
    for (auto& [r, ws] : cands) {
      std::vector<NodePtr> any;
      for (int w : ws) {
        NodePtr v = f_.bv(rel_name("rf", w, r));
        f_.assert_(Formula::implies(v, Formula::land({ex(w), ex(r)})));
        any.push_back(v);
      }
      f_.assert_(Formula::implies(ex(r), Formula::lor(any)));
      for (size_t i = 0; i < ws.size(); i++)
        for (size_t j = i + 1; j < ws.size(); j++)
          f_.assert_(Formula::lnot(Formula::land(
              {f_.bv(rel_name("rf", ws[i], r)), f_.bv(rel_name("rf", ws[j], r))})));
    }

    // co via integer clocks; init writes pinned first
    for (auto& e : g_.events) {
      if (!e.is_write()) continue;
      NodePtr clk = f_.iv(clk_name(e.eid));
      if (e.is_init()) f_.assert_(f_.eq(clk, Formula::ic(0)));
      else f_.assert_(f_.le(Formula::ic(1), clk));
    }
    for (auto& [w1, w2] : g_.co_may)
      f_.assert_(Formula::iff(f_.bv(rel_name("co", w1, w2)),
                              Formula::land({ex(w1), ex(w2),
                                             f_.lt(f_.iv(clk_name(w1)), f_.iv(clk_name(w2)))})));
    // totality per location over executed non-init writes
    for (auto& l : g_.locations()) {
      auto ws = g_.writes_of_loc(l);
      for (size_t i = 0; i < ws.size(); i++)
        for (size_t j = i + 1; j < ws.size(); j++) {
          if (g_.ev(ws[i]).is_init() || g_.ev(ws[j]).is_init()) continue;
          f_.assert_(Formula::lor({f_.bv(rel_name("co", ws[i], ws[j])),
                                   f_.bv(rel_name("co", ws[j], ws[i])),
                                   Formula::lnot(ex(ws[i])), Formula::lnot(ex(ws[j]))}));
        }
    }
  }

  // -- relation elaboration -----------------------------------------------------

  /// Elaborates all definitions of a model under a side prefix ("tgt"/"src").
  void elaborate_model(const cat::MemoryModel& m, const std::string& side) {
    cat::RecursionPlan plan = cat::recursion_plan(m);
    for (auto& scc : plan.sccs) {
      if (scc.size() == 1 && !plan.is_recursive(scc[0])) {
        elaborate_plain_name(m, side, scc[0]);
      } else {
        elaborate_recursive_scc(m, side, scc);
      }
    }
  }

  /// Target side: every axiom holds (ranks for acyclicity).
  void assert_axioms_hold(const cat::MemoryModel& m, const std::string& side) {
    for (auto& ax : m.axioms) {
      Entry& e = elaborate_term(qualify(ax.term, side));
      std::string qual = side + "." + ax.label;
      if (ax.kind == cat::Axiom::Kind::acyclic) {
        for (auto& [e1, e2] : e.may)
          f_.assert_(Formula::implies(rel(e, {e1, e2}),
                                      f_.lt(f_.iv(psi_name(qual, e1)), f_.iv(psi_name(qual, e2)))));
      } else {
        for (auto& [e1, e2] : e.may)
          if (e1 == e2) f_.assert_(Formula::lnot(rel(e, {e1, e2})));
      }
    }
  }

  /// Source side: at least one axiom is violated (selector per axiom).
  void assert_violation(const cat::MemoryModel& m, const std::string& side) {
    std::vector<NodePtr> selectors;
    for (auto& ax : m.axioms) {
      Entry& e = elaborate_term(qualify(ax.term, side));
      std::string qual = side + "." + ax.label;
      NodePtr viol = f_.bv(viol_name(qual));
      selectors.push_back(viol);
      EncodingInfo::AxiomInfo ainfo;
      ainfo.qual = qual;
      ainfo.label = ax.label;
      ainfo.kind = ax.kind;
      ainfo.may_pairs.assign(e.may.begin(), e.may.end());
      info_.src_axioms.push_back(std::move(ainfo));
      if (ax.kind == cat::Axiom::Kind::irreflexive) {
        std::vector<NodePtr> diag;
        for (auto& [e1, e2] : e.may)
          if (e1 == e2) diag.push_back(rel(e, {e1, e2}));
        f_.assert_(Formula::implies(viol, Formula::lor(diag)));
      } else {
        encode_cyclic(e, qual, viol);
      }
    }
    f_.assert_(Formula::lor(selectors));
  }

  /// Cycle-guessing gadget for one acyclic axiom, guarded by `guard`.
  void encode_cyclic(Entry& e, const std::string& qual, NodePtr guard) {
    std::set<int> nodes;
    std::map<int, std::vector<int>> in, out;
    for (auto& [e1, e2] : e.may) {
      nodes.insert(e1);
      nodes.insert(e2);
      out[e1].push_back(e2);
      in[e2].push_back(e1);
    }
    // c_e: a guessed edge lies in the relation and on guessed nodes
    for (auto& [e1, e2] : e.may)
      f_.assert_(Formula::implies(
          guard, Formula::implies(f_.bv(cedge_name(qual, e1, e2)),
                                  Formula::land({rel(e, {e1, e2}), f_.bv(cnode_name(qual, e1)),
                                                 f_.bv(cnode_name(qual, e2))}))));
    // c_n: every guessed node has an incoming and an outgoing guessed edge
    std::vector<NodePtr> some_node;
    for (int n : nodes) {
      std::vector<NodePtr> ins, outs;
      for (int p : in[n]) ins.push_back(f_.bv(cedge_name(qual, p, n)));
      for (int s : out[n]) outs.push_back(f_.bv(cedge_name(qual, n, s)));
      f_.assert_(Formula::implies(
          guard, Formula::implies(f_.bv(cnode_name(qual, n)),
                                  Formula::land({Formula::lor(ins), Formula::lor(outs)}))));
      some_node.push_back(f_.bv(cnode_name(qual, n)));
    }
    f_.assert_(Formula::implies(guard, Formula::lor(some_node)));
  }

  // -- syntactic deadness -------------------------------------------------------
  void deadness(bool strict) {
    // domain(cd) subset of range(rf)
    std::set<int> doms;
    for (auto& [r, e] : g_.cd) doms.insert(r);
    for (int r : doms) {
      std::vector<NodePtr> srcs;
      for (auto& [w, rr] : g_.rf_may)
        if (rr == r && (!strict || !g_.ev(w).is_init()))
          srcs.push_back(f_.bv(rel_name("rf", w, r)));
      f_.assert_(Formula::implies(ex(r), Formula::lor(srcs)));
    }
    // imm(co);imm(co);imm(co^-1) subset of rf^?;(po;(rf^-1)^?)^?
    using cat::Term;
    auto co = Term::mk_base(cat::BaseRel::co);
    auto rf = Term::mk_base(cat::BaseRel::rf);
    auto po = Term::mk_base(cat::BaseRel::po);
    auto imm = [&](cat::TermPtr r) {
      return Term::mk_bin(Term::Kind::diff, r,
                          Term::mk_bin(Term::Kind::seq, r, Term::mk_un(Term::Kind::plus, r)));
    };
    auto coinv = Term::mk_un(Term::Kind::inverse, co);
    auto lhs = Term::mk_bin(Term::Kind::seq, imm(co),
                            Term::mk_bin(Term::Kind::seq, imm(co), imm(coinv)));
    auto rhs = Term::mk_bin(
        Term::Kind::seq, Term::mk_un(Term::Kind::opt, rf),
        Term::mk_un(Term::Kind::opt,
                    Term::mk_bin(Term::Kind::seq, po,
                                 Term::mk_un(Term::Kind::opt,
                                             Term::mk_un(Term::Kind::inverse, rf)))));
    Entry& el = elaborate_term(lhs);
    Entry& er = elaborate_term(rhs);
    for (auto& p : el.may) f_.assert_(Formula::implies(rel(el, p), rel(er, p)));
  }

  // -- final-state variables ------------------------------------------------------
  void sigma_vars() {
    if (!info_.sigma_locs.empty()) return;
    for (auto& l : g_.locations()) {
      NodePtr sv = f_.iv(sigma_name(l));
      auto ws = g_.writes_of_loc(l);
      for (int w : ws) {
        std::vector<NodePtr> comax{ex(w)};
        for (int w2 : ws)
          if (g_.co_may.count({w, w2}))
            comax.push_back(Formula::lnot(f_.bv(rel_name("co", w, w2))));
        f_.assert_(Formula::implies(Formula::land(comax), f_.eq(sv, f_.iv(val_name(w)))));
      }
      info_.sigma_locs.push_back(l);
    }
  }

  void state_equals(const State& sigma) {
    sigma_vars();
    for (auto& [l, v] : sigma.locations) {
      if (!g_.init_values.count(l)) throw std::invalid_argument("unknown location " + l);
      f_.assert_(f_.eq(f_.iv(sigma_name(l)), Formula::ic(v)));
    }
    for (auto& [r, v] : sigma.registers)
      f_.assert_(f_.eq(f_.iv(reg_final_var(r)), Formula::ic(v)));
  }

  /// not (state == sigma), for the refinement loop's blocking clauses.
  void block_state(const State& sigma) {
    sigma_vars();
    std::vector<NodePtr> diffs;
    for (auto& [l, v] : sigma.locations)
      diffs.push_back(Formula::lnot(f_.eq(f_.iv(sigma_name(l)), Formula::ic(v))));
    for (auto& [r, v] : sigma.registers)
      diffs.push_back(Formula::lnot(f_.eq(f_.iv(reg_final_var(r)), Formula::ic(v))));
    f_.assert_(Formula::lor(diffs));
  }

  std::string reg_final_var(const std::string& key) const {
    auto it = info_.reg_final.find(key);
    if (it == info_.reg_final.end())
      throw std::invalid_argument("unknown register " + key);
    return it->second;
  }

  size_t subterm_count() const { return info_.subterm_count; }

private:
  // -- SSA helpers ------------------------------------------------------------
  using Versions = std::map<std::string, int>;

  NodePtr reg_var(const std::string& tid, const std::string& reg, Versions& vs) {
    auto it = vs.find(reg);
    int idx = it == vs.end() ? 0 : it->second;
    std::string name = reg_name(tid, reg, idx);
    if (idx == 0 && !zero_asserted_.count(name)) {
      zero_asserted_.insert(name);
      f_.assert_(f_.eq(f_.iv(name), Formula::ic(0))); // registers start at 0
    }
    return f_.iv(name);
  }

  NodePtr encode_expr(const prog::ExprPtr& e, const std::string& tid, Versions& vs) {
    using K = prog::Expr::Kind;
    switch (e->kind) {
    case K::constant: return Formula::ic(e->value);
    case K::reg: return reg_var(tid, e->reg, vs);
    case K::add: return f_.add(encode_expr(e->a, tid, vs), encode_expr(e->b, tid, vs));
    case K::sub: return f_.sub(encode_expr(e->a, tid, vs), encode_expr(e->b, tid, vs));
    case K::mul: return f_.mul(encode_expr(e->a, tid, vs), encode_expr(e->b, tid, vs));
    }
    return Formula::ic(0);
  }

  NodePtr encode_pred(const prog::PredPtr& p, const std::string& tid, Versions& vs) {
    using K = prog::Pred::Kind;
    switch (p->kind) {
    case K::constant: return p->bvalue ? Formula::t() : Formula::f();
    case K::cmp_eq: return f_.eq(encode_expr(p->ea, tid, vs), encode_expr(p->eb, tid, vs));
    case K::cmp_ne:
      return Formula::lnot(f_.eq(encode_expr(p->ea, tid, vs), encode_expr(p->eb, tid, vs)));
    case K::cmp_lt: return f_.lt(encode_expr(p->ea, tid, vs), encode_expr(p->eb, tid, vs));
    case K::cmp_le: return f_.le(encode_expr(p->ea, tid, vs), encode_expr(p->eb, tid, vs));
    case K::land:
      return Formula::land({encode_pred(p->pa, tid, vs), encode_pred(p->pb, tid, vs)});
    case K::lor:
      return Formula::lor({encode_pred(p->pa, tid, vs), encode_pred(p->pb, tid, vs)});
    case K::lnot: return Formula::lnot(encode_pred(p->pa, tid, vs));
    }
    return Formula::t();
  }

  void walk_df(const prog::Instr& i, const std::string& tid, Versions& vs) {
    using K = prog::Instr::Kind;
    switch (i.kind) {
    case K::skip:
    case K::fence: break;
    case K::local: {
      NodePtr rhs = encode_expr(i.expr, tid, vs);
      int idx = ++vs[i.reg];
      f_.assert_(Formula::implies(cf(i.iid), f_.eq(f_.iv(reg_name(tid, i.reg, idx)), rhs)));
      break;
    }
    case K::load: {
      int e = g_.event_of_iid.at(i.iid);
      int idx = ++vs[i.reg];
      f_.assert_(Formula::implies(
          cf(i.iid), f_.eq(f_.iv(reg_name(tid, i.reg, idx)), f_.iv(val_name(e)))));
      break;
    }
    case K::store: {
      int e = g_.event_of_iid.at(i.iid);
      NodePtr src = reg_var(tid, i.reg, vs);
      f_.assert_(Formula::implies(cf(i.iid), f_.eq(f_.iv(val_name(e)), src)));
      break;
    }
    case K::seq:
      walk_df(*i.a, tid, vs);
      walk_df(*i.b, tid, vs);
      break;
    case K::branch: {
      NodePtr b = encode_pred(i.pred, tid, vs);
      f_.assert_(Formula::iff(cf(i.a->iid), Formula::land({cf(i.iid), b})));
      f_.assert_(Formula::iff(cf(i.b->iid), Formula::land({cf(i.iid), Formula::lnot(b)})));
      Versions v1 = vs, v2 = vs;
      walk_df(*i.a, tid, v1);
      walk_df(*i.b, tid, v2);
      // balance both arms to the same assignment count per register
      std::set<std::string> regs;
      for (auto& [r, n] : v1) regs.insert(r);
      for (auto& [r, n] : v2) regs.insert(r);
      for (auto& r : regs) {
        int pre = vs.count(r) ? vs[r] : 0;
        int n1 = v1.count(r) ? v1[r] : 0;
        int n2 = v2.count(r) ? v2[r] : 0;
        int q = std::max(n1, n2);
        if (n1 < q)
          f_.assert_(Formula::implies(
              cf(i.a->iid), f_.eq(f_.iv(reg_name(tid, r, q)), f_.iv(reg_name(tid, r, n1)))));
        if (n2 < q)
          f_.assert_(Formula::implies(
              cf(i.b->iid), f_.eq(f_.iv(reg_name(tid, r, q)), f_.iv(reg_name(tid, r, n2)))));
        // a skipped branch keeps the old value
        if (q > pre)
          f_.assert_(Formula::implies(
              Formula::lnot(cf(i.iid)),
              f_.eq(f_.iv(reg_name(tid, r, q)), f_.iv(reg_name(tid, r, pre)))));
        if (q > 0) vs[r] = q;
      }
      break;
    }
    case K::loop: throw events::non_acyclic_program("loop in data flow");
    }
  }

  void declare_cf(const prog::Instr& i) {
    f_.bool_var(cf_name(i.iid));
    using K = prog::Instr::Kind;
    if (i.kind == K::seq) {
      declare_cf(*i.a);
      declare_cf(*i.b);
      f_.assert_(Formula::iff(cf(i.iid), Formula::land({cf(i.a->iid), cf(i.b->iid)})));
      f_.assert_(Formula::iff(cf(i.a->iid), cf(i.b->iid)));
    } else if (i.kind == K::branch) {
      declare_cf(*i.a);
      declare_cf(*i.b);
      f_.assert_(Formula::iff(cf(i.iid), Formula::lor({cf(i.a->iid), cf(i.b->iid)})));
    } else if (i.kind == K::loop) {
      throw events::non_acyclic_program("loop in control flow");
    }
  }

  // -- elaboration ------------------------------------------------------------
public:
  /// Boolean for "pair is in the relation": a variable inside the may set,
  /// constant false outside.
  NodePtr rel(const Entry& e, std::pair<int, int> p) {
    if (!e.may.count(p)) return Formula::f();
    if (e.is_base) return base_var(e.base, p);
    return f_.bv(rel_name(e.relname, p.first, p.second));
  }

  Entry& elaborate_term(const cat::TermPtr& t) {
    std::string key = cat::term_str(t);
    auto it = table_.find(key);
    if (it != table_.end()) return it->second;
    Entry e = build_entry(t);
    auto [pos, fresh] = table_.emplace(key, std::move(e));
    return pos->second;
  }

private:
  /// Base relation variables are created on first use, with their defining
  /// constraint (both endpoints executed; fences need an executed fence).
  NodePtr base_var(cat::BaseRel b, std::pair<int, int> p) {
    std::string rn = cat::base_name(b);
    std::string vn = rel_name(rn, p.first, p.second);
    if (!defined_base_.count(vn)) {
      defined_base_.insert(vn);
      NodePtr v = f_.bv(vn);
      switch (b) {
      case cat::BaseRel::rf:
      case cat::BaseRel::co:
        break; // guessed; constrained by base_axioms
      case cat::BaseRel::mfence:
      case cat::BaseRel::sync:
      case cat::BaseRel::lwsync:
      case cat::BaseRel::isync: {
        prog::FenceKind k = b == cat::BaseRel::mfence  ? prog::FenceKind::mfence
                            : b == cat::BaseRel::sync  ? prog::FenceKind::sync
                            : b == cat::BaseRel::lwsync ? prog::FenceKind::lwsync
                                                        : prog::FenceKind::isync;
        const events::Event& a = g_.ev(p.first);
        const events::Event& bb = g_.ev(p.second);
        std::vector<NodePtr> fs;
        for (auto* fi : g_.fences_between(k, a.thread, a.pos, bb.pos))
          fs.push_back(cf(fi->iid));
        f_.assert_(Formula::iff(
            v, Formula::land({ex(p.first), ex(p.second), Formula::lor(fs)})));
        break;
      }
      default:
        f_.assert_(Formula::iff(v, Formula::land({ex(p.first), ex(p.second)})));
      }
    }
    return f_.bv(vn);
  }

  PairSet base_may(cat::BaseRel b) const {
    switch (b) {
    case cat::BaseRel::po: return g_.po;
    case cat::BaseRel::rf: return g_.rf_may;
    case cat::BaseRel::co: return g_.co_may;
    case cat::BaseRel::ad: return g_.ad;
    case cat::BaseRel::dd: return g_.dd;
    case cat::BaseRel::cd: return g_.cd;
    case cat::BaseRel::sthd: return g_.sthd;
    case cat::BaseRel::sloc: return g_.sloc;
    case cat::BaseRel::mfence: return g_.fence_rel.at(prog::FenceKind::mfence);
    case cat::BaseRel::sync: return g_.fence_rel.at(prog::FenceKind::sync);
    case cat::BaseRel::lwsync: return g_.fence_rel.at(prog::FenceKind::lwsync);
    case cat::BaseRel::isync: return g_.fence_rel.at(prog::FenceKind::isync);
    }
    return {};
  }

  std::string fresh_subterm_name() { return "s" + std::to_string(info_.subterm_count++); }

  Entry build_entry(const cat::TermPtr& t) {
    using K = cat::Term::Kind;
    switch (t->kind) {
    case K::base: {
      Entry e;
      e.is_base = true;
      e.base = t->base;
      e.relname = cat::base_name(t->base);
      e.may = base_may(t->base);
      return e;
    }
    case K::name: {
      // names are elaborated by elaborate_model before any reference
      throw std::runtime_error("elaborate: name '" + t->name + "' referenced before definition");
    }
    case K::empty: {
      Entry e;
      e.relname = "empty";
      return e;
    }
    case K::union_:
    case K::inter:
    case K::diff: {
      Entry& a = elaborate_term(t->a);
      Entry& b = elaborate_term(t->b);
      Entry e;
      e.relname = fresh_subterm_name();
      if (t->kind == K::union_) e.may = events::detail::pairs_union(a.may, b.may);
      else if (t->kind == K::inter) e.may = events::detail::pairs_inter(a.may, b.may);
      else e.may = a.may;
      for (auto& p : e.may) {
        NodePtr def;
        if (t->kind == K::union_) def = Formula::lor({rel(a, p), rel(b, p)});
        else if (t->kind == K::inter) def = Formula::land({rel(a, p), rel(b, p)});
        else def = Formula::land({rel(a, p), Formula::lnot(rel(b, p))});
        f_.assert_(Formula::iff(f_.bv(rel_name(e.relname, p.first, p.second)), def));
      }
      return e;
    }
    case K::seq: {
      Entry& a = elaborate_term(t->a);
      Entry& b = elaborate_term(t->b);
      Entry e;
      e.relname = fresh_subterm_name();
      e.may = events::detail::pairs_compose(a.may, b.may);
      define_composition(e, a, b);
      return e;
    }
    case K::inverse: {
      Entry& a = elaborate_term(t->a);
      Entry e;
      e.relname = fresh_subterm_name();
      for (auto& [x, y] : a.may) e.may.insert({y, x});
      for (auto& p : e.may)
        f_.assert_(Formula::iff(f_.bv(rel_name(e.relname, p.first, p.second)),
                                rel(a, {p.second, p.first})));
      return e;
    }
    case K::plus: {
      // iterative squaring: tc_{i+1} <=> tc_i | (tc_i ; tc_i)
      Entry* cur = &elaborate_term(t->a);
      int n = g_.n_events();
      int levels = 0;
      while ((1 << levels) < std::max(n, 1)) levels++;
      for (int i = 0; i < levels; i++) {
        Entry e;
        e.relname = fresh_subterm_name();
        PairSet sq = events::detail::pairs_compose(cur->may, cur->may);
        e.may = events::detail::pairs_union(cur->may, sq);
        for (auto& p : e.may) {
          std::vector<NodePtr> mids;
          for (int e3 = 0; e3 < n; e3++)
            if (cur->may.count({p.first, e3}) && cur->may.count({e3, p.second}))
              mids.push_back(Formula::land({rel(*cur, {p.first, e3}), rel(*cur, {e3, p.second})}));
          f_.assert_(Formula::iff(f_.bv(rel_name(e.relname, p.first, p.second)),
                                  Formula::lor({rel(*cur, p), Formula::lor(mids)})));
        }
        std::string key = "tc" + std::to_string(i + 1) + "(" + cat::term_str(t->a) + ")";
        auto [pos, fresh] = table_.emplace(key, std::move(e));
        cur = &pos->second;
      }
      return *cur; // copied into the table slot by elaborate_term
    }
    case K::star:
    case K::opt: {
      Entry* inner;
      if (t->kind == K::star) inner = &elaborate_term(cat::Term::mk_un(K::plus, t->a));
      else inner = &elaborate_term(t->a);
      Entry e;
      e.relname = fresh_subterm_name();
      e.may = inner->may;
      for (auto& ev : g_.events) e.may.insert({ev.eid, ev.eid});
      for (auto& p : e.may) {
        NodePtr base = rel(*inner, p);
        NodePtr def = p.first == p.second ? Formula::lor({base, ex(p.first)}) : base;
        f_.assert_(Formula::iff(f_.bv(rel_name(e.relname, p.first, p.second)), def));
      }
      return e;
    }
    case K::idset: {
      Entry e;
      e.relname = fresh_subterm_name();
      for (int ev : events::events_in_set(g_, t->s1)) e.may.insert({ev, ev});
      for (auto& p : e.may)
        f_.assert_(Formula::iff(f_.bv(rel_name(e.relname, p.first, p.second)), ex(p.first)));
      return e;
    }
    case K::cartesian: {
      Entry e;
      e.relname = fresh_subterm_name();
      for (int a : events::events_in_set(g_, t->s1))
        for (int b : events::events_in_set(g_, t->s2)) e.may.insert({a, b});
      for (auto& p : e.may)
        f_.assert_(Formula::iff(f_.bv(rel_name(e.relname, p.first, p.second)),
                                Formula::land({ex(p.first), ex(p.second)})));
      return e;
    }
    }
    throw std::runtime_error("elaborate: bad term");
  }

  void define_composition(Entry& e, Entry& a, Entry& b) {
    int n = g_.n_events();
    for (auto& p : e.may) {
      std::vector<NodePtr> mids;
      for (int e3 = 0; e3 < n; e3++)
        if (a.may.count({p.first, e3}) && b.may.count({e3, p.second}))
          mids.push_back(Formula::land({rel(a, {p.first, e3}), rel(b, {e3, p.second})}));
      f_.assert_(
          Formula::iff(f_.bv(rel_name(e.relname, p.first, p.second)), Formula::lor(mids)));
    }
  }

  /// Rewrites Name nodes to side-qualified names so both models can be
  /// elaborated into one formula without capture.
  cat::TermPtr qualify(const cat::TermPtr& t, const std::string& side) {
    using K = cat::Term::Kind;
    if (t->kind == K::name) return cat::Term::mk_name(side + "." + t->name);
    if (!t->a && !t->b) return t;
    auto n = std::make_shared<cat::Term>(*t);
    if (t->a) n->a = qualify(t->a, side);
    if (t->b) n->b = qualify(t->b, side);
    return n;
  }

  void elaborate_plain_name(const cat::MemoryModel& m, const std::string& side,
                            const std::string& name) {
    cat::TermPtr qdef = qualify(*m.find_def(name), side);
    Entry& child = elaborate_term(qdef);
    Entry e;
    std::string qual = side + "." + name;
    e.relname = qual;
    e.may = child.may;
    for (auto& p : e.may)
      f_.assert_(Formula::iff(f_.bv(rel_name(qual, p.first, p.second)), rel(child, p)));
    info_.named_rels[qual].assign(e.may.begin(), e.may.end());
    table_.emplace(cat::term_str(cat::Term::mk_name(qual)), std::move(e));
  }

  static void flatten_unions(const cat::TermPtr& t, std::vector<cat::TermPtr>& out) {
    if (t->kind == cat::Term::Kind::union_) {
      flatten_unions(t->a, out);
      flatten_unions(t->b, out);
    } else {
      out.push_back(t);
    }
  }

  static bool mentions(const cat::TermPtr& t, const std::set<std::string>& names) {
    if (!t) return false;
    if (t->kind == cat::Term::Kind::name && names.count(t->name)) return true;
    return mentions(t->a, names) || mentions(t->b, names);
  }

  void elaborate_recursive_scc(const cat::MemoryModel& m, const std::string& side,
                               const std::vector<std::string>& scc) {
    std::set<std::string> qscc;
    std::map<std::string, cat::TermPtr> qdefs;
    for (auto& n : scc) {
      qscc.insert(side + "." + n);
      qdefs[side + "." + n] = qualify(*m.find_def(n), side);
    }

    // 1. elaborate all SCC-free subterms up front (also fixes their may sets)
    //    and compute the joint may fixpoint for the SCC members
    std::map<std::string, PairSet> may;
    for (auto& qn : qscc) may[qn] = {};
    for (;;) {
      bool changed = false;
      for (auto& [qn, qd] : qdefs) {
        PairSet v = may_in_scc(qd, qscc, may);
        if (v != may[qn]) {
          may[qn] = std::move(v);
          changed = true;
        }
      }
      if (!changed) break;
    }

    // 2. declare relation and certificate variables
    for (auto& [qn, ps] : may) {
      Entry e;
      e.relname = qn;
      e.may = ps;
      info_.named_rels[qn].assign(ps.begin(), ps.end());
      table_.emplace(cat::term_str(cat::Term::mk_name(qn)), std::move(e));
    }

    // 3. iteration-certificate definitions:
    //    rel_n(p) <=> OR_alt (alt with phi guards), plus the closure side
    //    alt-without-guards => rel_n(p)
    for (auto& [qn, qd] : qdefs) {
      Entry& en = table_.at(cat::term_str(cat::Term::mk_name(qn)));
      std::vector<cat::TermPtr> alts;
      flatten_unions(qd, alts);
      for (auto& p : en.may) {
        NodePtr phi_n = f_.iv(phi_name(qn, p.first, p.second));
        std::vector<NodePtr> guarded;
        for (auto& alt : alts)
          guarded.push_back(encode_alt(alt, p, &phi_n, qscc, may));
        f_.assert_(Formula::iff(f_.bv(rel_name(qn, p.first, p.second)),
                                Formula::lor(guarded)));
        for (auto& alt : alts)
          f_.assert_(Formula::implies(encode_alt(alt, p, nullptr, qscc, may),
                                      f_.bv(rel_name(qn, p.first, p.second))));
      }
    }
  }

  PairSet may_in_scc(const cat::TermPtr& t, const std::set<std::string>& qscc,
                     const std::map<std::string, PairSet>& sccMay) {
    using K = cat::Term::Kind;
    if (t->kind == K::name && qscc.count(t->name)) return sccMay.at(t->name);
    if (!mentions(t, qscc)) return elaborate_term(t).may;
    switch (t->kind) {
    case K::union_:
      return events::detail::pairs_union(may_in_scc(t->a, qscc, sccMay),
                                         may_in_scc(t->b, qscc, sccMay));
    case K::inter:
      return events::detail::pairs_inter(may_in_scc(t->a, qscc, sccMay),
                                         may_in_scc(t->b, qscc, sccMay));
    case K::diff: {
      if (mentions(t->b, qscc))
        throw std::runtime_error("non-monotone recursion: difference of a recursive relation");
      return may_in_scc(t->a, qscc, sccMay);
    }
    case K::seq:
      return events::detail::pairs_compose(may_in_scc(t->a, qscc, sccMay),
                                           may_in_scc(t->b, qscc, sccMay));
    case K::inverse: {
      PairSet r;
      for (auto& [x, y] : may_in_scc(t->a, qscc, sccMay)) r.insert({y, x});
      return r;
    }
    default:
      throw std::runtime_error("unsupported operator over recursive relation: " +
                               cat::term_str(t));
    }
  }

  /// One alternative of a recursive definition at one pair. With `phi_n`,
  /// every same-SCC reference m at pair q contributes
  /// rel_m(q) && phi_n > phi_m(q); without it the reference is plain.
  NodePtr encode_alt(const cat::TermPtr& t, std::pair<int, int> p, const NodePtr* phi_n,
                     const std::set<std::string>& qscc,
                     const std::map<std::string, PairSet>& sccMay) {
    using K = cat::Term::Kind;
    if (t->kind == K::name && qscc.count(t->name)) {
      if (!sccMay.at(t->name).count(p)) return Formula::f();
      NodePtr r = f_.bv(rel_name(t->name, p.first, p.second));
      if (!phi_n) return r;
      NodePtr phi_m = f_.iv(phi_name(t->name, p.first, p.second));
      return Formula::land({r, f_.lt(phi_m, *phi_n)});
    }
    if (!mentions(t, qscc)) {
      Entry& e = elaborate_term(t);
      return rel(e, p);
    }
    switch (t->kind) {
    case K::union_:
      return Formula::lor({encode_alt(t->a, p, phi_n, qscc, sccMay),
                           encode_alt(t->b, p, phi_n, qscc, sccMay)});
    case K::inter:
      return Formula::land({encode_alt(t->a, p, phi_n, qscc, sccMay),
                            encode_alt(t->b, p, phi_n, qscc, sccMay)});
    case K::diff:
      return Formula::land({encode_alt(t->a, p, phi_n, qscc, sccMay),
                            Formula::lnot(encode_alt(t->b, p, nullptr, qscc, sccMay))});
    case K::seq: {
      std::vector<NodePtr> mids;
      PairSet ma = may_in_scc(t->a, qscc, sccMay);
      PairSet mb = may_in_scc(t->b, qscc, sccMay);
      for (int e3 = 0; e3 < g_.n_events(); e3++) {
        if (!ma.count({p.first, e3}) || !mb.count({e3, p.second})) continue;
        mids.push_back(Formula::land({encode_alt(t->a, {p.first, e3}, phi_n, qscc, sccMay),
                                      encode_alt(t->b, {e3, p.second}, phi_n, qscc, sccMay)}));
      }
      return Formula::lor(mids);
    }
    case K::inverse: return encode_alt(t->a, {p.second, p.first}, phi_n, qscc, sccMay);
    default:
      throw std::runtime_error("unsupported operator over recursive relation: " +
                               cat::term_str(t));
    }
  }

  Formula& f_;
  const EventGraph& g_;
  std::string prefix_;
  EncodingInfo info_;
  std::map<std::string, Entry> table_;
  std::set<std::string> defined_base_;
  std::set<std::string> zero_asserted_;
};

//----------------------------------------------------------------------------
// whole-query constructors

struct Encoding {
  Formula formula;
  EncodingInfo info;
};

/// phi_CF && phi_DF && base && target axioms && source violation.
inline Encoding encode_portability(const EventGraph& g, const cat::MemoryModel& m_src,
                                   const cat::MemoryModel& m_tgt,
                                   const PortabilityOptions& opts = {}) {
  Encoding out;
  Encoder enc(out.formula, g);
  enc.control_flow();
  enc.data_flow();
  enc.base_axioms();
  enc.elaborate_model(m_tgt, "tgt");
  enc.assert_axioms_hold(m_tgt, "tgt");
  enc.elaborate_model(m_src, "src");
  enc.assert_violation(m_src, "src");
  if (opts.dead) enc.deadness(opts.dead_strict);
  if (opts.with_sigma) enc.sigma_vars();
  out.info = enc.take_info();
  return out;
}

/// phi_CF && phi_DF && base && axioms(m) && state == sigma.
inline Encoding encode_reachability(const EventGraph& g, const cat::MemoryModel& m,
                                    const State& sigma) {
  Encoding out;
  Encoder enc(out.formula, g);
  enc.control_flow();
  enc.data_flow();
  enc.base_axioms();
  enc.elaborate_model(m, "m");
  enc.assert_axioms_hold(m, "m");
  enc.state_equals(sigma);
  out.info = enc.take_info();
  return out;
}

// spec-level single-piece encoders (mostly for tests)
inline Formula encode_control_flow(const EventGraph& g) {
  Formula f;
  Encoder e(f, g);
  e.control_flow();
  return f;
}
inline Formula encode_data_flow(const EventGraph& g) {
  Formula f;
  Encoder e(f, g);
  e.control_flow();
  e.data_flow();
  return f;
}
inline Formula encode_base_axioms(const EventGraph& g) {
  Formula f;
  Encoder e(f, g);
  e.control_flow();
  e.base_axioms();
  return f;
}

//----------------------------------------------------------------------------
// high-level (two-program) portability

struct HighLevelEncoding {
  Formula formula;
  EncodingInfo src_info; // prefix "S_"
  EncodingInfo tgt_info; // prefix "T_"
};

namespace detail {

struct HlInstr {
  std::string id; // iid as text, or "i<loc>" for the init pseudo-write
  std::string loc;
  bool is_write = false;
};

inline std::map<std::string, HlInstr> hl_table(const prog::Program& pH) {
  std::map<std::string, HlInstr> table;
  prog::for_each_instr(pH, [&](const prog::Instr& i) {
    if (i.kind == prog::Instr::Kind::load || i.kind == prog::Instr::Kind::store) {
      HlInstr h;
      h.id = std::to_string(i.iid);
      h.loc = i.loc;
      h.is_write = i.kind == prog::Instr::Kind::store;
      table[h.id] = h;
    }
  });
  for (auto& l : prog::program_locations(pH)) {
    HlInstr h;
    h.id = "i" + l;
    h.loc = l;
    h.is_write = true;
    table[h.id] = h;
  }
  return table;
}

inline std::string hl_of_event(const events::Event& e,
                               const std::map<std::string, HlInstr>& table) {
  std::string id = e.is_init() ? "i" + e.loc : std::to_string(e.hl_label);
  if (!e.is_init() && e.hl_label < 0)
    throw std::invalid_argument("memory instruction without @hl label (iid " +
                                std::to_string(e.iid) + ")");
  auto it = table.find(id);
  if (it == table.end())
    throw std::invalid_argument("@hl label " + id + " is not a memory instruction of the "
                                                    "high-level program");
  if (it->second.is_write != e.is_write())
    throw std::invalid_argument("@hl label " + id + " maps a " +
                                (e.is_write() ? "write" : "read") + " to a " +
                                (it->second.is_write ? "store" : "load"));
  return id;
}

} // namespace detail

/// Two full encodings sharing instruction-level execution/rf/co variables of
/// the high-level program.
inline HighLevelEncoding encode_highlevel_portability(const prog::Program& pH,
                                                      const EventGraph& gS,
                                                      const EventGraph& gT,
                                                      const cat::MemoryModel& m_src,
                                                      const cat::MemoryModel& m_tgt) {
  auto diags = prog::validate(pH, /*require_acyclic=*/true);
  for (auto& d : diags)
    if (d.severity == Diagnostic::Severity::error)
      throw std::invalid_argument("high-level program: " + d.message);

  HighLevelEncoding out;
  Formula& f = out.formula;
  auto table = detail::hl_table(pH);

  Encoder encS(f, gS, "S_");
  encS.control_flow();
  encS.data_flow();
  encS.base_axioms();
  encS.elaborate_model(m_src, "src");
  encS.assert_violation(m_src, "src");

  Encoder encT(f, gT, "T_");
  encT.control_flow();
  encT.data_flow();
  encT.base_axioms();
  encT.elaborate_model(m_tgt, "tgt");
  encT.assert_axioms_hold(m_tgt, "tgt");

  auto execH = [&](const std::string& id) { return f.bv("execH_" + id); };
  auto relH = [&](const char* rel, const std::string& i1, const std::string& i2) {
    return f.bv(std::string(rel) + "H_" + i1 + "_" + i2);
  };

  // candidate high-level edges: everything some low-level pair projects to
  std::set<std::pair<std::string, std::string>> hl_rf, hl_co;
  struct Side {
    const EventGraph* g;
    Encoder* enc;
  } sides[2] = {{&gS, &encS}, {&gT, &encT}};
  for (auto& s : sides) {
    for (auto& [w, r] : s.g->rf_may)
      hl_rf.insert({detail::hl_of_event(s.g->ev(w), table), detail::hl_of_event(s.g->ev(r), table)});
    for (auto& [w1, w2] : s.g->co_may)
      hl_co.insert(
          {detail::hl_of_event(s.g->ev(w1), table), detail::hl_of_event(s.g->ev(w2), table)});
  }

  for (auto& s : sides) {
    // an executed event's origin instruction is executed
    for (auto& e : s.g->events) {
      std::string h = detail::hl_of_event(e, table);
      if (e.is_init()) f.assert_(execH(h)); // init writes always execute
      else f.assert_(Formula::implies(s.enc->ex(e.eid), execH(h)));
    }
    // (13): low-level rf/co project onto the high-level relations
    for (auto& [w, r] : s.g->rf_may)
      f.assert_(Formula::implies(f.bv(s.enc->rel_name("rf", w, r)),
                                 relH("rf", detail::hl_of_event(s.g->ev(w), table),
                                      detail::hl_of_event(s.g->ev(r), table))));
    for (auto& [w1, w2] : s.g->co_may)
      f.assert_(Formula::implies(f.bv(s.enc->rel_name("co", w1, w2)),
                                 relH("co", detail::hl_of_event(s.g->ev(w1), table),
                                      detail::hl_of_event(s.g->ev(w2), table))));
    // (14)/(15): every high-level edge is realized by some low-level pair
    for (auto& [i1, i2] : hl_rf) {
      std::vector<NodePtr> opts;
      for (auto& [w, r] : s.g->rf_may)
        if (detail::hl_of_event(s.g->ev(w), table) == i1 &&
            detail::hl_of_event(s.g->ev(r), table) == i2)
          opts.push_back(f.bv(s.enc->rel_name("rf", w, r)));
      f.assert_(Formula::implies(relH("rf", i1, i2), Formula::lor(opts)));
    }
    for (auto& [i1, i2] : hl_co) {
      std::vector<NodePtr> opts;
      for (auto& [w1, w2] : s.g->co_may)
        if (detail::hl_of_event(s.g->ev(w1), table) == i1 &&
            detail::hl_of_event(s.g->ev(w2), table) == i2)
          opts.push_back(f.bv(s.enc->rel_name("co", w1, w2)));
      f.assert_(Formula::implies(relH("co", i1, i2), Formula::lor(opts)));
    }
  }

  out.src_info = encS.take_info();
  out.tgt_info = encT.take_info();
  return out;
}

} // namespace porthos::encode
