#pragma once

// Compilation of acyclic programs into event graphs: memory events,
// induced relations, and static candidate ("may") sets that bound every
// relation variable in the encoding.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "porthos/cat.hpp"
#include "porthos/prog.hpp"

namespace porthos::events {

using PairSet = std::set<std::pair<int, int>>;

struct Event {
  enum class Kind { init_write, write, read };
  int eid = -1;
  Kind kind = Kind::init_write;
  int thread = -1; // index into program threads, -1 for init writes
  std::string tid; // empty for init writes
  std::string loc;
  prog::Iid iid = -1; // origin instruction, -1 for init writes
  int hl_label = -1;
  int pos = -1; // position in the thread linearization (memory + fences)

  bool is_write() const { return kind != Kind::read; }
  bool is_read() const { return kind == Kind::read; }
  bool is_init() const { return kind == Kind::init_write; }
};

struct FenceInstr {
  prog::Iid iid;
  prog::FenceKind kind;
  int thread;
  int pos;
};

struct non_acyclic_program : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EventGraph {
  prog::Program program; // the compiled (acyclic) program
  std::vector<Event> events;
  std::vector<FenceInstr> fences;
  std::map<std::string, long> init_values;    // per location
  std::map<std::string, int> init_event;      // location -> init eid
  std::map<prog::Iid, int> event_of_iid;      // memory instruction -> eid
  std::vector<std::vector<int>> thread_events; // eids in po order per thread

  // induced relations and candidate sets
  PairSet po, sthd, sloc, ad, dd, cd;
  std::map<prog::FenceKind, PairSet> fence_rel;
  PairSet rf_may; // W x R, same location, includes init writes
  PairSet co_may; // W x W, same location, irreflexive, init writes only as source

  int n_events() const { return static_cast<int>(events.size()); }
  int n_memory_events() const {
    int k = 0;
    for (auto& e : events)
      if (!e.is_init()) k++;
    return k;
  }

  const Event& ev(int eid) const { return events[static_cast<size_t>(eid)]; }

  std::vector<std::string> locations() const {
    std::vector<std::string> ls;
    for (auto& [l, v] : init_values) ls.push_back(l);
    return ls;
  }

  std::vector<int> writes_of_loc(const std::string& l) const {
    std::vector<int> ws;
    for (auto& e : events)
      if (e.is_write() && e.loc == l) ws.push_back(e.eid);
    return ws;
  }
  std::vector<int> reads_of_loc(const std::string& l) const {
    std::vector<int> rs;
    for (auto& e : events)
      if (e.is_read() && e.loc == l) rs.push_back(e.eid);
    return rs;
  }

  /// Fences of one kind sitting strictly between two positions of a thread.
  std::vector<const FenceInstr*> fences_between(prog::FenceKind k, int thread, int p1,
                                                int p2) const {
    std::vector<const FenceInstr*> out;
    for (auto& f : fences)
      if (f.kind == k && f.thread == thread && f.pos > p1 && f.pos < p2) out.push_back(&f);
    return out;
  }

  /// True iff `executed` picks exactly one control path per thread.
  bool is_valid_path(const std::set<int>& executed) const;
};

//----------------------------------------------------------------------------
// compile

namespace detail {

struct Compiler {
  const prog::Program& p;
  EventGraph g;
  int pos = 0;
  int thread = -1;

  using Taint = std::map<std::string, std::set<int>>; // register -> source loads

  void run() {
    g.program = p;
    // init writes first, one per referenced location, sorted by name
    for (auto& l : prog::program_locations(p)) {
      long v = 0;
      auto it = p.init.find(l);
      if (it != p.init.end()) v = it->second;
      g.init_values[l] = v;
    }
    for (auto& [l, v] : g.init_values) {
      Event e;
      e.eid = static_cast<int>(g.events.size());
      e.kind = Event::Kind::init_write;
      e.loc = l;
      g.init_event[l] = e.eid;
      g.events.push_back(e);
    }
    for (size_t t = 0; t < p.threads.size(); t++) {
      thread = static_cast<int>(t);
      pos = 0;
      g.thread_events.emplace_back();
      Taint taint;
      std::set<int> ctrl;
      walk(*p.threads[t].body, taint, ctrl);
    }
    finish_relations();
  }

  int add_event(Event::Kind k, const std::string& loc, const prog::Instr& i) {
    Event e;
    e.eid = static_cast<int>(g.events.size());
    e.kind = k;
    e.thread = thread;
    e.tid = p.threads[static_cast<size_t>(thread)].tid;
    e.loc = loc;
    e.iid = i.iid;
    e.hl_label = i.hl_label;
    e.pos = pos++;
    g.events.push_back(e);
    g.event_of_iid[i.iid] = e.eid;
    g.thread_events[static_cast<size_t>(thread)].push_back(e.eid);
    return e.eid;
  }

  void walk(const prog::Instr& i, Taint& taint, std::set<int>& ctrl) {
    using K = prog::Instr::Kind;
    switch (i.kind) {
    case K::skip: break;
    case K::local: {
      std::set<std::string> used;
      prog::expr_registers(i.expr, used);
      std::set<int> sources;
      for (auto& r : used)
        for (int e : taint[r]) sources.insert(e);
      taint[i.reg] = std::move(sources);
      break;
    }
    case K::load: {
      int e = add_event(Event::Kind::read, i.loc, i);
      taint[i.reg] = {e};
      for (int c : ctrl) g.cd.insert({c, e});
      break;
    }
    case K::store: {
      int e = add_event(Event::Kind::write, i.loc, i);
      for (int s : taint[i.reg]) g.dd.insert({s, e});
      for (int c : ctrl) g.cd.insert({c, e});
      break;
    }
    case K::fence:
      g.fences.push_back({i.iid, i.fence, thread, pos++});
      break;
    case K::seq:
      walk(*i.a, taint, ctrl);
      walk(*i.b, taint, ctrl);
      break;
    case K::branch: {
      std::set<std::string> used;
      prog::pred_registers(i.pred, used);
      std::set<int> branch_ctrl = ctrl;
      for (auto& r : used)
        for (int e : taint[r]) branch_ctrl.insert(e);
      Taint t1 = taint, t2 = taint;
      walk(*i.a, t1, branch_ctrl);
      walk(*i.b, t2, branch_ctrl);
      taint.clear();
      for (auto& [r, s] : t1) {
        auto merged = s;
        auto it = t2.find(r);
        if (it != t2.end()) merged.insert(it->second.begin(), it->second.end());
        taint[r] = std::move(merged);
      }
      for (auto& [r, s] : t2)
        if (!taint.count(r)) taint[r] = s;
      break;
    }
    case K::loop: throw non_acyclic_program("while loop at iid " + std::to_string(i.iid));
    }
  }

  void finish_relations() {
    // po: syntactic linearization per thread, memory events only
    for (auto& tev : g.thread_events)
      for (size_t i = 0; i < tev.size(); i++)
        for (size_t j = i + 1; j < tev.size(); j++) g.po.insert({tev[i], tev[j]});

    // sthd: equivalence per thread; init writes are singleton classes
    for (auto& a : g.events)
      for (auto& b : g.events) {
        if (a.is_init() || b.is_init()) {
          if (a.eid == b.eid) g.sthd.insert({a.eid, b.eid});
          continue;
        }
        if (a.thread == b.thread) g.sthd.insert({a.eid, b.eid});
      }

    // sloc: equivalence over same location (init writes included)
    for (auto& a : g.events)
      for (auto& b : g.events)
        if (a.loc == b.loc) g.sloc.insert({a.eid, b.eid});

    // fence relations: (e1,e2) with a fence of the kind between them
    for (auto kind : {prog::FenceKind::mfence, prog::FenceKind::sync, prog::FenceKind::lwsync,
                      prog::FenceKind::isync}) {
      PairSet rel;
      for (auto& [e1, e2] : g.po) {
        const Event& a = g.ev(e1);
        const Event& b = g.ev(e2);
        if (!g.fences_between(kind, a.thread, a.pos, b.pos).empty()) rel.insert({e1, e2});
      }
      g.fence_rel[kind] = std::move(rel);
    }

    // candidate sets
    for (auto& w : g.events) {
      if (!w.is_write()) continue;
      for (auto& r : g.events)
        if (r.is_read() && r.loc == w.loc) g.rf_may.insert({w.eid, r.eid});
    }
    for (auto& w1 : g.events) {
      if (!w1.is_write()) continue;
      for (auto& w2 : g.events) {
        if (!w2.is_write() || w1.eid == w2.eid || w1.loc != w2.loc) continue;
        if (w2.is_init()) continue; // init writes are co-minimal
        g.co_may.insert({w1.eid, w2.eid});
      }
    }
  }
};

} // namespace detail

inline EventGraph compile(const prog::Program& p) {
  auto diags = prog::validate(p, /*require_acyclic=*/true);
  for (auto& d : diags)
    if (d.severity == Diagnostic::Severity::error) {
      if (d.message.find("while loop") != std::string::npos) throw non_acyclic_program(d.message);
      throw std::invalid_argument("compile: " + d.message);
    }
  detail::Compiler c{p, {}};
  c.run();
  return std::move(c.g);
}

inline bool EventGraph::is_valid_path(const std::set<int>& executed) const {
  // init writes always execute
  for (auto& [l, e] : init_event)
    if (!executed.count(e)) return false;
  std::set<int> seen;
  struct Walk {
    const EventGraph& g;
    const std::set<int>& executed;
    std::set<int>* seen;
    bool ok = true;

    // returns true if the subtree executes (it must execute entirely)
    void require(const prog::Instr& i) {
      using K = prog::Instr::Kind;
      switch (i.kind) {
      case K::skip:
      case K::local:
      case K::fence: break;
      case K::load:
      case K::store: {
        auto it = g.event_of_iid.find(i.iid);
        if (it == g.event_of_iid.end() || !executed.count(it->second)) ok = false;
        else seen->insert(it->second);
        break;
      }
      case K::seq:
        require(*i.a);
        require(*i.b);
        break;
      case K::branch: {
        bool t = branch_executes(*i.a);
        bool e = branch_executes(*i.b);
        if (t && e) ok = false; // both arms cannot run
        if (t) require(*i.a);
        else if (e) require(*i.b);
        else if (has_memory(*i.a) || has_memory(*i.b)) {
          // neither arm ran although one must (a branch of an executed
          // region always resolves); arms without memory events are
          // unobservable here, accept them
          if (must_observe(*i.a) && must_observe(*i.b)) ok = false;
        }
        break;
      }
      case K::loop: ok = false; break;
      }
    }

    bool has_memory(const prog::Instr& i) const {
      if (i.kind == prog::Instr::Kind::load || i.kind == prog::Instr::Kind::store) return true;
      if (i.a && has_memory(*i.a)) return true;
      if (i.b && has_memory(*i.b)) return true;
      return false;
    }
    bool must_observe(const prog::Instr& i) const { return has_memory(i); }

    bool branch_executes(const prog::Instr& i) const {
      using K = prog::Instr::Kind;
      switch (i.kind) {
      case K::load:
      case K::store: {
        auto it = g.event_of_iid.find(i.iid);
        return it != g.event_of_iid.end() && executed.count(it->second) > 0;
      }
      case K::seq: return branch_executes(*i.a) || branch_executes(*i.b);
      case K::branch: return branch_executes(*i.a) || branch_executes(*i.b);
      default: return false;
      }
    }
  } w{*this, executed, &seen};

  for (auto& t : program.threads) w.require(*t.body);
  if (!w.ok) return false;
  // no stray executed events
  for (int e : executed)
    if (!ev(e).is_init() && !seen.count(e)) return false;
  return true;
}

//----------------------------------------------------------------------------
// may sets

namespace detail {

inline PairSet pairs_union(const PairSet& a, const PairSet& b) {
  PairSet r = a;
  r.insert(b.begin(), b.end());
  return r;
}

inline PairSet pairs_inter(const PairSet& a, const PairSet& b) {
  PairSet r;
  for (auto& p : a)
    if (b.count(p)) r.insert(p);
  return r;
}

inline PairSet pairs_compose(const PairSet& a, const PairSet& b) {
  std::map<int, std::set<int>> by_src;
  for (auto& [x, y] : b) by_src[x].insert(y);
  PairSet r;
  for (auto& [x, y] : a) {
    auto it = by_src.find(y);
    if (it == by_src.end()) continue;
    for (int z : it->second) r.insert({x, z});
  }
  return r;
}

inline PairSet pairs_closure(const PairSet& a) {
  PairSet r = a;
  for (;;) {
    PairSet next = pairs_union(r, pairs_compose(r, r));
    if (next == r) return r;
    r = std::move(next);
  }
}

} // namespace detail

/// Environment of may sets for defined names, computed by a pairwise
/// fixpoint over the model's recursion structure.
struct MayEnv {
  std::map<std::string, PairSet> names;
};

inline std::vector<int> events_in_set(const EventGraph& g, cat::EventSet s) {
  std::vector<int> out;
  for (auto& e : g.events) {
    bool in = s == cat::EventSet::ev || (s == cat::EventSet::w && e.is_write()) ||
              (s == cat::EventSet::r && e.is_read());
    if (in) out.push_back(e.eid);
  }
  return out;
}

inline PairSet may_term(const cat::TermPtr& t, const EventGraph& g, const MayEnv& env) {
  using K = cat::Term::Kind;
  switch (t->kind) {
  case K::base:
    switch (t->base) {
    case cat::BaseRel::po: return g.po;
    case cat::BaseRel::rf: return g.rf_may;
    case cat::BaseRel::co: return g.co_may;
    case cat::BaseRel::ad: return g.ad;
    case cat::BaseRel::dd: return g.dd;
    case cat::BaseRel::cd: return g.cd;
    case cat::BaseRel::sthd: return g.sthd;
    case cat::BaseRel::sloc: return g.sloc;
    case cat::BaseRel::mfence: return g.fence_rel.at(prog::FenceKind::mfence);
    case cat::BaseRel::sync: return g.fence_rel.at(prog::FenceKind::sync);
    case cat::BaseRel::lwsync: return g.fence_rel.at(prog::FenceKind::lwsync);
    case cat::BaseRel::isync: return g.fence_rel.at(prog::FenceKind::isync);
    }
    return {};
  case K::name: {
    auto it = env.names.find(t->name);
    if (it == env.names.end()) throw std::runtime_error("may: unbound name " + t->name);
    return it->second;
  }
  case K::empty: return {};
  case K::union_: return detail::pairs_union(may_term(t->a, g, env), may_term(t->b, g, env));
  case K::inter: return detail::pairs_inter(may_term(t->a, g, env), may_term(t->b, g, env));
  case K::diff: return may_term(t->a, g, env); // over-approximation drops the subtrahend
  case K::seq: return detail::pairs_compose(may_term(t->a, g, env), may_term(t->b, g, env));
  case K::inverse: {
    PairSet r;
    for (auto& [x, y] : may_term(t->a, g, env)) r.insert({y, x});
    return r;
  }
  case K::plus: return detail::pairs_closure(may_term(t->a, g, env));
  case K::star: {
    PairSet r = detail::pairs_closure(may_term(t->a, g, env));
    for (auto& e : g.events) r.insert({e.eid, e.eid});
    return r;
  }
  case K::opt: {
    PairSet r = may_term(t->a, g, env);
    for (auto& e : g.events) r.insert({e.eid, e.eid});
    return r;
  }
  case K::idset: {
    PairSet r;
    for (int e : events_in_set(g, t->s1)) r.insert({e, e});
    return r;
  }
  case K::cartesian: {
    PairSet r;
    for (int a : events_in_set(g, t->s1))
      for (int b : events_in_set(g, t->s2)) r.insert({a, b});
    return r;
  }
  }
  return {};
}

inline MayEnv may_env(const cat::MemoryModel& m, const EventGraph& g,
                      const cat::RecursionPlan& plan) {
  MayEnv env;
  for (auto& scc : plan.sccs) {
    for (auto& n : scc) env.names[n] = {};
    for (;;) {
      bool changed = false;
      for (auto& n : scc) {
        PairSet v = may_term(*m.find_def(n), g, env);
        if (v != env.names[n]) {
          env.names[n] = std::move(v);
          changed = true;
        }
      }
      if (!changed) break;
    }
  }
  return env;
}

/// Spec-level convenience: may set of a term under a model.
inline PairSet may(const cat::TermPtr& t, const EventGraph& g, const cat::MemoryModel& m) {
  return may_term(t, g, may_env(m, g, cat::recursion_plan(m)));
}

} // namespace porthos::events
