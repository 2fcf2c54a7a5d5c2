#pragma once

// Exhaustive reference semantics for small programs: enumerate all
// executions (control path x rf choice x coherence order), filter by model
// consistency, and decide portability by brute force.

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "porthos/cat.hpp"
#include "porthos/events.hpp"
#include "porthos/state.hpp"
#include "porthos/witness.hpp"

namespace porthos::oracle {

using events::EventGraph;
using witness::ExecutionWitness;

struct LimitExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

struct ThreadPath {
  std::vector<int> events; // eids in po order
  std::set<prog::Iid> fences;
  std::vector<std::pair<const prog::Instr*, bool>> branches; // (if-instr, then taken)
};

inline void expand_paths(const EventGraph& g, const prog::Instr& i,
                         std::vector<ThreadPath>& acc) {
  using K = prog::Instr::Kind;
  switch (i.kind) {
  case K::skip:
  case K::local: break;
  case K::load:
  case K::store: {
    int e = g.event_of_iid.at(i.iid);
    for (auto& p : acc) p.events.push_back(e);
    break;
  }
  case K::fence:
    for (auto& p : acc) p.fences.insert(i.iid);
    break;
  case K::seq:
    expand_paths(g, *i.a, acc);
    expand_paths(g, *i.b, acc);
    break;
  case K::branch: {
    std::vector<ThreadPath> then_acc = acc, else_acc = std::move(acc);
    for (auto& p : then_acc) p.branches.push_back({&i, true});
    for (auto& p : else_acc) p.branches.push_back({&i, false});
    expand_paths(g, *i.a, then_acc);
    expand_paths(g, *i.b, else_acc);
    acc = std::move(then_acc);
    acc.insert(acc.end(), std::make_move_iterator(else_acc.begin()),
               std::make_move_iterator(else_acc.end()));
    break;
  }
  case K::loop: throw events::non_acyclic_program("loop in oracle enumeration");
  }
}

inline std::vector<ThreadPath> thread_paths(const EventGraph& g, const prog::Thread& t) {
  std::vector<ThreadPath> acc(1);
  expand_paths(g, *t.body, acc);
  return acc;
}

// Deterministic value computation along fixed (path, rf). Values propagate
// over a DAG of assignments; candidates with cyclic dependencies (which the
// corpus programs cannot produce) are rejected.
struct ValueComputer {
  const EventGraph& g;
  const std::vector<const ThreadPath*>& paths;
  const std::map<int, int>& rf_src; // read eid -> write eid
  std::map<int, long> values;       // event values once known
  bool rejected = false;

  using Regs = std::map<std::string, std::optional<long>>;

  std::optional<long> eval_expr(const prog::ExprPtr& e, Regs& regs) {
    using K = prog::Expr::Kind;
    switch (e->kind) {
    case K::constant: return e->value;
    case K::reg: {
      auto it = regs.find(e->reg);
      if (it == regs.end()) return 0; // read before definition
      return it->second;
    }
    case K::add:
    case K::sub:
    case K::mul: {
      auto a = eval_expr(e->a, regs);
      auto b = eval_expr(e->b, regs);
      if (!a || !b) return std::nullopt;
      if (e->kind == K::add) return *a + *b;
      if (e->kind == K::sub) return *a - *b;
      return *a * *b;
    }
    }
    return std::nullopt;
  }

  std::optional<bool> eval_pred(const prog::PredPtr& p, Regs& regs) {
    using K = prog::Pred::Kind;
    switch (p->kind) {
    case K::constant: return p->bvalue;
    case K::cmp_eq:
    case K::cmp_ne:
    case K::cmp_lt:
    case K::cmp_le: {
      auto a = eval_expr(p->ea, regs);
      auto b = eval_expr(p->eb, regs);
      if (!a || !b) return std::nullopt;
      switch (p->kind) {
      case K::cmp_eq: return *a == *b;
      case K::cmp_ne: return *a != *b;
      case K::cmp_lt: return *a < *b;
      default: return *a <= *b;
      }
    }
    case K::land: {
      auto a = eval_pred(p->pa, regs);
      auto b = eval_pred(p->pb, regs);
      if (a && !*a) return false;
      if (b && !*b) return false;
      if (!a || !b) return std::nullopt;
      return *a && *b;
    }
    case K::lor: {
      auto a = eval_pred(p->pa, regs);
      auto b = eval_pred(p->pb, regs);
      if (a && *a) return true;
      if (b && *b) return true;
      if (!a || !b) return std::nullopt;
      return *a || *b;
    }
    case K::lnot: {
      auto a = eval_pred(p->pa, regs);
      if (!a) return std::nullopt;
      return !*a;
    }
    }
    return std::nullopt;
  }

  // One interpretation pass over a thread's taken path; returns true if a
  // new event value became known.
  bool pass(size_t tidx, const prog::Instr& body) {
    Regs regs;
    size_t branch_idx = 0;
    bool progress = false;
    run(body, *paths[tidx], branch_idx, regs, progress);
    return progress;
  }

  void run(const prog::Instr& i, const ThreadPath& path, size_t& bidx, Regs& regs,
           bool& progress) {
    if (rejected) return;
    using K = prog::Instr::Kind;
    switch (i.kind) {
    case K::skip:
    case K::fence: break;
    case K::local: regs[i.reg] = eval_expr(i.expr, regs); break;
    case K::load: {
      int e = g.event_of_iid.at(i.iid);
      int src = rf_src.at(e);
      auto it = values.find(src);
      std::optional<long> v;
      if (it != values.end()) v = it->second;
      if (v && !values.count(e)) {
        values[e] = *v;
        progress = true;
      }
      regs[i.reg] = v;
      break;
    }
    case K::store: {
      int e = g.event_of_iid.at(i.iid);
      auto it = regs.find(i.reg);
      std::optional<long> v = it == regs.end() ? std::optional<long>(0) : it->second;
      if (v && !values.count(e)) {
        values[e] = *v;
        progress = true;
      }
      break;
    }
    case K::seq:
      run(*i.a, path, bidx, regs, progress);
      run(*i.b, path, bidx, regs, progress);
      break;
    case K::branch: {
      bool taken_then = path.branches[bidx++].second;
      auto v = eval_pred(i.pred, regs);
      if (v && *v != taken_then) {
        rejected = true; // predicate disagrees with the chosen path
        return;
      }
      if (!v) pending_pred = true; // decidable only after more propagation
      run(taken_then ? *i.a : *i.b, path, bidx, regs, progress);
      break;
    }
    case K::loop: rejected = true; break;
    }
  }

  bool pending_pred = false;

  // returns true when all executed events have values and all predicates
  // matched their paths
  bool compute() {
    for (int round = 0; round <= g.n_events() + 1; round++) {
      bool progress = false;
      pending_pred = false;
      for (size_t t = 0; t < paths.size(); t++) {
        bool p = pass(t, *g.program.threads[t].body);
        progress = progress || p;
        if (rejected) return false;
      }
      if (!progress) {
        if (pending_pred) return false; // undecidable predicate: value cycle
        for (size_t t = 0; t < paths.size(); t++)
          for (int e : paths[t]->events)
            if (!values.count(e)) return false; // cyclic value dependency
        return true;
      }
    }
    return false;
  }
};

} // namespace detail

/// Enumerates all executions satisfying the execution axioms; calls `fn`
/// per witness, stopping early when it returns false.
inline void enumerate_executions(const EventGraph& g, int limit,
                                 const std::function<bool(const ExecutionWitness&)>& fn) {
  if (g.n_memory_events() > limit)
    throw LimitExceeded("program has " + std::to_string(g.n_memory_events()) +
                        " events, limit " + std::to_string(limit));

  std::vector<std::vector<detail::ThreadPath>> per_thread;
  for (auto& t : g.program.threads) per_thread.push_back(detail::thread_paths(g, t));

  std::vector<size_t> path_idx(per_thread.size(), 0);
  for (;;) {
    std::vector<const detail::ThreadPath*> paths;
    for (size_t t = 0; t < per_thread.size(); t++)
      paths.push_back(&per_thread[t][path_idx[t]]);

    // executed events for this path combination
    std::set<int> executed;
    std::set<prog::Iid> fences;
    for (auto& [l, e] : g.init_event) executed.insert(e);
    for (auto* p : paths) {
      executed.insert(p->events.begin(), p->events.end());
      fences.insert(p->fences.begin(), p->fences.end());
    }

    // rf choices: executed reads pick among executed same-location writes
    std::vector<int> reads;
    for (int e : executed)
      if (g.ev(e).is_read()) reads.push_back(e);
    std::vector<std::vector<int>> cands(reads.size());
    for (size_t i = 0; i < reads.size(); i++) {
      for (auto& [w, r] : g.rf_may)
        if (r == reads[i] && executed.count(w)) cands[i].push_back(w);
      std::sort(cands[i].begin(), cands[i].end());
    }

    std::vector<size_t> rf_idx(reads.size(), 0);
    bool more_rf = true;
    while (more_rf) {
      std::map<int, int> rf_src;
      for (size_t i = 0; i < reads.size(); i++) rf_src[reads[i]] = cands[i][rf_idx[i]];

      detail::ValueComputer vc{g, paths, rf_src, {}, false};
      for (auto& [l, e] : g.init_event) vc.values[e] = g.init_values.at(l);
      if (vc.compute()) {
        // coherence orders per location over executed non-init writes
        std::vector<std::string> locs = g.locations();
        std::vector<std::vector<int>> wlists;
        for (auto& l : locs) {
          std::vector<int> ws;
          for (int w : g.writes_of_loc(l))
            if (!g.ev(w).is_init() && executed.count(w)) ws.push_back(w);
          std::sort(ws.begin(), ws.end());
          wlists.push_back(std::move(ws));
        }
        // odometer over per-location permutations
        std::vector<std::vector<int>> perm = wlists;
        std::function<bool(size_t)> rec = [&](size_t li) -> bool {
          if (li == perm.size()) {
            ExecutionWitness w;
            w.executed = executed;
            w.executed_fences = fences;
            w.values = vc.values;
            for (auto& [r, s] : rf_src) w.rf.insert({s, r});
            for (size_t k = 0; k < perm.size(); k++) {
              int init = g.init_event.at(locs[k]);
              for (size_t i = 0; i < perm[k].size(); i++) {
                w.co.insert({init, perm[k][i]});
                for (size_t j = i + 1; j < perm[k].size(); j++)
                  w.co.insert({perm[k][i], perm[k][j]});
              }
            }
            return fn(w);
          }
          std::sort(perm[li].begin(), perm[li].end());
          do {
            if (!rec(li + 1)) return false;
          } while (std::next_permutation(perm[li].begin(), perm[li].end()));
          return true;
        };
        if (!rec(0)) return;
      }

      // advance rf odometer
      size_t k = 0;
      for (; k < reads.size(); k++) {
        if (++rf_idx[k] < cands[k].size()) break;
        rf_idx[k] = 0;
      }
      if (k == reads.size()) more_rf = false;
      if (reads.empty()) more_rf = false;
    }

    size_t t = 0;
    for (; t < per_thread.size(); t++) {
      if (++path_idx[t] < per_thread[t].size()) break;
      path_idx[t] = 0;
    }
    if (t == per_thread.size()) break;
  }
}

inline std::vector<ExecutionWitness> enumerate_executions(const EventGraph& g, int limit = 12) {
  std::vector<ExecutionWitness> out;
  enumerate_executions(g, limit, [&](const ExecutionWitness& w) {
    out.push_back(w);
    return true;
  });
  return out;
}

inline std::vector<ExecutionWitness> consistent_set(const EventGraph& g,
                                                    const cat::MemoryModel& m, int limit = 12) {
  cat::RecursionPlan plan = cat::recursion_plan(m);
  std::vector<ExecutionWitness> out;
  enumerate_executions(g, limit, [&](const ExecutionWitness& w) {
    if (cat::check_consistent(m, plan, witness::eval_input(g, w))) out.push_back(w);
    return true;
  });
  return out;
}

struct PortabilityVerdict {
  bool portable = true;
  std::optional<ExecutionWitness> counterexample; // first, in enumeration order
};

inline PortabilityVerdict portable_bruteforce(const EventGraph& g, const cat::MemoryModel& m_src,
                                              const cat::MemoryModel& m_tgt, int limit = 12) {
  cat::RecursionPlan src_plan = cat::recursion_plan(m_src);
  cat::RecursionPlan tgt_plan = cat::recursion_plan(m_tgt);
  PortabilityVerdict v;
  enumerate_executions(g, limit, [&](const ExecutionWitness& w) {
    cat::EvalInput in = witness::eval_input(g, w);
    if (cat::check_consistent(m_tgt, tgt_plan, in) &&
        !cat::check_consistent(m_src, src_plan, in)) {
      v.portable = false;
      v.counterexample = w;
      return false;
    }
    return true;
  });
  return v;
}

struct StatePortabilityVerdict {
  bool portable = true;
  std::optional<State> new_state; // first target-only state
};

inline State project_state(const State& s, bool include_registers) {
  if (include_registers) return s;
  State out;
  out.locations = s.locations;
  return out;
}

inline StatePortabilityVerdict state_portable_bruteforce(const EventGraph& g,
                                                         const cat::MemoryModel& m_src,
                                                         const cat::MemoryModel& m_tgt,
                                                         int limit = 12,
                                                         bool include_registers = true) {
  cat::RecursionPlan src_plan = cat::recursion_plan(m_src);
  cat::RecursionPlan tgt_plan = cat::recursion_plan(m_tgt);
  std::set<State> src_states, tgt_states;
  enumerate_executions(g, limit, [&](const ExecutionWitness& w) {
    cat::EvalInput in = witness::eval_input(g, w);
    State s = project_state(witness::reach_state(g, w), include_registers);
    if (cat::check_consistent(m_src, src_plan, in)) src_states.insert(s);
    if (cat::check_consistent(m_tgt, tgt_plan, in)) tgt_states.insert(s);
    return true;
  });
  StatePortabilityVerdict v;
  for (auto& s : tgt_states)
    if (!src_states.count(s)) {
      v.portable = false;
      v.new_state = s;
      break;
    }
  return v;
}

} // namespace porthos::oracle
