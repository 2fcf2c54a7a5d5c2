#pragma once

// Decoding of solver models into executions, semantic validation against
// the Kleene evaluator, reached-state computation, and DOT/JSON export.

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "porthos/cat.hpp"
#include "porthos/encode.hpp"
#include "porthos/events.hpp"
#include "porthos/solve.hpp"
#include "porthos/state.hpp"

namespace porthos::witness {

using events::EventGraph;
using events::PairSet;

struct ExecutionWitness {
  std::set<int> executed;             // eids, init writes included
  std::set<prog::Iid> executed_fences;
  PairSet rf, co;
  std::map<int, long> values;                 // per executed memory event
  std::map<std::string, PairSet> derived;     // qualified name -> pairs
  std::vector<std::string> violated;          // source axiom labels
  PairSet cycle;                              // guessed violating cycle edges
};

struct MissingVariable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//----------------------------------------------------------------------------
// decode

inline ExecutionWitness decode(const solve::SolverResult& res, const EventGraph& g,
                               const encode::EncodingInfo& info) {
  if (res.status != solve::Status::sat)
    throw std::logic_error("decode requires a sat result");
  const std::string& pfx = info.prefix;
  auto name = [&](const std::string& s) { return pfx + s; };
  auto get_bool = [&](const std::string& s) {
    if (!res.has(name(s))) throw MissingVariable(name(s));
    return res.get_bool(name(s));
  };

  ExecutionWitness w;
  for (auto& e : g.events)
    if (get_bool("ex_" + std::to_string(e.eid))) w.executed.insert(e.eid);
  for (auto& fi : g.fences)
    if (get_bool("cf_" + std::to_string(fi.iid))) w.executed_fences.insert(fi.iid);
  for (auto& [a, b] : g.rf_may)
    if (w.executed.count(a) && w.executed.count(b) &&
        get_bool("rel_rf_" + std::to_string(a) + "_" + std::to_string(b)))
      w.rf.insert({a, b});
  for (auto& [a, b] : g.co_may)
    if (w.executed.count(a) && w.executed.count(b) &&
        get_bool("rel_co_" + std::to_string(a) + "_" + std::to_string(b)))
      w.co.insert({a, b});
  for (int e : w.executed) {
    std::string vn = name("val_ev" + std::to_string(e));
    if (res.has(vn)) w.values[e] = res.get_int(vn);
  }
  for (auto& [qual, pairs] : info.named_rels) {
    PairSet ps;
    for (auto& [a, b] : pairs)
      if (get_bool("rel_" + qual + "_" + std::to_string(a) + "_" + std::to_string(b)))
        ps.insert({a, b});
    w.derived[qual] = std::move(ps);
  }
  for (auto& ax : info.src_axioms) {
    std::string vn = name("viol_" + ax.qual);
    if (!res.has(vn) || !res.get_bool(vn)) continue;
    w.violated.push_back(ax.label);
    if (ax.kind == cat::Axiom::Kind::acyclic && w.cycle.empty()) {
      for (auto& [a, b] : ax.may_pairs) {
        std::string en = name("Cedge_" + ax.qual + "_" + std::to_string(a) + "_" +
                              std::to_string(b));
        if (res.has(en) && res.get_bool(en)) w.cycle.insert({a, b});
      }
    }
  }
  return w;
}

//----------------------------------------------------------------------------
// evaluation input from a witness

inline cat::EvalInput eval_input(const EventGraph& g, const ExecutionWitness& w) {
  cat::EvalInput in;
  in.n = g.n_events();
  in.executed.assign(static_cast<size_t>(in.n), 0);
  in.is_write.assign(static_cast<size_t>(in.n), 0);
  in.is_read.assign(static_cast<size_t>(in.n), 0);
  for (auto& e : g.events) {
    in.is_write[static_cast<size_t>(e.eid)] = e.is_write();
    in.is_read[static_cast<size_t>(e.eid)] = e.is_read();
  }
  for (int e : w.executed) in.executed[static_cast<size_t>(e)] = 1;

  auto from_pairs = [&](const PairSet& ps) {
    cat::RelMat m(in.n);
    for (auto& [a, b] : ps)
      if (in.executed[static_cast<size_t>(a)] && in.executed[static_cast<size_t>(b)])
        m.set(a, b);
    return m;
  };
  in.base[cat::BaseRel::po] = from_pairs(g.po);
  in.base[cat::BaseRel::sthd] = from_pairs(g.sthd);
  in.base[cat::BaseRel::sloc] = from_pairs(g.sloc);
  in.base[cat::BaseRel::ad] = from_pairs(g.ad);
  in.base[cat::BaseRel::dd] = from_pairs(g.dd);
  in.base[cat::BaseRel::cd] = from_pairs(g.cd);
  in.base[cat::BaseRel::rf] = from_pairs(w.rf);
  in.base[cat::BaseRel::co] = from_pairs(w.co);

  auto fences = [&](prog::FenceKind k) {
    cat::RelMat m(in.n);
    for (auto& [a, b] : g.fence_rel.at(k)) {
      if (!in.executed[static_cast<size_t>(a)] || !in.executed[static_cast<size_t>(b)]) continue;
      const events::Event& ea = g.ev(a);
      const events::Event& eb = g.ev(b);
      for (auto* fi : g.fences_between(k, ea.thread, ea.pos, eb.pos))
        if (w.executed_fences.count(fi->iid)) {
          m.set(a, b);
          break;
        }
    }
    return m;
  };
  in.base[cat::BaseRel::mfence] = fences(prog::FenceKind::mfence);
  in.base[cat::BaseRel::sync] = fences(prog::FenceKind::sync);
  in.base[cat::BaseRel::lwsync] = fences(prog::FenceKind::lwsync);
  in.base[cat::BaseRel::isync] = fences(prog::FenceKind::isync);
  return in;
}

//----------------------------------------------------------------------------
// register interpreter (used by reach_state and validation)

namespace detail {

struct Interp {
  const EventGraph& g;
  const ExecutionWitness& w;
  std::map<std::string, long> regs;
  bool ok = true;
  std::vector<std::string> problems;

  long eval_expr(const prog::ExprPtr& e) {
    using K = prog::Expr::Kind;
    switch (e->kind) {
    case K::constant: return e->value;
    case K::reg: {
      auto it = regs.find(e->reg);
      return it == regs.end() ? 0 : it->second;
    }
    case K::add: return eval_expr(e->a) + eval_expr(e->b);
    case K::sub: return eval_expr(e->a) - eval_expr(e->b);
    case K::mul: return eval_expr(e->a) * eval_expr(e->b);
    }
    return 0;
  }

  bool eval_pred(const prog::PredPtr& p) {
    using K = prog::Pred::Kind;
    switch (p->kind) {
    case K::constant: return p->bvalue;
    case K::cmp_eq: return eval_expr(p->ea) == eval_expr(p->eb);
    case K::cmp_ne: return eval_expr(p->ea) != eval_expr(p->eb);
    case K::cmp_lt: return eval_expr(p->ea) < eval_expr(p->eb);
    case K::cmp_le: return eval_expr(p->ea) <= eval_expr(p->eb);
    case K::land: return eval_pred(p->pa) && eval_pred(p->pb);
    case K::lor: return eval_pred(p->pa) || eval_pred(p->pb);
    case K::lnot: return !eval_pred(p->pa);
    }
    return false;
  }

  void run(const prog::Instr& i) {
    using K = prog::Instr::Kind;
    switch (i.kind) {
    case K::skip:
    case K::fence: break;
    case K::local: regs[i.reg] = eval_expr(i.expr); break;
    case K::load: {
      int e = g.event_of_iid.at(i.iid);
      if (!w.executed.count(e)) {
        problems.push_back("taken path expects event " + std::to_string(e) + " executed");
        ok = false;
        break;
      }
      auto it = w.values.find(e);
      regs[i.reg] = it == w.values.end() ? 0 : it->second;
      break;
    }
    case K::store: {
      int e = g.event_of_iid.at(i.iid);
      if (!w.executed.count(e)) {
        problems.push_back("taken path expects event " + std::to_string(e) + " executed");
        ok = false;
        break;
      }
      auto it = w.values.find(e);
      long expect = regs.count(i.reg) ? regs[i.reg] : 0;
      if (it != w.values.end() && it->second != expect) {
        problems.push_back("store event " + std::to_string(e) + " wrote " +
                           std::to_string(it->second) + " but data flow computes " +
                           std::to_string(expect));
        ok = false;
      }
      break;
    }
    case K::seq:
      run(*i.a);
      run(*i.b);
      break;
    case K::branch:
      if (eval_pred(i.pred)) run(*i.a);
      else run(*i.b);
      break;
    case K::loop:
      ok = false;
      problems.push_back("loop in supposedly acyclic program");
      break;
    }
  }
};

} // namespace detail

/// Register valuation at the end of each thread, keyed "tid.reg".
inline std::map<std::string, long> interpret_registers(const EventGraph& g,
                                                       const ExecutionWitness& w,
                                                       std::vector<std::string>* problems = nullptr) {
  std::map<std::string, long> out;
  for (auto& t : g.program.threads) {
    detail::Interp it{g, w, {}, true, {}};
    it.run(*t.body);
    for (auto& [r, v] : it.regs) out[t.tid + "." + r] = v;
    // registers never assigned still read 0
    for (auto& r : prog::thread_registers(t))
      if (!it.regs.count(r)) out[t.tid + "." + r] = 0;
    if (problems)
      problems->insert(problems->end(), it.problems.begin(), it.problems.end());
  }
  return out;
}

/// Final state: per location the co-maximal executed write, per register the
/// last executed assignment.
inline State reach_state(const EventGraph& g, const ExecutionWitness& w) {
  State s;
  for (auto& l : g.locations()) {
    int best = g.init_event.at(l);
    for (int wr : g.writes_of_loc(l)) {
      if (!w.executed.count(wr)) continue;
      bool maximal = true;
      for (int w2 : g.writes_of_loc(l))
        if (w.co.count({wr, w2})) maximal = false;
      if (maximal) best = wr;
    }
    auto it = w.values.find(best);
    s.locations[l] = it != w.values.end() ? it->second : g.init_values.at(l);
  }
  s.registers = interpret_registers(g, w);
  return s;
}

//----------------------------------------------------------------------------
// validation

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> problems;

  void fail(std::string msg) {
    ok = false;
    problems.push_back(std::move(msg));
  }
  std::string str() const {
    std::string s;
    for (auto& p : problems) s += p + "\n";
    return s;
  }
};

/// Recomputes every derived relation with the Kleene evaluator and checks
/// the execution axioms, target consistency, and source violation.
inline ValidationReport validate_witness(const EventGraph& g, const ExecutionWitness& w,
                                         const cat::MemoryModel& m_src,
                                         const cat::MemoryModel& m_tgt) {
  ValidationReport rep;

  // executed events form one control path per thread
  if (!g.is_valid_path(w.executed)) rep.fail("executed set is not a valid control path");

  // rf is W x R over one location, functional and total
  std::map<int, int> rf_src;
  for (auto& [a, b] : w.rf) {
    if (!g.ev(a).is_write() || !g.ev(b).is_read() || g.ev(a).loc != g.ev(b).loc)
      rep.fail("rf edge " + std::to_string(a) + "->" + std::to_string(b) + " malformed");
    if (!w.executed.count(a) || !w.executed.count(b))
      rep.fail("rf edge touches non-executed event");
    if (rf_src.count(b)) rep.fail("read " + std::to_string(b) + " has two rf sources");
    rf_src[b] = a;
  }
  for (int e : w.executed)
    if (g.ev(e).is_read() && !rf_src.count(e))
      rep.fail("executed read " + std::to_string(e) + " has no rf source");

  // co total order per location over executed writes, init first
  for (auto& [a, b] : w.co) {
    if (!g.ev(a).is_write() || !g.ev(b).is_write() || g.ev(a).loc != g.ev(b).loc || a == b)
      rep.fail("co edge " + std::to_string(a) + "->" + std::to_string(b) + " malformed");
    if (g.ev(b).is_init()) rep.fail("init write not co-minimal");
  }
  for (auto& l : g.locations()) {
    auto ws = g.writes_of_loc(l);
    for (int w1 : ws)
      for (int w2 : ws) {
        if (w1 >= w2 || !w.executed.count(w1) || !w.executed.count(w2)) continue;
        if (!w.co.count({w1, w2}) && !w.co.count({w2, w1}))
          rep.fail("executed writes " + std::to_string(w1) + "," + std::to_string(w2) +
                   " unordered by co");
        if (w.co.count({w1, w2}) && w.co.count({w2, w1}))
          rep.fail("co not antisymmetric on " + std::to_string(w1) + "," + std::to_string(w2));
      }
  }
  {
    cat::RelMat m(g.n_events());
    for (auto& [a, b] : w.co) m.set(a, b);
    if (m.has_cycle()) rep.fail("co has a cycle");
  }

  // value consistency along rf and the local data flow
  for (auto& [a, b] : w.rf) {
    auto va = w.values.find(a);
    auto vb = w.values.find(b);
    if (va != w.values.end() && vb != w.values.end() && va->second != vb->second)
      rep.fail("rf edge " + std::to_string(a) + "->" + std::to_string(b) +
               " with different values");
  }
  for (auto& [l, e] : g.init_event) {
    auto it = w.values.find(e);
    if (it != w.values.end() && it->second != g.init_values.at(l))
      rep.fail("init write of " + l + " has wrong value");
  }
  std::vector<std::string> interp_problems;
  interpret_registers(g, w, &interp_problems);
  for (auto& p : interp_problems) rep.fail(p);

  // model semantics via the Kleene evaluator
  cat::EvalInput in = eval_input(g, w);
  cat::EvalResult tgt = cat::eval_model(m_tgt, in);
  if (!tgt.consistent) {
    for (auto& ax : tgt.axioms)
      if (!ax.passed) rep.fail("target axiom " + ax.label + " fails on the witness");
  }
  cat::EvalResult src = cat::eval_model(m_src, in);
  if (src.consistent) rep.fail("witness is consistent with the source model");

  // decoded derived relations must equal the least fixed point exactly
  for (auto& [qual, pairs] : w.derived) {
    auto dot = qual.find('.');
    if (dot == std::string::npos) continue;
    std::string side = qual.substr(0, dot);
    std::string name = qual.substr(dot + 1);
    const cat::NameEnv* env = nullptr;
    if (side == "tgt" || side == "m") env = &tgt.names;
    else if (side == "src") env = &src.names;
    if (!env || !env->count(name)) continue;
    if (env->at(name).pairs() != pairs)
      rep.fail("decoded relation " + qual + " differs from the Kleene fixed point");
  }

  // reported violations must really fail
  for (auto& label : w.violated) {
    bool found = false;
    for (auto& ax : src.axioms)
      if (ax.label == label) {
        found = true;
        if (ax.passed) rep.fail("axiom " + label + " reported violated but passes");
      }
    if (!found) rep.fail("unknown violated axiom label " + label);
  }
  return rep;
}

//----------------------------------------------------------------------------
// export

struct DotOptions {
  bool highlight_cycle = true;
};

inline std::string event_label(const EventGraph& g, const ExecutionWitness& w, int eid) {
  const events::Event& e = g.ev(eid);
  char k = e.is_init() ? 'I' : (e.is_read() ? 'R' : 'W');
  long v = 0;
  auto it = w.values.find(eid);
  if (it != w.values.end()) v = it->second;
  else if (e.is_init()) v = g.init_values.at(e.loc);
  return std::string(1, k) + e.loc + std::to_string(v);
}

inline std::string to_dot(const EventGraph& g, const ExecutionWitness& w,
                          const DotOptions& opts = {}) {
  std::ostringstream os;
  os << "digraph execution {\n  rankdir=TB;\n  node [shape=plaintext];\n";
  for (int e : w.executed) {
    os << "  e" << e << " [label=\"" << event_label(g, w, e) << "\"";
    if (g.ev(e).is_init()) os << " fontcolor=gray";
    os << "];\n";
  }
  auto edge = [&](int a, int b, const char* label) {
    os << "  e" << a << " -> e" << b << " [label=\"" << label << "\"";
    if (opts.highlight_cycle && w.cycle.count({a, b})) os << " color=red penwidth=2";
    os << "];\n";
  };
  // po: immediate successors only
  for (auto& tev : g.thread_events) {
    int prev = -1;
    for (int e : tev) {
      if (!w.executed.count(e)) continue;
      if (prev >= 0) edge(prev, e, "po");
      prev = e;
    }
  }
  for (auto& [a, b] : w.rf)
    edge(a, b, !g.ev(a).is_init() && g.ev(a).thread != g.ev(b).thread ? "rfe" : "rf");
  // fr for display: rf^-1 ; co
  for (auto& [wr, rd] : w.rf)
    for (auto& [w1, w2] : w.co)
      if (w1 == wr) edge(rd, w2, "fr");
  // co: immediate pairs
  for (auto& [a, b] : w.co) {
    bool immediate = true;
    for (auto& [c, d] : w.co)
      if (c == a && w.co.count({d, b})) immediate = false;
    if (immediate) edge(a, b, "co");
  }
  os << "}\n";
  return os.str();
}

inline std::string to_json(const EventGraph& g, const ExecutionWitness& w,
                           const std::string& program, const std::string& source_model,
                           const std::string& target_model, const std::string& verdict) {
  nlohmann::json j;
  j["program"] = program;
  j["sourceModel"] = source_model;
  j["targetModel"] = target_model;
  j["verdict"] = verdict;
  j["executed"] = std::vector<int>(w.executed.begin(), w.executed.end());
  auto pairs = [](const PairSet& ps) {
    std::vector<std::vector<int>> out;
    for (auto& [a, b] : ps) out.push_back({a, b});
    return out;
  };
  j["rf"] = pairs(w.rf);
  j["co"] = pairs(w.co);
  nlohmann::json vals = nlohmann::json::object();
  for (auto& [e, v] : w.values) vals[std::to_string(e)] = v;
  j["values"] = vals;
  State st = reach_state(g, w);
  nlohmann::json state = nlohmann::json::object();
  for (auto& [l, v] : st.locations) state[l] = v;
  for (auto& [r, v] : st.registers) state[r] = v;
  j["state"] = state;
  j["violated"] = w.violated;
  j["cycle"] = pairs(w.cycle);
  return j.dump(2);
}

inline ExecutionWitness from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExecutionWitness w;
  for (auto& e : j["executed"]) w.executed.insert(e.get<int>());
  for (auto& p : j["rf"]) w.rf.insert({p[0].get<int>(), p[1].get<int>()});
  for (auto& p : j["co"]) w.co.insert({p[0].get<int>(), p[1].get<int>()});
  for (auto& [k, v] : j["values"].items()) w.values[std::stoi(k)] = v.get<long>();
  for (auto& v : j["violated"]) w.violated.push_back(v.get<std::string>());
  for (auto& p : j["cycle"]) w.cycle.insert({p[0].get<int>(), p[1].get<int>()});
  return w;
}

} // namespace porthos::witness
