#pragma once

// End-to-end workflows: encode, emit, solve, decode, validate.

#include <optional>
#include <string>

#include "porthos/encode.hpp"
#include "porthos/events.hpp"
#include "porthos/solve.hpp"
#include "porthos/witness.hpp"

namespace porthos::driver {

struct SolverConfig {
  std::string cmd = "minisolve {file}"; // callers usually resolve a full path
  long timeout_ms = 0;                  // 0 = no timeout
};

enum class Verdict { portable, not_portable, unknown };

struct CheckResult {
  Verdict verdict = Verdict::unknown;
  std::optional<witness::ExecutionWitness> counterexample;
  encode::EncodingInfo info;
  witness::ValidationReport validation; // filled on sat
  double solve_seconds = 0.0;
  std::string smt; // emitted text of the (first) query
};

inline CheckResult check_portability(const events::EventGraph& g, const cat::MemoryModel& m_src,
                                     const cat::MemoryModel& m_tgt, const SolverConfig& solver,
                                     const encode::PortabilityOptions& opts = {}) {
  encode::Encoding enc = encode::encode_portability(g, m_src, m_tgt, opts);
  CheckResult res;
  res.smt = solve::emit_smt(enc.formula);
  res.info = enc.info;
  solve::SolverResult sr = solve::run_solver(res.smt, solver.cmd, solver.timeout_ms);
  res.solve_seconds = sr.wall_seconds;
  if (sr.status == solve::Status::unsat) {
    res.verdict = Verdict::portable;
  } else if (sr.status == solve::Status::sat) {
    res.verdict = Verdict::not_portable;
    res.counterexample = witness::decode(sr, g, enc.info);
    res.validation = witness::validate_witness(g, *res.counterexample, m_src, m_tgt);
  }
  return res;
}

struct ReachResult {
  Verdict verdict = Verdict::unknown; // portable = unreachable here
  bool reachable = false;
  std::optional<witness::ExecutionWitness> witness_;
  double solve_seconds = 0.0;
  std::string smt;
};

inline ReachResult check_reachability(const events::EventGraph& g, const cat::MemoryModel& m,
                                      const State& sigma, const SolverConfig& solver) {
  encode::Encoding enc = encode::encode_reachability(g, m, sigma);
  ReachResult res;
  res.smt = solve::emit_smt(enc.formula);
  solve::SolverResult sr = solve::run_solver(res.smt, solver.cmd, solver.timeout_ms);
  res.solve_seconds = sr.wall_seconds;
  if (sr.status == solve::Status::sat) {
    res.reachable = true;
    res.verdict = Verdict::not_portable; // exit-code mapping only
    res.witness_ = witness::decode(sr, g, enc.info);
  } else if (sr.status == solve::Status::unsat) {
    res.verdict = Verdict::portable;
  }
  return res;
}

// Sound refinement loop for state portability (the extra-query scheme): a
// non-portable witness whose final state the source model cannot reach is a
// definite state-portability bug; reachable states are blocked and the
// search repeats up to a budget.
enum class StateVerdict {
  portable,          // no portability bug at all
  state_reachable,   // not portable, but every counterexample state is reachable
  new_state,         // not portable and a new state was found
  undecided          // budget exhausted
};

struct StateCheckResult {
  Verdict plain = Verdict::unknown;
  StateVerdict state = StateVerdict::undecided;
  int refinement_queries = 0;
  std::optional<State> offending_state;
  std::optional<witness::ExecutionWitness> counterexample;
  encode::EncodingInfo info;
};

inline StateCheckResult check_state_refinement(const events::EventGraph& g,
                                               const cat::MemoryModel& m_src,
                                               const cat::MemoryModel& m_tgt,
                                               const SolverConfig& solver,
                                               encode::PortabilityOptions opts = {},
                                               int budget = 16) {
  StateCheckResult out;
  opts.with_sigma = true;
  std::vector<State> blocked;
  for (int round = 0; round <= budget; round++) {
    encode::Encoding enc;
    {
      formula::Formula& f = enc.formula;
      encode::Encoder e(f, g);
      e.control_flow();
      e.data_flow();
      e.base_axioms();
      e.elaborate_model(m_tgt, "tgt");
      e.assert_axioms_hold(m_tgt, "tgt");
      e.elaborate_model(m_src, "src");
      e.assert_violation(m_src, "src");
      if (opts.dead) e.deadness(opts.dead_strict);
      e.sigma_vars();
      for (auto& s : blocked) e.block_state(s);
      enc.info = e.take_info();
    }
    solve::SolverResult sr = solve::run_solver(solve::emit_smt(enc.formula), solver.cmd,
                                               solver.timeout_ms);
    if (sr.status == solve::Status::unknown) {
      out.state = StateVerdict::undecided;
      return out;
    }
    if (sr.status == solve::Status::unsat) {
      if (round == 0) {
        out.plain = Verdict::portable;
        out.state = StateVerdict::portable;
      } else {
        out.plain = Verdict::not_portable;
        out.state = StateVerdict::state_reachable;
      }
      out.info = enc.info;
      return out;
    }
    witness::ExecutionWitness w = witness::decode(sr, g, enc.info);
    if (round == 0) {
      out.counterexample = w;
      out.info = enc.info;
    }
    out.plain = Verdict::not_portable;
    State sigma = witness::reach_state(g, w);

    out.refinement_queries++;
    ReachResult reach = check_reachability(g, m_src, sigma, solver);
    if (reach.verdict == Verdict::unknown) {
      out.state = StateVerdict::undecided;
      return out;
    }
    if (!reach.reachable) {
      out.state = StateVerdict::new_state;
      out.offending_state = sigma;
      out.counterexample = w;
      return out;
    }
    blocked.push_back(sigma);
  }
  out.state = StateVerdict::undecided;
  return out;
}

/// Exhaustive set of reachable final states, by blocked reachability
/// queries; location-only when include_registers is false.
inline std::optional<std::set<State>> enumerate_states_smt(const events::EventGraph& g,
                                                           const cat::MemoryModel& m,
                                                           const SolverConfig& solver,
                                                           bool include_registers = true,
                                                           int budget = 256) {
  std::set<State> states;
  for (int round = 0; round < budget; round++) {
    encode::Encoding enc;
    formula::Formula& f = enc.formula;
    encode::Encoder e(f, g);
    e.control_flow();
    e.data_flow();
    e.base_axioms();
    e.elaborate_model(m, "m");
    e.assert_axioms_hold(m, "m");
    e.sigma_vars();
    for (auto& s : states) e.block_state(s);
    enc.info = e.take_info();
    solve::SolverResult sr =
        solve::run_solver(solve::emit_smt(enc.formula), solver.cmd, solver.timeout_ms);
    if (sr.status == solve::Status::unsat) return states;
    if (sr.status != solve::Status::sat) return std::nullopt;
    witness::ExecutionWitness w = witness::decode(sr, g, enc.info);
    State s = witness::reach_state(g, w);
    if (!include_registers) s.registers.clear();
    if (!states.insert(s).second) return std::nullopt; // blocking failed
  }
  return std::nullopt;
}

} // namespace porthos::driver
