// porthos — bounded portability analysis between axiomatic memory models.

#include <fstream>
#include <iostream>
#include <limits.h>
#include <sstream>
#include <unistd.h>

#include <CLI11.hpp>

#include "porthos/driver.hpp"
#include "porthos/gen.hpp"
#include "porthos/models.hpp"
#include "porthos/oracle.hpp"
#include "porthos/prog.hpp"

using namespace porthos;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string self_dir() {
  char buf[PATH_MAX];
  ssize_t n = readlink("/proc/self/exe", buf, sizeof buf - 1);
  if (n <= 0) return ".";
  buf[n] = '\0';
  std::string p(buf);
  size_t slash = p.rfind('/');
  return slash == std::string::npos ? "." : p.substr(0, slash);
}

driver::SolverConfig solver_config(const std::string& flag, long timeout_secs) {
  driver::SolverConfig cfg;
  if (!flag.empty()) cfg.cmd = flag;
  else if (const char* env = getenv("PORTHOS_SOLVER")) cfg.cmd = env;
  else cfg.cmd = self_dir() + "/minisolve {file}";
  cfg.timeout_ms = timeout_secs * 1000;
  return cfg;
}

cat::MemoryModel load_model(const std::string& spec) {
  auto& builtins = cat::builtin_model_texts();
  if (builtins.count(spec)) return cat::builtin_model(spec);
  std::ifstream probe(spec);
  if (probe) return cat::parse_cat(read_file(spec));
  throw std::runtime_error("unknown model '" + spec + "' (builtin ids: sc tso power pso rmo "
                           "alpha, or a .cat file path)");
}

prog::Program load_program(const std::string& path, int unroll_bound) {
  std::vector<Diagnostic> warnings;
  prog::Program p = prog::parse_program(read_file(path), &warnings);
  for (auto& w : warnings) std::cerr << "porthos: " << w.str() << "\n";
  prog::Program u = prog::unroll(p, unroll_bound);
  auto diags = prog::validate(u, /*require_acyclic=*/true);
  for (auto& d : diags)
    if (d.severity == Diagnostic::Severity::error)
      throw std::runtime_error("invalid program: " + d.message);
  return u;
}

// "x=1 /\ r0=0 /\ t0.r1=2"
State parse_assert(const std::string& text, const events::EventGraph& g) {
  State s;
  size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) i++;
  };
  skip();
  if (i >= text.size()) return s; // empty predicate is trivially true
  for (;;) {
    skip();
    size_t j = i;
    while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                               text[j] == '_' || text[j] == '.'))
      j++;
    if (j == i) throw std::runtime_error("assert: expected location or register");
    std::string name = text.substr(i, j - i);
    i = j;
    skip();
    if (i >= text.size() || text[i] != '=') throw std::runtime_error("assert: expected '='");
    i++;
    skip();
    j = i;
    if (j < text.size() && text[j] == '-') j++;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) j++;
    if (j == i) throw std::runtime_error("assert: expected integer");
    long v = std::stol(text.substr(i, j - i));
    i = j;

    if (g.init_values.count(name)) {
      s.locations[name] = v;
    } else if (name.find('.') != std::string::npos) {
      s.registers[name] = v;
    } else {
      // unqualified register: must be unique across threads
      std::string found;
      for (auto& t : g.program.threads)
        if (prog::thread_registers(t).count(name)) {
          if (!found.empty())
            throw std::runtime_error("assert: register " + name +
                                     " exists in several threads, qualify as tid." + name);
          found = t.tid + "." + name;
        }
      if (found.empty()) throw std::runtime_error("assert: unknown name " + name);
      s.registers[found] = v;
    }
    skip();
    if (i + 1 < text.size() && (text.compare(i, 2, "/\\") == 0 || text.compare(i, 2, "&&") == 0)) {
      i += 2;
      continue;
    }
    if (i < text.size() && text[i] == '&') {
      i++;
      continue;
    }
    if (i >= text.size()) break;
    throw std::runtime_error("assert: trailing input at '" + text.substr(i) + "'");
  }
  return s;
}

void write_out(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

int cmd_check(const std::string& pfile, const std::string& src, const std::string& tgt, int k,
              bool dead, bool dead_strict, bool state, const std::string& emit_smt_path,
              const std::string& dot_path, const std::string& json_path, bool oracle_check,
              int oracle_limit, const std::string& solver_flag, long timeout, int budget) {
  prog::Program p = load_program(pfile, k);
  events::EventGraph g = events::compile(p);
  cat::MemoryModel m_src = load_model(src);
  cat::MemoryModel m_tgt = load_model(tgt);
  driver::SolverConfig solver = solver_config(solver_flag, timeout);
  encode::PortabilityOptions opts;
  opts.dead = dead || dead_strict;
  opts.dead_strict = dead_strict;

  if (!emit_smt_path.empty()) {
    encode::Encoding enc = encode::encode_portability(g, m_src, m_tgt, opts);
    write_out(emit_smt_path, solve::emit_smt(enc.formula));
    std::cout << "query written to " << emit_smt_path << "\n";
    return 0;
  }

  if (state) {
    driver::StateCheckResult res =
        driver::check_state_refinement(g, m_src, m_tgt, solver, opts, budget);
    switch (res.state) {
    case driver::StateVerdict::portable: std::cout << "Portable\n"; return 0;
    case driver::StateVerdict::state_reachable:
      std::cout << "NotPortable (every counterexample state is reachable under " << src << "; "
                << res.refinement_queries << " refinement queries)\n";
      break;
    case driver::StateVerdict::new_state:
      std::cout << "NotPortable (new state under " << tgt << ": " << res.offending_state->str()
                << ")\n";
      break;
    case driver::StateVerdict::undecided:
      std::cout << "Unknown (state portability undecided within budget)\n";
      return 3;
    }
    if (res.counterexample && !dot_path.empty())
      write_out(dot_path, witness::to_dot(g, *res.counterexample));
    if (res.counterexample && !json_path.empty())
      write_out(json_path,
                witness::to_json(g, *res.counterexample, p.name, src, tgt, "NotPortable"));
    return 1;
  }

  driver::CheckResult res = driver::check_portability(g, m_src, m_tgt, solver, opts);
  if (oracle_check) {
    oracle::PortabilityVerdict ov = oracle::portable_bruteforce(g, m_src, m_tgt, oracle_limit);
    if (res.verdict == driver::Verdict::unknown) {
      std::cerr << "porthos: solver returned unknown, oracle cross-check impossible\n";
      return 3;
    }
    bool smt_portable = res.verdict == driver::Verdict::portable;
    if (ov.portable != smt_portable) {
      std::cerr << "porthos: oracle disagrees (solver: "
                << (smt_portable ? "Portable" : "NotPortable") << ", oracle: "
                << (ov.portable ? "Portable" : "NotPortable") << ")\n";
      return 2;
    }
  }
  switch (res.verdict) {
  case driver::Verdict::portable: std::cout << "Portable\n"; return 0;
  case driver::Verdict::unknown: std::cout << "Unknown\n"; return 3;
  case driver::Verdict::not_portable: break;
  }
  if (!res.validation.ok) {
    std::cerr << "porthos: internal error, witness failed validation:\n" << res.validation.str();
    return 2;
  }
  const witness::ExecutionWitness& w = *res.counterexample;
  std::cout << "NotPortable (violates " << src << " axiom";
  for (auto& l : w.violated) std::cout << " " << l;
  std::cout << ", state " << witness::reach_state(g, w).str() << ")\n";
  if (!dot_path.empty()) write_out(dot_path, witness::to_dot(g, w));
  if (!json_path.empty())
    write_out(json_path, witness::to_json(g, w, p.name, src, tgt, "NotPortable"));
  return 1;
}

int cmd_reach(const std::string& pfile, const std::string& model, const std::string& assert_text,
              int k, const std::string& emit_smt_path, const std::string& solver_flag,
              long timeout) {
  prog::Program p = load_program(pfile, k);
  events::EventGraph g = events::compile(p);
  cat::MemoryModel m = load_model(model);
  State sigma = parse_assert(assert_text, g);
  driver::SolverConfig solver = solver_config(solver_flag, timeout);
  if (!emit_smt_path.empty()) {
    encode::Encoding enc = encode::encode_reachability(g, m, sigma);
    write_out(emit_smt_path, solve::emit_smt(enc.formula));
    std::cout << "query written to " << emit_smt_path << "\n";
    return 0;
  }
  driver::ReachResult res = driver::check_reachability(g, m, sigma, solver);
  if (res.verdict == driver::Verdict::unknown) {
    std::cout << "Unknown\n";
    return 3;
  }
  if (res.reachable) {
    std::cout << "Reachable (state " << witness::reach_state(g, *res.witness_).str() << ")\n";
    return 0;
  }
  std::cout << "Unreachable\n";
  return 1;
}

int cmd_oracle(const std::string& pfile, const std::string& model, bool states, bool executions,
               int limit, int k) {
  prog::Program p = load_program(pfile, k);
  events::EventGraph g = events::compile(p);
  cat::MemoryModel m = load_model(model);
  auto cons = oracle::consistent_set(g, m, limit);
  std::cout << "consistent executions: " << cons.size() << "\n";
  if (states) {
    std::set<State> st;
    for (auto& w : cons) st.insert(witness::reach_state(g, w));
    std::cout << "distinct states: " << st.size() << "\n";
    for (auto& s : st) std::cout << "  " << s.str() << "\n";
  }
  if (executions) {
    for (auto& w : cons) {
      std::cout << "  executed:";
      for (int e : w.executed) std::cout << " " << e;
      std::cout << " rf:";
      for (auto& [a, b] : w.rf) std::cout << " " << a << "->" << b;
      std::cout << " co:";
      for (auto& [a, b] : w.co) std::cout << " " << a << "->" << b;
      std::cout << "\n";
    }
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"porthos: bounded portability analysis for weak memory models"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "decide portability of a program");
  std::string pfile, src, tgt, emit_smt_path, dot_path, json_path, solver_flag, assert_text,
      model;
  int k = 1, oracle_limit = 12, budget = 16, limit = 12;
  long timeout = 0;
  bool dead = false, dead_strict = false, state = false, oracle_check = false, states = false,
       executions = false;
  check->add_option("-p,--program", pfile, "program (.lit)")->required();
  check->add_option("-s,--source", src, "source model (builtin id or .cat)")->required();
  check->add_option("-t,--target", tgt, "target model (builtin id or .cat)")->required();
  check->add_option("-k,--unroll", k, "loop unrolling bound (default 1)");
  check->add_flag("--dead", dead, "restrict to syntactically dead executions");
  check->add_flag("--dead-strict", dead_strict,
                  "deadness with init writes excluded from range(rf)");
  check->add_flag("--state", state, "refine the verdict with state reachability queries");
  check->add_option("--budget", budget, "refinement query budget (default 16)");
  check->add_option("--emit-smt", emit_smt_path, "write the SMT-LIB query to a file");
  check->add_option("--dot", dot_path, "write the counterexample as DOT");
  check->add_option("--json", json_path, "write the counterexample as JSON");
  check->add_flag("--oracle", oracle_check, "cross-check against brute-force enumeration");
  check->add_option("--oracle-limit", oracle_limit, "event limit for --oracle (default 12)");
  check->add_option("--solver", solver_flag, "solver command, {file} placeholder");
  check->add_option("--timeout", timeout, "solver timeout in seconds");

  auto* reach = app.add_subcommand("reach", "final-state reachability under one model");
  reach->add_option("-p,--program", pfile, "program (.lit)")->required();
  reach->add_option("-m,--model", model, "model (builtin id or .cat)")->required();
  reach->add_option("--assert", assert_text, "final state, e.g. \"x=1 /\\ r0=0\"");
  reach->add_option("-k,--unroll", k, "loop unrolling bound (default 1)");
  reach->add_option("--emit-smt", emit_smt_path, "write the SMT-LIB query to a file");
  reach->add_option("--solver", solver_flag, "solver command, {file} placeholder");
  reach->add_option("--timeout", timeout, "solver timeout in seconds");

  auto* orc = app.add_subcommand("oracle", "brute-force enumeration of executions");
  orc->add_option("-p,--program", pfile, "program (.lit)")->required();
  orc->add_option("-m,--model", model, "model (builtin id or .cat)")->required();
  orc->add_flag("--states", states, "print distinct reachable states");
  orc->add_flag("--executions", executions, "print consistent executions");
  orc->add_option("--limit", limit, "event limit (default 12)");
  orc->add_option("-k,--unroll", k, "loop unrolling bound (default 1)");

  auto* gen_cmd = app.add_subcommand("gen", "emit reduction programs as .lit text");
  std::string psi_text, np_file;
  int vars = 0, xvars = 0, yvars = 0;
  auto* gen_forall = gen_cmd->add_subcommand("forall", "P_forall-psi construction");
  gen_forall->add_option("--psi", psi_text, "formula over x1..xm")->required();
  gen_forall->add_option("--vars", vars, "number of variables m (default: inferred)");
  gen_forall->add_option("--np", np_file,
                         "non-portable seed program (default: store buffering)");
  auto* gen_state = gen_cmd->add_subcommand("state", "P_s construction");
  gen_state->add_option("--psi", psi_text, "formula over x1..xn, y1..ym")->required();
  gen_state->add_option("--xvars", xvars, "number of universal variables")->required();
  gen_state->add_option("--yvars", yvars, "number of existential variables")->required();
  gen_cmd->require_subcommand(1);

  auto* models_cmd = app.add_subcommand("models", "list or print builtin models");
  auto* models_list = models_cmd->add_subcommand("list", "list builtin model ids");
  auto* models_print = models_cmd->add_subcommand("print", "print a builtin model");
  std::string model_id;
  models_print->add_option("id", model_id, "model id")->required();
  models_cmd->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check)
      return cmd_check(pfile, src, tgt, k, dead, dead_strict, state, emit_smt_path, dot_path,
                       json_path, oracle_check, oracle_limit, solver_flag, timeout, budget);
    if (*reach)
      return cmd_reach(pfile, model, assert_text, k, emit_smt_path, solver_flag, timeout);
    if (*orc) return cmd_oracle(pfile, model, states, executions, limit, k);
    if (*gen_forall) {
      std::set<std::string> vs;
      gen::BoolPtr psi = gen::parse_psi(psi_text);
      gen::bool_vars(psi, vs);
      int m = vars;
      for (auto& v : vs)
        if (v.size() > 1 && v[0] == 'x') m = std::max(m, std::stoi(v.substr(1)));
      prog::Program np = np_file.empty()
                             ? prog::parse_program("program sb\nthread t0\n x := 1;\n r0 <- y\n"
                                                   "thread t1\n y := 1;\n r1 <- x\n")
                             : prog::parse_program(read_file(np_file));
      std::cout << gen::gen_forall_text(psi, m, np);
      return 0;
    }
    if (*gen_state) {
      std::cout << gen::gen_state_text(gen::parse_psi(psi_text), xvars, yvars);
      return 0;
    }
    if (*models_list) {
      for (auto& id : cat::builtin_model_ids()) std::cout << id << "\n";
      return 0;
    }
    if (*models_print) {
      std::cout << cat::builtin_model_text(model_id);
      return 0;
    }
  } catch (const parse_error& e) {
    std::cerr << "porthos: parse error at " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "porthos: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
