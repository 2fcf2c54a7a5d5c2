#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "porthos/driver.hpp"

namespace testutil {

inline std::string source_dir() { return PORTHOS_SOURCE_DIR; }
inline std::string binary_dir() { return PORTHOS_BINARY_DIR; }

inline std::string litmus(const std::string& name) {
  std::ifstream in(source_dir() + "/litmus/" + name);
  if (!in) throw std::runtime_error("missing litmus file " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Default solver: PORTHOS_SOLVER if set, else the bundled minisolve.
inline porthos::driver::SolverConfig solver() {
  porthos::driver::SolverConfig cfg;
  if (const char* env = getenv("PORTHOS_SOLVER")) cfg.cmd = env;
  else cfg.cmd = binary_dir() + "/minisolve {file}";
  return cfg;
}

/// Second backend for solver-independence checks, empty if none configured.
inline std::string second_solver() {
  if (const char* env = getenv("PORTHOS_SOLVER2")) return env;
  for (const char* cand : {"z3 -smt2", "cvc5 --lang smt2"}) {
    std::string probe = std::string(cand).substr(0, std::string(cand).find(' '));
    if (system(("command -v " + probe + " >/dev/null 2>&1").c_str()) == 0)
      return std::string(cand) + " {file}";
  }
  return "";
}

inline std::string porthos_bin() { return binary_dir() + "/porthos"; }

struct RunResult {
  int exit_code;
  std::string out;
};

inline RunResult run_cli(const std::string& args) {
  std::string cmd = porthos_bin() + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  RunResult r{-1, ""};
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

} // namespace testutil
