#pragma once

// SMT-LIB 2 serialization of formulas, external solver processes, and
// model parsing.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "porthos/formula.hpp"

namespace porthos::solve {

struct SolverSpawnError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverOutputParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Status { sat, unsat, unknown };

struct Value {
  bool is_bool = false;
  bool b = false;
  long i = 0;

  static Value boolean(bool v) { return {true, v, 0}; }
  static Value integer(long v) { return {false, false, v}; }
};

struct SolverResult {
  Status status = Status::unknown;
  std::map<std::string, Value> assignment;
  double wall_seconds = 0.0;

  bool get_bool(const std::string& name) const {
    auto it = assignment.find(name);
    if (it == assignment.end()) throw std::runtime_error("missing variable " + name);
    return it->second.is_bool ? it->second.b : it->second.i != 0;
  }
  long get_int(const std::string& name) const {
    auto it = assignment.find(name);
    if (it == assignment.end()) throw std::runtime_error("missing variable " + name);
    return it->second.is_bool ? (it->second.b ? 1 : 0) : it->second.i;
  }
  bool has(const std::string& name) const { return assignment.count(name) > 0; }
};

//----------------------------------------------------------------------------
// emission

namespace detail {

inline void emit_node(std::ostream& os, const formula::Formula& f, const formula::NodePtr& n) {
  using K = formula::Node::Kind;
  switch (n->kind) {
  case K::btrue: os << "true"; break;
  case K::bfalse: os << "false"; break;
  case K::bvar:
  case K::ivar: os << f.var(n->var).name; break;
  case K::iconst:
    if (n->value < 0) os << "(- " << -n->value << ")";
    else os << n->value;
    break;
  case K::band:
  case K::bor: {
    os << (n->kind == K::band ? "(and" : "(or");
    for (auto& k : n->kids) {
      os << " ";
      emit_node(os, f, k);
    }
    os << ")";
    break;
  }
  case K::bnot:
    os << "(not ";
    emit_node(os, f, n->kids[0]);
    os << ")";
    break;
  case K::implies:
  case K::iff:
  case K::int_lt:
  case K::int_le:
  case K::int_eq:
  case K::iadd:
  case K::isub:
  case K::imul: {
    const char* op = n->kind == K::implies ? "=>"
                     : n->kind == K::iff   ? "="
                     : n->kind == K::int_lt ? "<"
                     : n->kind == K::int_le ? "<="
                     : n->kind == K::int_eq ? "="
                     : n->kind == K::iadd   ? "+"
                     : n->kind == K::isub   ? "-"
                                            : "*";
    os << "(" << op;
    for (auto& k : n->kids) {
      os << " ";
      emit_node(os, f, k);
    }
    os << ")";
    break;
  }
  }
}

} // namespace detail

/// Variables decoded back out of a model, in deterministic name order.
inline std::vector<std::string> default_decode_set(const formula::Formula& f) {
  static const char* prefixes[] = {"cf_", "ex_", "clk_", "val_", "viol_",
                                   "rel_", "C_",  "Cedge_", "sigma_"};
  std::vector<std::string> names;
  for (auto& v : f.vars())
    for (const char* p : prefixes)
      if (v.name.rfind(p, 0) == 0) {
        names.push_back(v.name);
        break;
      }
  std::sort(names.begin(), names.end());
  return names;
}

inline std::string emit_smt(const formula::Formula& f, std::vector<std::string> decode_set = {}) {
  std::ostringstream os;
  bool have_int = false;
  for (auto& v : f.vars())
    if (v.sort == formula::Sort::integer) have_int = true;
  os << "(set-logic " << ((f.needs_lia() || !have_int) ? "QF_LIA" : "QF_IDL") << ")\n";

  std::vector<const formula::Var*> sorted;
  for (auto& v : f.vars()) sorted.push_back(&v);
  std::sort(sorted.begin(), sorted.end(),
            [](const formula::Var* a, const formula::Var* b) { return a->name < b->name; });
  for (auto* v : sorted)
    os << "(declare-fun " << v->name << " () "
       << (v->sort == formula::Sort::boolean ? "Bool" : "Int") << ")\n";

  for (auto& a : f.asserts()) {
    os << "(assert ";
    detail::emit_node(os, f, a);
    os << ")\n";
  }
  os << "(check-sat)\n";
  if (decode_set.empty()) decode_set = default_decode_set(f);
  if (!decode_set.empty()) {
    os << "(get-value (";
    for (size_t i = 0; i < decode_set.size(); i++) {
      if (i) os << " ";
      os << decode_set[i];
    }
    os << "))\n";
  }
  return os.str();
}

//----------------------------------------------------------------------------
// external process

namespace detail {

inline std::string write_temp_file(const std::string& contents) {
  const char* tmp = getenv("TMPDIR");
  std::string templ = std::string(tmp ? tmp : "/tmp") + "/porthos-XXXXXX";
  std::vector<char> buf(templ.begin(), templ.end());
  buf.push_back('\0');
  int fd = mkstemp(buf.data());
  if (fd < 0) throw SolverSpawnError("cannot create temp file");
  std::string path(buf.data());
  size_t off = 0;
  while (off < contents.size()) {
    ssize_t k = ::write(fd, contents.data() + off, contents.size() - off);
    if (k <= 0) {
      ::close(fd);
      throw SolverSpawnError("cannot write temp file");
    }
    off += static_cast<size_t>(k);
  }
  ::close(fd);
  return path;
}

struct RunOutput {
  std::string out;
  int exit_code = -1;
  bool timed_out = false;
  double seconds = 0.0;
};

inline RunOutput run_process(const std::string& shell_cmd, long timeout_ms) {
  int pipefd[2];
  if (pipe(pipefd) != 0) throw SolverSpawnError("pipe failed");
  auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) throw SolverSpawnError("fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    dup2(pipefd[1], 1);
    dup2(pipefd[1], 2);
    close(pipefd[0]);
    close(pipefd[1]);
    execl("/bin/sh", "sh", "-c", shell_cmd.c_str(), (char*)nullptr);
    _exit(127);
  }
  close(pipefd[1]);
  RunOutput res;
  char buf[4096];
  bool killed = false;
  for (;;) {
    auto now = std::chrono::steady_clock::now();
    long elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(now - start).count();
    long remain = timeout_ms > 0 ? timeout_ms - elapsed : 1000;
    if (timeout_ms > 0 && remain <= 0) {
      if (!killed) {
        kill(-pid, SIGKILL);
        killed = true;
        res.timed_out = true;
      }
      remain = 50;
    }
    struct pollfd p {
      pipefd[0], POLLIN, 0
    };
    int pr = poll(&p, 1, static_cast<int>(remain > 200 ? 200 : remain));
    if (pr > 0 && (p.revents & (POLLIN | POLLHUP))) {
      ssize_t k = read(pipefd[0], buf, sizeof buf);
      if (k > 0) {
        res.out.append(buf, static_cast<size_t>(k));
        continue;
      }
      if (k == 0) break; // eof
      if (errno != EINTR && errno != EAGAIN) break;
    }
    if (killed && pr <= 0) break;
  }
  close(pipefd[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
  res.seconds =
      std::chrono::duration_cast<std::chrono::duration<double>>(std::chrono::steady_clock::now() -
                                                                start)
          .count();
  return res;
}

struct SexpTok {
  std::vector<std::string> toks;
  size_t pos = 0;

  explicit SexpTok(const std::string& s) {
    size_t i = 0;
    while (i < s.size()) {
      char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        i++;
        continue;
      }
      if (c == '(' || c == ')') {
        toks.push_back(std::string(1, c));
        i++;
        continue;
      }
      if (c == '"') { // quoted strings (error messages)
        size_t j = i + 1;
        while (j < s.size() && s[j] != '"') j++;
        toks.push_back(s.substr(i, j - i + 1));
        i = j + 1;
        continue;
      }
      size_t j = i;
      while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '(' &&
             s[j] != ')')
        j++;
      toks.push_back(s.substr(i, j - i));
      i = j;
    }
  }
  bool eof() const { return pos >= toks.size(); }
  const std::string& peek() const { return toks[pos]; }
  std::string next() { return toks[pos++]; }
};

} // namespace detail

/// Runs `cmd_template` (with `{file}` substituted) on the given SMT-LIB text.
inline SolverResult run_solver(const std::string& smt_text, const std::string& cmd_template,
                               long timeout_ms = 0) {
  std::string path = detail::write_temp_file(smt_text);
  std::string cmd = cmd_template;
  size_t ph = cmd.find("{file}");
  if (ph != std::string::npos) cmd.replace(ph, 6, path);
  else cmd += " " + path;

  detail::RunOutput run = detail::run_process(cmd, timeout_ms);
  unlink(path.c_str());

  SolverResult res;
  res.wall_seconds = run.seconds;
  if (run.timed_out) {
    res.status = Status::unknown;
    return res;
  }
  if (run.exit_code == 127) throw SolverSpawnError("solver command not found: " + cmd_template);

  detail::SexpTok tk(run.out);
  bool got_status = false;
  while (!tk.eof()) {
    std::string t = tk.next();
    if (!got_status) {
      if (t == "sat") {
        res.status = Status::sat;
        got_status = true;
      } else if (t == "unsat") {
        res.status = Status::unsat;
        got_status = true;
      } else if (t == "unknown" || t == "timeout") {
        res.status = Status::unknown;
        got_status = true;
      }
      continue;
    }
    if (t != "(") continue;
    // value list: ((name val) ...) — or an (error "...") form
    while (!tk.eof() && tk.peek() != ")") {
      if (tk.peek() == "(") {
        tk.next();
        if (tk.eof()) break;
        std::string name = tk.next();
        if (name == "error") { // consume message
          while (!tk.eof() && tk.peek() != ")") tk.next();
          if (!tk.eof()) tk.next();
          continue;
        }
        std::string val;
        bool neg = false;
        if (!tk.eof() && tk.peek() == "(") { // (- 5)
          tk.next();
          std::string op = tk.eof() ? "" : tk.next();
          if (op == "-") neg = true;
          val = tk.eof() ? "" : tk.next();
          while (!tk.eof() && tk.peek() != ")") tk.next();
          if (!tk.eof()) tk.next();
        } else if (!tk.eof()) {
          val = tk.next();
        }
        while (!tk.eof() && tk.peek() != ")") tk.next();
        if (!tk.eof()) tk.next(); // close pair
        if (val == "true" || val == "false") {
          res.assignment[name] = Value::boolean(val == "true");
        } else if (!val.empty() &&
                   (std::isdigit(static_cast<unsigned char>(val[0])) || val[0] == '-')) {
          long v = std::stol(val);
          res.assignment[name] = Value::integer(neg ? -v : v);
        } else if (!val.empty()) {
          throw SolverOutputParseError("unexpected value '" + val + "' for " + name);
        }
      } else {
        tk.next();
      }
    }
    if (!tk.eof()) tk.next(); // close list
  }
  if (!got_status) {
    std::string head = run.out.substr(0, 200);
    throw SolverOutputParseError("no sat/unsat/unknown in solver output: " + head);
  }
  return res;
}

} // namespace porthos::solve
