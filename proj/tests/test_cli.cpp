#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "porthos/prog.hpp"
#include "testutil.hpp"

using testutil::run_cli;

namespace {
std::string lit(const std::string& name) { return testutil::source_dir() + "/litmus/" + name; }
} // namespace

TEST_CASE("check: exit codes 1/0 for iriw across pairs, dot emitted") {
  std::string dot = testutil::binary_dir() + "/iriw_cli.dot";
  auto r = run_cli("check -p " + lit("iriw.lit") + " -s tso -t power --dot " + dot);
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("NotPortable") != std::string::npos);
  std::ifstream d(dot);
  REQUIRE(d);
  std::string dots((std::istreambuf_iterator<char>(d)), std::istreambuf_iterator<char>());
  CHECK(dots.find("color=red") != std::string::npos);
  std::remove(dot.c_str());

  auto r2 = run_cli("check -p " + lit("iriw.lit") + " -s tso -t tso");
  CHECK(r2.exit_code == 0);
  CHECK(r2.out.find("Portable") != std::string::npos);
}

TEST_CASE("check: sb sc->tso not portable and oracle agrees") {
  auto r = run_cli("check -p " + lit("sb.lit") + " -s sc -t tso --oracle");
  CHECK(r.exit_code == 1);
}

TEST_CASE("check: json output validates against the witness schema") {
  std::string js = testutil::binary_dir() + "/iriw_cli.json";
  auto r = run_cli("check -p " + lit("iriw.lit") + " -s tso -t power --json " + js);
  REQUIRE(r.exit_code == 1);
  std::ifstream f(js);
  REQUIRE(f);
  nlohmann::json j = nlohmann::json::parse(f);
  for (const char* key : {"program", "sourceModel", "targetModel", "verdict", "executed", "rf",
                          "co", "values", "state", "violated", "cycle"})
    CHECK(j.contains(key));
  CHECK(j["program"] == "iriw");
  CHECK(j["verdict"] == "NotPortable");
  std::remove(js.c_str());
}

TEST_CASE("check: usage errors exit 2") {
  CHECK(run_cli("check -p /nonexistent.lit -s tso -t power").exit_code == 2);
  CHECK(run_cli("check -p " + lit("sb.lit") + " -s nosuchmodel -t tso").exit_code == 2);
  CHECK(run_cli("check").exit_code > 1); // missing required options
}

TEST_CASE("check: state refinement flag") {
  auto r = run_cli("check -p " + lit("iriw0.lit") + " -s tso -t power --state");
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("reachable") != std::string::npos);
  CHECK(r.out.find("1 refinement") != std::string::npos);
}

TEST_CASE("check: model files load from disk") {
  auto r = run_cli("check -p " + lit("iriw.lit") + " -s " + testutil::source_dir() +
                   "/models/tso.cat -t " + testutil::source_dir() + "/models/power.cat");
  CHECK(r.exit_code == 1);
}

TEST_CASE("check: emit-smt writes the query without solving") {
  std::string path = testutil::binary_dir() + "/cli_emit.smt2";
  auto r = run_cli("check -p " + lit("sb.lit") + " -s sc -t tso --emit-smt " + path);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("NotPortable") == std::string::npos);
  std::ifstream f(path);
  REQUIRE(f);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  CHECK(text.find("(set-logic") == 0);
  CHECK(text.find("(check-sat)") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("emitted queries are byte-identical across processes") {
  std::string p1 = testutil::binary_dir() + "/det1.smt2";
  std::string p2 = testutil::binary_dir() + "/det2.smt2";
  run_cli("check -p " + lit("iriw.lit") + " -s tso -t power --emit-smt " + p1);
  run_cli("check -p " + lit("iriw.lit") + " -s tso -t power --emit-smt " + p2);
  std::ifstream f1(p1), f2(p2);
  REQUIRE(f1);
  REQUIRE(f2);
  std::string a((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string b((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(a == b);
  CHECK(!a.empty());
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("reach: sb final states under tso and sc") {
  auto r = run_cli("reach -p " + lit("sb.lit") + " -m tso --assert \"r0=0 /\\ r1=0\"");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("Reachable") != std::string::npos);
  auto r2 = run_cli("reach -p " + lit("sb.lit") + " -m sc --assert \"r0=0 /\\ r1=0\"");
  CHECK(r2.exit_code == 1);
  CHECK(r2.out.find("Unreachable") != std::string::npos);
  // tautological assert: empty predicate
  auto r3 = run_cli("reach -p " + lit("sb.lit") + " -m sc --assert \"\"");
  CHECK(r3.exit_code == 0);
  // malformed assert
  CHECK(run_cli("reach -p " + lit("sb.lit") + " -m sc --assert \"x=\"").exit_code == 2);
  CHECK(run_cli("reach -p " + lit("sb.lit") + " -m sc --assert \"nosuch=1\"").exit_code == 2);
}

TEST_CASE("oracle: sb under sc prints three distinct outcomes") {
  auto r = run_cli("oracle -p " + lit("sb.lit") + " -m sc --states");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("distinct states: 3") != std::string::npos);
}

TEST_CASE("gen forall emits parseable .lit text") {
  auto r = run_cli("gen forall --psi \"x1\"");
  CHECK(r.exit_code == 0);
  CHECK_NOTHROW(porthos::prog::parse_program(r.out));
}

TEST_CASE("gen state emits parseable .lit text") {
  auto r = run_cli("gen state --psi \"x1 & y1\" --xvars 1 --yvars 1");
  CHECK(r.exit_code == 0);
  CHECK_NOTHROW(porthos::prog::parse_program(r.out));
}

TEST_CASE("models list and print") {
  auto r = run_cli("models list");
  CHECK(r.exit_code == 0);
  for (const char* id : {"sc", "tso", "power", "pso", "rmo", "alpha"})
    CHECK(r.out.find(id) != std::string::npos);
  auto r2 = run_cli("models print tso");
  CHECK(r2.exit_code == 0);
  CHECK(r2.out.find("model tso") == 0);
  CHECK(r2.out.find("rfe | co | fr | (po \\ W*R) | mfence") != std::string::npos);
  CHECK(run_cli("models print nosuch").exit_code == 2);
}

TEST_CASE("unroll bound flag drives loop unrolling") {
  auto r1 = run_cli("check -p " + lit("peterson.lit") + " -s sc -t tso -k 1");
  CHECK(r1.exit_code == 1);
  auto r2 = run_cli("check -p " + lit("peterson.lit") + " -s sc -t sc -k 2");
  CHECK(r2.exit_code == 0);
}

TEST_CASE("dead and dead-strict flags are accepted and keep verdicts sound") {
  auto plain = run_cli("check -p " + lit("mp.lit") + " -s tso -t power");
  auto dead = run_cli("check -p " + lit("mp.lit") + " -s tso -t power --dead");
  auto strict = run_cli("check -p " + lit("mp.lit") + " -s tso -t power --dead-strict");
  CHECK(plain.exit_code == 1);
  // deadness can only shrink the search space
  CHECK((dead.exit_code == 0 || dead.exit_code == 1));
  CHECK((strict.exit_code == 0 || strict.exit_code == 1));
  if (dead.exit_code == 1) CHECK(plain.exit_code == 1);
}

TEST_CASE("PORTHOS_SOLVER environment variable selects the backend") {
  std::string cmd = "PORTHOS_SOLVER='" + testutil::binary_dir() +
                    "/minisolve {file}' " + testutil::porthos_bin() + " check -p " +
                    lit("sb.lit") + " -s sc -t tso >/dev/null 2>&1; echo $?";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[16] = {0};
  REQUIRE(fgets(buf, sizeof buf, p));
  pclose(p);
  CHECK(std::string(buf).find("1") == 0);
}

TEST_CASE("oracle: exceeding the event limit is an error") {
  auto r = run_cli("oracle -p " + lit("iriw.lit") + " -m sc --limit 3");
  CHECK(r.exit_code == 2);
}

TEST_CASE("explicit --solver template overrides the default") {
  std::string solver = testutil::binary_dir() + "/minisolve {file}";
  auto r = run_cli("check -p " + lit("sb.lit") + " -s sc -t tso --solver \"" + solver + "\"");
  CHECK(r.exit_code == 1);
  auto bad = run_cli("check -p " + lit("sb.lit") + " -s sc -t tso --solver no-such-solver");
  CHECK(bad.exit_code == 2);
}
