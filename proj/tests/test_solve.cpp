#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "porthos/driver.hpp"
#include "porthos/encode.hpp"
#include "porthos/events.hpp"
#include "porthos/models.hpp"
#include "porthos/solve.hpp"
#include "testutil.hpp"

using namespace porthos;
using formula::Formula;

TEST_CASE("sat instance: every queried variable decoded") {
  Formula f;
  f.assert_(Formula::lor({f.bv("cf_1"), f.bv("cf_2")}));
  f.assert_(f.lt(f.iv("clk_0"), f.iv("clk_1")));
  auto res = solve::run_solver(solve::emit_smt(f), testutil::solver().cmd);
  REQUIRE(res.status == solve::Status::sat);
  CHECK(res.has("cf_1"));
  CHECK(res.has("cf_2"));
  CHECK(res.get_int("clk_0") < res.get_int("clk_1"));
}

TEST_CASE("unsat instance: empty assignment") {
  Formula f;
  auto a = f.bv("cf_1");
  f.assert_(a);
  f.assert_(Formula::lnot(a));
  auto res = solve::run_solver(solve::emit_smt(f), testutil::solver().cmd);
  CHECK(res.status == solve::Status::unsat);
  CHECK(res.assignment.empty());
}

TEST_CASE("model round trip: re-asserting the model keeps satisfiability") {
  auto g = events::compile(prog::parse_program(testutil::litmus("sb.lit")));
  encode::Encoding enc =
      encode::encode_portability(g, cat::builtin_model("sc"), cat::builtin_model("tso"));
  std::string smt = solve::emit_smt(enc.formula);
  auto res = solve::run_solver(smt, testutil::solver().cmd);
  REQUIRE(res.status == solve::Status::sat);
  // bolt the returned assignment back on as unit constraints
  std::string units;
  for (auto& [name, v] : res.assignment) {
    if (v.is_bool) units += "(assert " + std::string(v.b ? "" : "(not ") + name +
                            std::string(v.b ? "" : ")") + ")\n";
    else units += "(assert (= " + name + " " +
                  (v.i < 0 ? "(- " + std::to_string(-v.i) + ")" : std::to_string(v.i)) + "))\n";
  }
  size_t cs = smt.find("(check-sat)");
  REQUIRE(cs != std::string::npos);
  std::string again = smt.substr(0, cs) + units + smt.substr(cs);
  auto res2 = solve::run_solver(again, testutil::solver().cmd);
  CHECK(res2.status == solve::Status::sat);
}

TEST_CASE("timeout reports unknown with elapsed near the limit") {
  auto res = solve::run_solver("", "sleep 5 #{file}", 300);
  CHECK(res.status == solve::Status::unknown);
  CHECK(res.wall_seconds < 2.0);
}

TEST_CASE("missing solver binary raises a spawn error") {
  CHECK_THROWS_AS(solve::run_solver("(check-sat)", "definitely-no-such-solver {file}"),
                  solve::SolverSpawnError);
}

TEST_CASE("garbage output raises a parse error") {
  CHECK_THROWS_AS(solve::run_solver("", "echo gibberish"), solve::SolverOutputParseError);
}

TEST_CASE("emitted bytes are identical across runs") {
  auto g = events::compile(prog::parse_program(testutil::litmus("iriw.lit")));
  auto enc1 =
      encode::encode_portability(g, cat::builtin_model("tso"), cat::builtin_model("power"));
  auto enc2 =
      encode::encode_portability(g, cat::builtin_model("tso"), cat::builtin_model("power"));
  CHECK(solve::emit_smt(enc1.formula) == solve::emit_smt(enc2.formula));
}

TEST_CASE("iriw query parses under a second solver when one is configured") {
  std::string second = testutil::second_solver();
  if (second.empty()) {
    MESSAGE("no second solver configured; skipping cross-solver check");
    return;
  }
  auto g = events::compile(prog::parse_program(testutil::litmus("iriw.lit")));
  auto enc =
      encode::encode_portability(g, cat::builtin_model("tso"), cat::builtin_model("power"));
  std::string smt = solve::emit_smt(enc.formula);
  auto a = solve::run_solver(smt, testutil::solver().cmd);
  auto b = solve::run_solver(smt, second);
  CHECK(a.status == solve::Status::sat);
  CHECK(b.status == solve::Status::sat);
}

TEST_CASE("solver-independence on the litmus corpus when a second backend exists") {
  std::string second = testutil::second_solver();
  if (second.empty()) {
    MESSAGE("no second solver configured; skipping");
    return;
  }
  for (const char* name : {"sb.lit", "mp.lit", "lb.lit", "iriw.lit"}) {
    auto g = events::compile(prog::parse_program(testutil::litmus(name)));
    for (auto& [s, t] : std::vector<std::pair<std::string, std::string>>{
             {"sc", "tso"}, {"tso", "power"}}) {
      auto enc = encode::encode_portability(g, cat::builtin_model(s), cat::builtin_model(t));
      std::string smt = solve::emit_smt(enc.formula);
      auto r1 = solve::run_solver(smt, testutil::solver().cmd);
      auto r2 = solve::run_solver(smt, second);
      CAPTURE(name);
      CHECK(r1.status == r2.status);
    }
  }
}

TEST_CASE("get-value section lists the decode set") {
  auto g = events::compile(prog::parse_program(testutil::litmus("sb.lit")));
  auto enc =
      encode::encode_portability(g, cat::builtin_model("sc"), cat::builtin_model("tso"));
  std::string smt = solve::emit_smt(enc.formula);
  CHECK(smt.find("(get-value (") != std::string::npos);
  for (const char* pfx : {"cf_", "ex_", "clk_", "val_", "viol_", "rel_rf", "rel_co"})
    CHECK(smt.find(pfx) != std::string::npos);
}
