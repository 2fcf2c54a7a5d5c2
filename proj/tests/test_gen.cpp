#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "porthos/driver.hpp"
#include "porthos/gen.hpp"
#include "porthos/models.hpp"
#include "porthos/oracle.hpp"
#include "testutil.hpp"

using namespace porthos;

namespace {

prog::Program sb() { return prog::parse_program(testutil::litmus("sb.lit")); }

bool tautology(const gen::BoolPtr& psi, int m) {
  for (int bits = 0; bits < (1 << m); bits++) {
    std::map<std::string, bool> env;
    for (int v = 0; v < m; v++) env["x" + std::to_string(v + 1)] = (bits >> v) & 1;
    if (!gen::eval_bool(psi, env)) return false;
  }
  return true;
}

bool oracle_portable(const prog::Program& p) {
  auto g = events::compile(p);
  return oracle::portable_bruteforce(g, cat::builtin_model("sc"), cat::builtin_model("tso"), 20)
      .portable;
}

bool smt_portable(const prog::Program& p) {
  auto g = events::compile(p);
  auto res = driver::check_portability(g, cat::builtin_model("sc"), cat::builtin_model("tso"),
                                       testutil::solver());
  REQUIRE(res.verdict != driver::Verdict::unknown);
  if (res.verdict == driver::Verdict::not_portable) REQUIRE(res.validation.ok);
  return res.verdict == driver::Verdict::portable;
}

} // namespace

TEST_CASE("psi parser handles connectives and constants") {
  auto psi = gen::parse_psi("x1 & (!x2 | x3)");
  std::map<std::string, bool> env{{"x1", true}, {"x2", true}, {"x3", true}};
  CHECK(gen::eval_bool(psi, env));
  env["x3"] = false;
  CHECK(!gen::eval_bool(psi, env));
  CHECK(gen::eval_bool(gen::parse_psi("true"), {}));
  CHECK(!gen::eval_bool(gen::parse_psi("false"), {}));
  CHECK_THROWS_AS(gen::parse_psi("x1 &"), parse_error);
}

TEST_CASE("generated programs parse back and validate") {
  auto p = gen::gen_forall(gen::parse_psi("x1 & x2"), 2, sb());
  CHECK(prog::validate(p, true).empty());
  auto q = gen::gen_state(gen::parse_psi("x1"), 1, 0);
  CHECK(prog::validate(q, true).empty());
}

TEST_CASE("tautology seeds a portable program") {
  auto p = gen::gen_forall(gen::parse_psi("x1 | !x1"), 1, sb());
  CHECK(oracle_portable(p));
  CHECK(smt_portable(p));
}

TEST_CASE("satisfiable-but-falsifiable psi is not portable") {
  auto p = gen::gen_forall(gen::parse_psi("x1"), 1, sb());
  CHECK(!oracle_portable(p));
  CHECK(!smt_portable(p));
}

TEST_CASE("zero-variable false psi always runs the seed") {
  auto p = gen::gen_forall(gen::parse_psi("false"), 0, sb());
  CHECK(!oracle_portable(p));
  CHECK(!smt_portable(p));
}

TEST_CASE("tautology property over all 16 two-variable functions, smt and oracle") {
  std::vector<std::string> vars = {"x1", "x2"};
  for (int table = 0; table < 16; table++) {
    std::vector<bool> rows;
    for (int r = 0; r < 4; r++) rows.push_back((table >> r) & 1);
    gen::BoolPtr psi = gen::from_truth_table(vars, rows);
    prog::Program p = gen::gen_forall(psi, 2, sb());
    bool taut = tautology(psi, 2);
    CAPTURE(table);
    CHECK(oracle_portable(p) == taut);
    CHECK(smt_portable(p) == taut);
  }
}

TEST_CASE("state construction: invalid formula gives a target-only state") {
  // forall x1: x1 is invalid
  auto p = gen::gen_state(gen::parse_psi("x1"), 1, 0);
  auto g = events::compile(p);
  auto sc = cat::builtin_model("sc");
  auto tso = cat::builtin_model("tso");
  auto s_src = driver::enumerate_states_smt(g, sc, testutil::solver(), false, 256);
  auto s_tgt = driver::enumerate_states_smt(g, tso, testutil::solver(), false, 256);
  REQUIRE(s_src.has_value());
  REQUIRE(s_tgt.has_value());
  bool portable = true;
  for (auto& s : *s_tgt)
    if (!s_src->count(s)) portable = false;
  CHECK(!portable);
}

TEST_CASE("state construction: valid formula keeps the state sets equal") {
  // forall x1 exists y1: x1 = y1
  auto psi = gen::parse_psi("(x1 & y1) | (!x1 & !y1)");
  auto p = gen::gen_state(psi, 1, 1);
  auto g = events::compile(p);
  auto sc = cat::builtin_model("sc");
  auto tso = cat::builtin_model("tso");
  auto s_src = driver::enumerate_states_smt(g, sc, testutil::solver(), false, 256);
  auto s_tgt = driver::enumerate_states_smt(g, tso, testutil::solver(), false, 256);
  REQUIRE(s_src.has_value());
  REQUIRE(s_tgt.has_value());
  CHECK(*s_src == *s_tgt);
}

TEST_CASE("state construction: zero quantified variables, true psi") {
  auto p = gen::gen_state(gen::parse_psi("true"), 0, 0);
  auto g = events::compile(p);
  // small enough for the brute-force oracle, location states only
  auto v = oracle::state_portable_bruteforce(g, cat::builtin_model("sc"),
                                             cat::builtin_model("tso"), 20, false);
  CHECK(v.portable);
}

TEST_CASE("state construction agrees with the brute-force oracle at one variable") {
  auto p = gen::gen_state(gen::parse_psi("x1"), 1, 0);
  auto g = events::compile(p);
  auto v = oracle::state_portable_bruteforce(g, cat::builtin_model("sc"),
                                             cat::builtin_model("tso"), 26, false);
  CHECK(!v.portable);
}
