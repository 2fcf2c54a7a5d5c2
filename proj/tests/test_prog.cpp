#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "porthos/cat.hpp"
#include "porthos/events.hpp"
#include "porthos/oracle.hpp"
#include "porthos/prog.hpp"
#include "testutil.hpp"

using namespace porthos;

namespace {

int count_kind(const prog::Program& p, prog::Instr::Kind k) {
  int n = 0;
  prog::for_each_instr(p, [&](const prog::Instr& i) {
    if (i.kind == k) n++;
  });
  return n;
}

int memory_instrs(const prog::Program& p) {
  return count_kind(p, prog::Instr::Kind::load) + count_kind(p, prog::Instr::Kind::store);
}

} // namespace

TEST_CASE("parse iriw: four threads, six memory instructions") {
  prog::Program p = prog::parse_program(testutil::litmus("iriw.lit"));
  CHECK(p.name == "iriw");
  CHECK(p.threads.size() == 4);
  CHECK(memory_instrs(p) == 6);
}

TEST_CASE("parse skip-only thread") {
  prog::Program p = prog::parse_program("program p\nthread t0\n skip");
  REQUIRE(p.threads.size() == 1);
  CHECK(p.threads[0].body->kind == prog::Instr::Kind::skip);
}

TEST_CASE("constant stores desugar through fresh registers") {
  prog::Program p = prog::parse_program(
      "program sb\nthread t0\n x := 1;\n r0 <- y\nthread t1\n y := 1;\n r1 <- x");
  CHECK(p.threads.size() == 2);
  CHECK(memory_instrs(p) == 4);
  CHECK(count_kind(p, prog::Instr::Kind::local) == 2);
  // no store may keep a constant
  prog::for_each_instr(p, [&](const prog::Instr& i) {
    if (i.kind == prog::Instr::Kind::store) CHECK(i.expr == nullptr);
  });
}

TEST_CASE("iids unique and assigned in textual order") {
  prog::Program p = prog::parse_program(testutil::litmus("dekker.lit"));
  std::set<prog::Iid> seen;
  prog::for_each_instr(p, [&](const prog::Instr& i) { CHECK(seen.insert(i.iid).second); });
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == static_cast<int>(seen.size()) - 1);
}

TEST_CASE("if without else gains skip") {
  prog::Program p =
      prog::parse_program("program p\nthread t0\n r0 <- x;\n if (r0 = 1) {\n  y := r0\n }");
  bool found = false;
  prog::for_each_instr(p, [&](const prog::Instr& i) {
    if (i.kind == prog::Instr::Kind::branch) {
      found = true;
      CHECK(i.b->kind == prog::Instr::Kind::skip);
    }
  });
  CHECK(found);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    prog::parse_program("program p\nthread t0\n x := := 1");
    FAIL("expected parse error");
  } catch (const parse_error& e) {
    CHECK(e.line == 3);
    CHECK(e.column > 0);
  }
  CHECK_THROWS_AS(prog::parse_program("program p\nthread a\n skip\nthread a\n skip"),
                  parse_error);
}

TEST_CASE("register/location lexical classes enforced") {
  CHECK_THROWS_AS(prog::parse_program("program p\nthread t0\n x = 1"), parse_error);
  CHECK_THROWS_AS(prog::parse_program("program p\nthread t0\n r0 <- R0"), parse_error);
}

TEST_CASE("read-before-definition warns and reads zero") {
  std::vector<Diagnostic> warnings;
  prog::parse_program("program p\nthread t0\n x := r0", &warnings);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].severity == Diagnostic::Severity::warning);
  CHECK(warnings[0].message.find("r0") != std::string::npos);
}

TEST_CASE("unroll depth 1 and 2 shapes") {
  prog::Program p =
      prog::parse_program("program p\nthread t0\n r0 <- x;\n while (r0 = 0) {\n  r0 <- x\n }");
  prog::Program u1 = prog::unroll(p, 1);
  CHECK(count_kind(u1, prog::Instr::Kind::loop) == 0);
  CHECK(count_kind(u1, prog::Instr::Kind::branch) == 1);
  CHECK(memory_instrs(u1) == 2);

  prog::Program u2 = prog::unroll(p, 2);
  CHECK(count_kind(u2, prog::Instr::Kind::loop) == 0);
  CHECK(count_kind(u2, prog::Instr::Kind::branch) == 2);
  CHECK(memory_instrs(u2) == 3);

  // while(b) S at k=2 becomes if(b){ S; if(b){ S } }, both elses skip
  prog::for_each_instr(u2, [&](const prog::Instr& i) {
    if (i.kind == prog::Instr::Kind::branch) CHECK(i.b->kind == prog::Instr::Kind::skip);
  });
}

TEST_CASE("unroll idempotent on acyclic programs") {
  prog::Program p = prog::parse_program(testutil::litmus("sb.lit"));
  prog::Program u = prog::unroll(p, 3);
  CHECK(prog::equal_modulo_iids(p, u));
}

TEST_CASE("event counts grow linearly in k for a single loop") {
  prog::Program p = prog::parse_program(
      "program p\nthread t0\n r0 <- x;\n while (r0 = 0) {\n  r0 <- x;\n  y := r0\n }");
  for (int k = 1; k <= 4; k++) {
    prog::Program u = prog::unroll(p, k);
    CHECK(memory_instrs(u) == 1 + 2 * k);
  }
}

TEST_CASE("validate: well-formed, duplicates, loops") {
  prog::Program sb = prog::parse_program(testutil::litmus("sb.lit"));
  CHECK(prog::validate(sb).empty());

  prog::Program dup(sb);
  dup.threads[1].tid = dup.threads[0].tid;
  auto diags = prog::validate(dup);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find(dup.threads[0].tid) != std::string::npos);

  prog::Program loopy =
      prog::parse_program("program p\nthread t0\n while (0 = 0) {\n  x := 1\n }");
  auto loop_diags = prog::validate(loopy, /*require_acyclic=*/true);
  REQUIRE(loop_diags.size() == 1);
  CHECK(loop_diags[0].message.find("iid") != std::string::npos);
  CHECK(prog::validate(loopy).empty());
}

TEST_CASE("print/parse round trip is structurally identical modulo iids") {
  for (const char* name : {"sb.lit", "mp.lit", "iriw.lit", "dekker.lit", "peterson.lit",
                           "wrc.lit", "mp_sync.lit"}) {
    prog::Program p = prog::parse_program(testutil::litmus(name));
    prog::Program q = prog::parse_program(prog::print_program(p));
    CAPTURE(name);
    CHECK(prog::equal_modulo_iids(p, q));
  }
}

TEST_CASE("desugaring preserves oracle-observable final states") {
  prog::Program surface = prog::parse_program(
      "program p\nthread t0\n x := 5;\n r0 <- y\nthread t1\n y := 1;\n r1 <- x");
  prog::Program staged = prog::parse_program(
      "program p\nthread t0\n rs = 5;\n x := rs;\n r0 <- y\nthread t1\n rt = 1;\n y := rt;\n r1 <- x");
  auto states = [](const prog::Program& p) {
    std::set<std::map<std::string, long>> out;
    auto g = events::compile(p);
    for (auto& w : oracle::enumerate_executions(g, 8))
      out.insert(witness::reach_state(g, w).locations);
    return out;
  };
  CHECK(states(surface) == states(staged));
}

TEST_CASE("fence_everywhere inserts a fence between consecutive statements") {
  prog::Program p = prog::parse_program(testutil::litmus("sb.lit"));
  prog::Program f = prog::fence_everywhere(p, prog::FenceKind::sync);
  CHECK(count_kind(f, prog::Instr::Kind::fence) == count_kind(p, prog::Instr::Kind::seq));
  auto g = events::compile(f);
  CHECK(!g.fence_rel.at(prog::FenceKind::sync).empty());
}

TEST_CASE("malformed inputs raise parse errors, never crash") {
  const char* bad[] = {"",
                       "program",
                       "program p",
                       "program p\nthread",
                       "program p\nthread t0",
                       "program p\nthread t0\n x :=",
                       "program p\nthread t0\n r0 <-",
                       "program p\nthread t0\n if (r0 = 1) { skip",
                       "program p\nthread t0\n while r0 = 1 { skip }",
                       "program p\nthread t0\n skip;",
                       "program p\nthread t0\n skip extra",
                       "program p\ninit X = 1\nthread t0\n skip",
                       "program p\nthread t0\n x := 1 @hl=",
                       "program p\nthread t0\n r0 = (1 + ) * 2",
                       "prog p\nthread t0\n skip"};
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(prog::parse_program(text), parse_error);
  }
}

TEST_CASE("malformed cat inputs raise parse errors, never crash") {
  const char* bad[] = {"",
                       "model",
                       "model m\nacyclic as a",
                       "model m\nacyclic po",
                       "model m\nacyclic po as",
                       "model m\nx :=",
                       "model m\nacyclic (po as a",
                       "model m\nacyclic po ; as a",
                       "model m\nacyclic 7 as a",
                       "model m\nacyclic W*Q as a",
                       "model m\nacyclic id(X) as a"};
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(cat::parse_cat(text), parse_error);
  }
}

TEST_CASE("hl labels survive parsing and printing") {
  prog::Program p = prog::parse_program("program p\nthread t0\n r0 <- x @hl=7;\n y := r0 @hl=9");
  int labels = 0;
  prog::for_each_instr(p, [&](const prog::Instr& i) {
    if (i.hl_label >= 0) labels++;
  });
  CHECK(labels == 2);
  prog::Program q = prog::parse_program(prog::print_program(p));
  CHECK(prog::equal_modulo_iids(p, q));
}
