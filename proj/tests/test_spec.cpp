#include <fstream>
#include <sstream>

#include "conjtamer/expr.hpp"
#include "conjtamer/spec.hpp"
#include "doctest.h"

using namespace conjtamer;

namespace {

std::string read_spec(const std::string& name) {
  std::ifstream in(std::string(CONJ_TAMER_SPEC_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ParseError parse_error(const std::string& text) {
  try {
    parse_action_spec(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a ParseError");
  throw;
}

}  // namespace

TEST_CASE("minimal spec gives the trivial Z action") {
  const auto s = parse_action_spec("[group]\ngenerators = f\n[generators]\nf = x\n");
  CHECK(s.space == Space::interval(4096));
  CHECK(s.action.rank() == 1);
  CHECK(s.action.map(0).log_derivative().sup_norm() < 1e-15);
  CHECK(s.relations.empty());
}

TEST_CASE("bundled specs load") {
  for (const char* name :
       {"trivial.spec", "rotations.spec", "a3.spec", "a4.spec", "ping_pong.spec", "heisenberg.spec"}) {
    CAPTURE(name);
    const auto s = parse_action_spec(read_spec(name));
    for (const auto& d : s.deviations) CHECK(d.c0 < s.relation_tolerance);
  }
  const auto h = parse_action_spec(read_spec("heisenberg.spec"));
  CHECK(h.presentation.alphabet().size() == 3);
  CHECK(h.relations.size() == 12);
  const auto pp = parse_action_spec(read_spec("ping_pong.spec"));
  CHECK(pp.relations.empty());
  CHECK(pp.pipeline.L == 4);
  const auto a4 = parse_action_spec(read_spec("a4.spec"));
  CHECK(a4.pipeline.radius == 40);
  CHECK(a4.pipeline.lambda == doctest::Approx(std::exp(-0.1)).epsilon(1e-15));
}

TEST_CASE("A3 commutator deviation is small") {
  const auto s = parse_action_spec(read_spec("a3.spec"));
  REQUIRE(s.deviations.size() == 2);
  for (const auto& d : s.deviations) CHECK(d.c0 < 1e-6);
  CHECK(s.user_relations == std::vector<std::string>{"[g1,g2]"});
}

TEST_CASE("syntax errors carry line and column") {
  auto e = parse_error("[group]\ngenerators = f\n[generators]\nf = x +\n");
  CHECK(e.code() == ErrorCode::SyntaxError);
  CHECK(e.line() == 4);
  CHECK(e.column() == 8);

  e = parse_error("[group]\ngenerators = f\n[generators]\n  f = 1 + tan(x)\n");
  CHECK(e.code() == ErrorCode::UnknownFunction);
  CHECK(e.line() == 4);
  CHECK(e.column() == 11);

  e = parse_error("[space]\nkind = sphere\n");
  CHECK(e.line() == 2);
  CHECK(e.column() == 8);

  e = parse_error("[pipeline]\nlambda = 0.5x\n");
  CHECK(e.line() == 2);
  CHECK(e.column() == 13);

  e = parse_error("[group]\ngenerators = f\n[generators]\nf = x\nh = x\n");
  CHECK(e.code() == ErrorCode::UnknownGenerator);
  CHECK(e.line() == 5);

  e = parse_error("[group]\ngenerators = f g\n[generators]\nf = x\n");
  CHECK(e.code() == ErrorCode::SyntaxError);

  e = parse_error("[space]\nkind = circle\ngrid = 4096\n[group]\ngenerators = f\n[generators]\nf = samples offset=0: 0 0 0\n");
  CHECK(e.line() == 7);

  e = parse_error("[groups]\n");
  CHECK(e.line() == 1);
}

TEST_CASE("relation violations report the measured deviation") {
  const std::string text =
      "[group]\ngenerators = f g\n[generators]\nf = x/(2-x)\ng = x + 0.2*sin(pi*x)*x\n";
  try {
    parse_action_spec(text);
    FAIL("expected RelationViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RelationViolation);
    CHECK(std::string(e.what()).find("deviates by") != std::string::npos);
  }
  CHECK_NOTHROW(parse_action_spec("[group]\ngenerators = f g\ntype = free\n[generators]\nf = x/(2-x)\ng = x + 0.2*sin(pi*x)*x\n"));
}

TEST_CASE("sampled spec round trip") {
  for (const char* name : {"a3.spec", "heisenberg.spec", "a4.spec"}) {
    CAPTURE(name);
    const auto s = parse_action_spec(read_spec(name));
    const auto text = write_sampled_spec(s, s.action);
    const auto back = parse_action_spec(text);
    REQUIRE(back.action.rank() == s.action.rank());
    for (std::size_t i = 0; i < s.action.rank(); ++i) {
      const auto d = c1_distance(back.action.map(i), s.action.map(i));
      CHECK(d.c0 < 1e-14);
      CHECK(d.dlog < 1e-14);
    }
    CHECK(back.pipeline.lambda == s.pipeline.lambda);
    CHECK(back.user_relations == s.user_relations);
    CHECK(write_sampled_spec(s, s.action) == text);
  }
}
