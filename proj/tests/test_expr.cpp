#include <cmath>
#include <numbers>

#include "conjtamer/expr.hpp"
#include "doctest.h"

using namespace conjtamer;

TEST_CASE("arithmetic and precedence") {
  CHECK(Expression::parse("1 + 2*3")(0.0) == doctest::Approx(7.0));
  CHECK(Expression::parse("(1 + 2)*3")(0.0) == doctest::Approx(9.0));
  CHECK(Expression::parse("x^2 + x")(3.0) == doctest::Approx(12.0));
  CHECK(Expression::parse("2*x^3")(2.0) == doctest::Approx(16.0));
  CHECK(Expression::parse("-x + 1")(0.25) == doctest::Approx(0.75));
  CHECK(Expression::parse("8/2/2")(0.0) == doctest::Approx(2.0));
  CHECK(Expression::parse("pi")(0.0) == doctest::Approx(std::numbers::pi));
  CHECK(Expression::parse("1e-3 * x")(2.0) == doctest::Approx(2e-3));
}

TEST_CASE("forward-mode derivative matches central differences") {
  const char* cases[] = {"x/(2-x)", "x + 0.1*sin(2*pi*x)", "exp(x)*cos(x)", "log(1+x)", "sqrt(x+1)^3",
                         "mobius(1,0,-1,2)"};
  for (const char* src : cases) {
    const auto e = Expression::parse(src);
    for (double x : {0.1, 0.37, 0.8}) {
      const double h = 1e-6;
      const double fd = (e(x + h) - e(x - h)) / (2 * h);
      CHECK(e.eval({x, 1.0}).deriv == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("mobius is the four-argument linear fractional form") {
  const auto m = Expression::parse("mobius(1, 0, -1, 2)");
  const auto direct = Expression::parse("x/(2-x)");
  for (double x : {0.0, 0.3, 1.0}) CHECK(m(x) == doctest::Approx(direct(x)));
}

TEST_CASE("syntax errors carry the offending column") {
  try {
    (void)Expression::parse("x +");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.code() == ErrorCode::SyntaxError);
    CHECK(e.column() == 4);
  }
  try {
    (void)Expression::parse("2 * (x", 7);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 7);
    CHECK(e.column() == 7);
  }
  CHECK_THROWS_AS((void)Expression::parse("x x"), ParseError);
  CHECK_THROWS_AS((void)Expression::parse(""), ParseError);
}

TEST_CASE("unknown functions are rejected") {
  try {
    (void)Expression::parse("1 + tanh(x)");
    FAIL("expected UnknownFunction");
  } catch (const ParseError& e) {
    CHECK(e.code() == ErrorCode::UnknownFunction);
    CHECK(e.column() == 5);
  }
}
