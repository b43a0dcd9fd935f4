#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "wgfc/errors.hpp"
#include "wgfc/expr.hpp"

using namespace wgfc;
using expr::Expr;

namespace {

// Random expression generator over the differentiable subset, kept shallow and
// well-scaled so finite differences stay meaningful.
Expr random_expr(std::mt19937& rng, int depth = 0) {
  std::uniform_int_distribution<int> pick(0, depth >= 3 ? 1 : 7);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  auto num = [&] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", coef(rng));
    return std::string(buf);
  };
  auto sub = [&] { return "(" + expr::to_string(random_expr(rng, depth + 1)) + ")"; };
  switch (pick(rng)) {
    case 0: return expr::parse(num());
    case 1: return expr::parse("x");
    case 2: return expr::parse(sub() + " + " + sub());
    case 3: return expr::parse(sub() + " - " + sub());
    case 4: return expr::parse(sub() + " * " + sub());
    case 5: return expr::parse("sin(" + sub() + ")");
    case 6: return expr::parse("cos(" + sub() + ")");
    default: return expr::parse("exp(0.3 * (" + sub() + "))");
  }
}

}  // namespace

TEST_SUITE_BEGIN("expr");

TEST_CASE("parse basics") {
  CHECK(expr::eval(expr::parse("1"), 0.0) == 1.0);
  CHECK(expr::eval(expr::parse("exp(x) * (1 + x^2)"), 0.5) ==
        doctest::Approx(std::exp(0.5) * 1.25).epsilon(1e-15));
  CHECK(expr::eval(expr::parse("2*-x"), 3.0) == -6.0);

  try {
    expr::parse("2*+x");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset == 2);
    CHECK(!e.expected.empty());
  }
  CHECK_THROWS_AS(expr::parse(""), ParseError);
  CHECK_THROWS_AS(expr::parse("x + y"), MultipleVariablesError);
  CHECK_THROWS_AS(expr::parse("sin x"), ParseError);
  CHECK_THROWS_AS(expr::parse("(1 + x"), ParseError);
}

TEST_CASE("precedence") {
  CHECK(expr::eval(expr::parse("2 + 3 * 4"), 0.0) == 14.0);
  CHECK(expr::eval(expr::parse("-x^2"), 3.0) == -9.0);      // ^ binds tighter than unary -
  CHECK(expr::eval(expr::parse("(-x)^2"), 3.0) == 9.0);
  CHECK(expr::eval(expr::parse("2^3^2"), 0.0) == 512.0);    // right-associative
  CHECK(expr::eval(expr::parse("2^-1"), 0.0) == 0.5);
  CHECK(expr::eval(expr::parse("6 / 3 / 2"), 0.0) == 1.0);  // left-associative
}

TEST_CASE("evaluation") {
  CHECK(expr::eval(expr::parse("x^2"), 3.0) == 9.0);
  CHECK(std::fabs(expr::eval(expr::parse("sin(pi)"), 0.0)) <= 1e-15);
  CHECK(expr::eval(expr::parse("e"), 0.0) == M_E);
  CHECK_THROWS_AS(expr::eval(expr::parse("1/x"), 0.0), EvalError);
  CHECK_THROWS_AS(expr::eval(expr::parse("log(x)"), -1.0), EvalError);
  CHECK_THROWS_AS(expr::eval(expr::parse("sqrt(x)"), -1.0), EvalError);
  CHECK_THROWS_AS(expr::eval(expr::parse("(-2)^x"), 0.5), EvalError);
  CHECK(expr::eval(expr::parse("x^x"), 2.0) == 4.0);
  CHECK(expr::eval(expr::parse("abs(x)"), -3.0) == 3.0);
}

TEST_CASE("differentiation of the stated forms") {
  const Expr d1 = expr::differentiate(expr::parse("x^2"));
  for (double x : {-1.5, 0.0, 2.0})
    CHECK(expr::eval(d1, x) == doctest::Approx(2.0 * x).epsilon(1e-14));

  const Expr d2 = expr::differentiate(expr::parse("exp(2*x)"));
  for (double x : {-0.5, 0.0, 1.0})
    CHECK(expr::eval(d2, x) ==
          doctest::Approx(2.0 * std::exp(2.0 * x)).epsilon(1e-14));

  CHECK_THROWS_AS(expr::differentiate(expr::parse("abs(x)")), UnsupportedError);

  // General-power rule needs a positive base.
  const Expr d3 = expr::differentiate(expr::parse("x^x"));
  const double x = 1.7;
  CHECK(expr::eval(d3, x) ==
        doctest::Approx(std::pow(x, x) * (std::log(x) + 1.0)).epsilon(1e-13));
}

TEST_CASE("derivative matches central finite differences (100 random pairs)") {
  std::mt19937 rng(20240811);
  std::uniform_real_distribution<double> xs(-1.0, 1.0);
  int done = 0;
  while (done < 100) {
    const Expr e = random_expr(rng);
    const Expr de = expr::differentiate(e);
    const double x = xs(rng);
    const double h = 1e-5;
    double fd, exact;
    try {
      fd = (expr::eval(e, x + h) - expr::eval(e, x - h)) / (2.0 * h);
      exact = expr::eval(de, x);
    } catch (const EvalError&) {
      continue;  // e.g. a folded division by zero; draw another pair
    }
    const double scale = std::max({1.0, std::fabs(fd), std::fabs(exact)});
    CHECK(std::fabs(fd - exact) <= 1e-6 * scale);
    ++done;
  }
}

TEST_CASE("print/parse round-trip agrees at 32 random points") {
  std::mt19937 rng(987654);
  std::uniform_real_distribution<double> xs(-1.0, 1.0);
  for (int k = 0; k < 8; ++k) {
    const Expr e = random_expr(rng);
    const Expr round = expr::parse(expr::to_string(e));
    for (int i = 0; i < 32; ++i) {
      const double x = xs(rng);
      const double a = expr::eval(e, x);
      const double b = expr::eval(round, x);
      CHECK(std::fabs(a - b) <= 1e-13 * std::max(1.0, std::fabs(a)));
    }
  }
}

TEST_CASE("differentiation is linear") {
  std::mt19937 rng(1357);
  std::uniform_real_distribution<double> xs(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const Expr f = random_expr(rng);
    const Expr g = random_expr(rng);
    const std::string fs = "(" + expr::to_string(f) + ")";
    const std::string gs = "(" + expr::to_string(g) + ")";
    const Expr combo = expr::parse("2.5*" + fs + " - 0.75*" + gs);
    const Expr dcombo = expr::differentiate(combo);
    const Expr df = expr::differentiate(f);
    const Expr dg = expr::differentiate(g);
    const double x = xs(rng);
    const double direct = expr::eval(dcombo, x);
    const double parts = 2.5 * expr::eval(df, x) - 0.75 * expr::eval(dg, x);
    CHECK(std::fabs(direct - parts) <= 1e-12 * std::max(1.0, std::fabs(parts)));
  }
}

TEST_CASE("is_constant and simplification") {
  CHECK(expr::parse("1 + 2*3").is_constant());
  CHECK_FALSE(expr::parse("1 + x").is_constant());
  // d/dx of x^2/2 - x folds to x - 1.
  const Expr d = expr::differentiate(expr::parse("x^2/2 - x"));
  CHECK(expr::eval(d, 5.0) == doctest::Approx(4.0).epsilon(1e-15));
  const Expr dd = expr::differentiate(d);
  CHECK(dd.is_constant());
  CHECK(expr::eval(dd, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_SUITE_END();
