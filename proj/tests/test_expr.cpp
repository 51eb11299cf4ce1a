#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "nilstruct/expr.hpp"
#include "nilstruct/sampling.hpp"

using namespace nilstruct;

namespace {

// Central finite difference, the independent oracle for every derivative
// assertion in this file.
double central_diff(const Expression& e, std::vector<double> p, int var,
                    double h = 1e-6) {
  std::vector<double> lo = p, hi = p;
  lo[static_cast<std::size_t>(var)] -= h;
  hi[static_cast<std::size_t>(var)] += h;
  return (e.evaluate(hi) - e.evaluate(lo)) / (2.0 * h);
}

// Random polynomial AST over the given variables: sums of products of
// powers with small integer exponents.
Expression random_polynomial(UniformSource& rng, const VarTablePtr& vars) {
  int terms = 1 + static_cast<int>(rng.next() * 4);
  Expression sum = Expression::number(0.0, vars);
  for (int t = 0; t < terms; ++t) {
    Expression term = Expression::number(rng.next(-2.0, 2.0), vars);
    for (std::size_t v = 0; v < vars->size(); ++v) {
      int e = static_cast<int>(rng.next() * 4);  // 0..3
      if (e > 0)
        term = term * pow_int(Expression::symbol((*vars)[v], vars), e);
    }
    sum = sum + term;
  }
  return sum;
}

}  // namespace

TEST_CASE("parse and evaluate the documented examples") {
  auto vars = make_vars({"u", "y"});
  CHECK(parse_expression("u^2 + 3*y", vars).evaluate(std::vector<double>{2, 1}) ==
        doctest::Approx(7.0).epsilon(1e-15));
  CHECK(parse_expression("sin(u)*exp(y)", vars)
            .evaluate(std::vector<double>{0, 5}) == 0.0);
  CHECK(parse_expression("1/(1+u^2)", vars)
            .evaluate(std::vector<double>{1, 0}) == doctest::Approx(0.5));
  CHECK(parse_expression("4", vars).evaluate(std::vector<double>{-7, 3}) == 4.0);
  CHECK(parse_expression("u*y", vars).evaluate(std::vector<double>{3, -2}) ==
        -6.0);
  CHECK(parse_expression("exp(log(u))", vars)
            .evaluate(std::vector<double>{2, 0}) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("derivatives of the documented examples") {
  auto vars = make_vars({"u", "y"});
  Expression e = parse_expression("u^2 + 3*y", vars);

  Expression du = e.derivative("u");
  CHECK(du.evaluate(std::vector<double>{5, 1}) == doctest::Approx(10.0));
  CHECK(du.evaluate(std::vector<double>{-2, 9}) == doctest::Approx(-4.0));

  Expression dy = e.derivative("y");
  CHECK(dy.evaluate(std::vector<double>{5, 1}) == doctest::Approx(3.0));

  Expression ds = parse_expression("sin(u)", vars).derivative("u");
  CHECK(ds.evaluate(std::vector<double>{0, 0}) == doctest::Approx(1.0));

  // constants differentiate to zero, exactly
  Expression c = parse_expression("4.25", vars).derivative("u");
  CHECK(c.is_zero());
}

TEST_CASE("evaluation is deterministic") {
  auto vars = make_vars({"u", "y"});
  Expression e = parse_expression("sin(u)*exp(y) + u^3/(1+y^2)", vars);
  std::vector<double> p{0.37, -1.2};
  double a = e.evaluate(p);
  double b = e.evaluate(p);
  CHECK(a == b);  // bitwise
}

TEST_CASE("symbolic derivative matches the finite-difference oracle") {
  auto vars = make_vars({"u", "y", "w"});
  UniformSource rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    Expression e = random_polynomial(rng, vars);
    for (std::size_t v = 0; v < vars->size(); ++v) {
      Expression d = e.derivative((*vars)[v]);
      for (int pt = 0; pt < 10; ++pt) {
        std::vector<double> p{rng.next(-1, 1), rng.next(-1, 1),
                              rng.next(-1, 1)};
        double sym = d.evaluate(p);
        double fd = central_diff(e, p, static_cast<int>(v));
        CHECK(std::fabs(sym - fd) <= 1e-5 * (1.0 + std::fabs(sym)));
      }
    }
  }
}

TEST_CASE("derivative matches finite differences on transcendental parts") {
  auto vars = make_vars({"u"});
  const char* cases[] = {"sin(u)*cos(u)", "exp(u^2)", "log(u+3)",
                         "sqrt(u+2)",     "1/(u+2)",  "u^-2 + u^3"};
  UniformSource rng(7);
  for (const char* text : cases) {
    Expression e = parse_expression(text, vars);
    Expression d = e.derivative("u");
    for (int pt = 0; pt < 10; ++pt) {
      std::vector<double> p{rng.next(0.2, 1.0)};
      double sym = d.evaluate(p);
      double fd = central_diff(e, p, 0);
      CHECK(std::fabs(sym - fd) <= 1e-5 * (1.0 + std::fabs(sym)));
    }
  }
}

TEST_CASE("differentiation is linear") {
  auto vars = make_vars({"u", "y"});
  UniformSource rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    Expression e1 = random_polynomial(rng, vars);
    Expression e2 = random_polynomial(rng, vars);
    double a = rng.next(-3, 3);
    Expression lhs =
        (Expression::number(a, vars) * e1 + e2).derivative("u");
    Expression rhs = Expression::number(a, vars) * e1.derivative("u") +
                     e2.derivative("u");
    for (int pt = 0; pt < 20; ++pt) {
      std::vector<double> p{rng.next(-1, 1), rng.next(-1, 1)};
      CHECK(std::fabs(lhs.evaluate(p) - rhs.evaluate(p)) <= 1e-12);
    }
  }
}

TEST_CASE("print/parse round trip preserves evaluation") {
  auto vars = make_vars({"u", "y"});
  const char* cases[] = {
      "u^2 + 3*y",      "sin(u)*exp(y)", "1/(1+u^2)",
      "-u^2",           "-(u*y) + 2",    "(u+y)^3/(u-2)",
      "sqrt(u+2)*log(y+3)", "2*-u",      "u - (y - 1) - 2"};
  UniformSource rng(5);
  for (const char* text : cases) {
    Expression e = parse_expression(text, vars);
    Expression r = parse_expression(e.to_string(), vars);
    for (int pt = 0; pt < 20; ++pt) {
      std::vector<double> p{rng.next(-0.9, 0.9), rng.next(-0.9, 0.9)};
      CHECK(e.evaluate(p) == r.evaluate(p));  // bitwise
    }
  }

  // derivatives round-trip too
  Expression d = parse_expression("exp(u^2)*sin(y)", vars).derivative("u");
  Expression rd = parse_expression(d.to_string(), vars);
  std::vector<double> p{0.3, 0.7};
  CHECK(d.evaluate(p) == rd.evaluate(p));
}

TEST_CASE("print/parse round trip on generated ASTs") {
  // random trees over every node kind; printing then reparsing must give
  // bitwise-identical evaluation
  auto vars = make_vars({"u", "y"});
  UniformSource rng(1234);

  std::function<Expression(int)> gen = [&](int depth) -> Expression {
    double pick = rng.next();
    if (depth <= 0 || pick < 0.25) {
      if (rng.next() < 0.5)
        return Expression::number(rng.next(-4, 4), vars);
      return Expression::symbol(rng.next() < 0.5 ? "u" : "y", vars);
    }
    Expression a = gen(depth - 1);
    Expression b = gen(depth - 1);
    switch (static_cast<int>(rng.next() * 8)) {
      case 0: return a + b;
      case 1: return a - b;
      case 2: return a * b;
      case 3: return a / (b * b + Expression::number(2.0, vars));
      case 4: return -pow_int(a, 2);  // the classic precedence trap
      case 5: return pow_int(a, 1 + static_cast<int>(rng.next() * 3));
      case 6: return sin(a) + cos(b);
      default: return exp(Expression::number(0.25, vars) * a);
    }
  };

  for (int trial = 0; trial < 50; ++trial) {
    Expression e = gen(4);
    Expression r = parse_expression(e.to_string(), vars);
    for (int pt = 0; pt < 5; ++pt) {
      std::vector<double> p{rng.next(-1, 1), rng.next(-1, 1)};
      double ve, vr;
      try {
        ve = e.evaluate(p);
      } catch (const EvalError&) {
        continue;  // domain accidents are not the printer's business
      }
      vr = r.evaluate(p);
      CHECK(ve == vr);  // bitwise
    }
  }
}

TEST_CASE("the grammar binds '^' after a leading minus") {
  // per the grammar, -u^2 is (-u)^2
  auto vars = make_vars({"u"});
  CHECK(parse_expression("-u^2", vars).evaluate(std::vector<double>{3}) == 9.0);
  CHECK(parse_expression("-(u^2)", vars).evaluate(std::vector<double>{3}) ==
        -9.0);
  CHECK(parse_expression("0 - u^2", vars).evaluate(std::vector<double>{3}) ==
        -9.0);

  // the printer must preserve the distinction both ways
  Expression u = Expression::symbol("u", vars);
  Expression neg_pow = -pow_int(u, 2);
  Expression pow_neg = pow_int(-u, 2);
  std::vector<double> p{3.0};
  CHECK(parse_expression(neg_pow.to_string(), vars).evaluate(p) == -9.0);
  CHECK(parse_expression(pow_neg.to_string(), vars).evaluate(p) == 9.0);
}

TEST_CASE("parse errors carry a position") {
  auto vars = make_vars({"u", "y"});

  CHECK_THROWS_AS(parse_expression("", vars), ParseError);
  CHECK_THROWS_AS(parse_expression("   ", vars), ParseError);
  CHECK_THROWS_AS(parse_expression("u +", vars), ParseError);
  CHECK_THROWS_AS(parse_expression("(u + y", vars), ParseError);
  CHECK_THROWS_AS(parse_expression("u + * y", vars), ParseError);

  try {
    parse_expression("u + q", vars);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
    CHECK(std::string(e.what()).find("unknown identifier 'q'") !=
          std::string::npos);
  }

  try {
    parse_expression("tan(u)", vars);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("unknown function") != std::string::npos);
  }

  try {
    parse_expression("u^2.5", vars);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("non-integer exponent") !=
          std::string::npos);
  }
}

TEST_CASE("evaluation domain errors name the sub-expression") {
  auto vars = make_vars({"u"});

  try {
    parse_expression("log(u)", vars).evaluate(std::vector<double>{-1.0});
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(e.subexpression() == "log(u)");
  }

  try {
    parse_expression("1/(u-1)", vars).evaluate(std::vector<double>{1.0});
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(std::string(e.what()).find("division by zero") != std::string::npos);
  }

  CHECK_THROWS_AS(
      parse_expression("sqrt(u)", vars).evaluate(std::vector<double>{-4.0}),
      EvalError);
  CHECK_THROWS_AS(
      parse_expression("u^-1", vars).evaluate(std::vector<double>{0.0}),
      EvalError);
}

TEST_CASE("substitution composes expressions") {
  auto uv = make_vars({"u", "v"});
  auto u_only = make_vars({"u"});
  Expression zu = parse_expression("u^2", u_only);
  // compose z(h(u)) with h(u) = u + 1
  Expression h = parse_expression("u + 1", u_only);
  Expression composed = zu.substitute({{"u", h}}, u_only);
  CHECK(composed.evaluate(std::vector<double>{2.0}) == 9.0);

  // move to a (u,v) table while substituting
  Expression wide = zu.substitute({{"u", parse_expression("u*v", uv)}}, uv);
  CHECK(wide.evaluate(std::vector<double>{2.0, 3.0}) == 36.0);
}

TEST_CASE("rehosting onto a wider table keeps values") {
  auto base = make_vars({"z1", "z2"});
  auto lifted = make_vars({"z1", "z2", "z3", "z4"});
  Expression e = parse_expression("z1^2 + z2", base);
  Expression r = e.rehosted(lifted);
  CHECK(r.evaluate(std::vector<double>{2, 1, 9, 9}) == 5.0);
  CHECK_THROWS_AS(e.rehosted(make_vars({"a", "b", "c"})), ShapeError);
}

TEST_CASE("constant folding does not change values") {
  auto vars = make_vars({"u"});
  Expression folded = parse_expression("2*3 + 0*u + 1*u + u^1 + 0", vars);
  std::vector<double> p{0.123456789};
  CHECK(folded.evaluate(p) == 6.0 + p[0] + p[0]);
}
