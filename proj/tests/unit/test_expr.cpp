#include <cmath>
#include <numbers>
#include <thread>

#include "doctest.h"
#include "random_expr.hpp"
#include "uiobs/expr.hpp"

using namespace uiobs;

namespace {

const VarSpace kPolar{"r", "phi", "theta"};

Expr P(const std::string& text) { return parse_expr(text, kPolar); }

double at(const Expr& e, double r, double phi, double theta) {
  std::vector<double> p{r, phi, theta};
  return evaluate(e, kPolar, p);
}

bool defined_at(const Expr& e, std::span<const double> p, double& out) {
  try {
    out = evaluate(e, p);
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

}  // namespace

TEST_CASE("parse resolves identifiers and functions") {
  Expr e = P("cos(theta - phi)");
  CHECK(e.op() == Op::Cos);
  CHECK(e.node().args[0].op() == Op::Sub);
  CHECK(e.node().args[0].node().args[0] == variable(2));
  CHECK(e.node().args[0].node().args[1] == variable(1));
  CHECK(at(e, 1, 0, std::numbers::pi / 3) == doctest::Approx(0.5));
}

TEST_CASE("parse errors carry positions and names") {
  try {
    P("sin(q");
    FAIL("expected an error");
  } catch (const UnknownIdentifier& err) {
    CHECK(err.name() == "q");
  }
  try {
    P("sin(r");
    FAIL("expected an error");
  } catch (const ParseError& err) {
    CHECK(err.position() == 5);
    CHECK(std::string(err.what()).find("end of input") != std::string::npos);
  }
  try {
    P("v * cos(theta)");
    FAIL("expected an error");
  } catch (const UnknownIdentifier& err) {
    CHECK(err.name() == "v");
    CHECK(err.position() == 0);
  }
  CHECK_THROWS_AS(P("r +"), ParseError);
  CHECK_THROWS_AS(P("r ^ x"), ParseError);
  CHECK_THROWS_AS(P("foo(r)"), ParseError);
  CHECK_THROWS_AS(P("(r"), ParseError);
  CHECK_THROWS_AS(P("r r"), ParseError);
  CHECK_THROWS_AS(P("1e"), ParseError);
}

TEST_CASE("grammar precedence") {
  CHECK(at(P("-r^2"), 3, 0, 0) == doctest::Approx(-9));
  CHECK(at(P("2 - 3 - 4"), 1, 0, 0) == doctest::Approx(-5));
  CHECK(at(P("12 / 3 / 2"), 1, 0, 0) == doctest::Approx(2));
  CHECK(at(P("r - -phi"), 1, 2, 0) == doctest::Approx(3));
  CHECK(at(P("r * -phi"), 3, 2, 0) == doctest::Approx(-6));
  CHECK(at(P("(r + phi)^2"), 1, 2, 0) == doctest::Approx(9));
  CHECK(at(P("1.5e1 + .25 + 2E-1"), 1, 0, 0) == doctest::Approx(15.45));
}

TEST_CASE("identifiers accept primes and underscores") {
  VarSpace s{"x_1'", "_y"};
  Expr e = parse_expr("x_1' * _y", s);
  std::vector<double> p{2, 5};
  CHECK(evaluate(e, s, p) == 10);
}

TEST_CASE("decimal literals are exact rationals") {
  Expr e = simplify(P("0.1 + 0.2"));
  REQUIRE(e.is_constant());
  CHECK(e.constant().exact());
  CHECK(e.constant() == Number::rational(3, 10));
  Expr big = P("123456789012345678901234567890");
  CHECK(!big.constant().exact());
}

TEST_CASE("differentiate examples") {
  Expr d1 = differentiate(P("sin(theta - phi)/r"), 2, kPolar);
  CHECK(simplify(P("cos(theta - phi)/r")) == d1);

  Expr d2 = differentiate(P("tan(theta - phi)^2/r"), 0, kPolar);
  CHECK(simplify(P("-tan(theta - phi)^2/r^2")) == d2);

  CHECK_THROWS_AS(differentiate(P("r"), 3, kPolar), DimensionError);
}

TEST_CASE("evaluate examples and domain errors") {
  CHECK(at(P("cos(theta - phi)"), 1, 0, std::numbers::pi / 3) == doctest::Approx(0.5));
  CHECK(at(P("tan(theta - phi)^2/r"), 2, 0, std::numbers::pi / 4) == doctest::Approx(0.5));
  try {
    at(P("1/r"), 0, 0, 0);
    FAIL("expected an error");
  } catch (const DomainError& err) {
    CHECK(err.kind() == DomainError::Kind::DivisionByZero);
  }
  CHECK_THROWS_AS(at(P("sqrt(phi)"), 1, -1, 0), DomainError);
  CHECK_THROWS_AS(at(P("ln(phi)"), 1, 0, 0), DomainError);
  CHECK_THROWS_AS(at(P("exp(r)"), 1000, 0, 0), DomainError);
  std::vector<double> short_point{1, 2};
  CHECK_THROWS_AS(evaluate(P("r"), kPolar, short_point), DimensionError);
}

TEST_CASE("simplify examples") {
  CHECK(simplify(P("0 * tan(theta) + r")) == variable(0));
  CHECK(simplify(P("cos(theta)/cos(theta)")).is_one());
  CHECK(!simplify(P("cos(theta)/cos(phi)")).is_constant());
  Expr pyth = simplify(P("sin(theta)^2 + cos(theta)^2"));
  CHECK(pyth.op() == Op::Sum);
  CHECK(simplify(P("-(-r)")) == variable(0));
  CHECK(simplify(P("(r^2)^3")) == pow(variable(0), 6));
  CHECK(simplify(P("r*phi - phi*r")).is_zero());
  CHECK(simplify(P("2*(r + phi) - 2*phi")) == simplify(P("2*r")));
  CHECK(simplify(P("1 - 1 + 0*r")).is_zero());
}

TEST_CASE("evaluation error scale flags uncancelled zeros") {
  Expr pyth = simplify(P("sin(theta)^2 + cos(theta)^2 - 1"));
  CHECK(!pyth.is_zero());
  std::vector<double> p{1, 0.3, 0.9};
  Evaluator ev(p);
  CHECK(ev.eval(pyth).negligible());
  CHECK(!ev.eval(P("1e-9 * r")).negligible());
}

TEST_CASE("remap embeds into a larger space") {
  VarSpace ext = kPolar.appended({"w"});
  Expr h = P("r * cos(theta - phi)");
  Expr hw = remap(h, kPolar, ext);
  CHECK(differentiate(hw, 3, ext).is_zero());
  std::vector<double> p{2, 0.3, 0.9, 7};
  std::vector<double> q{2, 0.3, 0.9};
  CHECK(evaluate(hw, ext, p) == evaluate(h, kPolar, q));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(evaluate(differentiate(hw, i, ext), ext, p) ==
          doctest::Approx(evaluate(differentiate(h, i, kPolar), kPolar, q)));
  }
  VarSpace missing{"r", "theta"};
  CHECK_THROWS_AS(remap(h, kPolar, missing), DimensionError);

  VarSpace reordered{"theta", "w", "r", "phi"};
  std::vector<double> pr{0.9, 7, 2, 0.3};
  CHECK(evaluate(remap(h, kPolar, reordered), reordered, pr) == doctest::Approx(evaluate(h, kPolar, q)));
}

TEST_CASE("substitute composes") {
  Expr h = P("r * cos(theta - phi)");
  Expr c = substitute(h, {P("2*r"), variable(1), variable(1)});
  CHECK(c == simplify(P("2*r")));
}

TEST_CASE("hash consing shares structure across threads") {
  Expr a;
  Expr b;
  std::thread t1([&] { a = simplify(P("sin(r)*cos(phi) + theta^3")); });
  std::thread t2([&] { b = simplify(P("theta^3 + cos(phi)*sin(r)")); });
  t1.join();
  t2.join();
  CHECK(a == b);
}

TEST_CASE("property: simplify preserves value") {
  testing::RandomExpr gen(3, 11);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    Expr e = gen.tree(4);
    Expr s = simplify(e);
    auto p = gen.point(-2, 2);
    double a = 0;
    double b = 0;
    if (!defined_at(e, p, a) || !defined_at(s, p, b)) continue;
    ++checked;
    INFO(to_string(e), " -> ", to_string(s));
    CHECK(std::abs(a - b) <= 1e-10 * (1 + std::abs(a)));
  }
  CHECK(checked >= 100);
}

TEST_CASE("property: derivative matches central differences") {
  testing::RandomExpr gen(3, 23);
  const double delta = 1e-6;
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    Expr e = gen.tree(3);
    auto v = static_cast<std::size_t>(gen.pick(3));
    auto p = gen.point(0.2, 1.5);
    double exact = 0;
    double plus = 0;
    double minus = 0;
    auto pp = p;
    auto pm = p;
    pp[v] += delta;
    pm[v] -= delta;
    Expr d = differentiate(e, v);
    if (!defined_at(d, p, exact) || !defined_at(e, pp, plus) || !defined_at(e, pm, minus)) continue;
    if (std::abs(plus) > 1e3 || std::abs(exact) > 1e3) continue;  // near a pole; FD is meaningless
    ++checked;
    double fd = (plus - minus) / (2 * delta);
    INFO(to_string(e), " d/dx", v, " = ", to_string(d));
    CHECK(std::abs(fd - exact) <= 1e-5 * (1 + std::abs(exact)));
  }
  CHECK(checked >= 100);
}

TEST_CASE("property: parse of print preserves value") {
  testing::RandomExpr gen(3, 37);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    Expr e = gen.tree(4);
    for (const Expr& form : {e, simplify(e)}) {
      std::string text = to_string(form, kPolar);
      Expr back = parse_expr(text, kPolar);
      auto p = gen.point(-2, 2);
      double a = 0;
      double b = 0;
      if (!defined_at(form, p, a) || !defined_at(back, p, b)) continue;
      ++checked;
      INFO(text);
      CHECK(std::abs(a - b) <= 1e-10 * (1 + std::abs(a)));
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("printing is parenthesized where the grammar needs it") {
  CHECK(to_string(P("-(r*phi)"), kPolar) == "-(r*phi)");
  CHECK(to_string(P("-(-r)"), kPolar) == "-(-r)");
  CHECK(to_string(P("(r - phi) - (theta - r)"), kPolar) == "r - phi - (theta - r)");
  CHECK(to_string(P("r / (phi * theta)"), kPolar) == "r/(phi*theta)");
  CHECK(to_string(simplify(P("r / (phi * theta)")), kPolar) == "r/(phi*theta)");
  CHECK(to_string(simplify(P("3/4 * r^2 / phi")), kPolar) == "3*r^2/(4*phi)");
  CHECK(to_string(simplify(P("(-2)^2")), kPolar) == "4");
}

TEST_CASE("evaluation is deterministic") {
  testing::RandomExpr gen(3, 5);
  for (int i = 0; i < 20; ++i) {
    Expr e = simplify(gen.tree(4));
    auto p = gen.point(0.2, 1.5);
    double a = 0;
    double b = 0;
    if (defined_at(e, p, a) && defined_at(e, p, b)) CHECK(a == b);
  }
}
