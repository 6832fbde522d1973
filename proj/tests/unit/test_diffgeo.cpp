#include <cmath>
#include <random>

#include "doctest.h"
#include "random_expr.hpp"
#include "uiobs/diffgeo.hpp"

using namespace uiobs;

namespace {

const VarSpace kPolar{"r", "phi", "theta"};

Expr P(const std::string& text) { return parse_expr(text, kPolar); }

VectorField field(std::initializer_list<const char*> entries, const VarSpace& space = kPolar) {
  VectorField f;
  for (const char* e : entries) f.push_back(simplify(parse_expr(e, space)));
  return f;
}

std::vector<double> values(const std::vector<Expr>& v, std::span<const double> p) {
  Evaluator ev(p);
  std::vector<double> out;
  for (const auto& e : v) out.push_back(ev(e));
  return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Random polynomial of low degree over n variables.
Expr random_poly(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> coeff(-3, 3);
  std::uniform_int_distribution<int> var(0, static_cast<int>(n) - 1);
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_int_distribution<int> degree(0, 2);
  std::vector<std::pair<Number, Expr>> terms;
  for (int t = count(rng); t > 0; --t) {
    std::vector<std::pair<Expr, int>> factors;
    for (int d = degree(rng); d > 0; --d) factors.emplace_back(variable(var(rng)), 1);
    terms.emplace_back(Number(coeff(rng)), product(Number(1), factors));
  }
  return sum(terms);
}

VectorField random_field(std::mt19937_64& rng, std::size_t n) {
  VectorField f;
  for (std::size_t i = 0; i < n; ++i) f.push_back(random_poly(rng, n));
  return f;
}

std::vector<double> random_point(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<double> p(n);
  for (auto& x : p) x = u(rng);
  return p;
}

// RK4 flow of f for time t starting at x.
std::vector<double> flow(const VectorField& f, std::vector<double> x, double t) {
  const int steps = 8;
  double h = t / steps;
  auto rhs = [&](const std::vector<double>& y) { return values(f, y); };
  for (int s = 0; s < steps; ++s) {
    auto k1 = rhs(x);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + 0.5 * h * k1[i];
    auto k2 = rhs(y);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + 0.5 * h * k2[i];
    auto k3 = rhs(y);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + h * k3[i];
    auto k4 = rhs(y);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return x;
}

// (phi_t^* omega)(x) = omega(phi_t(x)) * D phi_t(x), Jacobian by central differences.
std::vector<double> pullback(const VectorField& f, const Covector& omega, const std::vector<double>& x, double t) {
  const std::size_t n = x.size();
  const double eps = 1e-5;
  auto w = values(omega, flow(f, x, t));
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    auto xp = x;
    auto xm = x;
    xp[j] += eps;
    xm[j] -= eps;
    auto fp = flow(f, xp, t);
    auto fm = flow(f, xm, t);
    for (std::size_t i = 0; i < n; ++i) out[j] += w[i] * (fp[i] - fm[i]) / (2 * eps);
  }
  return out;
}

std::vector<double> lie_covector_oracle(const VectorField& f, const Covector& omega, const std::vector<double>& x) {
  const double t = 1e-4;
  auto plus = pullback(f, omega, x, t);
  auto minus = pullback(f, omega, x, -t);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (plus[i] - minus[i]) / (2 * t);
  return out;
}

SamplePlan polar_plan() { return SamplePlan::around({2.0, 0.3, 0.9}, 0.3); }

Codistribution span_of(std::initializer_list<std::initializer_list<const char*>> rows,
                       const VarSpace& space = kPolar) {
  Codistribution c{space, {}};
  for (auto r : rows) c.generators.push_back(field(r, space));
  return c;
}

}  // namespace

TEST_CASE("gradient examples") {
  CHECK(gradient(P("r"), kPolar) == Covector{constant(1), constant(0), constant(0)});
  CHECK(gradient(P("theta - phi"), kPolar) == Covector{constant(0), constant(-1), constant(1)});
  CHECK(gradient(P("7"), kPolar) == Covector{constant(0), constant(0), constant(0)});
  VarSpace ext = kPolar.appended({"w"});
  CHECK_THROWS_AS(gradient(parse_expr("w", ext), kPolar), DimensionError);
}

TEST_CASE("lie_scalar examples") {
  VectorField g = field({"cos(theta - phi)", "sin(theta - phi)/r", "0"});
  std::vector<double> p{2.0, 0.3, 0.9};
  CHECK(evaluate(lie_scalar(g, P("r")), p) == doctest::Approx(std::cos(0.6)));
  CHECK(evaluate(lie_scalar(g, P("theta - phi")), p) == doctest::Approx(-std::sin(0.6) / 2.0));
  CHECK(lie_scalar(g, P("3")).is_zero());
  CHECK_THROWS_AS(lie_scalar(VectorField{constant(1)}, P("phi")), DimensionError);
}

TEST_CASE("lie_bracket examples") {
  VectorField f = field({"0", "0", "1"});
  VectorField g = field({"cos(theta - phi)", "sin(theta - phi)/r", "0"});
  VectorField expected = field({"-sin(theta - phi)", "cos(theta - phi)/r", "0"});
  VectorField b = lie_bracket(f, g);
  std::vector<double> p{2.0, 0.3, 0.9};
  CHECK(max_abs_diff(values(b, p), values(expected, p)) < 1e-14);

  VectorField c1 = field({"1", "2", "0"});
  VectorField c2 = field({"0", "-1", "3"});
  for (const auto& e : lie_bracket(c1, c2)) CHECK(e.is_zero());
  for (const auto& e : lie_bracket(g, g)) CHECK(e.is_zero());
  CHECK_THROWS_AS(lie_bracket(f, VectorField{constant(1)}), DimensionError);
}

TEST_CASE("lie_covector examples") {
  VarSpace s{"x1", "x2"};
  VectorField f = field({"x2", "0"}, s);
  Covector w = field({"0", "1"}, s);
  Covector l = lie_covector(f, w);
  CHECK(l[0].is_zero());
  CHECK(l[1].is_zero());
  for (double x1 : {-1.0, 0.5}) {
    for (double x2 : {-0.7, 1.3}) {
      auto oracle = lie_covector_oracle(f, w, {x1, x2});
      CHECK(std::abs(oracle[0]) < 1e-6);
      CHECK(std::abs(oracle[1]) < 1e-6);
    }
  }

  Covector dual = field({"1", "0"}, s);  // the dual case picks up df/dx
  Covector ld = lie_covector(f, dual);
  CHECK(ld[0].is_zero());
  CHECK(ld[1].is_one());

  VectorField cf = field({"1", "2"}, s);
  for (const auto& e : lie_covector(cf, w)) CHECK(e.is_zero());
}

TEST_CASE("lie_covector matches the flow pullback") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    VectorField f = random_field(rng, 3);
    Covector w = random_field(rng, 3);
    auto x = random_point(rng, 3);
    auto exact = values(lie_covector(f, w), x);
    auto oracle = lie_covector_oracle(f, w, x);
    double scale = 1;
    for (double v : exact) scale = std::max(scale, std::abs(v));
    CHECK(max_abs_diff(exact, oracle) <= 1e-5 * scale);
  }
}

TEST_CASE("property: bracket antisymmetry") {
  std::mt19937_64 rng(3);
  testing::RandomExpr gen(3, 4);
  for (int i = 0; i < 50; ++i) {
    VectorField f = random_field(rng, 3);
    VectorField g{simplify(gen.tree(2)), random_poly(rng, 3), simplify(gen.tree(2))};
    auto p = random_point(rng, 3);
    std::vector<double> a;
    std::vector<double> b;
    try {
      a = values(lie_bracket(f, g), p);
      b = values(lie_bracket(g, f), p);
    } catch (const DomainError&) {
      continue;
    }
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(a[k] + b[k]) <= 1e-9 * (1 + std::abs(a[k])));
  }
}

TEST_CASE("property: Jacobi identity") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    VectorField f = random_field(rng, 3);
    VectorField g = random_field(rng, 3);
    VectorField h = random_field(rng, 3);
    VectorField total = lie_bracket(f, lie_bracket(g, h)) + lie_bracket(g, lie_bracket(h, f)) +
                        lie_bracket(h, lie_bracket(f, g));
    auto p = random_point(rng, 3);
    for (double v : values(total, p)) CHECK(std::abs(v) <= 1e-7);
  }
}

TEST_CASE("property: Leibniz rule and d commutes with L_f") {
  std::mt19937_64 rng(9);
  testing::RandomExpr gen(3, 10);
  int checked = 0;
  for (int i = 0; i < 40; ++i) {
    VectorField f{simplify(gen.tree(2)), random_poly(rng, 3), simplify(gen.tree(2))};
    Expr a = simplify(gen.tree(3));
    Expr b = simplify(gen.tree(3));
    auto p = random_point(rng, 3);
    try {
      Evaluator ev(p);
      double lhs = ev(lie_scalar(f, mul(a, b)));
      double rhs = ev(lie_scalar(f, a)) * ev(b) + ev(a) * ev(lie_scalar(f, b));
      CHECK(std::abs(lhs - rhs) <= 1e-9 * (1 + std::abs(lhs)));
      auto d_lf = values(gradient(lie_scalar(f, a), 3), p);
      auto lf_d = values(lie_covector(f, gradient(a, 3)), p);
      for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(d_lf[k] - lf_d[k]) <= 1e-9 * (1 + std::abs(d_lf[k])));
      ++checked;
    } catch (const DomainError&) {
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("generic_rank examples") {
  SamplePlan plan = SamplePlan::around({1, 2, 0.5}, 0.3);
  VarSpace xy{"x", "y", "th"};
  CHECK(generic_rank(span_of({{"1", "0", "0"}, {"0", "1", "0"}}, xy), plan) == 2);
  SamplePlan plan2 = SamplePlan::around({0.5, 0.5}, 0.3);
  VarSpace s2{"a", "b"};
  CHECK(generic_rank(span_of({{"1", "0"}, {"2", "0"}}, s2), plan2) == 1);
  CHECK(generic_rank(span_of({{"a", "b"}, {"2*a", "2*b"}}, s2), plan2) == 1);
  CHECK(generic_rank(span_of({{"a", "b"}, {"b", "a"}}, s2), plan2) == 2);
  CHECK(generic_rank(Codistribution{s2, {}}, plan2) == 0);
}

TEST_CASE("contains and same_span examples") {
  VarSpace xy{"x", "y", "th"};
  SamplePlan plan = SamplePlan::around({1, 2, 0.5}, 0.3);
  Codistribution c = span_of({{"1", "0", "0"}, {"0", "1", "0"}}, xy);
  CHECK(!contains(c, field({"0", "0", "1"}, xy), plan));
  CHECK(contains(c, field({"x", "y*th", "0"}, xy), plan));
  CHECK(same_span(c, c, plan));
  CHECK(same_span(c, span_of({{"1", "1", "0"}, {"1", "-1", "0"}}, xy), plan));
  CHECK(!same_span(c, span_of({{"1", "1", "0"}}, xy), plan));
  CHECK(!same_span(c, span_of({{"1", "0", "0"}, {"0", "0", "1"}}, xy), plan));

  // Rank drops on a measure-zero set only: sin(th - 0.5) vanishes at the center
  // but membership must be decided generically.
  Codistribution d = span_of({{"1", "0", "0"}, {"0", "sin(th)", "0"}}, xy);
  CHECK(contains(d, field({"0", "1", "0"}, xy), plan));
}

TEST_CASE("rank is monotone under generator addition and contains preserves it") {
  std::mt19937_64 rng(21);
  SamplePlan plan = SamplePlan::around({0.2, -0.4, 0.7, 1.1}, 0.3);
  VarSpace s{"a", "b", "c", "d"};
  for (int trial = 0; trial < 10; ++trial) {
    Codistribution c{s, {}};
    int previous = 0;
    for (int k = 0; k < 5; ++k) {
      c.generators.push_back(gradient(random_poly(rng, 4), 4));
      int r = generic_rank(c, plan);
      CHECK(r >= previous);
      previous = r;
    }
    Covector w = c.generators[0];
    for (auto& e : w) e = mul(constant(3), e);
    Codistribution bigger = c;
    bigger.generators.push_back(w);
    CHECK(contains(c, w, plan));
    CHECK(generic_rank(bigger, plan) == generic_rank(c, plan));
  }
}

TEST_CASE("sampling is deterministic and honours guards") {
  SamplePlan plan = polar_plan();
  std::vector<Expr> none;
  auto a = draw_points(plan, none);
  auto b = draw_points(plan, none);
  CHECK(a == b);
  REQUIRE(a.size() == 7);
  for (const auto& p : a) {
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(p[i] - plan.center[i]) <= 0.3);
  }
  plan.seed = 43;
  CHECK(draw_points(plan, none) != a);

  // A guard that is tiny everywhere in the box exhausts the attempts.
  SamplePlan guarded = polar_plan();
  guarded.guards = {P("1e-9*r")};
  SampleStats stats;
  CHECK_THROWS_AS(draw_points(guarded, none, &stats), SamplingError);
  CHECK(stats.rejected_guard == 70);

  // Domain errors everywhere: ln of a negative quantity.
  std::vector<Expr> probes{P("ln(-r)")};
  CHECK_THROWS_AS(draw_points(polar_plan(), probes), SamplingError);
}

TEST_CASE("SampledSpan drops redundant generators") {
  SampledSpan span(3, polar_plan());
  CHECK(span.add(gradient(P("r"), kPolar)));
  CHECK(!span.add(gradient(P("2*r"), kPolar)));
  CHECK(span.add(gradient(P("r*cos(theta - phi)"), kPolar)));
  CHECK(span.rank() == 2);
  CHECK(span.generators().size() == 2);
  CHECK(span.contains(gradient(P("cos(theta - phi)"), kPolar)));
  CHECK(!span.contains(gradient(P("theta"), kPolar)));
}

TEST_CASE("plan validation") {
  SamplePlan plan = polar_plan();
  plan.samples = 0;
  CHECK_THROWS_AS(plan.validate(3), SpecError);
  plan = polar_plan();
  plan.tol = 0;
  CHECK_THROWS_AS(plan.validate(3), SpecError);
  plan = polar_plan();
  plan.half_width[1] = 0;
  CHECK_THROWS_AS(plan.validate(3), SpecError);
  CHECK_THROWS_AS(polar_plan().validate(4), SpecError);
}
