#include <cmath>
#include <functional>

#include "case_studies.hpp"
#include "doctest.h"
#include "uiobs/augment.hpp"

using namespace uiobs;
using uiobs::testing::range_v;
using uiobs::testing::gps;

namespace {

SamplePlan state_plan(const SystemSpec& s) { return SamplePlan::around(s.x0, 0.3); }

std::vector<std::vector<double>> ext_points(const ExtendedSystem& ext, const SystemSpec& s, int count) {
  SamplePlan plan = extended_plan(state_plan(s), ext);
  plan.samples = count;
  std::vector<Expr> none;
  return draw_points(plan, none);
}

void check_same(const Expr& a, const Expr& b, const VarSpace& space, const std::vector<double>& p) {
  CHECK(evaluate(a, space, p) == doctest::Approx(evaluate(b, space, p)).epsilon(1e-12));
}

}  // namespace

TEST_CASE("extend_system: GPS with both inputs unknown, k = 1") {
  SystemSpec s = gps(true);
  ExtendedSystem ext = extend_system(s, 1);
  REQUIRE(ext.space.size() == 5);
  CHECK(ext.space.names() == std::vector<std::string>{"x", "y", "theta", "v", "omega"});
  VectorField expected = parse_field({"cos(theta)*v", "sin(theta)*v", "omega", "0", "0"}, ext.space);
  CHECK(ext.f0 == expected);
  CHECK(ext.f.empty());
}

TEST_CASE("extend_system: k = 0 keeps the original system") {
  SystemSpec s = range_v();
  ExtendedSystem ext = extend_system(s, 0);
  CHECK(ext.space == s.space);
  CHECK(ext.f0 == s.f0);
  REQUIRE(ext.f.size() == 1);
  CHECK(ext.f[0] == s.f[0]);
  CHECK(ext.outputs == s.outputs);
}

TEST_CASE("extend_system: shift structure for k = 2 and k = 3") {
  SystemSpec s = range_v();
  ExtendedSystem e2 = extend_system(s, 2);
  CHECK(e2.space.names() == std::vector<std::string>{"r", "phi", "theta", "v", "v_d1"});
  CHECK(e2.f0[3] == variable(4));
  CHECK(e2.f0[4].is_zero());
  for (std::size_t i = 3; i < 5; ++i) CHECK(e2.f[0][i].is_zero());

  ExtendedSystem e3 = extend_system(s, 3);
  CHECK(e3.f0[3] == variable(4));
  CHECK(e3.f0[4] == variable(5));
  CHECK(e3.f0[5].is_zero());
  CHECK(e3.unit_direction(0)[5].is_one());

  // Only the drift depends on the appended variables.
  for (const auto& e : e3.f[0]) {
    for (std::size_t v = 3; v < 6; ++v) CHECK(!e.may_depend_on(v));
  }
  CHECK_THROWS_AS(extend_system(s, -1), SpecError);
}

TEST_CASE("omega_bar: GPS, k = 1") {
  SystemSpec s = gps(true);
  ExtendedSystem ext = extend_system(s, 1);
  SamplePlan plan = extended_plan(state_plan(s), ext);

  Codistribution o0 = omega_bar(ext, 0);
  VarSpace sp = ext.space;
  Codistribution axes{sp, {parse_field({"1", "0", "0", "0", "0"}, sp), parse_field({"0", "1", "0", "0", "0"}, sp)}};
  CHECK(same_span(o0, axes, plan));

  Codistribution o1 = omega_bar(ext, 1);
  Codistribution expected = axes;
  expected.generators.push_back(parse_field({"0", "0", "-sin(theta)*v", "cos(theta)", "0"}, sp));
  expected.generators.push_back(parse_field({"0", "0", "cos(theta)*v", "sin(theta)", "0"}, sp));
  CHECK(same_span(o1, expected, plan));
  CHECK(generic_rank(o1, plan) == 4);

  CHECK_THROWS_AS(omega_bar(ext, 2), SpecError);
}

TEST_CASE("eorc_report: GPS") {
  SystemSpec s = gps(true);
  EorcOrder k0 = eorc_report(s, 0, state_plan(s));
  CHECK(k0.observable == std::vector<bool>{true, true, false});
  CHECK(k0.rank == 2);

  EorcOrder k1 = eorc_report(s, 1, state_plan(s));
  CHECK(k1.observable == std::vector<bool>{true, true, true});
  CHECK(k1.rank == 4);

  SystemSpec known = gps(false);
  EorcOrder orc = eorc_report(known, 0, state_plan(known));
  CHECK(orc.observable == std::vector<bool>{true, true, true});
  CHECK(orc.ranks.at(1) == 3);
}

TEST_CASE("eorc_report: output equal to a state with no dynamics") {
  SystemSpec s;
  s.space = VarSpace{"a", "b"};
  s.f0 = parse_field({"0", "0"}, s.space);
  s.f = {parse_field({"0", "0"}, s.space)};
  s.outputs = {variable(0)};
  s.x0 = {0.5, 0.5};
  EorcOrder r = eorc_report(s, 0, state_plan(s));
  CHECK(r.observable == std::vector<bool>{true, false});
}

TEST_CASE("generators ignore derivatives of order >= m") {
  SystemSpec s = range_v();
  for (int k : {2, 3}) {
    ExtendedSystem ext = extend_system(s, k);
    auto points = ext_points(ext, s, 20);
    for (int m = 0; m <= k; ++m) {
      Codistribution c = omega_bar(ext, m);
      for (const auto& gen : c.generators) {
        for (int f = m; f < k; ++f) {
          for (const auto& p : points) CHECK(std::abs(evaluate(gen[ext.slot(f, 0)], p)) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("Lie derivatives agree between orders k and k + 1") {
  SystemSpec s = range_v();
  for (int k : {1, 2, 3}) {
    ExtendedSystem a = extend_system(s, k);
    ExtendedSystem b = extend_system(s, k + 1);
    auto fa = omega_bar_functions(a, k);
    auto fb = omega_bar_functions(b, k);
    REQUIRE(fa.size() == fb.size());
    auto points = ext_points(b, s, 20);
    for (std::size_t i = 0; i < fa.size(); ++i) {
      Expr lifted = remap(fa[i], a.space, b.space);
      for (const auto& p : points) check_same(lifted, fb[i], b.space, p);
    }
  }
}

TEST_CASE("steps along the unit disturbance direction vanish up to order k") {
  SystemSpec s = range_v();
  for (int k : {1, 2, 3}) {
    ExtendedSystem ext = extend_system(s, k);
    VectorField unit = ext.unit_direction(0);
    std::vector<const VectorField*> fields{&ext.f0, &ext.f[0]};
    auto points = ext_points(ext, s, 20);
    // Every chain of total length <= k with exactly one unit step.
    std::function<void(const Expr&, int, bool)> walk = [&](const Expr& lambda, int length, bool used) {
      if (used) {
        for (const auto& p : points) CHECK(std::abs(evaluate(lambda, p)) <= 1e-9);
      }
      if (length == k) return;
      if (!used) walk(lie_scalar(unit, lambda), length + 1, true);
      for (const auto* f : fields) walk(lie_scalar(*f, lambda), length + 1, used);
    };
    walk(ext.outputs[0], 0, false);
  }
}

TEST_CASE("generic rank of the extended codistribution is nondecreasing") {
  SystemSpec s = range_v();
  ExtendedSystem ext = extend_system(s, 4);
  SamplePlan plan = extended_plan(state_plan(s), ext);
  int previous = 0;
  for (int m = 0; m <= 4; ++m) {
    int r = generic_rank(omega_bar(ext, m), plan);
    CHECK(r >= previous);
    previous = r;
  }
}
