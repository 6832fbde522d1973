#include "uiobs/augment.hpp"

namespace uiobs {

std::string jet_name(const SystemSpec& sys, int order, std::size_t j) {
  std::string base = sys.unknown_input_name(j);
  return order == 0 ? base : base + "_d" + std::to_string(order);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Observable: return "OBSERVABLE";
    case Verdict::NotObservable: return "NOT-OBSERVABLE";
    case Verdict::Undecided: return "UNDECIDED";
  }
  return "UNDECIDED";
}

VectorField ExtendedSystem::unit_direction(std::size_t j) const {
  if (k < 1) throw DimensionError("unit disturbance directions exist only for k >= 1");
  if (j >= m_w) throw DimensionError("unknown input index out of range");
  VectorField e(space.size(), constant(0));
  e[slot(k - 1, j)] = constant(1);
  return e;
}

ExtendedSystem extend_system(const SystemSpec& sys, int k) {
  if (k < 0) throw SpecError("extension order must be non-negative");
  sys.validate();
  ExtendedSystem ext;
  ext.k = k;
  ext.n = sys.n();
  ext.m_w = sys.m_w();

  std::vector<std::string> extra;
  for (int order = 0; order < k; ++order) {
    for (std::size_t j = 0; j < ext.m_w; ++j) extra.push_back(jet_name(sys, order, j));
  }
  ext.space = sys.space.appended(extra);
  const std::size_t N = ext.space.size();

  auto lift = [&](const Expr& e) { return remap(e, sys.space, ext.space); };
  auto lift_field = [&](const VectorField& v) {
    VectorField out(N, constant(0));
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = simplify(lift(v[i]));
    return out;
  };

  if (k == 0) {
    // The unknown inputs stay unmodelled; only the known part of the dynamics remains.
    ext.f0 = lift_field(sys.f0);
  } else {
    ext.f0 = lift_field(sys.f0);
    for (std::size_t j = 0; j < ext.m_w; ++j) {
      Expr w = variable(ext.slot(0, j));
      for (std::size_t i = 0; i < ext.n; ++i) ext.f0[i] = add(ext.f0[i], mul(lift(sys.g[j][i]), w));
    }
    for (int order = 0; order + 1 < k; ++order) {
      for (std::size_t j = 0; j < ext.m_w; ++j) ext.f0[ext.slot(order, j)] = variable(ext.slot(order + 1, j));
    }
  }
  for (const auto& fi : sys.f) ext.f.push_back(lift_field(fi));
  for (const auto& h : sys.outputs) ext.outputs.push_back(simplify(lift(h)));
  return ext;
}

SamplePlan extended_plan(const SamplePlan& state_plan, const ExtendedSystem& ext, const JetBox& jets) {
  SamplePlan plan = state_plan;
  plan.center.resize(ext.n);
  plan.half_width.resize(ext.n);
  plan.center.resize(ext.space.size(), jets.center);
  plan.half_width.resize(ext.space.size(), jets.half_width);
  std::vector<Expr> guards;
  for (const auto& g : state_plan.guards) guards.push_back(g);  // guards only involve x
  plan.guards = guards;
  return plan;
}

namespace {

std::vector<const VectorField*> algorithm_fields(const ExtendedSystem& ext) {
  std::vector<const VectorField*> fields;
  auto nonzero = [](const VectorField& v) {
    for (const auto& e : v) {
      if (!e.is_zero()) return true;
    }
    return false;
  };
  if (nonzero(ext.f0)) fields.push_back(&ext.f0);
  for (const auto& fi : ext.f) {
    if (nonzero(fi)) fields.push_back(&fi);
  }
  return fields;
}

void check_order(const ExtendedSystem& ext, int m) {
  if (m < 0) throw SpecError("recursion step must be non-negative");
  if (m > ext.k && ext.m_w > 0) {
    throw SpecError("recursion step " + std::to_string(m) + " exceeds the extension order k = " +
                    std::to_string(ext.k));
  }
}

}  // namespace

std::vector<Expr> omega_bar_functions(const ExtendedSystem& ext, int m) {
  check_order(ext, m);
  auto fields = algorithm_fields(ext);
  std::vector<Expr> all = ext.outputs;
  std::vector<Expr> frontier = ext.outputs;
  for (int step = 1; step <= m; ++step) {
    std::vector<Expr> next;
    for (const auto& lambda : frontier) {
      for (const auto* fld : fields) next.push_back(lie_scalar(*fld, lambda));
    }
    all.insert(all.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return all;
}

Codistribution omega_bar(const ExtendedSystem& ext, int m) {
  Codistribution c{ext.space, {}};
  for (const auto& lambda : omega_bar_functions(ext, m)) c.generators.push_back(gradient(lambda, ext.space));
  return c;
}

OmegaBarBuild omega_bar(const ExtendedSystem& ext, int m, SampledSpan& span) {
  check_order(ext, m);
  auto fields = algorithm_fields(ext);
  OmegaBarBuild out;
  std::vector<Expr> frontier;
  for (const auto& h : ext.outputs) {
    if (span.add(gradient(h, ext.space))) frontier.push_back(h);
  }
  out.functions = frontier;
  out.ranks.push_back(span.rank());
  out.stabilized = false;
  for (int step = 1; step <= m; ++step) {
    std::vector<Expr> next;
    for (const auto& lambda : frontier) {
      for (const auto* fld : fields) {
        Expr candidate = lie_scalar(*fld, lambda);
        if (candidate.is_constant()) continue;
        if (span.add(gradient(candidate, ext.space))) next.push_back(candidate);
      }
    }
    out.ranks.push_back(span.rank());
    out.functions.insert(out.functions.end(), next.begin(), next.end());
    out.stabilized = next.empty();
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return out;
}

EorcOrder eorc_report(const SystemSpec& sys, int k, const SamplePlan& state_plan, const JetBox& jets,
                      SampleStats* stats) {
  ExtendedSystem ext = extend_system(sys, k);
  SamplePlan plan = extended_plan(state_plan, ext, jets);
  SampledSpan span(ext.space.size(), plan, {}, stats);

  // Without unknown inputs the order bound is vacuous; iterate to stability,
  // which takes at most one step per gained dimension.
  int steps = ext.m_w == 0 ? static_cast<int>(ext.space.size()) : k;
  OmegaBarBuild build = omega_bar(ext, steps, span);

  EorcOrder out;
  out.k = k;
  out.steps = static_cast<int>(build.ranks.size()) - 1;
  out.ranks = build.ranks;
  out.rank = span.rank();
  for (std::size_t j = 0; j < ext.n; ++j) {
    Covector dx(ext.space.size(), constant(0));
    dx[j] = constant(1);
    out.observable.push_back(span.contains(dx));
  }
  return out;
}

}  // namespace uiobs
