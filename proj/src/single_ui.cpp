#include <cmath>

#include "uiobs/single_ui.hpp"

namespace uiobs {
namespace {

void require_single_unknown(const SystemSpec& sys) {
  if (sys.m_w() != 1) {
    throw SpecError("the single-input analysis needs exactly one unknown input, got " + std::to_string(sys.m_w()));
  }
}

void require_output(const SystemSpec& sys, std::size_t output) {
  if (output >= sys.outputs.size()) throw SpecError("output index " + std::to_string(output) + " out of range");
}

Covector unit_covector(std::size_t n, std::size_t j) {
  Covector e(n, constant(0));
  e[j] = constant(1);
  return e;
}

}  // namespace

std::string to_string(Certificate c) {
  switch (c) {
    case Certificate::None: return "none";
    case Certificate::StopCriterion: return "stop-criterion";
    case Certificate::EarlyExit: return "early-exit";
    case Certificate::RelativeDegree: return "relative-degree-n";
  }
  return "none";
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Done: return "DONE";
    case Status::Undecided: return "UNDECIDED";
    case Status::NotHandled: return "NOT-HANDLED";
  }
  return "UNDECIDED";
}

RhoData rho_data(const SystemSpec& sys, std::size_t output) {
  require_single_unknown(sys);
  require_output(sys, output);
  RhoData d;
  const VectorField& g = sys.g[0];
  d.L1g = lie_scalar(g, sys.outputs[output]);
  d.L2g = lie_scalar(g, d.L1g);
  d.rho = product(Number(1), {{d.L2g, 1}, {d.L1g, -2}});
  d.d_rho = gradient(d.rho, sys.n());
  return d;
}

std::vector<std::vector<VectorField>> phi_sequence(const SystemSpec& sys, int m, std::size_t output) {
  require_single_unknown(sys);
  require_output(sys, output);
  if (m < 0) throw SpecError("phi_sequence order must be non-negative");
  Expr inv = pow(lie_scalar(sys.g[0], sys.outputs[output]), -1);
  std::vector<std::vector<VectorField>> out;
  for (const auto& fi : sys.f) {
    std::vector<VectorField> seq{fi};
    for (int k = 1; k <= m; ++k) seq.push_back(scaled(lie_bracket(seq.back(), sys.g[0]), inv));
    out.push_back(std::move(seq));
  }
  return out;
}

bool vanishes(const Expr& e, const SamplePlan& plan) {
  if (e.is_constant()) return e.is_zero();
  std::vector<Expr> probes{e};
  for (const auto& p : draw_points(plan, probes)) {
    Evaluated v = Evaluator(p).eval(e);
    if (!v.negligible() && std::abs(v.value) >= 1e-12) return false;
  }
  return true;
}

SamplePlan guarded_plan(const SystemSpec& sys, const SamplePlan& plan, std::size_t output) {
  SamplePlan out = plan;
  out.guards.push_back(lie_scalar(sys.g.at(0), sys.outputs.at(output)));
  return out;
}

// --- OmegaRecursion -----------------------------------------------------------

OmegaRecursion::OmegaRecursion(const SystemSpec& sys, std::size_t primary_output, SampledSpan& span)
    : sys_(sys), span_(span), rho_(rho_data(sys, primary_output)) {
  if (span.dim() != sys.n()) throw DimensionError("OmegaRecursion: span dimension differs from the system");
  inv_L1_ = pow(rho_.L1g, -1);
  phi_ = sys.f;
  std::vector<Expr> added;
  for (const auto& h : sys.outputs) offer(h, added);
  for (const auto& s : sys.observable_seeds) offer(s, added);
  frontier_ = added;
  functions_ = added;
  ranks_.push_back(span_.rank());
}

bool OmegaRecursion::offer(const Expr& candidate, std::vector<Expr>& added) {
  if (candidate.is_constant()) return false;
  if (!span_.add(gradient(candidate, sys_.n()))) return false;
  added.push_back(candidate);
  return true;
}

std::size_t OmegaRecursion::step() {
  const VectorField& g = sys_.g[0];
  std::vector<Expr> added;
  for (const auto& lambda : frontier_) {
    for (const auto& fi : sys_.f) offer(lie_scalar(fi, lambda), added);
    offer(mul(lie_scalar(g, lambda), inv_L1_), added);
  }
  // phi_ holds phi^i_m; the step to m + 1 uses it on every output.
  for (const auto& phi : phi_) {
    for (const auto& h : sys_.outputs) offer(lie_scalar(phi, h), added);
  }
  for (auto& phi : phi_) phi = scaled(lie_bracket(phi, g), inv_L1_);

  ++m_;
  frontier_ = added;
  functions_.insert(functions_.end(), added.begin(), added.end());
  ranks_.push_back(span_.rank());
  return added.size();
}

Codistribution OmegaRecursion::codistribution() const { return Codistribution{sys_.space, span_.generators()}; }

Codistribution omega(const SystemSpec& sys, int m, const SamplePlan& plan, std::size_t output) {
  require_single_unknown(sys);
  require_output(sys, output);
  if (vanishes(lie_scalar(sys.g[0], sys.outputs[output]), plan)) {
    throw CoordinateChangeRequired("L_g h vanishes near x0; a coordinate change is required");
  }
  SampledSpan span(sys.n(), guarded_plan(sys, plan, output));
  OmegaRecursion rec(sys, output, span);
  for (int k = 0; k < m; ++k) rec.step();
  return rec.codistribution();
}

// --- analysis ------------------------------------------------------------------

AnalysisResult analyze(const SystemSpec& sys, const AnalysisOptions& options) {
  sys.validate();
  require_single_unknown(sys);
  if (sys.has_drift()) {
    throw SpecError("the single-input analysis needs f0 = 0; systems with drift go through the EORC path");
  }
  const std::size_t n = sys.n();
  SamplePlan base = options.plan;
  base.validate(n);

  AnalysisResult res;
  res.bound = static_cast<int>(2 * n + 2);
  const int max_m = options.max_m < 0 ? res.bound : options.max_m;
  res.verdicts.assign(n, Verdict::Undecided);

  // Step 1: pick the output; fall back to a coordinate change when L1 vanishes.
  std::optional<std::size_t> primary;
  for (std::size_t l = 0; l < sys.outputs.size(); ++l) {
    if (!vanishes(lie_scalar(sys.g[0], sys.outputs[l]), base)) {
      primary = l;
      break;
    }
  }

  SystemSpec work = sys;
  SamplePlan work_plan = base;
  int offset = 0;
  if (!primary) {
    std::optional<std::size_t> best_output;
    RelativeDegree best;
    for (std::size_t l = 0; l < sys.outputs.size(); ++l) {
      RelativeDegree rd = relative_degree(sys, base, l);
      if (l == 0) best = rd;
      if (rd.r && (!best_output || *rd.r > *best.r)) {
        best = rd;
        best_output = l;
      }
    }
    res.relative_degree_per_input = best.per_input;
    if (!best_output) {
      res.status = Status::NotHandled;
      res.relative_degree = 0;
      res.diagnostics.push_back("L_g h vanishes near x0 and no output has a finite relative degree <= n");
      return res;
    }
    const int r = *best.r;
    res.primary_output = *best_output;
    res.relative_degree = r;
    res.relative_degree_input = best.input;
    if (r == static_cast<int>(n)) {
      res.status = Status::Done;
      res.certificate = Certificate::RelativeDegree;
      res.verdicts.assign(n, Verdict::Observable);
      res.rank = static_cast<int>(n);
      res.diagnostics.push_back("relative degree equals n: the output and its first n - 1 derivatives along f" +
                                std::to_string(best.input + 1) + " are independent coordinates");
      return res;
    }
    if (!sys.coordinate_change) {
      throw SpecError("L_g h vanishes near x0 (relative degree " + std::to_string(r) +
                      " along f" + std::to_string(best.input + 1) +
                      "); the spec must provide coordinate_change with Q and Q_inverse");
    }
    validate_coordinate_change(sys, *sys.coordinate_change, r, best.input, base, *best_output);
    work = apply_coordinate_change(sys, *sys.coordinate_change, r, best.input, base, *best_output);
    work_plan.center = work.x0;
    res.coordinate_change_used = true;
    offset = r - 1;
    res.order_offset = offset;
    res.transformed = work;
    primary = 0;
    if (vanishes(lie_scalar(work.g[0], work.outputs[0]), work_plan)) {
      throw SpecError("L_g h still vanishes after the coordinate change");
    }
    res.diagnostics.push_back("coordinate change applied: relative degree " + std::to_string(r) + " along f" +
                              std::to_string(best.input + 1) + "; orders are reported in the original numbering");
  } else {
    res.primary_output = *primary;
  }

  // Steps 2-4: grow Omega_m until d rho enters and the recursion stops.
  SamplePlan plan = guarded_plan(work, work_plan, *primary);
  RhoData rho = rho_data(work, *primary);
  std::vector<Expr> probes{rho.L1g, rho.rho};
  SampledSpan span(n, plan, probes, &res.stats);
  OmegaRecursion rec(work, *primary, span);
  res.L1g = to_string(rho.L1g, work.space);
  res.rho = to_string(rho.rho, work.space);

  res.rho_zero = true;
  for (std::size_t i = 0; i < span.sample_count(); ++i) {
    if (std::abs(span.evaluator(i)(rho.rho)) >= 1e-10) res.rho_zero = false;
  }
  std::optional<int> m_prime;
  std::optional<int> m_star;
  if (res.rho_zero) m_prime = 0;

  bool early = false;
  for (;;) {
    const int m = rec.m();
    if (!m_prime && span.contains(rho.d_rho)) m_prime = m;
    if (!m_prime && options.early_exit && rec.rank() == static_cast<int>(n) - 1) {
      early = true;
      break;
    }
    std::size_t added = rec.step();
    if (m_prime && m >= *m_prime && added == 0) {
      m_star = m;
      break;
    }
    if (m >= max_m) break;
  }

  if (m_prime) res.m_prime = *m_prime + offset;
  if (m_star) res.m_star = *m_star + offset;
  res.ranks = rec.ranks();
  res.rank = span.rank();

  // Step 5: verdicts, mapped back through the inverse map when coordinates changed.
  std::vector<bool> in_span(n);
  for (std::size_t j = 0; j < n; ++j) {
    Covector dxj = res.coordinate_change_used ? gradient(sys.coordinate_change->Q_inverse[j], n)
                                              : unit_covector(n, j);
    in_span[j] = span.contains(dxj);
  }
  if (early) {
    res.status = Status::Done;
    res.certificate = Certificate::EarlyExit;
    res.verdicts.assign(n, Verdict::Observable);
    res.rank = static_cast<int>(n);
    res.diagnostics.push_back("early exit at m = " + std::to_string(rec.m() + offset) +
                              ": rank n - 1 and d rho not yet in Omega_m, so d rho must raise the rank to n");
  } else if (m_star) {
    res.status = Status::Done;
    res.certificate = Certificate::StopCriterion;
    for (std::size_t j = 0; j < n; ++j) res.verdicts[j] = in_span[j] ? Verdict::Observable : Verdict::NotObservable;
  } else {
    res.status = Status::Undecided;
    for (std::size_t j = 0; j < n; ++j) res.verdicts[j] = in_span[j] ? Verdict::Observable : Verdict::Undecided;
    res.diagnostics.push_back(m_prime ? "Omega_m did not stabilize within m <= " + std::to_string(max_m + offset)
                                      : "d rho did not enter Omega_m within m <= " + std::to_string(max_m + offset));
  }
  if (work.outputs.size() > 1 && res.status == Status::Done && res.certificate == Certificate::StopCriterion) {
    for (auto v : res.verdicts) {
      if (v == Verdict::NotObservable) {
        res.diagnostics.push_back(
            "multiple outputs: NOT-OBSERVABLE verdicts come from the multi-output recursion and are not certified");
        break;
      }
    }
  }
  if (res.stats.rejected() > 0) {
    res.diagnostics.push_back(std::to_string(res.stats.rejected()) + " candidate sample points rejected");
  }
  return res;
}

}  // namespace uiobs
