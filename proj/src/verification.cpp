#include <algorithm>
#include <cmath>

#include "uiobs/single_ui.hpp"

namespace uiobs {
namespace {

SystemSpec single_output(const SystemSpec& sys, std::size_t output) {
  SystemSpec s = sys;
  s.outputs = {sys.outputs[output]};
  s.observable_seeds.clear();
  s.coordinate_change.reset();
  return s;
}

Covector lifted_gradient(const Covector& omega, const VarSpace& from, const VarSpace& to) {
  Covector out(to.size(), constant(0));
  for (std::size_t i = 0; i < omega.size(); ++i) out[i] = remap(omega[i], from, to);
  return out;
}

// Largest |a - b| / (1 + |a|) over the points where both evaluate.
class Residual {
 public:
  explicit Residual(const std::vector<std::vector<double>>& points) : points_(points) {}

  double operator()(const std::vector<Expr>& a, const std::vector<Expr>& b) const {
    double worst = 0.0;
    for (const auto& p : points_) {
      Evaluator ev(p);
      try {
        for (std::size_t i = 0; i < a.size(); ++i) {
          double va = ev(a[i]);
          double vb = ev(b[i]);
          worst = std::max(worst, std::abs(va - vb) / (1.0 + std::abs(va)));
        }
      } catch (const DomainError&) {
        continue;
      }
    }
    return worst;
  }

 private:
  const std::vector<std::vector<double>>& points_;
};

}  // namespace

std::vector<SeparationCheck> separation_checks(const SystemSpec& sys, int m, const SamplePlan& plan) {
  sys.validate();
  if (sys.m_w() != 1) throw SpecError("the separation check needs exactly one unknown input");
  if (m < 0) throw SpecError("separation order must be non-negative");
  std::vector<SeparationCheck> out;
  for (std::size_t l = 0; l < sys.outputs.size(); ++l) {
    if (vanishes(lie_scalar(sys.g[0], sys.outputs[l]), plan)) continue;
    SystemSpec single = single_output(sys, l);
    SamplePlan state_plan = guarded_plan(single, plan, 0);

    SampledSpan x_span(single.n(), state_plan);
    OmegaRecursion rec(single, 0, x_span);
    for (int k = 0; k < m; ++k) rec.step();

    ExtendedSystem ext = extend_system(single, m);
    SamplePlan ext_plan = extended_plan(state_plan, ext);
    SampledSpan bar_span(ext.space.size(), ext_plan);
    omega_bar(ext, m, bar_span);

    Codistribution bar{ext.space, bar_span.generators()};
    Codistribution tilde{ext.space, {}};
    for (const auto& omega : x_span.generators()) {
      tilde.generators.push_back(lifted_gradient(omega, single.space, ext.space));
    }
    Expr lambda = ext.outputs[0];
    for (int j = 1; j <= m; ++j) {
      lambda = lie_scalar(ext.f0, lambda);
      tilde.generators.push_back(gradient(lambda, ext.space.size()));
    }

    SeparationCheck check;
    check.output = l;
    check.m = m;
    check.rank_bar = generic_rank(bar, ext_plan);
    check.rank_tilde = generic_rank(tilde, ext_plan);
    check.equal = check.rank_bar == check.rank_tilde && same_span(bar, tilde, ext_plan);
    out.push_back(check);
  }
  return out;
}

bool verify_separation(const SystemSpec& sys, int m, const SamplePlan& plan) {
  auto checks = separation_checks(sys, m, plan);
  if (checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const SeparationCheck& c) { return c.equal; });
}

std::vector<bool> verify_stop(const SystemSpec& sys, int m, int extra, const SamplePlan& plan, std::size_t output) {
  if (m < 0 || extra < 0) throw SpecError("stop check orders must be non-negative");
  SamplePlan guarded = guarded_plan(sys, plan, output);
  SampledSpan span(sys.n(), guarded);
  OmegaRecursion rec(sys, output, span);
  for (int k = 0; k < m; ++k) rec.step();
  Codistribution base = rec.codistribution();
  std::vector<bool> out;
  for (int p = 1; p <= extra; ++p) {
    rec.step();
    out.push_back(same_span(base, rec.codistribution(), guarded));
  }
  return out;
}

std::vector<IdentityResiduals> verify_identities(const SystemSpec& sys, int j_max, const SamplePlan& plan,
                                                 std::size_t output) {
  if (j_max < 0) throw SpecError("identity order must be non-negative");
  RhoData rho = rho_data(sys, output);
  const Expr& h = sys.outputs[output];
  const Expr inv = pow(rho.L1g, -1);
  const VectorField g_hat = scaled(sys.g[0], inv);
  auto along_g_hat = [&](Expr e, int times) {
    for (int t = 0; t < times; ++t) e = lie_scalar(g_hat, e);
    return e;
  };

  std::vector<Expr> probes{rho.rho};
  auto points = draw_points(guarded_plan(sys, plan, output), probes);
  Residual residual(points);
  auto phis = phi_sequence(sys, j_max, output);

  std::vector<IdentityResiduals> out;
  for (std::size_t i = 0; i < sys.m_u(); ++i) {
    const auto& phi = phis[i];
    std::vector<Expr> chi;
    for (int k = 0; k <= j_max; ++k) chi.push_back(mul(lie_scalar(phi[k], rho.L1g), inv));

    IdentityResiduals r;
    r.input = i;
    r.samples = static_cast<int>(points.size());
    VectorField psi = sys.f[i];
    for (int j = 0; j <= j_max; ++j) {
      if (j > 0) psi = lie_bracket(psi, g_hat);
      Expr coeff = constant(0);
      for (int k = 0; k < j; ++k) {
        Expr term = along_g_hat(chi[k], j - k - 1);
        coeff = (j - k) % 2 == 0 ? add(coeff, term) : sub(coeff, term);
      }
      r.psi_phi.push_back(residual(psi, phi[j] + scaled(g_hat, coeff)));

      if (j < 2) {
        r.key.push_back(0.0);
        continue;
      }
      Expr lhs = lie_scalar(phi[j], h);
      Expr rhs = lie_scalar(phi[j - 2], rho.rho) + rho.rho * chi[j - 2] -
                 lie_scalar(g_hat, chi[j - 2] + lie_scalar(phi[j - 1], h));
      r.key.push_back(residual({lhs}, {rhs}));
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace uiobs
