#include <cmath>

#include "uiobs/single_ui.hpp"

namespace uiobs {
namespace {

// L_f^i h for i = 0 .. r-1.
std::vector<Expr> output_derivatives(const SystemSpec& sys, int r, std::size_t input, std::size_t output) {
  std::vector<Expr> out{sys.outputs.at(output)};
  for (int i = 1; i < r; ++i) out.push_back(lie_scalar(sys.f.at(input), out.back()));
  return out;
}

void check_map_shape(const SystemSpec& sys, const CoordinateMap& change) {
  const std::size_t n = sys.n();
  if (change.Q.size() != n || change.Q_inverse.size() != n || change.space.size() != n) {
    throw SpecError("coordinate_change: Q, Q_inverse and the new states must all have " + std::to_string(n) +
                    " entries");
  }
}

bool agrees(const Expr& a, const Expr& b, const std::vector<std::vector<double>>& points) {
  for (const auto& p : points) {
    Evaluator ev(p);
    double va = ev(a);
    double vb = ev(b);
    if (std::abs(va - vb) > 1e-9 * (1.0 + std::abs(va) + std::abs(vb))) return false;
  }
  return true;
}

}  // namespace

RelativeDegree relative_degree(const SystemSpec& sys, const SamplePlan& plan, std::size_t output) {
  if (sys.m_w() != 1) throw SpecError("relative degree needs exactly one unknown input");
  const std::size_t n = sys.n();
  const VectorField& g = sys.g[0];
  RelativeDegree out;
  for (std::size_t i = 0; i < sys.m_u(); ++i) {
    std::optional<int> ri;
    Expr lambda = sys.outputs.at(output);
    for (std::size_t r = 1; r <= n; ++r) {
      if (!vanishes(lie_scalar(g, lambda), plan)) {
        ri = static_cast<int>(r);
        break;
      }
      lambda = lie_scalar(sys.f[i], lambda);
    }
    out.per_input.push_back(ri);
    if (ri && (!out.r || *ri > *out.r)) {
      out.r = ri;
      out.input = i;
    }
  }
  return out;
}

void validate_coordinate_change(const SystemSpec& sys, const CoordinateMap& change, int r, std::size_t input,
                                const SamplePlan& plan, std::size_t output) {
  check_map_shape(sys, change);
  const std::size_t n = sys.n();

  std::vector<std::vector<double>> points = draw_points(plan, change.Q);
  for (const auto& p : points) {
    Evaluator ev(p);
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = ev(change.Q[i]);
    Evaluator back(q);
    for (std::size_t j = 0; j < n; ++j) {
      double xj;
      try {
        xj = back(change.Q_inverse[j]);
      } catch (const DomainError& e) {
        throw SpecError("coordinate_change: Q_inverse is undefined at Q(x): " + std::string(e.what()));
      }
      if (std::abs(xj - p[j]) > 1e-7 * (1.0 + std::abs(p[j]))) {
        throw SpecError("coordinate_change: Q_inverse(Q(x)) differs from x in component " +
                        sys.space.names()[j]);
      }
    }
  }

  Evaluator at_x0(sys.x0);
  Eigen::MatrixXd jac(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::RowVectorXd row = evaluate_row(at_x0, gradient(change.Q[i], n));
    double norm = row.norm();
    jac.row(static_cast<Eigen::Index>(i)) = norm > 0 ? Eigen::RowVectorXd(row / norm) : row;
  }
  if (numeric_rank(jac, plan.tol) != static_cast<int>(n)) {
    throw SpecError("coordinate_change: the Jacobian of Q is singular at x0");
  }

  Codistribution leading{sys.space, {}};
  Codistribution derivatives{sys.space, {}};
  std::vector<Expr> lambdas = output_derivatives(sys, r, input, output);
  for (int i = 0; i < r; ++i) {
    leading.generators.push_back(gradient(change.Q[i], n));
    derivatives.generators.push_back(gradient(lambdas[i], n));
  }
  if (!same_span(leading, derivatives, plan)) {
    throw SpecError("coordinate_change: the first " + std::to_string(r) +
                    " components of Q must span the differentials of the output and its first " +
                    std::to_string(r - 1) + " derivatives");
  }
}

SystemSpec apply_coordinate_change(const SystemSpec& sys, const CoordinateMap& change, int r,
                                   std::size_t input, const SamplePlan& plan, std::size_t output,
                                   CoordinateChangeInfo* info) {
  check_map_shape(sys, change);
  if (r < 1 || r > static_cast<int>(sys.n())) throw SpecError("relative degree out of range");
  auto back = [&](const Expr& e) { return substitute(e, change.Q_inverse); };
  auto transform = [&](const VectorField& f) {
    VectorField out;
    for (const auto& q : change.Q) out.push_back(back(lie_scalar(f, q)));
    return out;
  };

  SystemSpec out;
  out.space = change.space;
  out.f0 = transform(sys.f0);
  for (const auto& fi : sys.f) out.f.push_back(transform(fi));
  for (const auto& gj : sys.g) out.g.push_back(transform(gj));
  out.unknown_input_names = sys.unknown_input_names;

  std::vector<Expr> lambdas = output_derivatives(sys, r, input, output);
  std::vector<std::vector<double>> points = draw_points(plan, lambdas);
  CoordinateChangeInfo local{r, input, {}};
  std::vector<Expr> mapped;
  for (int i = 0; i < r; ++i) {
    bool match = agrees(change.Q[i], lambdas[i], points);
    local.coordinate_matches.push_back(match);
    mapped.push_back(match ? variable(static_cast<std::size_t>(i)) : back(lambdas[i]));
  }
  out.outputs.push_back(mapped.back());
  for (std::size_t l = 0; l < sys.outputs.size(); ++l) {
    if (l != output) out.outputs.push_back(back(sys.outputs[l]));
  }
  for (int i = 0; i + 1 < r; ++i) out.observable_seeds.push_back(mapped[i]);
  for (const auto& s : sys.observable_seeds) out.observable_seeds.push_back(back(s));

  Evaluator at_x0(sys.x0);
  for (const auto& q : change.Q) out.x0.push_back(at_x0(q));
  if (info) *info = local;
  return out;
}

}  // namespace uiobs
