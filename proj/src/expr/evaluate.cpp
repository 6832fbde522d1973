// Numeric evaluation with a running first-order rounding-error bound. The
// bound lets callers tell an exact zero that the symbolic layer failed to
// cancel (e.g. sin(x)^2 + cos(x)^2 - 1) from a genuinely small value.

#include <cmath>
#include <limits>
#include <unordered_map>

#include "uiobs/expr.hpp"

namespace uiobs {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string describe(const Expr& e) {
  std::string s = to_string(e);
  if (s.size() > 120) s = s.substr(0, 117) + "...";
  return s;
}

}  // namespace

bool Evaluated::negligible() const noexcept { return std::abs(value) <= 8.0 * kEps * error_scale; }

struct Evaluator::Memo {
  std::unordered_map<const Node*, Evaluated> values;
  std::vector<Expr> roots;  // keeps memo keys alive across calls
};

Evaluator::Evaluator(std::span<const double> point) : point_(point), memo_(std::make_unique<Memo>()) {}

Evaluator::~Evaluator() = default;

Evaluated Evaluator::eval(const Expr& e) {
  if (auto it = memo_->values.find(e.get()); it != memo_->values.end()) return it->second;
  if (e.arity() > point_.size()) {
    throw DimensionError("evaluate: expression references variable index " +
                         std::to_string(e.arity() - 1) + " but the point has " +
                         std::to_string(point_.size()) + " coordinates");
  }
  const Node& n = e.node();
  auto fail = [&](DomainError::Kind kind) -> Evaluated { throw DomainError(kind, describe(e)); };
  Evaluated r;
  switch (n.op) {
    case Op::Const:
      r.value = n.value.value();
      r.error_scale = (n.value.exact() && n.value.den() == 1) ? 0.0 : std::abs(r.value);
      break;
    case Op::Var: r.value = point_[n.var]; break;
    case Op::Sum: {
      double total = n.value.value();
      double magnitude = std::abs(total);
      double propagated = 0;
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        Evaluated t = eval(n.args[i]);
        double c = n.coeffs[i].value();
        total += c * t.value;
        magnitude += std::abs(c * t.value);
        propagated += std::abs(c) * t.error_scale;
      }
      r.value = total;
      r.error_scale = propagated + static_cast<double>(n.args.size() + 1) * magnitude;
      break;
    }
    case Op::Product: {
      std::vector<Evaluated> f(n.args.size());
      std::vector<double> powered(n.args.size());
      double c = n.value.value();
      double total = c;
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        f[i] = eval(n.args[i]);
        if (f[i].value == 0.0 && n.exponents[i] < 0) return fail(DomainError::Kind::DivisionByZero);
        powered[i] = std::pow(f[i].value, n.exponents[i]);
        total *= powered[i];
      }
      double propagated = 0;
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (f[i].error_scale == 0.0) continue;
        double others = std::abs(c);
        for (std::size_t j = 0; j < n.args.size(); ++j) {
          if (j != i) others *= std::abs(powered[j]);
        }
        int k = n.exponents[i];
        propagated += std::abs(k) * f[i].error_scale * std::pow(std::abs(f[i].value), k - 1) * others;
      }
      r.value = total;
      r.error_scale = propagated + static_cast<double>(n.args.size() + 1) * std::abs(total);
      break;
    }
    case Op::Neg: r = eval(n.args[0]); r.value = -r.value; break;
    case Op::Add:
    case Op::Sub: {
      Evaluated a = eval(n.args[0]);
      Evaluated b = eval(n.args[1]);
      r.value = n.op == Op::Add ? a.value + b.value : a.value - b.value;
      r.error_scale = a.error_scale + b.error_scale + std::abs(a.value) + std::abs(b.value);
      break;
    }
    case Op::Mul: {
      Evaluated a = eval(n.args[0]);
      Evaluated b = eval(n.args[1]);
      r.value = a.value * b.value;
      r.error_scale = a.error_scale * std::abs(b.value) + b.error_scale * std::abs(a.value) + std::abs(r.value);
      break;
    }
    case Op::Div: {
      Evaluated a = eval(n.args[0]);
      Evaluated b = eval(n.args[1]);
      if (b.value == 0.0) return fail(DomainError::Kind::DivisionByZero);
      r.value = a.value / b.value;
      r.error_scale = (a.error_scale + std::abs(r.value) * b.error_scale) / std::abs(b.value) + std::abs(r.value);
      break;
    }
    case Op::Pow: {
      Evaluated a = eval(n.args[0]);
      if (a.value == 0.0 && n.exponent < 0) return fail(DomainError::Kind::DivisionByZero);
      r.value = std::pow(a.value, n.exponent);
      r.error_scale = std::abs(n.exponent) * a.error_scale * std::pow(std::abs(a.value), n.exponent - 1) +
                      std::abs(r.value);
      break;
    }
    default: {
      Evaluated u = eval(n.args[0]);
      double x = u.value;
      double slope = 0;
      switch (n.op) {
        case Op::Sin: r.value = std::sin(x); slope = std::abs(std::cos(x)); break;
        case Op::Cos: r.value = std::cos(x); slope = std::abs(std::sin(x)); break;
        case Op::Tan: r.value = std::tan(x); slope = 1 + r.value * r.value; break;
        case Op::Atan: r.value = std::atan(x); slope = 1 / (1 + x * x); break;
        case Op::Sqrt:
          if (x < 0) return fail(DomainError::Kind::NegativeSqrt);
          r.value = std::sqrt(x);
          if (x > 0) slope = 0.5 / r.value;
          break;
        case Op::Exp: r.value = std::exp(x); slope = r.value; break;
        case Op::Ln:
          if (x <= 0) return fail(DomainError::Kind::NonPositiveLog);
          r.value = std::log(x);
          slope = 1 / x;
          break;
        default: throw std::logic_error("evaluate: unknown op");
      }
      r.error_scale = slope * u.error_scale + std::abs(r.value);
      if (n.op == Op::Sqrt && x == 0.0) r.error_scale = std::sqrt(u.error_scale / kEps);
      break;
    }
  }
  if (!std::isfinite(r.value)) return fail(DomainError::Kind::NonFinite);
  if (!std::isfinite(r.error_scale)) r.error_scale = std::numeric_limits<double>::max();
  memo_->roots.push_back(e);
  memo_->values.emplace(e.get(), r);
  return r;
}

double evaluate(const Expr& e, std::span<const double> point) { return Evaluator(point)(e); }

double evaluate(const Expr& e, const VarSpace& space, std::span<const double> point) {
  if (point.size() != space.size()) {
    throw DimensionError("evaluate: point has " + std::to_string(point.size()) +
                         " coordinates but the space has " + std::to_string(space.size()));
  }
  return evaluate(e, point);
}

}  // namespace uiobs
