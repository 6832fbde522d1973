#include <unordered_map>

#include "uiobs/expr.hpp"

namespace uiobs {
namespace {

class Differentiator {
 public:
  explicit Differentiator(std::size_t var) : var_(var) {}

  // `e` must be canonical.
  Expr d(const Expr& e) {
    if (!e.may_depend_on(var_)) return constant(0);
    if (auto it = memo_.find(e.get()); it != memo_.end()) return it->second;
    Expr out = build(e);
    memo_.emplace(e.get(), out);
    return out;
  }

 private:
  Expr build(const Expr& e) {
    const Node& n = e.node();
    switch (n.op) {
      case Op::Var: return constant(n.var == var_ ? 1 : 0);
      case Op::Sum: {
        std::vector<std::pair<Number, Expr>> terms;
        for (std::size_t i = 0; i < n.args.size(); ++i) terms.emplace_back(n.coeffs[i], d(n.args[i]));
        return sum(terms);
      }
      case Op::Product: {
        std::vector<std::pair<Number, Expr>> terms;
        for (std::size_t i = 0; i < n.args.size(); ++i) {
          Expr di = d(n.args[i]);
          if (di.is_zero()) continue;
          std::vector<std::pair<Expr, int>> factors;
          factors.reserve(n.args.size() + 1);
          for (std::size_t j = 0; j < n.args.size(); ++j) {
            factors.emplace_back(n.args[j], j == i ? n.exponents[j] - 1 : n.exponents[j]);
          }
          factors.emplace_back(di, 1);
          terms.emplace_back(n.value * Number(n.exponents[i]), product(Number(1), factors));
        }
        return sum(terms);
      }
      default: break;
    }
    const Expr& u = n.args.at(0);
    Expr du = d(u);
    Expr outer;
    switch (n.op) {
      case Op::Sin: outer = apply(Op::Cos, u); break;
      case Op::Cos: outer = neg(apply(Op::Sin, u)); break;
      case Op::Tan: outer = add(constant(1), pow(e, 2)); break;
      case Op::Atan: outer = pow(add(constant(1), pow(u, 2)), -1); break;
      case Op::Sqrt: outer = product(Number::rational(1, 2), {{e, -1}}); break;
      case Op::Exp: outer = e; break;
      case Op::Ln: outer = pow(u, -1); break;
      default: throw std::logic_error("differentiate: non-canonical node");
    }
    return mul(outer, du);
  }

  std::size_t var_;
  std::unordered_map<const Node*, Expr> memo_;
};

}  // namespace

Expr differentiate(const Expr& e, std::size_t var) { return Differentiator(var).d(simplify(e)); }

Expr differentiate(const Expr& e, std::size_t var, const VarSpace& space) {
  if (var >= space.size()) {
    throw DimensionError("differentiate: variable index " + std::to_string(var) +
                         " outside a space of size " + std::to_string(space.size()));
  }
  if (e.arity() > space.size()) {
    throw DimensionError("differentiate: expression references variable index " +
                         std::to_string(e.arity() - 1) + " outside the space");
  }
  return differentiate(e, var);
}

}  // namespace uiobs
