#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "expr/intern.hpp"
#include "expr/rebuild.hpp"
#include "uiobs/expr.hpp"

namespace uiobs {
namespace {

int op_rank(Op op) {
  switch (op) {
    case Op::Const: return 0;
    case Op::Var: return 1;
    case Op::Sum: return 3;
    case Op::Product: return 4;
    default: return is_function(op) ? 2 : 5;
  }
}

Expr make_const(Number value) {
  Node n;
  n.op = Op::Const;
  n.value = value;
  n.canonical = true;
  return intern(std::move(n));
}

Expr make_product_node(Number coeff, std::vector<std::pair<Expr, int>> factors) {
  std::sort(factors.begin(), factors.end(),
            [](const auto& a, const auto& b) { return canonical_less(a.first, b.first); });
  Node n;
  n.op = Op::Product;
  n.value = coeff;
  n.canonical = true;
  n.args.reserve(factors.size());
  n.exponents.reserve(factors.size());
  for (auto& [base, e] : factors) {
    n.args.push_back(base);
    n.exponents.push_back(e);
  }
  return intern(std::move(n));
}

// Splits a canonical term into (coefficient, coefficient-free term).
std::pair<Number, Expr> split_coefficient(const Expr& t) {
  if (t.op() != Op::Product || t.node().value.is_one()) return {Number(1), t};
  const Node& n = t.node();
  if (n.args.size() == 1 && n.exponents[0] == 1) return {n.value, n.args[0]};
  std::vector<std::pair<Expr, int>> factors;
  for (std::size_t i = 0; i < n.args.size(); ++i) factors.emplace_back(n.args[i], n.exponents[i]);
  return {n.value, make_product_node(Number(1), std::move(factors))};
}

// Folds f(c) for a constant argument when the result is finite and in-domain.
std::optional<Number> fold_function(Op op, const Number& c) {
  if (c.is_zero()) {
    switch (op) {
      case Op::Sin:
      case Op::Tan:
      case Op::Atan:
      case Op::Sqrt: return Number(0);
      case Op::Cos:
      case Op::Exp: return Number(1);
      default: return std::nullopt;
    }
  }
  if (op == Op::Ln && c.is_one()) return Number(0);
  double x = c.value();
  if (op == Op::Sqrt) {
    if (x < 0) return std::nullopt;
    if (c.exact() && c.num() >= 0) {
      auto isqrt = [](std::int64_t v) -> std::optional<std::int64_t> {
        auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
        for (std::int64_t k = std::max<std::int64_t>(0, r - 1); k <= r + 1; ++k) {
          if (k * k == v) return k;
        }
        return std::nullopt;
      };
      auto n = isqrt(c.num());
      auto d = isqrt(c.den());
      if (n && d) return Number::rational(*n, *d);
    }
  }
  if (op == Op::Ln && x <= 0) return std::nullopt;
  double y = 0;
  switch (op) {
    case Op::Sin: y = std::sin(x); break;
    case Op::Cos: y = std::cos(x); break;
    case Op::Tan: y = std::tan(x); break;
    case Op::Atan: y = std::atan(x); break;
    case Op::Sqrt: y = std::sqrt(x); break;
    case Op::Exp: y = std::exp(x); break;
    case Op::Ln: y = std::log(x); break;
    default: return std::nullopt;
  }
  if (!std::isfinite(y)) return std::nullopt;
  return Number::real(y);
}

int compare_numbers(const Number& a, const Number& b) {
  double x = a.value();
  double y = b.value();
  if (x < y) return -1;
  if (x > y) return 1;
  if (a.hash() != b.hash()) return a.hash() < b.hash() ? -1 : 1;
  return 0;
}

int compare(const Expr& a, const Expr& b);

int compare_args(const Node& x, const Node& y) {
  if (x.args.size() != y.args.size()) return x.args.size() < y.args.size() ? -1 : 1;
  for (std::size_t i = 0; i < x.args.size(); ++i) {
    if (int c = compare(x.args[i], y.args[i])) return c;
  }
  return 0;
}

int compare(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return 0;
  const Node& x = a.node();
  const Node& y = b.node();
  int rx = op_rank(x.op);
  int ry = op_rank(y.op);
  if (rx != ry) return rx < ry ? -1 : 1;
  if (x.op != y.op) return x.op < y.op ? -1 : 1;
  switch (x.op) {
    case Op::Const: return compare_numbers(x.value, y.value);
    case Op::Var: return x.var < y.var ? -1 : (x.var > y.var ? 1 : 0);
    default: break;
  }
  if (is_function(x.op)) return compare(x.args[0], y.args[0]);
  if (x.hash != y.hash) return x.hash < y.hash ? -1 : 1;
  // Hash collision between distinct nodes: fall back to structure.
  if (int c = compare_numbers(x.value, y.value)) return c;
  if (x.exponent != y.exponent) return x.exponent < y.exponent ? -1 : 1;
  if (x.exponents != y.exponents) return x.exponents < y.exponents ? -1 : 1;
  for (std::size_t i = 0; i < std::min(x.coeffs.size(), y.coeffs.size()); ++i) {
    if (int c = compare_numbers(x.coeffs[i], y.coeffs[i])) return c;
  }
  return compare_args(x, y);
}

}  // namespace

bool canonical_less(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

Expr constant(Number value) { return make_const(value); }

Expr variable(std::size_t index) {
  Node n;
  n.op = Op::Var;
  n.var = static_cast<std::uint32_t>(index);
  n.canonical = true;
  return intern(std::move(n));
}

Expr sum(const std::vector<std::pair<Number, Expr>>& terms, Number constant_term) {
  std::vector<std::pair<Expr, Number>> acc;
  std::unordered_map<const Node*, std::size_t> where;
  Number k = constant_term;

  std::function<void(const Number&, const Expr&)> add_term = [&](const Number& c, const Expr& t) {
    if (c.is_zero()) return;
    switch (t.op()) {
      case Op::Const: k = k + c * t.constant(); return;
      case Op::Sum: {
        const Node& n = t.node();
        k = k + c * n.value;
        for (std::size_t i = 0; i < n.args.size(); ++i) add_term(c * n.coeffs[i], n.args[i]);
        return;
      }
      case Op::Product: {
        auto [ct, bare] = split_coefficient(t);
        if (!ct.is_one()) {
          add_term(c * ct, bare);
          return;
        }
        break;
      }
      default: break;
    }
    auto [it, inserted] = where.try_emplace(t.get(), acc.size());
    if (inserted) {
      acc.emplace_back(t, c);
    } else {
      acc[it->second].second = acc[it->second].second + c;
    }
  };
  for (const auto& [c, t] : terms) add_term(c, t);

  std::erase_if(acc, [](const auto& p) { return p.second.is_zero(); });
  if (acc.empty()) return make_const(k);
  if (k.is_zero() && acc.size() == 1) {
    if (acc[0].second.is_one()) return acc[0].first;
    return product(acc[0].second, {{acc[0].first, 1}});
  }
  std::sort(acc.begin(), acc.end(),
            [](const auto& a, const auto& b) { return canonical_less(a.first, b.first); });
  Node n;
  n.op = Op::Sum;
  n.value = k;
  n.canonical = true;
  n.args.reserve(acc.size());
  n.coeffs.reserve(acc.size());
  for (auto& [t, c] : acc) {
    n.args.push_back(t);
    n.coeffs.push_back(c);
  }
  return intern(std::move(n));
}

Expr product(Number coeff, const std::vector<std::pair<Expr, int>>& factors) {
  std::vector<std::pair<Expr, int>> acc;
  std::unordered_map<const Node*, std::size_t> where;

  std::function<void(const Expr&, int)> add_factor = [&](const Expr& b, int e) {
    if (e == 0) return;
    switch (b.op()) {
      case Op::Const:
        if (!b.constant().is_zero()) {
          coeff = coeff * b.constant().pow(e);
          return;
        }
        if (e > 0) {
          coeff = Number(0);
          return;
        }
        break;  // keep 0^-e so evaluation reports the division by zero
      case Op::Product: {
        const Node& n = b.node();
        coeff = coeff * n.value.pow(e);
        for (std::size_t i = 0; i < n.args.size(); ++i) add_factor(n.args[i], n.exponents[i] * e);
        return;
      }
      default: break;
    }
    auto [it, inserted] = where.try_emplace(b.get(), acc.size());
    if (inserted) {
      acc.emplace_back(b, e);
    } else {
      acc[it->second].second += e;
    }
  };
  for (const auto& [b, e] : factors) add_factor(b, e);

  std::erase_if(acc, [](const auto& p) { return p.second == 0; });
  if (coeff.is_zero()) return make_const(Number(0));
  if (acc.empty()) return make_const(coeff);
  if (acc.size() == 1 && acc[0].second == 1) {
    if (coeff.is_one()) return acc[0].first;
    if (acc[0].first.op() == Op::Sum) return sum({{coeff, acc[0].first}});
  }
  return make_product_node(coeff, std::move(acc));
}

Expr add(const Expr& a, const Expr& b) { return sum({{Number(1), a}, {Number(1), b}}); }
Expr sub(const Expr& a, const Expr& b) { return sum({{Number(1), a}, {Number(-1), b}}); }
Expr mul(const Expr& a, const Expr& b) { return product(Number(1), {{a, 1}, {b, 1}}); }
Expr div(const Expr& a, const Expr& b) { return product(Number(1), {{a, 1}, {b, -1}}); }
Expr neg(const Expr& a) { return product(Number(-1), {{a, 1}}); }
Expr pow(const Expr& base, int exponent) { return product(Number(1), {{base, exponent}}); }

Expr apply(Op function, const Expr& arg) {
  if (!is_function(function)) throw std::invalid_argument("apply: not a function op");
  if (arg.is_constant()) {
    if (auto folded = fold_function(function, arg.constant())) return make_const(*folded);
  }
  Node n;
  n.op = function;
  n.canonical = arg.node().canonical;
  n.args = {arg};
  return intern(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return add(a, b); }
Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
Expr operator*(const Expr& a, const Expr& b) { return mul(a, b); }
Expr operator/(const Expr& a, const Expr& b) { return div(a, b); }
Expr operator-(const Expr& a) { return neg(a); }

namespace raw {

Expr binary(Op op, const Expr& lhs, const Expr& rhs) {
  if (op != Op::Add && op != Op::Sub && op != Op::Mul && op != Op::Div) {
    throw std::invalid_argument("raw::binary: not a binary op");
  }
  Node n;
  n.op = op;
  n.args = {lhs, rhs};
  return intern(std::move(n));
}

Expr negate(const Expr& arg) {
  Node n;
  n.op = Op::Neg;
  n.args = {arg};
  return intern(std::move(n));
}

Expr power(const Expr& base, int exponent) {
  Node n;
  n.op = Op::Pow;
  n.exponent = exponent;
  n.args = {base};
  return intern(std::move(n));
}

Expr function(Op function, const Expr& arg) {
  if (!is_function(function)) throw std::invalid_argument("raw::function: not a function op");
  Node n;
  n.op = function;
  n.args = {arg};
  return intern(std::move(n));
}

}  // namespace raw

// --- structural rebuilds ----------------------------------------------------

Expr detail::rebuild(const Expr& e, const std::function<Expr(std::uint32_t)>& leaf,
                     bool canonicalize, std::unordered_map<const Node*, Expr>& memo) {
  if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
  const Node& n = e.node();
  auto sub = [&](std::size_t i) { return rebuild(n.args[i], leaf, canonicalize, memo); };
  Expr out;
  switch (n.op) {
    case Op::Const: out = e; break;
    case Op::Var: out = leaf(n.var); break;
    case Op::Sum: {
      std::vector<std::pair<Number, Expr>> terms;
      terms.reserve(n.args.size());
      for (std::size_t i = 0; i < n.args.size(); ++i) terms.emplace_back(n.coeffs[i], sub(i));
      out = sum(terms, n.value);
      break;
    }
    case Op::Product: {
      std::vector<std::pair<Expr, int>> factors;
      factors.reserve(n.args.size());
      for (std::size_t i = 0; i < n.args.size(); ++i) factors.emplace_back(sub(i), n.exponents[i]);
      out = product(n.value, factors);
      break;
    }
    case Op::Neg: out = canonicalize ? neg(sub(0)) : raw::negate(sub(0)); break;
    case Op::Pow: out = canonicalize ? pow(sub(0), n.exponent) : raw::power(sub(0), n.exponent); break;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      Expr a = sub(0);
      Expr b = sub(1);
      if (!canonicalize) {
        out = raw::binary(n.op, a, b);
      } else if (n.op == Op::Add) {
        out = add(a, b);
      } else if (n.op == Op::Sub) {
        out = uiobs::sub(a, b);
      } else if (n.op == Op::Mul) {
        out = mul(a, b);
      } else {
        out = div(a, b);
      }
      break;
    }
    default: {
      Expr a = sub(0);
      out = (canonicalize || n.canonical) ? apply(n.op, a) : raw::function(n.op, a);
      break;
    }
  }
  memo.emplace(e.get(), out);
  return out;
}

Expr simplify(const Expr& e) {
  if (e.node().canonical) return e;
  std::unordered_map<const Node*, Expr> memo;
  return detail::rebuild(
      e, [](std::uint32_t v) { return variable(v); }, true, memo);
}

Expr remap(const Expr& e, const VarSpace& from, const VarSpace& to) {
  if (e.arity() > from.size()) {
    throw DimensionError("remap: expression references variable index " +
                         std::to_string(e.arity() - 1) + " outside the source space");
  }
  std::vector<std::uint32_t> index(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    auto j = to.index_of(from.name(i));
    if (!j) throw DimensionError("remap: variable \"" + from.name(i) + "\" missing from target space");
    index[i] = static_cast<std::uint32_t>(*j);
  }
  std::unordered_map<const Node*, Expr> memo;
  return detail::rebuild(
      e, [&](std::uint32_t v) { return variable(index[v]); }, false, memo);
}

Expr substitute(const Expr& e, const std::vector<Expr>& replacements) {
  if (e.arity() > replacements.size()) {
    throw DimensionError("substitute: expression references variable index " +
                         std::to_string(e.arity() - 1) + " but only " +
                         std::to_string(replacements.size()) + " replacements given");
  }
  std::vector<Expr> canonical;
  canonical.reserve(replacements.size());
  for (const auto& r : replacements) canonical.push_back(simplify(r));
  std::unordered_map<const Node*, Expr> memo;
  return detail::rebuild(
      e, [&](std::uint32_t v) { return canonical[v]; }, true, memo);
}

}  // namespace uiobs
