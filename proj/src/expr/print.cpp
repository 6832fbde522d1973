// Infix printing. Every fragment carries the loosest grammar level it can be
// read back at, and callers parenthesize fragments that bind too loosely:
//
//   1 sum      a + b
//   2 product  a*b, a/b, p/q
//   3 signed   -a
//   4 power    a^n
//   5 atom     x, 2, f(a), (a)

#include <functional>
#include <unordered_map>

#include "uiobs/expr.hpp"

namespace uiobs {
namespace {

struct Fragment {
  std::string text;
  int level;
};

std::string at_least(const Fragment& f, int level) {
  return f.level >= level ? f.text : "(" + f.text + ")";
}

Fragment number_fragment(const Number& n) {
  std::string s = n.to_string();
  if (n.exact() && n.den() != 1) return {s, 2};
  if (n.is_negative()) return {s, 3};
  return {s, 5};
}

class Printer {
 public:
  explicit Printer(std::function<std::string(std::uint32_t)> name) : name_(std::move(name)) {}

  Fragment print(const Expr& e) {
    if (auto it = memo_.find(e.get()); it != memo_.end()) return it->second;
    Fragment f = build(e);
    memo_.emplace(e.get(), f);
    return f;
  }

 private:
  Fragment build(const Expr& e) {
    const Node& n = e.node();
    switch (n.op) {
      case Op::Const: return number_fragment(n.value);
      case Op::Var: return {name_(n.var), 5};
      case Op::Sum: return print_sum(n);
      case Op::Product: {
        Fragment body = scaled(n.value.abs(), e);
        if (!n.value.is_negative()) return body;
        return {"-" + body.text, body.level == 2 ? 2 : 3};
      }
      case Op::Neg: return {"-" + at_least(print(n.args[0]), 4), 3};
      case Op::Add:
      case Op::Sub: {
        std::string op = n.op == Op::Add ? " + " : " - ";
        return {at_least(print(n.args[0]), 1) + op + at_least(print(n.args[1]), 2), 1};
      }
      case Op::Mul:
      case Op::Div: {
        std::string op = n.op == Op::Mul ? "*" : "/";
        return {at_least(print(n.args[0]), 2) + op + at_least(print(n.args[1]), 3), 2};
      }
      case Op::Pow: {
        std::string base = at_least(print(n.args[0]), 5);
        if (n.exponent >= 0) return {base + "^" + std::to_string(n.exponent), 4};
        return {"1/" + base + "^" + std::to_string(-n.exponent), 2};
      }
      default:
        return {std::string(function_name(n.op)) + "(" + print(n.args[0]).text + ")", 5};
    }
  }

  Fragment print_sum(const Node& n) {
    std::string out;
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      const Number& c = n.coeffs[i];
      std::string body = scaled(c.abs(), n.args[i]).text;
      if (i == 0) {
        out = c.is_negative() ? "-" + body : body;
      } else {
        out += (c.is_negative() ? " - " : " + ") + body;
      }
    }
    if (!n.value.is_zero()) {
      out += (n.value.is_negative() ? " - " : " + ") + at_least(number_fragment(n.value.abs()), 2);
    }
    return {out, 1};
  }

  // c * t with c > 0, printed as one product-level fragment.
  Fragment scaled(const Number& c, const Expr& t) {
    std::vector<std::pair<Expr, int>> factors;
    if (t.op() == Op::Product) {
      const Node& n = t.node();
      for (std::size_t i = 0; i < n.args.size(); ++i) factors.emplace_back(n.args[i], n.exponents[i]);
    } else {
      if (c.is_one()) return print(t);
      factors.emplace_back(t, 1);
    }

    std::vector<std::string> num;
    std::vector<std::string> den;
    if (c.exact()) {
      if (c.num() != 1) num.push_back(std::to_string(c.num()));
      if (c.den() != 1) den.push_back(std::to_string(c.den()));
    } else if (!c.is_one()) {
      num.push_back(at_least(number_fragment(c), 3));
    }
    for (const auto& [base, e] : factors) {
      int k = e > 0 ? e : -e;
      std::string s = k == 1 ? at_least(print(base), 3)
                             : at_least(print(base), 5) + "^" + std::to_string(k);
      (e > 0 ? num : den).push_back(std::move(s));
    }

    auto join = [](const std::vector<std::string>& parts) {
      std::string s;
      for (const auto& p : parts) s += (s.empty() ? "" : "*") + p;
      return s;
    };
    std::string text = num.empty() ? "1" : join(num);
    int level = num.size() == 1 && den.empty() ? 4 : 2;
    if (num.size() == 1 && den.empty() && factors.size() == 1 && factors[0].second == 1) {
      level = print(factors[0].first).level;
      if (!c.is_one()) level = 2;
    }
    if (!den.empty()) {
      text += "/" + (den.size() == 1 ? den[0] : "(" + join(den) + ")");
    }
    return {text, level};
  }

  std::function<std::string(std::uint32_t)> name_;
  std::unordered_map<const Node*, Fragment> memo_;
};

}  // namespace

std::string to_string(const Expr& e, const VarSpace& space) {
  if (e.arity() > space.size()) {
    throw DimensionError("to_string: expression references variable index " +
                         std::to_string(e.arity() - 1) + " outside a space of size " +
                         std::to_string(space.size()));
  }
  return Printer([&](std::uint32_t v) { return space.name(v); }).print(e).text;
}

std::string to_string(const Expr& e) {
  return Printer([](std::uint32_t v) { return "x" + std::to_string(v); }).print(e).text;
}

}  // namespace uiobs
