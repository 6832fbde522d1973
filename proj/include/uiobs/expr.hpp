#pragma once

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uiobs/errors.hpp"

namespace uiobs {

/// Scalar constant: an exact 64-bit rational, or a double once exactness is lost
/// (overflow, transcendental folding, or a literal that has no short rational form).
class Number {
 public:
  Number() = default;
  Number(std::int64_t value) : num_(value) {}  // NOLINT(google-explicit-constructor)
  static Number rational(std::int64_t num, std::int64_t den);
  static Number real(double value);

  bool exact() const noexcept { return exact_; }
  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double value() const noexcept;

  bool is_zero() const noexcept;
  bool is_one() const noexcept;
  bool is_negative() const noexcept;
  bool is_integer() const noexcept { return exact_ && den_ == 1; }

  Number operator-() const;
  Number abs() const;
  Number inverse() const;
  Number pow(int exponent) const;

  friend Number operator+(const Number& a, const Number& b);
  friend Number operator-(const Number& a, const Number& b) { return a + (-b); }
  friend Number operator*(const Number& a, const Number& b);
  friend Number operator/(const Number& a, const Number& b) { return a * b.inverse(); }

  /// Structural equality: exact and inexact numbers never compare equal.
  friend bool operator==(const Number& a, const Number& b) noexcept;

  std::uint64_t hash() const noexcept;
  std::string to_string() const;

 private:
  bool exact_ = true;
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  double real_ = 0.0;
};

/// Ordered, uniquely named coordinates. Index order is the coordinate order of
/// every gradient, vector field, and sample point over this space.
class VarSpace {
 public:
  VarSpace();
  explicit VarSpace(std::vector<std::string> names);
  VarSpace(std::initializer_list<std::string> names)
      : VarSpace(std::vector<std::string>(names)) {}

  std::size_t size() const noexcept { return names_->size(); }
  const std::string& name(std::size_t index) const { return names_->at(index); }
  const std::vector<std::string>& names() const noexcept { return *names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// New space with `extra` appended after the existing names.
  VarSpace appended(const std::vector<std::string>& extra) const;

  friend bool operator==(const VarSpace& a, const VarSpace& b) noexcept;

 private:
  std::shared_ptr<const std::vector<std::string>> names_;
};

enum class Op : std::uint8_t {
  Const,
  Var,
  // Raw binary/unary nodes as written in source text.
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  // Canonical n-ary forms produced by simplification.
  Sum,      // constant + sum(coeff_i * term_i)
  Product,  // coeff * prod(base_i ^ exponent_i), integer exponents
  // Elementary functions.
  Sin,
  Cos,
  Tan,
  Atan,
  Sqrt,
  Exp,
  Ln,
};

bool is_function(Op op) noexcept;
std::string_view function_name(Op op);

struct Node;

/// Immutable scalar expression DAG. Nodes are hash-consed, so two expressions
/// are structurally identical exactly when they share the same node.
class Expr {
 public:
  Expr();  // the exact constant 0

  const Node& node() const noexcept { return *node_; }
  const Node* get() const noexcept { return node_.get(); }
  Op op() const noexcept;

  bool is_constant() const noexcept { return op() == Op::Const; }
  /// Constant value; only meaningful when is_constant().
  const Number& constant() const;
  bool is_zero() const noexcept;
  bool is_one() const noexcept;

  /// One past the largest variable index referenced, 0 for closed expressions.
  std::uint32_t arity() const noexcept;
  /// Over-approximate test for a variable occurrence.
  bool may_depend_on(std::size_t var) const noexcept;
  /// Number of distinct nodes in the DAG.
  std::size_t dag_size() const;

  friend bool operator==(const Expr& a, const Expr& b) noexcept { return a.node_ == b.node_; }

 private:
  friend Expr intern(Node&& node);
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Node {
  Op op = Op::Const;
  Number value;                 // Const value, Sum constant, Product coefficient
  std::uint32_t var = 0;        // Var index
  int exponent = 0;             // raw Pow exponent
  std::vector<Expr> args;       // children (Sum terms, Product bases, operands)
  std::vector<Number> coeffs;   // Sum: coefficient of args[i]
  std::vector<int> exponents;   // Product: exponent of args[i]
  bool canonical = false;
  std::uint32_t arity = 0;
  std::uint64_t var_mask = 0;
  std::uint64_t hash = 0;
};

// --- construction -----------------------------------------------------------
// The canonicalizing constructors apply constant folding, identity/annihilator
// rules, like-term and like-factor collection, and power flattening. They never
// apply trigonometric or other algebraic identities.

Expr constant(Number value);
Expr variable(std::size_t index);
Expr sum(const std::vector<std::pair<Number, Expr>>& terms, Number constant_term = 0);
Expr product(Number coeff, const std::vector<std::pair<Expr, int>>& factors);
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr div(const Expr& a, const Expr& b);
Expr neg(const Expr& a);
Expr pow(const Expr& base, int exponent);
Expr apply(Op function, const Expr& arg);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

/// Non-simplifying constructors; the parser builds these.
namespace raw {
Expr binary(Op op, const Expr& lhs, const Expr& rhs);
Expr negate(const Expr& arg);
Expr power(const Expr& base, int exponent);
Expr function(Op function, const Expr& arg);
}  // namespace raw

// --- operations -------------------------------------------------------------

/// Parses the expression grammar; identifiers resolve against `space`.
Expr parse_expr(std::string_view text, const VarSpace& space);

/// Infix text that parse_expr reads back to an expression of equal value.
std::string to_string(const Expr& e, const VarSpace& space);
/// Like to_string, but variables print as x0, x1, ...
std::string to_string(const Expr& e);

/// Exact partial derivative with respect to variable `var`, canonicalized.
Expr differentiate(const Expr& e, std::size_t var);
/// Checked form: `var` and `e` must both live in `space`.
Expr differentiate(const Expr& e, std::size_t var, const VarSpace& space);

double evaluate(const Expr& e, std::span<const double> point);
/// Checked form: `point` must have the arity of `space`.
double evaluate(const Expr& e, const VarSpace& space, std::span<const double> point);

Expr simplify(const Expr& e);

/// Re-resolves variable names of `from` in `to`.
Expr remap(const Expr& e, const VarSpace& from, const VarSpace& to);
/// Replaces variable i by replacements[i]; result canonicalized.
Expr substitute(const Expr& e, const std::vector<Expr>& replacements);

/// Value together with a first-order rounding-error scale: the floating-point
/// error of `value` is bounded (to first order) by eps * error_scale.
struct Evaluated {
  double value = 0.0;
  double error_scale = 0.0;

  /// True when `value` cannot be distinguished from rounding noise.
  bool negligible() const noexcept;
};

/// Evaluates many expressions at one point, sharing work across common
/// subexpressions. Throws DomainError on division by zero, sqrt/ln outside
/// their domains, or non-finite results.
class Evaluator {
 public:
  explicit Evaluator(std::span<const double> point);
  ~Evaluator();
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  double operator()(const Expr& e) { return eval(e).value; }
  Evaluated eval(const Expr& e);

 private:
  struct Memo;
  std::span<const double> point_;
  std::unique_ptr<Memo> memo_;
};

/// Total order used for canonical operand ordering. Deterministic across runs.
bool canonical_less(const Expr& a, const Expr& b);

}  // namespace uiobs
