// Recursive-descent parser for the expression grammar:
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := ('-')? atom ('^' integer)?
//   atom   := number | identifier | func '(' expr ')' | '(' expr ')'
//   func   := sin | cos | tan | atan | sqrt | exp | ln
//
// A leading minus binds looser than '^':  -x^2 == -(x^2).

#include <cctype>
#include <cstdlib>
#include <limits>

#include "uiobs/expr.hpp"

namespace uiobs {
namespace {

class Parser {
 public:
  Parser(std::string_view text, const VarSpace& space) : text_(text), space_(space) {}

  Expr parse() {
    Expr e = expr();
    skip_space();
    if (pos_ < text_.size()) fail(std::string("unexpected character '") + text_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", text_.size());
    throw ParseError(message, pos_);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = raw::binary(Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = raw::binary(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = raw::binary(Op::Mul, lhs, factor());
      } else if (accept('/')) {
        lhs = raw::binary(Op::Div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  Expr factor() {
    bool negated = accept('-');
    Expr base = atom();
    if (accept('^')) base = raw::power(base, integer());
    return negated ? raw::negate(base) : base;
  }

  int integer() {
    skip_space();
    std::size_t start = pos_;
    long long value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      if (value > std::numeric_limits<int>::max()) {
        pos_ = start;
        fail("exponent too large");
      }
      ++pos_;
    }
    if (pos_ == start) fail("expected integer exponent");
    return static_cast<int>(value);
  }

  Expr atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("expected operand");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    std::string digits;
    int scale = 0;  // value = digits * 10^scale
    bool any = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      digits += text_[pos_++];
      any = true;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits += text_[pos_++];
        --scale;
        any = true;
      }
    }
    if (!any) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      int sign = 1;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        sign = text_[pos_] == '-' ? -1 : 1;
        ++pos_;
      }
      int exp10 = 0;
      bool exp_digits = false;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        exp10 = std::min(exp10 * 10 + (text_[pos_++] - '0'), 100000);
        exp_digits = true;
      }
      if (!exp_digits) {
        pos_ = save;
        fail("malformed exponent");
      }
      scale += sign * exp10;
    }
    std::string_view literal = text_.substr(start, pos_ - start);

    // Exact rational when the literal fits comfortably in 64 bits.
    std::size_t first = digits.find_first_not_of('0');
    std::string significant = first == std::string::npos ? "0" : digits.substr(first);
    if (significant.size() <= 18 && scale >= -18 && scale <= 18 &&
        significant.size() + static_cast<std::size_t>(std::max(scale, 0)) <= 18) {
      std::int64_t mantissa = std::stoll(significant);
      std::int64_t p10 = 1;
      for (int i = 0; i < std::abs(scale); ++i) p10 *= 10;
      Number n = scale >= 0 ? Number(mantissa * p10) : Number::rational(mantissa, p10);
      return constant(n);
    }
    return constant(Number::real(std::strtod(std::string(literal).c_str(), nullptr)));
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'') {
        ++pos_;
      } else {
        break;
      }
    }
    std::string_view name = text_.substr(start, pos_ - start);
    std::size_t after_name = pos_;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      for (Op f : {Op::Sin, Op::Cos, Op::Tan, Op::Atan, Op::Sqrt, Op::Exp, Op::Ln}) {
        if (function_name(f) == name) {
          ++pos_;
          Expr arg = expr();
          expect(')');
          return raw::function(f, arg);
        }
      }
      throw ParseError("unknown function \"" + std::string(name) + "\"", start);
    }
    pos_ = after_name;
    auto index = space_.index_of(name);
    if (!index) throw UnknownIdentifier(std::string(name), start);
    return variable(*index);
  }

  std::string_view text_;
  const VarSpace& space_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, const VarSpace& space) { return Parser(text, space).parse(); }

}  // namespace uiobs
