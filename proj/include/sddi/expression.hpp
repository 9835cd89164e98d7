#pragma once
// Tiny arithmetic expressions in the variables x and y, used for custom level
// sets.  Grammar (usual precedence, '^' binds tightest and associates right):
//
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'x' | 'y' | name '(' expr ')' | '(' expr ')'
//   name    := 'sin' | 'cos' | 'tanh' | 'exp'
//
// Expressions are differentiable symbolically.  For '^' either the exponent
// must be variable-free (power rule) or the base must be a positive constant
// (exponential rule); a^b with both sides variable is rejected.

#include <cctype>
#include <cmath>
#include <memory>
#include <string>

#include "sddi/common.hpp"

namespace sddi {

class Expr {
 public:
  using Ptr = std::shared_ptr<const Expr>;
  enum class Op { Const, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Tanh, Exp };

  Op op = Op::Const;
  double value = 0.0;
  Ptr a, b;

  static Ptr make(Op op, Ptr a = nullptr, Ptr b = nullptr) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
  }
  static Ptr constant(double v) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Const;
    e->value = v;
    return e;
  }

  double eval(double x, double y) const {
    switch (op) {
      case Op::Const: return value;
      case Op::VarX: return x;
      case Op::VarY: return y;
      case Op::Add: return a->eval(x, y) + b->eval(x, y);
      case Op::Sub: return a->eval(x, y) - b->eval(x, y);
      case Op::Mul: return a->eval(x, y) * b->eval(x, y);
      case Op::Div: return a->eval(x, y) / b->eval(x, y);
      case Op::Pow: return std::pow(a->eval(x, y), b->eval(x, y));
      case Op::Neg: return -a->eval(x, y);
      case Op::Sin: return std::sin(a->eval(x, y));
      case Op::Cos: return std::cos(a->eval(x, y));
      case Op::Tanh: return std::tanh(a->eval(x, y));
      case Op::Exp: return std::exp(a->eval(x, y));
    }
    return 0.0;
  }

  bool depends_on_vars() const {
    switch (op) {
      case Op::Const: return false;
      case Op::VarX:
      case Op::VarY: return true;
      default:
        return (a && a->depends_on_vars()) || (b && b->depends_on_vars());
    }
  }

  // Derivative w.r.t. x (var = 0) or y (var = 1).
  Ptr diff(int var) const {
    const auto zero = constant(0.0);
    const auto one = constant(1.0);
    switch (op) {
      case Op::Const: return zero;
      case Op::VarX: return var == 0 ? one : zero;
      case Op::VarY: return var == 1 ? one : zero;
      case Op::Add: return make(Op::Add, a->diff(var), b->diff(var));
      case Op::Sub: return make(Op::Sub, a->diff(var), b->diff(var));
      case Op::Mul:
        return make(Op::Add, make(Op::Mul, a->diff(var), b), make(Op::Mul, a, b->diff(var)));
      case Op::Div:
        return make(Op::Div,
                    make(Op::Sub, make(Op::Mul, a->diff(var), b), make(Op::Mul, a, b->diff(var))),
                    make(Op::Mul, b, b));
      case Op::Pow: {
        if (!b->depends_on_vars()) {
          // c * a^(c-1) * a'
          auto cm1 = make(Op::Sub, b, one);
          return make(Op::Mul, make(Op::Mul, b, make(Op::Pow, a, cm1)), a->diff(var));
        }
        if (!a->depends_on_vars()) {
          // c^u * ln(c) * u'
          const double base = a->eval(0.0, 0.0);
          require(base > 0.0, "expression: variable exponent needs a positive constant base");
          return make(Op::Mul, make(Op::Mul, make(Op::Pow, a, b), constant(std::log(base))),
                      b->diff(var));
        }
        require(false, "expression: cannot differentiate a^b with both sides variable");
        return zero;
      }
      case Op::Neg: return make(Op::Neg, a->diff(var));
      case Op::Sin: return make(Op::Mul, make(Op::Cos, a), a->diff(var));
      case Op::Cos: return make(Op::Neg, make(Op::Mul, make(Op::Sin, a), a->diff(var)));
      case Op::Tanh: {
        auto t = make(Op::Tanh, a);
        auto sech2 = make(Op::Sub, one, make(Op::Mul, t, t));
        return make(Op::Mul, sech2, a->diff(var));
      }
      case Op::Exp: return make(Op::Mul, make(Op::Exp, a), a->diff(var));
    }
    return zero;
  }
};

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(const std::string& text) : text_(text) {}

  Expr::Ptr parse() {
    Expr::Ptr e = parse_expr();
    skip_ws();
    require(pos_ == text_.size(), err("unexpected trailing input"));
    return e;
  }

 private:
  const std::string& text_;
  size_t pos_ = 0;

  std::string err(const std::string& what) const {
    return "expression parse error at position " + std::to_string(pos_) + ": " + what;
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr::Ptr parse_expr() {
    Expr::Ptr e = parse_term();
    while (true) {
      if (eat('+')) e = Expr::make(Expr::Op::Add, e, parse_term());
      else if (eat('-')) e = Expr::make(Expr::Op::Sub, e, parse_term());
      else return e;
    }
  }
  Expr::Ptr parse_term() {
    Expr::Ptr e = parse_unary();
    while (true) {
      if (eat('*')) e = Expr::make(Expr::Op::Mul, e, parse_unary());
      else if (eat('/')) e = Expr::make(Expr::Op::Div, e, parse_unary());
      else return e;
    }
  }
  Expr::Ptr parse_unary() {
    if (eat('-')) return Expr::make(Expr::Op::Neg, parse_unary());
    return parse_power();
  }
  Expr::Ptr parse_power() {
    Expr::Ptr base = parse_primary();
    if (eat('^')) return Expr::make(Expr::Op::Pow, base, parse_unary());
    return base;
  }
  Expr::Ptr parse_primary() {
    skip_ws();
    require(pos_ < text_.size(), err("unexpected end of input"));
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(text_.substr(pos_), &used);
      } catch (const std::exception&) {
        require(false, err("bad number"));
      }
      pos_ += used;
      return Expr::constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string name = text_.substr(start, pos_ - start);
      if (name == "x") return Expr::make(Expr::Op::VarX);
      if (name == "y") return Expr::make(Expr::Op::VarY);
      Expr::Op op;
      if (name == "sin") op = Expr::Op::Sin;
      else if (name == "cos") op = Expr::Op::Cos;
      else if (name == "tanh") op = Expr::Op::Tanh;
      else if (name == "exp") op = Expr::Op::Exp;
      else {
        require(false, err("unknown name '" + name + "'"));
        return nullptr;
      }
      require(eat('('), err("expected '(' after '" + name + "'"));
      Expr::Ptr arg = parse_expr();
      require(eat(')'), err("expected ')'"));
      return Expr::make(op, arg);
    }
    if (eat('(')) {
      Expr::Ptr e = parse_expr();
      require(eat(')'), err("expected ')'"));
      return e;
    }
    require(false, err(std::string("unexpected character '") + c + "'"));
    return nullptr;
  }
};

}  // namespace detail

inline Expr::Ptr parse_expression(const std::string& text) {
  return detail::ExprParser(text).parse();
}

}  // namespace sddi
