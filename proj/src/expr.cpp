/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "misobo/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <utility>
#include <vector>

namespace misobo {

struct Expression::Node {
  enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };
  Kind kind;
  double value = 0.0;  // Constant
  int index = 0;       // Variable
  std::shared_ptr<const Node> lhs, rhs;

  double eval(const Eigen::VectorXd& x) const {
    switch (kind) {
      case Kind::Constant: return value;
      case Kind::Variable: return x[index];
      case Kind::Add: return lhs->eval(x) + rhs->eval(x);
      case Kind::Sub: return lhs->eval(x) - rhs->eval(x);
      case Kind::Mul: return lhs->eval(x) * rhs->eval(x);
      case Kind::Div: return lhs->eval(x) / rhs->eval(x);
      case Kind::Pow: return std::pow(lhs->eval(x), rhs->eval(x));
      case Kind::Neg: return -lhs->eval(x);
      case Kind::Sin: return std::sin(lhs->eval(x));
      case Kind::Cos: return std::cos(lhs->eval(x));
      case Kind::Exp: return std::exp(lhs->eval(x));
    }
    return 0.0;  // unreachable
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  Parser(const std::string& text, int dim) : text_(text), dim_(dim) {}

  NodePtr run() {
    NodePtr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression error at position " + std::to_string(pos_) + ": " + what +
                      " in '" + text_ + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
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

  NodePtr parse_sum() {
    NodePtr e = parse_term();
    while (true) {
      if (consume('+')) {
        e = make(Kind::Add, e, parse_term());
      } else if (consume('-')) {
        e = make(Kind::Sub, e, parse_term());
      } else {
        return e;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_factor();
    while (true) {
      if (consume('*')) {
        e = make(Kind::Mul, e, parse_factor());
      } else if (consume('/')) {
        e = make(Kind::Div, e, parse_factor());
      } else {
        return e;
      }
    }
  }

  NodePtr parse_factor() {
    // unary minus binds looser than '^', so -x_0^2 reads -(x_0^2)
    if (consume('-')) return make(Kind::Neg, parse_factor());
    NodePtr base = parse_primary();
    if (consume('^')) {
      return make(Kind::Pow, base, parse_factor());  // right associative
    }
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected a value");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_sum();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr parse_number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::Constant;
    n->value = v;
    return n;
  }

  NodePtr parse_name() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name = text_.substr(start, pos_ - start);
    if (name.rfind("x_", 0) == 0) {
      const std::string digits = name.substr(2);
      if (digits.empty()) fail("variable needs an index, e.g. x_0");
      for (char d : digits) {
        if (!std::isdigit(static_cast<unsigned char>(d))) fail("malformed variable '" + name + "'");
      }
      const int idx = std::atoi(digits.c_str());
      if (idx < 0 || idx >= dim_) fail("variable index out of range for dimension " + std::to_string(dim_));
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Variable;
      n->index = idx;
      return n;
    }
    Kind kind;
    if (name == "sin") kind = Kind::Sin;
    else if (name == "cos") kind = Kind::Cos;
    else if (name == "exp") kind = Kind::Exp;
    else fail("unknown function or name '" + name + "'");
    if (!consume('(')) fail("expected '(' after " + name);
    NodePtr arg = parse_sum();
    if (!consume(')')) fail("expected ')'");
    return make(kind, arg);
  }

  const std::string& text_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root, std::string text, int dim)
    : root_(std::move(root)), text_(std::move(text)), dim_(dim) {}

Expression Expression::parse(const std::string& text, int dim) {
  if (dim < 1) throw InvalidInput("Expression: dimension must be positive");
  Parser parser(text, dim);
  return Expression(parser.run(), text, dim);
}

double Expression::operator()(const Eigen::VectorXd& x) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw InvalidInput("Expression: design dimension mismatch");
  }
  return root_->eval(x);
}

}  // namespace misobo
