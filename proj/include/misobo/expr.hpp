/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#ifndef MISOBO_EXPR_HPP_
#define MISOBO_EXPR_HPP_

#include <Eigen/Dense>

#include <memory>
#include <string>

#include "misobo/common.hpp"

namespace misobo {

/// Compiled closed-form expression over design variables x_0 .. x_{d-1}.
/// Grammar: +, -, *, /, ^ (right associative), sin, cos, exp, parentheses,
/// decimal literals, unary minus.
class Expression {
 public:
  /// Parses `text`; `dim` bounds the variable indices. Throws ConfigError
  /// with the offending position on malformed input.
  static Expression parse(const std::string& text, int dim);

  double operator()(const Eigen::VectorXd& x) const;
  const std::string& text() const { return text_; }

  struct Node;  // implementation detail, public for the parser

 private:
  Expression(std::shared_ptr<const Node> root, std::string text, int dim);

  std::shared_ptr<const Node> root_;
  std::string text_;
  int dim_ = 0;
};

}  // namespace misobo

#endif  // MISOBO_EXPR_HPP_
