#pragma once

#include <memory>
#include <string>

#include "masharp/geometry.hpp"

namespace masharp {

/// Closed-form scalar function of the coordinates x1..x3.
///
/// Grammar: real literals, x1 x2 x3, binary + - * /, unary -, parentheses,
/// exp(.), sin(.), cos(.), log(.), pow(a, b). Evaluation is plain 64-bit
/// floating point. Copies share the immutable parse tree.
class Expression {
 public:
  struct Node;

  /// Parses `text`; throws ExpressionError with the offending position.
  static Expression parse(const std::string& text);
  static Expression constant(double value);

  double operator()(const Point& x) const;
  const std::string& text() const { return text_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace masharp
