#pragma once

#include <memory>
#include <string>
#include <vector>

#include "common.hpp"

namespace yamabe {

/// Arithmetic expression over the coordinates of a point in R^n.
/// Grammar: + - * /, unary minus, parentheses, numeric literals,
/// exp/sin/cos, the constant pi, and coordinates x, y, z (axes 0..2)
/// or x1..x8. Expressions are immutable and safe to evaluate
/// concurrently.
class Expression {
  public:
    /// Parses `text`; throws InvalidInput with a column-annotated message.
    static Expression parse(const std::string& text);

    double eval(const Vec& p) const;

    const std::string& text() const { return text_; }

    /// Largest coordinate index referenced, or -1 for constant expressions.
    int max_axis() const { return max_axis_; }

    struct Node;

  private:
    std::shared_ptr<const Node> root_;
    std::string text_;
    int max_axis_ = -1;
};

}  // namespace yamabe
