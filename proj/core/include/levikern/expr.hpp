#pragma once

#include <memory>
#include <string>

#include "levikern/common.hpp"

namespace levikern {

// Arithmetic expressions over the variables x1, x2, z1, z2 (x and z alias
// the first components). Grammar: + - * / ^ with parentheses, unary minus,
// functions sin cos tan tanh exp log sqrt abs sign min max pow, constants
// pi and e. Enough for reproducible kernel configs; no user code runs.
class Expression {
 public:
  static Expression parse(const std::string& text);

  double eval(const Point& x, const Point& z) const;
  double eval_x(const Point& x) const { return eval(x, {0.0, 0.0}); }

  const std::string& text() const { return text_; }

  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;
  Expression(const Expression&);
  Expression& operator=(const Expression&);
  ~Expression();

  struct Node;

 private:
  Expression();
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace levikern
