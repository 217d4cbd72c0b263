#pragma once

#include "carnot/group.hpp"
#include "carnot/hcalc.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace carnot::expr {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int col);
  int line() const { return line_; }
  int col() const { return col_; }
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  int line_;
  int col_;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Op { number, first, second, s, rho, neg, add, sub, mul, div, pow, call };

struct Node {
  Op op = Op::number;
  double value = 0.0;  ///< number
  int index = 0;       ///< 0-based coordinate index within its layer for first/second
  std::string fn;      ///< call
  std::vector<std::shared_ptr<const Node>> args;
};
using NodePtr = std::shared_ptr<const Node>;

/// Immutable expression over x1..xm, y1..yn, s = |x|, rho = (s^4 + |y|^2)^{1/4}.
class Expression {
 public:
  Expression() = default;
  explicit Expression(NodePtr root) : root_(std::move(root)) {}

  const NodePtr& root() const { return root_; }

  /// Largest x / y index used (1-based; 0 when absent).
  int max_first() const;
  int max_second() const;

  double eval(const Point& p) const;
  /// d/d coordinate k (0-based over x1..xm, y1..yn).
  Expression derivative(int k, int m) const;
  std::vector<Expression> gradient(int m, int n) const;

  /// Places where the derivative formulas do not hold, e.g. "kink at s=0".
  std::vector<std::string> kinks() const;

  std::string to_string() const;
  bool operator==(const Expression& other) const;

 private:
  NodePtr root_;
};

/// Parses `text`; identifiers are x<k>, y<k>, s, rho, pi and the functions
/// sqrt, abs, exp, log, sign (one argument) and min, max (two).
Expression parse(std::string_view text);
/// As parse, and rejects x<k> with k > m or y<k> with k > n.
Expression parse(std::string_view text, int m, int n);

bool same_tree(const NodePtr& a, const NodePtr& b);

/// Field with evaluation and the symbolic Euclidean gradient.
ScalarField to_field(const Expression& e, const GroupSpec& spec);

}  // namespace carnot::expr
