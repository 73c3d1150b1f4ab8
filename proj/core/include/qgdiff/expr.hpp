#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace qgdiff::expr {

enum class Op {
  Number,
  VarX,
  VarT,
  ConstPi,
  ConstE,
  Neg,
  Pos,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Call,
};

enum class Func { Sin, Cos, Tan, Tanh, Exp, Log, Sqrt, Abs, Sign, Min, Max, Pow };

struct Node {
  Op op = Op::Number;
  double value = 0.0;  // Number
  Func func = Func::Sin;  // Call
  std::vector<std::shared_ptr<const Node>> args;
  std::size_t begin = 0;  // byte span in the source text
  std::size_t end = 0;
};

struct EvalScope {
  double x = 0.0;
  double t = 0.0;
};

/// Immutable parsed expression over the variables x and t.
class Expression {
 public:
  Expression() = default;

  const Node& root() const { return *root_; }
  const std::string& source() const { return source_; }
  bool empty() const { return root_ == nullptr; }

  double evaluate(const EvalScope& scope) const;
  double operator()(double x, double t = 0.0) const { return evaluate({x, t}); }

  /// Height of the syntax tree, leaves have depth 0.
  std::size_t depth() const;
  bool uses_x() const;
  bool uses_t() const;

  /// Fully parenthesised rendering that reparses to a structurally equal tree.
  std::string to_string() const;

  static Expression constant(double value);

 private:
  friend Expression parse(std::string_view src);
  std::shared_ptr<const Node> root_;
  std::string source_;
};

Expression parse(std::string_view src);
double evaluate(const Expression& e, const EvalScope& scope);

/// Structural equality; spans are ignored.
bool structurally_equal(const Node& a, const Node& b);

}  // namespace qgdiff::expr
