#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace metricbundle {

// Real-valued time profile f(t) used to weight Hamiltonian and observable
// terms.
//
// Grammar (lowest to highest precedence):
//
//   expr    := term   (('+' | '-') term)*        left associative
//   term    := unary  (('*' | '/') unary)*       left associative
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?              right associative
//   primary := number | 't' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | tanh
//
// So `-2^2` is -4 and `2^3^2` is 2^9 = 512. Exponents must not depend on t
// and must evaluate to an integer.
class ProfileExpr {
 public:
  enum class Kind { Number, Time, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Tanh };

  struct Node {
    Kind kind;
    double value = 0.0;  // Number only
    std::shared_ptr<const Node> lhs;  // operand of unary nodes and calls
    std::shared_ptr<const Node> rhs;
    std::size_t offset = 0;  // byte offset into the source text
  };
  using NodePtr = std::shared_ptr<const Node>;

  // Constant 0.
  ProfileExpr();

  // Throws ExprError (Syntax, UnknownFunction, UnknownVariable).
  static ProfileExpr parse(std::string_view text);
  static ProfileExpr constant(double value);

  // Throws ExprError(Eval) on division by zero, a non-integer exponent, or
  // a non-finite result.
  double eval(double t) const;

  // d/dt, built symbolically with light constant folding.
  ProfileExpr derivative() const;

  bool depends_on_time() const;

  // Fully parenthesised rendering; parse(print()) reproduces the AST.
  std::string print() const;

  // Text this expression was parsed from (print() for synthesised ones).
  const std::string& source() const noexcept { return source_; }

  const Node& root() const noexcept { return *root_; }

  // Structural equality; offsets are ignored.
  friend bool operator==(const ProfileExpr& a, const ProfileExpr& b);

 private:
  ProfileExpr(NodePtr root, std::string source);

  NodePtr root_;
  std::string source_;
};

ProfileExpr parse_profile(std::string_view text);
double eval_profile(const ProfileExpr& expr, double t);

}  // namespace metricbundle
