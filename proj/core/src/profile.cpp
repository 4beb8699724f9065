#include "metricbundle/profile.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

#include "metricbundle/error.hpp"

namespace metricbundle {

namespace {

using Kind = ProfileExpr::Kind;
using Node = ProfileExpr::Node;
using NodePtr = ProfileExpr::NodePtr;

NodePtr make(Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr,
             std::size_t offset = 0) {
  return std::make_shared<const Node>(Node{kind, 0.0, std::move(lhs),
                                           std::move(rhs), offset});
}

// Literals in the tree are always nonnegative; the sign lives in a Neg node
// so that printing and reparsing are structurally stable.
NodePtr number(double v, std::size_t offset = 0) {
  if (v < 0.0 || (v == 0.0 && std::signbit(v))) {
    return make(Kind::Neg, number(-v, offset), nullptr, offset);
  }
  return std::make_shared<const Node>(Node{Kind::Number, v, nullptr, nullptr, offset});
}

bool is_unary(Kind k) {
  return k == Kind::Neg || k == Kind::Sin || k == Kind::Cos ||
         k == Kind::Exp || k == Kind::Tanh;
}

bool depends_on_time(const Node& n) {
  if (n.kind == Kind::Time) return true;
  if (n.lhs && depends_on_time(*n.lhs)) return true;
  if (n.rhs && depends_on_time(*n.rhs)) return true;
  return false;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_space();
    if (pos_ != text_.size()) {
      throw ExprError(ErrorCode::Syntax, pos_,
                      "unexpected '" + std::string(1, text_[pos_]) + "'");
    }
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
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
    if (!accept(c)) {
      throw ExprError(ErrorCode::Syntax, pos_,
                      std::string("expected '") + c + "'");
    }
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = make(Kind::Add, lhs, term(), at);
      } else if (accept('-')) {
        lhs = make(Kind::Sub, lhs, term(), at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = make(Kind::Mul, lhs, unary(), at);
      } else if (accept('/')) {
        lhs = make(Kind::Div, lhs, unary(), at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    skip_space();
    const std::size_t at = pos_;
    if (accept('-')) return make(Kind::Neg, unary(), nullptr, at);
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    skip_space();
    const std::size_t at = pos_;
    if (!accept('^')) return base;
    NodePtr exponent = unary();
    if (depends_on_time(*exponent)) {
      throw ExprError(ErrorCode::Syntax, exponent->offset,
                      "exponent must not depend on t");
    }
    return make(Kind::Pow, base, exponent, at);
  }

  NodePtr primary() {
    skip_space();
    const std::size_t at = pos_;
    if (pos_ >= text_.size()) {
      throw ExprError(ErrorCode::Syntax, pos_, "unexpected end of input");
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return literal();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) ||
              text_[end] == '_')) {
        ++end;
      }
      const std::string_view name = text_.substr(pos_, end - pos_);
      pos_ = end;
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        Kind kind;
        if (name == "sin") kind = Kind::Sin;
        else if (name == "cos") kind = Kind::Cos;
        else if (name == "exp") kind = Kind::Exp;
        else if (name == "tanh") kind = Kind::Tanh;
        else {
          throw ExprError(ErrorCode::UnknownFunction, at,
                          "unknown function '" + std::string(name) + "'");
        }
        expect('(');
        NodePtr arg = expr();
        expect(')');
        return make(kind, arg, nullptr, at);
      }
      if (name == "t") return make(Kind::Time, nullptr, nullptr, at);
      throw ExprError(ErrorCode::UnknownVariable, at,
                      "unknown variable '" + std::string(name) + "'");
    }
    if (accept('(')) {
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    throw ExprError(ErrorCode::Syntax, pos_,
                    "unexpected '" + std::string(1, c) + "'");
  }

  NodePtr literal() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[end]))) {
        ++end;
      }
    };
    digits();
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      digits();
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t exp_end = end + 1;
      if (exp_end < text_.size() &&
          (text_[exp_end] == '+' || text_[exp_end] == '-')) {
        ++exp_end;
      }
      if (exp_end < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[exp_end]))) {
        end = exp_end;
        digits();
      }
    }
    double value = 0.0;
    const auto res = std::from_chars(text_.data() + at, text_.data() + end, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + end ||
        !std::isfinite(value)) {
      throw ExprError(ErrorCode::Syntax, at,
                      "malformed number '" +
                          std::string(text_.substr(at, end - at)) + "'");
    }
    pos_ = end;
    return number(value, at);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double eval_node(const Node& n, double t) {
  switch (n.kind) {
    case Kind::Number: return n.value;
    case Kind::Time: return t;
    case Kind::Neg: return -eval_node(*n.lhs, t);
    case Kind::Add: return eval_node(*n.lhs, t) + eval_node(*n.rhs, t);
    case Kind::Sub: return eval_node(*n.lhs, t) - eval_node(*n.rhs, t);
    case Kind::Mul: return eval_node(*n.lhs, t) * eval_node(*n.rhs, t);
    case Kind::Div: {
      const double den = eval_node(*n.rhs, t);
      if (den == 0.0) throw ExprError(ErrorCode::Eval, n.offset, "division by zero");
      return eval_node(*n.lhs, t) / den;
    }
    case Kind::Pow: {
      const double base = eval_node(*n.lhs, t);
      const double e = eval_node(*n.rhs, t);
      if (e != std::round(e)) {
        throw ExprError(ErrorCode::Eval, n.offset, "non-integer exponent");
      }
      if (base == 0.0 && e < 0.0) {
        throw ExprError(ErrorCode::Eval, n.offset, "division by zero");
      }
      return std::pow(base, e);
    }
    case Kind::Sin: return std::sin(eval_node(*n.lhs, t));
    case Kind::Cos: return std::cos(eval_node(*n.lhs, t));
    case Kind::Exp: return std::exp(eval_node(*n.lhs, t));
    case Kind::Tanh: return std::tanh(eval_node(*n.lhs, t));
  }
  return 0.0;
}

bool is_number(const NodePtr& n, double v) {
  return n->kind == Kind::Number && n->value == v;
}

bool is_zero(const NodePtr& n) { return is_number(n, 0.0); }
bool is_one(const NodePtr& n) { return is_number(n, 1.0); }

NodePtr add(NodePtr a, NodePtr b) {
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  return make(Kind::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_zero(b)) return a;
  if (is_zero(a)) return make(Kind::Neg, std::move(b));
  return make(Kind::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_zero(a) || is_zero(b)) return number(0.0);
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  return make(Kind::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
  if (is_zero(a)) return number(0.0);
  if (is_one(b)) return a;
  return make(Kind::Div, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
  if (is_zero(a)) return a;
  return make(Kind::Neg, std::move(a));
}

NodePtr differentiate(const NodePtr& n) {
  switch (n->kind) {
    case Kind::Number: return number(0.0);
    case Kind::Time: return number(1.0);
    case Kind::Neg: return neg(differentiate(n->lhs));
    case Kind::Add: return add(differentiate(n->lhs), differentiate(n->rhs));
    case Kind::Sub: return sub(differentiate(n->lhs), differentiate(n->rhs));
    case Kind::Mul:
      return add(mul(differentiate(n->lhs), n->rhs),
                 mul(n->lhs, differentiate(n->rhs)));
    case Kind::Div: {
      // (f'g - fg') / g^2
      NodePtr num = sub(mul(differentiate(n->lhs), n->rhs),
                        mul(n->lhs, differentiate(n->rhs)));
      return div(num, make(Kind::Pow, n->rhs, number(2.0)));
    }
    case Kind::Pow: {
      // Exponent is t-independent by construction: n f^(n-1) f'.
      NodePtr df = differentiate(n->lhs);
      if (is_zero(df)) return number(0.0);
      NodePtr lowered = is_number(n->rhs, 1.0)
                            ? number(1.0)
                            : make(Kind::Pow, n->lhs, sub(n->rhs, number(1.0)));
      return mul(mul(n->rhs, lowered), df);
    }
    case Kind::Sin:
      return mul(make(Kind::Cos, n->lhs), differentiate(n->lhs));
    case Kind::Cos:
      return neg(mul(make(Kind::Sin, n->lhs), differentiate(n->lhs)));
    case Kind::Exp:
      return mul(n, differentiate(n->lhs));
    case Kind::Tanh: {
      NodePtr sech2 = sub(number(1.0), make(Kind::Pow, n, number(2.0)));
      return mul(sech2, differentiate(n->lhs));
    }
  }
  return number(0.0);
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Number: {
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof(buf), n.value);
      out.append(buf, res.ptr);
      return;
    }
    case Kind::Time: out += 't'; return;
    case Kind::Neg:
      out += "(-";
      print_node(*n.lhs, out);
      out += ')';
      return;
    case Kind::Sin: case Kind::Cos: case Kind::Exp: case Kind::Tanh: {
      static constexpr const char* names[] = {"sin", "cos", "exp", "tanh"};
      out += names[static_cast<int>(n.kind) - static_cast<int>(Kind::Sin)];
      out += '(';
      print_node(*n.lhs, out);
      out += ')';
      return;
    }
    default: break;
  }
  char op = '+';
  switch (n.kind) {
    case Kind::Sub: op = '-'; break;
    case Kind::Mul: op = '*'; break;
    case Kind::Div: op = '/'; break;
    case Kind::Pow: op = '^'; break;
    default: break;
  }
  out += '(';
  print_node(*n.lhs, out);
  out += ' ';
  out += op;
  out += ' ';
  print_node(*n.rhs, out);
  out += ')';
}

bool equal_nodes(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Kind::Number) return a.value == b.value;
  if (a.kind == Kind::Time) return true;
  if (!equal_nodes(*a.lhs, *b.lhs)) return false;
  if (is_unary(a.kind)) return true;
  return equal_nodes(*a.rhs, *b.rhs);
}

}  // namespace

ProfileExpr::ProfileExpr() : ProfileExpr(number(0.0), "0") {}

ProfileExpr::ProfileExpr(NodePtr root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

ProfileExpr ProfileExpr::parse(std::string_view text) {
  return ProfileExpr(Parser(text).parse(), std::string(text));
}

ProfileExpr ProfileExpr::constant(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::Eval, "profile constant must be finite");
  }
  NodePtr n = number(value);
  std::string text;
  print_node(*n, text);
  return ProfileExpr(std::move(n), std::move(text));
}

double ProfileExpr::eval(double t) const {
  if (!std::isfinite(t)) {
    throw ExprError(ErrorCode::Eval, 0, "evaluation time is not finite");
  }
  const double v = eval_node(*root_, t);
  if (!std::isfinite(v)) {
    throw ExprError(ErrorCode::Eval, root_->offset, "non-finite result");
  }
  return v;
}

ProfileExpr ProfileExpr::derivative() const {
  NodePtr d = differentiate(root_);
  std::string text;
  print_node(*d, text);
  return ProfileExpr(std::move(d), std::move(text));
}

bool ProfileExpr::depends_on_time() const {
  return metricbundle::depends_on_time(*root_);
}

std::string ProfileExpr::print() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

bool operator==(const ProfileExpr& a, const ProfileExpr& b) {
  return equal_nodes(*a.root_, *b.root_);
}

ProfileExpr parse_profile(std::string_view text) {
  return ProfileExpr::parse(text);
}

double eval_profile(const ProfileExpr& expr, double t) {
  return expr.eval(t);
}

}  // namespace metricbundle
