#include "qgdiff/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>

#include "qgdiff/error.hpp"

namespace qgdiff::expr {
namespace {

struct FuncInfo {
  const char* name;
  Func func;
  std::size_t arity;
};

constexpr FuncInfo kFuncs[] = {
    {"sin", Func::Sin, 1},   {"cos", Func::Cos, 1},   {"tan", Func::Tan, 1},
    {"tanh", Func::Tanh, 1}, {"exp", Func::Exp, 1},   {"log", Func::Log, 1},
    {"sqrt", Func::Sqrt, 1}, {"abs", Func::Abs, 1},   {"sign", Func::Sign, 1},
    {"min", Func::Min, 2},   {"max", Func::Max, 2},   {"pow", Func::Pow, 2},
};

const FuncInfo* find_func(std::string_view name) {
  for (const auto& f : kFuncs) {
    if (name == f.name) return &f;
  }
  return nullptr;
}

const FuncInfo& func_info(Func func) {
  for (const auto& f : kFuncs) {
    if (f.func == func) return f;
  }
  return kFuncs[0];
}

using NodePtr = std::shared_ptr<const Node>;

// Grammar (whitespace ignored):
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := ('-'|'+') unary | power
//   power   := primary ('^' unary)?
//   primary := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
// Unary minus binds looser than '^', so -x^2 = -(x^2) and 2^-1 is accepted.
class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse_all() {
    skip_ws();
    if (pos_ >= src_.size()) fail_expected(pos_, {"expression"});
    auto node = parse_expr();
    skip_ws();
    if (pos_ < src_.size()) fail_expected(pos_, {"operator", "end of input"});
    return node;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  [[noreturn]] void fail_expected(std::size_t at, std::vector<std::string> expected) {
    std::string msg = "syntax error at offset " + std::to_string(at) + ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += (i + 1 == expected.size()) ? " or " : ", ";
      msg += expected[i];
    }
    throw ExprError(Errc::SyntaxError, msg, at, at, std::move(expected));
  }

  static NodePtr make(Op op, std::size_t b, std::size_t e, std::vector<NodePtr> args = {}) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->begin = b;
    n->end = e;
    n->args = std::move(args);
    return n;
  }

  NodePtr parse_expr() {
    auto lhs = parse_term();
    while (true) {
      skip_ws();
      if (pos_ >= src_.size()) break;
      char c = src_[pos_];
      if (c != '+' && c != '-') break;
      ++pos_;
      auto rhs = parse_term();
      lhs = make(c == '+' ? Op::Add : Op::Sub, lhs->begin, rhs->end, {lhs, rhs});
    }
    return lhs;
  }

  NodePtr parse_term() {
    auto lhs = parse_unary();
    while (true) {
      skip_ws();
      if (pos_ >= src_.size()) break;
      char c = src_[pos_];
      if (c != '*' && c != '/') break;
      ++pos_;
      auto rhs = parse_unary();
      lhs = make(c == '*' ? Op::Mul : Op::Div, lhs->begin, rhs->end, {lhs, rhs});
    }
    return lhs;
  }

  // A failure anywhere inside an operand is reported at the offset where the
  // operand started, e.g. "2*+" fails at offset 2.
  NodePtr parse_unary() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) {
      const char c = src_[pos_++];
      skip_ws();
      if (pos_ >= src_.size()) fail_expected(start, {"operand"});
      NodePtr operand;
      try {
        operand = parse_unary();
      } catch (const ExprError& err) {
        if (err.code() != Errc::SyntaxError || err.offset() != pos_) throw;
        fail_expected(start, err.expected());
      }
      return make(c == '-' ? Op::Neg : Op::Pos, start, operand->end, {operand});
    }
    return parse_power();
  }

  NodePtr parse_power() {
    auto base = parse_primary();
    if (peek('^')) {
      ++pos_;
      auto exponent = parse_unary();
      return make(Op::Pow, base->begin, exponent->end, {base, exponent});
    }
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) fail_expected(start, {"number", "identifier", "'('"});
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    if (c == '(') {
      ++pos_;
      auto inner = parse_expr();
      skip_ws();
      if (pos_ >= src_.size() || src_[pos_] != ')') fail_expected(pos_, {"')'"});
      ++pos_;
      // parentheses are not kept in the tree, but the span covers them
      auto n = std::make_shared<Node>(*inner);
      n->begin = start;
      n->end = pos_;
      return n;
    }
    fail_expected(start, {"number", "identifier", "'('"});
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    std::size_t p = pos_;
    bool digits = false;
    while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p, digits = true;
    if (p < src_.size() && src_[p] == '.') {
      ++p;
      while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p, digits = true;
    }
    if (!digits) fail_expected(start, {"number"});
    if (p < src_.size() && (src_[p] == 'e' || src_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
      if (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) {
        while (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) ++q;
        p = q;
      }
    }
    const std::string text(src_.substr(start, p - start));
    pos_ = p;
    auto n = make(Op::Number, start, p);
    const_cast<Node&>(*n).value = std::strtod(text.c_str(), nullptr);
    return n;
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    const std::size_t name_end = pos_;

    if (peek('(')) {
      const FuncInfo* info = find_func(name);
      if (!info) {
        throw ExprError(Errc::UnknownIdentifier, "unknown function '" + std::string(name) + "'",
                        start, name_end);
      }
      ++pos_;
      std::vector<NodePtr> args;
      args.push_back(parse_expr());
      while (peek(',')) {
        ++pos_;
        args.push_back(parse_expr());
      }
      skip_ws();
      if (pos_ >= src_.size() || src_[pos_] != ')') fail_expected(pos_, {"','", "')'"});
      ++pos_;
      if (args.size() != info->arity) {
        throw ExprError(Errc::ArityMismatch,
                        std::string(info->name) + " expects " + std::to_string(info->arity) +
                            " argument(s), got " + std::to_string(args.size()),
                        start, pos_);
      }
      auto n = make(Op::Call, start, pos_, std::move(args));
      const_cast<Node&>(*n).func = info->func;
      return n;
    }

    if (name == "x") return make(Op::VarX, start, name_end);
    if (name == "t") return make(Op::VarT, start, name_end);
    if (name == "pi") return make(Op::ConstPi, start, name_end);
    if (name == "e") return make(Op::ConstE, start, name_end);
    if (find_func(name)) {
      throw ExprError(Errc::ArityMismatch, "function '" + std::string(name) + "' used without arguments",
                      start, name_end);
    }
    throw ExprError(Errc::UnknownIdentifier, "unknown identifier '" + std::string(name) + "'", start,
                    name_end);
  }
};

[[noreturn]] void domain_error(const Node& n, const std::string& what) {
  throw ExprError(Errc::DomainError, what + " at [" + std::to_string(n.begin) + ", " +
                                         std::to_string(n.end) + ")",
                  n.begin, n.end);
}

double checked(const Node& n, double value) {
  if (!std::isfinite(value)) domain_error(n, "non-finite result");
  return value;
}

double eval_node(const Node& n, const EvalScope& s) {
  switch (n.op) {
    case Op::Number: return n.value;
    case Op::VarX: return s.x;
    case Op::VarT: return s.t;
    case Op::ConstPi: return std::numbers::pi;
    case Op::ConstE: return std::numbers::e;
    case Op::Neg: return -eval_node(*n.args[0], s);
    case Op::Pos: return eval_node(*n.args[0], s);
    case Op::Add: return checked(n, eval_node(*n.args[0], s) + eval_node(*n.args[1], s));
    case Op::Sub: return checked(n, eval_node(*n.args[0], s) - eval_node(*n.args[1], s));
    case Op::Mul: return checked(n, eval_node(*n.args[0], s) * eval_node(*n.args[1], s));
    case Op::Div: {
      const double num = eval_node(*n.args[0], s);
      const double den = eval_node(*n.args[1], s);
      if (den == 0.0) domain_error(n, "division by zero");
      return checked(n, num / den);
    }
    case Op::Pow:
      return checked(n, std::pow(eval_node(*n.args[0], s), eval_node(*n.args[1], s)));
    case Op::Call: {
      const double a = eval_node(*n.args[0], s);
      switch (n.func) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Tan: return checked(n, std::tan(a));
        case Func::Tanh: return std::tanh(a);
        case Func::Exp: return checked(n, std::exp(a));
        case Func::Log:
          if (!(a > 0.0)) domain_error(n, "log of non-positive value");
          return std::log(a);
        case Func::Sqrt:
          if (a < 0.0) domain_error(n, "sqrt of negative value");
          return std::sqrt(a);
        case Func::Abs: return std::abs(a);
        case Func::Sign: return (a > 0.0) - (a < 0.0);
        case Func::Min: return std::min(a, eval_node(*n.args[1], s));
        case Func::Max: return std::max(a, eval_node(*n.args[1], s));
        case Func::Pow: return checked(n, std::pow(a, eval_node(*n.args[1], s)));
      }
    }
  }
  return 0.0;
}

std::size_t node_depth(const Node& n) {
  std::size_t d = 0;
  for (const auto& a : n.args) d = std::max(d, 1 + node_depth(*a));
  return d;
}

bool node_uses(const Node& n, Op var) {
  if (n.op == var) return true;
  for (const auto& a : n.args) {
    if (node_uses(*a, var)) return true;
  }
  return false;
}

void render(const Node& n, std::string& out) {
  auto binary = [&](const char* op) {
    out += '(';
    render(*n.args[0], out);
    out += op;
    render(*n.args[1], out);
    out += ')';
  };
  switch (n.op) {
    case Op::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      break;
    }
    case Op::VarX: out += 'x'; break;
    case Op::VarT: out += 't'; break;
    case Op::ConstPi: out += "pi"; break;
    case Op::ConstE: out += 'e'; break;
    case Op::Neg:
    case Op::Pos:
      out += n.op == Op::Neg ? "(-" : "(+";
      render(*n.args[0], out);
      out += ')';
      break;
    case Op::Add: binary(" + "); break;
    case Op::Sub: binary(" - "); break;
    case Op::Mul: binary(" * "); break;
    case Op::Div: binary(" / "); break;
    case Op::Pow: binary(" ^ "); break;
    case Op::Call:
      out += func_info(n.func).name;
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        render(*n.args[i], out);
      }
      out += ')';
      break;
  }
}

}  // namespace

Expression parse(std::string_view src) {
  Parser parser(src);
  Expression e;
  e.root_ = parser.parse_all();
  e.source_ = std::string(src);
  return e;
}

double Expression::evaluate(const EvalScope& scope) const { return eval_node(*root_, scope); }

double evaluate(const Expression& e, const EvalScope& scope) { return e.evaluate(scope); }

std::size_t Expression::depth() const { return node_depth(*root_); }
bool Expression::uses_x() const { return node_uses(*root_, Op::VarX); }
bool Expression::uses_t() const { return node_uses(*root_, Op::VarT); }

std::string Expression::to_string() const {
  std::string out;
  render(*root_, out);
  return out;
}

Expression Expression::constant(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  std::string text = buf;
  if (value < 0) text = "(" + text + ")";
  return parse(text);
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.op != b.op) return false;
  if (a.op == Op::Number && a.value != b.value) return false;
  if (a.op == Op::Call && a.func != b.func) return false;
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!structurally_equal(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

}  // namespace qgdiff::expr
