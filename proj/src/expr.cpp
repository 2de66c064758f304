#include "conjtamer/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

namespace conjtamer {

struct Expression::Node {
  enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Log, Sqrt, Mobius };
  Kind kind;
  double number = 0.0;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind k, std::vector<NodePtr> args = {}, double number = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->args = std::move(args);
  n->number = number;
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, int line) : text_(text), line_(line) {}

  NodePtr parse() {
    skip();
    if (pos_ >= text_.size()) fail("empty expression");
    NodePtr root = expr();
    skip();
    if (pos_ < text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, ErrorCode code = ErrorCode::SyntaxError) const {
    throw ParseError(code, msg, line_, static_cast<int>(pos_) + 1);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make(Node::Kind::Add, {lhs, term()});
      else if (accept('-'))
        lhs = make(Node::Kind::Sub, {lhs, term()});
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make(Node::Kind::Mul, {lhs, unary()});
      else if (accept('/'))
        lhs = make(Node::Kind::Div, {lhs, unary()});
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::Neg, {unary()});
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    while (accept('^')) {
      skip();
      const bool negative = accept('-');
      skip();
      const double p = number_literal();
      base = make(Node::Kind::Pow, {base}, negative ? -p : p);
    }
    return base;
  }

  double number_literal() {
    skip();
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) {
      if (pos_ >= text_.size()) fail("expected a number before end of input");
      fail("expected a number");
    }
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= text_.size()) fail("expected an operand before end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return make(Node::Kind::Number, {}, number_literal());
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "x") return make(Node::Kind::Var);
      if (name == "pi") return make(Node::Kind::Number, {}, std::numbers::pi);
      Node::Kind kind;
      std::size_t arity = 1;
      if (name == "sin") kind = Node::Kind::Sin;
      else if (name == "cos") kind = Node::Kind::Cos;
      else if (name == "exp") kind = Node::Kind::Exp;
      else if (name == "log") kind = Node::Kind::Log;
      else if (name == "sqrt") kind = Node::Kind::Sqrt;
      else if (name == "mobius") { kind = Node::Kind::Mobius; arity = 4; }
      else {
        pos_ = start;
        fail("unknown function '" + std::string(name) + "'", ErrorCode::UnknownFunction);
      }
      expect('(');
      std::vector<NodePtr> args;
      args.push_back(expr());
      while (args.size() < arity) {
        expect(',');
        args.push_back(expr());
      }
      expect(')');
      return make(kind, std::move(args));
    }
    fail(std::string("unexpected '") + c + "'");
  }

  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

Dual eval_node(const Node& n, Dual x) {
  auto arg = [&](std::size_t i) { return eval_node(*n.args[i], x); };
  switch (n.kind) {
    case Node::Kind::Number: return {n.number, 0.0};
    case Node::Kind::Var: return x;
    case Node::Kind::Neg: { const Dual a = arg(0); return {-a.value, -a.deriv}; }
    case Node::Kind::Add: { const Dual a = arg(0), b = arg(1); return {a.value + b.value, a.deriv + b.deriv}; }
    case Node::Kind::Sub: { const Dual a = arg(0), b = arg(1); return {a.value - b.value, a.deriv - b.deriv}; }
    case Node::Kind::Mul: {
      const Dual a = arg(0), b = arg(1);
      return {a.value * b.value, a.deriv * b.value + a.value * b.deriv};
    }
    case Node::Kind::Div: {
      const Dual a = arg(0), b = arg(1);
      return {a.value / b.value, (a.deriv * b.value - a.value * b.deriv) / (b.value * b.value)};
    }
    case Node::Kind::Pow: {
      const Dual a = arg(0);
      const double p = n.number;
      return {std::pow(a.value, p), p * std::pow(a.value, p - 1.0) * a.deriv};
    }
    case Node::Kind::Sin: { const Dual a = arg(0); return {std::sin(a.value), std::cos(a.value) * a.deriv}; }
    case Node::Kind::Cos: { const Dual a = arg(0); return {std::cos(a.value), -std::sin(a.value) * a.deriv}; }
    case Node::Kind::Exp: { const Dual a = arg(0); const double e = std::exp(a.value); return {e, e * a.deriv}; }
    case Node::Kind::Log: { const Dual a = arg(0); return {std::log(a.value), a.deriv / a.value}; }
    case Node::Kind::Sqrt: {
      const Dual a = arg(0);
      const double s = std::sqrt(a.value);
      return {s, 0.5 * a.deriv / s};
    }
    case Node::Kind::Mobius: {
      const Dual a = arg(0), b = arg(1), c = arg(2), d = arg(3);
      const Dual num{a.value * x.value + b.value, a.deriv * x.value + a.value * x.deriv + b.deriv};
      const Dual den{c.value * x.value + d.value, c.deriv * x.value + c.value * x.deriv + d.deriv};
      return {num.value / den.value, (num.deriv * den.value - num.value * den.deriv) / (den.value * den.value)};
    }
  }
  return {};
}

}  // namespace

Expression Expression::parse(std::string_view text, int line) {
  Expression e;
  e.root_ = Parser(text, line).parse();
  e.source_ = std::string(text);
  return e;
}

Dual Expression::eval(Dual x) const { return eval_node(*root_, x); }

}  // namespace conjtamer
