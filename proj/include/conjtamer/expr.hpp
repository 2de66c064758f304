#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "conjtamer/errors.hpp"

namespace conjtamer {

/// Value together with its first derivative in x (forward-mode).
struct Dual {
  double value = 0.0;
  double deriv = 0.0;
};

/// Parse failure with a 1-based position inside the offending text.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, const std::string& message, int line, int column)
      : Error(code, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        reason_(message),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  /// The message without the position prefix.
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
  int line_;
  int column_;
};

/// Closed-form expression in one variable x.
///
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := '-' unary | power
///   power  := primary ('^' number)*
///   primary:= number | 'x' | 'pi' | func '(' expr ')' | 'mobius' '(' expr ',' expr ',' expr ',' expr ')'
///           | '(' expr ')'
///   func   := sin | cos | exp | log | sqrt
///
/// mobius(a,b,c,d) evaluates (a*x + b) / (c*x + d).
class Expression {
 public:
  struct Node;

  /// `line` is only used to label errors.
  static Expression parse(std::string_view text, int line = 1);

  double operator()(double x) const { return eval({x, 1.0}).value; }
  Dual eval(Dual x) const;
  const std::string& source() const { return source_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

}  // namespace conjtamer
