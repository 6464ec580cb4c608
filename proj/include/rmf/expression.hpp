#pragma once

// Small calculator grammar used by the JSON curve and chart documents.
//
//   expr    := term  (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?          right associative, -x^2 == -(x^2)
//   primary := number | constant | variable | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | sqrt
//   constant:= pi | e
//
// Variables are named by the caller (t for curves, x1..xn for charts).

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rmf {

/// Value with first and second derivative in one scalar variable.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

class Expression {
 public:
  /// Throws ValidationError with the character offset on malformed input.
  static Expression parse(std::string_view text, std::vector<std::string> variables);

  double evaluate(std::span<const double> values) const;
  double evaluate(double value) const { return evaluate(std::span<const double>(&value, 1)); }

  /// Forward-mode value/first/second derivative with respect to the variable
  /// at `variable_index`; all other variables are held at `values`.
  Jet evaluate_jet(std::span<const double> values, std::size_t variable_index) const;
  Jet evaluate_jet(double value) const { return evaluate_jet(std::span<const double>(&value, 1), 0); }

  const std::string& text() const noexcept { return text_; }
  std::size_t variable_count() const noexcept { return variables_.size(); }

  enum class Op : std::uint8_t { constant, variable, add, sub, mul, div, pow, neg, sin, cos, exp, sqrt };
  struct Instruction {
    Op op;
    double constant = 0.0;
    std::size_t variable = 0;
  };

 private:
  Expression() = default;

  std::string text_;
  std::vector<std::string> variables_;
  std::vector<Instruction> program_;  // postfix
};

}  // namespace rmf
