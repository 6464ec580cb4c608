#include "rmf/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rmf/errors.hpp"

namespace rmf {
namespace {

using Op = Expression::Op;
using Instruction = Expression::Instruction;

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& variables)
      : text_(text), variables_(variables) {}

  std::vector<Instruction> run() {
    parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character");
    return std::move(program_);
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    std::ostringstream os;
    os << "expression '" << text_ << "': " << message << " at offset " << pos_;
    throw ValidationError(os.str());
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void emit(Op op) { program_.push_back({op}); }

  void parse_expr() {
    parse_term();
    for (;;) {
      if (accept('+')) {
        parse_term();
        emit(Op::add);
      } else if (accept('-')) {
        parse_term();
        emit(Op::sub);
      } else {
        return;
      }
    }
  }

  void parse_term() {
    parse_unary();
    for (;;) {
      if (accept('*')) {
        parse_unary();
        emit(Op::mul);
      } else if (accept('/')) {
        parse_unary();
        emit(Op::div);
      } else {
        return;
      }
    }
  }

  void parse_unary() {
    if (accept('-')) {
      parse_unary();
      emit(Op::neg);
    } else if (accept('+')) {
      parse_unary();
    } else {
      parse_power();
    }
  }

  void parse_power() {
    parse_primary();
    if (accept('^')) {
      parse_unary();
      emit(Op::pow);
    }
  }

  void parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      parse_expr();
      if (!accept(')')) fail("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double value = 0.0;
      const char* first = text_.data() + pos_;
      const char* last = text_.data() + text_.size();
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc()) fail("malformed number");
      pos_ += static_cast<std::size_t>(ptr - first);
      program_.push_back({Op::constant, value});
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (variables_[i] == name) {
          program_.push_back({Op::variable, 0.0, i});
          return;
        }
      }
      if (name == "pi") {
        program_.push_back({Op::constant, std::numbers::pi});
        return;
      }
      if (name == "e") {
        program_.push_back({Op::constant, std::numbers::e});
        return;
      }
      Op fn;
      if (name == "sin") fn = Op::sin;
      else if (name == "cos") fn = Op::cos;
      else if (name == "exp") fn = Op::exp;
      else if (name == "sqrt") fn = Op::sqrt;
      else {
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
      }
      if (!accept('(')) fail("expected '(' after function name");
      parse_expr();
      if (!accept(')')) fail("expected ')'");
      emit(fn);
      return;
    }
    fail("unexpected character");
  }

  std::string_view text_;
  const std::vector<std::string>& variables_;
  std::vector<Instruction> program_;
  std::size_t pos_ = 0;
};

// Jet arithmetic: chain rule up to second order.
Jet operator+(Jet a, Jet b) { return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2}; }
Jet operator-(Jet a, Jet b) { return {a.value - b.value, a.d1 - b.d1, a.d2 - b.d2}; }
Jet operator-(Jet a) { return {-a.value, -a.d1, -a.d2}; }
Jet operator*(Jet a, Jet b) {
  return {a.value * b.value, a.d1 * b.value + a.value * b.d1,
          a.d2 * b.value + 2.0 * a.d1 * b.d1 + a.value * b.d2};
}
// f(a) with f, f', f'' evaluated at a.value.
Jet compose(Jet a, double f, double df, double ddf) {
  return {f, df * a.d1, ddf * a.d1 * a.d1 + df * a.d2};
}
Jet operator/(Jet a, Jet b) {
  const double inv = 1.0 / b.value;
  return a * compose(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}
Jet pow(Jet a, Jet b) {
  if (b.d1 == 0.0 && b.d2 == 0.0) {
    const double n = b.value;
    return compose(a, std::pow(a.value, n), n * std::pow(a.value, n - 1.0),
                   n * (n - 1.0) * std::pow(a.value, n - 2.0));
  }
  const double la = std::log(a.value);
  const Jet log_a = compose(a, la, 1.0 / a.value, -1.0 / (a.value * a.value));
  const Jet exponent = b * log_a;
  const double ex = std::exp(exponent.value);
  return compose(exponent, ex, ex, ex);
}
Jet sin(Jet a) { return compose(a, std::sin(a.value), std::cos(a.value), -std::sin(a.value)); }
Jet cos(Jet a) { return compose(a, std::cos(a.value), -std::sin(a.value), -std::cos(a.value)); }
Jet exp(Jet a) {
  const double ex = std::exp(a.value);
  return compose(a, ex, ex, ex);
}
Jet sqrt(Jet a) {
  const double r = std::sqrt(a.value);
  return compose(a, r, 0.5 / r, -0.25 / (r * a.value));
}

double sin(double a) { return std::sin(a); }
double cos(double a) { return std::cos(a); }
double exp(double a) { return std::exp(a); }
double sqrt(double a) { return std::sqrt(a); }
double pow(double a, double b) { return std::pow(a, b); }

template <class T, class Var>
T run(const std::vector<Instruction>& program, Var&& variable) {
  std::vector<T> stack;
  stack.reserve(program.size());
  auto pop = [&stack] {
    T v = stack.back();
    stack.pop_back();
    return v;
  };
  for (const auto& ins : program) {
    switch (ins.op) {
      case Op::constant: stack.push_back(T{ins.constant}); break;
      case Op::variable: stack.push_back(variable(ins.variable)); break;
      case Op::neg: stack.back() = -stack.back(); break;
      case Op::sin: stack.back() = sin(stack.back()); break;
      case Op::cos: stack.back() = cos(stack.back()); break;
      case Op::exp: stack.back() = exp(stack.back()); break;
      case Op::sqrt: stack.back() = sqrt(stack.back()); break;
      default: {
        const T rhs = pop();
        const T lhs = pop();
        switch (ins.op) {
          case Op::add: stack.push_back(lhs + rhs); break;
          case Op::sub: stack.push_back(lhs - rhs); break;
          case Op::mul: stack.push_back(lhs * rhs); break;
          case Op::div: stack.push_back(lhs / rhs); break;
          case Op::pow: stack.push_back(pow(lhs, rhs)); break;
          default: break;
        }
      }
    }
  }
  return stack.back();
}

}  // namespace

Expression Expression::parse(std::string_view text, std::vector<std::string> variables) {
  Expression e;
  e.text_ = std::string(text);
  e.variables_ = std::move(variables);
  e.program_ = Parser(e.text_, e.variables_).run();
  return e;
}

double Expression::evaluate(std::span<const double> values) const {
  if (values.size() != variables_.size())
    throw ValidationError("expression '" + text_ + "': wrong number of variable values");
  return run<double>(program_, [&](std::size_t i) { return values[i]; });
}

Jet Expression::evaluate_jet(std::span<const double> values, std::size_t variable_index) const {
  if (values.size() != variables_.size() || variable_index >= values.size())
    throw ValidationError("expression '" + text_ + "': wrong number of variable values");
  return run<Jet>(program_, [&](std::size_t i) {
    return i == variable_index ? Jet{values[i], 1.0, 0.0} : Jet{values[i], 0.0, 0.0};
  });
}

}  // namespace rmf
