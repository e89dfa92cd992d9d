#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace semiwig {

/// Small arithmetic expression language: + - * / ^, unary minus, parentheses, numbers,
/// the constant pi, named variables, and the functions
/// sin cos tan exp log sqrt tanh sinh cosh abs.
class Expression {
 public:
  /// Throws ParseError (with a 1-based column) on malformed input or unknown names.
  static Expression parse(const std::string& text, std::vector<std::string> variables = {"x"});

  double operator()(std::span<const double> values) const;
  double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }

  /// Value and exact derivative with respect to variable `wrt` (forward-mode dual numbers).
  std::pair<double, double> value_and_derivative(std::span<const double> values, std::size_t wrt) const;

  const std::string& text() const noexcept { return text_; }
  const std::vector<std::string>& variables() const noexcept { return variables_; }

  struct Node;

 private:
  std::string text_;
  std::vector<std::string> variables_;
  std::shared_ptr<const Node> root_;
};

}  // namespace semiwig
