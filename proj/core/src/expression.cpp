#include "semiwig/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "semiwig/error.hpp"

namespace semiwig {

struct Expression::Node {
  enum class Kind { constant, variable, add, sub, mul, div, pow, neg, func } kind;
  double value = 0.0;
  std::size_t index = 0;
  std::string name;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

const char* const kFunctions[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "tanh", "sinh", "cosh", "abs"};

struct Dual {
  double v, d;
};
Dual operator+(Dual x, Dual y) { return {x.v + y.v, x.d + y.d}; }
Dual operator-(Dual x, Dual y) { return {x.v - y.v, x.d - y.d}; }
Dual operator*(Dual x, Dual y) { return {x.v * y.v, x.d * y.v + x.v * y.d}; }
Dual operator/(Dual x, Dual y) { return {x.v / y.v, (x.d * y.v - x.v * y.d) / (y.v * y.v)}; }
Dual operator-(Dual x) { return {-x.v, -x.d}; }

Dual dual_pow(Dual x, Dual y) {
  const double v = std::pow(x.v, y.v);
  double d = 0.0;
  if (x.d != 0.0) d += y.v * std::pow(x.v, y.v - 1.0) * x.d;
  if (y.d != 0.0) d += v * std::log(x.v) * y.d;
  return {v, d};
}

Dual apply(const std::string& f, Dual x) {
  if (f == "sin") return {std::sin(x.v), std::cos(x.v) * x.d};
  if (f == "cos") return {std::cos(x.v), -std::sin(x.v) * x.d};
  if (f == "tan") { const double t = std::tan(x.v); return {t, (1.0 + t * t) * x.d}; }
  if (f == "exp") { const double e = std::exp(x.v); return {e, e * x.d}; }
  if (f == "log") return {std::log(x.v), x.d / x.v};
  if (f == "sqrt") { const double s = std::sqrt(x.v); return {s, 0.5 * x.d / s}; }
  if (f == "tanh") { const double t = std::tanh(x.v); return {t, (1.0 - t * t) * x.d}; }
  if (f == "sinh") return {std::sinh(x.v), std::cosh(x.v) * x.d};
  if (f == "cosh") return {std::cosh(x.v), std::sinh(x.v) * x.d};
  return {std::abs(x.v), (x.v < 0 ? -1.0 : 1.0) * x.d};  // abs
}

double apply(const std::string& f, double x) { return apply(f, Dual{x, 0.0}).v; }

template <class T>
T evaluate(const Expression::Node& n, std::span<const T> vars) {
  switch (n.kind) {
    case Kind::constant: if constexpr (std::is_same_v<T, Dual>) return Dual{n.value, 0.0}; else return n.value;
    case Kind::variable: return vars[n.index];
    case Kind::add: return evaluate(*n.a, vars) + evaluate(*n.b, vars);
    case Kind::sub: return evaluate(*n.a, vars) - evaluate(*n.b, vars);
    case Kind::mul: return evaluate(*n.a, vars) * evaluate(*n.b, vars);
    case Kind::div: return evaluate(*n.a, vars) / evaluate(*n.b, vars);
    case Kind::neg: return -evaluate(*n.a, vars);
    case Kind::pow:
      if constexpr (std::is_same_v<T, Dual>) return dual_pow(evaluate(*n.a, vars), evaluate(*n.b, vars));
      else return std::pow(evaluate(*n.a, vars), evaluate(*n.b, vars));
    case Kind::func: return apply(n.name, evaluate(*n.a, vars));
  }
  return T{};
}

class Parser {
 public:
  Parser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_ + 1); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
    return false;
  }

  static NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr expr() {
    NodePtr left = term();
    for (;;) {
      if (accept('+')) left = make(Kind::add, left, term());
      else if (accept('-')) left = make(Kind::sub, left, term());
      else return left;
    }
  }

  NodePtr term() {
    NodePtr left = unary();
    for (;;) {
      if (accept('*')) left = make(Kind::mul, left, unary());
      else if (accept('/')) left = make(Kind::div, left, unary());
      else return left;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Kind::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("expected an expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s_.substr(start), &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ = start + used;
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::constant;
    n->value = v;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    for (const char* f : kFunctions) {
      if (name == f) {
        if (!accept('(')) fail("expected '(' after function " + name);
        auto n = std::make_shared<Expression::Node>();
        n->kind = Kind::func;
        n->name = name;
        n->a = expr();
        if (!accept(')')) fail("expected ')'");
        return n;
      }
    }
    auto n = std::make_shared<Expression::Node>();
    if (name == "pi") {
      n->kind = Kind::constant;
      n->value = std::numbers::pi;
      return n;
    }
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) {
        n->kind = Kind::variable;
        n->index = i;
        return n;
      }
    }
    pos_ = start;
    fail("unknown name '" + name + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text, std::vector<std::string> variables) {
  Expression e;
  e.text_ = text;
  e.variables_ = std::move(variables);
  e.root_ = Parser(e.text_, e.variables_).parse();
  return e;
}

double Expression::operator()(std::span<const double> values) const {
  if (values.size() != variables_.size()) throw InvalidParameter("expression: wrong number of variable values");
  return evaluate<double>(*root_, values);
}

std::pair<double, double> Expression::value_and_derivative(std::span<const double> values,
                                                           std::size_t wrt) const {
  if (values.size() != variables_.size() || wrt >= values.size())
    throw InvalidParameter("expression: wrong variable binding");
  std::vector<Dual> d(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) d[i] = {values[i], i == wrt ? 1.0 : 0.0};
  const Dual r = evaluate<Dual>(*root_, std::span<const Dual>(d));
  return {r.v, r.d};
}

}  // namespace semiwig
