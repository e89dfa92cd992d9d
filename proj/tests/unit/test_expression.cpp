#include <doctest.h>

#include <cmath>
#include <numbers>

#include "semiwig/error.hpp"
#include "semiwig/expression.hpp"

using namespace semiwig;
using doctest::Approx;

TEST_CASE("expressions evaluate like the C library") {
  const auto e = Expression::parse("sin(x)^2 + 3*exp(-x/2) - tanh(x)/pi");
  for (double x : {-2.0, -0.3, 0.0, 1.7}) {
    const double ref = std::pow(std::sin(x), 2) + 3 * std::exp(-x / 2) - std::tanh(x) / std::numbers::pi;
    CHECK(e(x) == Approx(ref).epsilon(1e-14));
  }
}

TEST_CASE("precedence, unary minus and right-associative power") {
  CHECK(Expression::parse("2^3^2")(0.0) == Approx(512.0));
  CHECK(Expression::parse("-x^2")(3.0) == Approx(-9.0));
  CHECK(Expression::parse("1 - 2 - 3")(0.0) == Approx(-4.0));
  CHECK(Expression::parse("(1 + x) * 2 / 4")(3.0) == Approx(2.0));
}

TEST_CASE("derivatives agree with central differences") {
  const auto e = Expression::parse("x^4/4 + hbar*cos(x)*sqrt(1 + x^2)", {"x", "hbar"});
  for (double x : {-1.3, 0.2, 2.5}) {
    const double v[2] = {x, 0.7};
    const auto [val, der] = e.value_and_derivative(std::span<const double>(v, 2), 0);
    const double h = 1e-5;
    const double vp[2] = {x + h, 0.7}, vm[2] = {x - h, 0.7};
    const double fd = (e(std::span<const double>(vp, 2)) - e(std::span<const double>(vm, 2))) / (2 * h);
    CHECK(val == Approx(e(std::span<const double>(v, 2))));
    CHECK(der == Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("malformed input reports a column") {
  try {
    (void)Expression::parse("sin(");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.column() == 5);
    CHECK(std::string(e.what()).find("column 5") != std::string::npos);
  }
  CHECK_THROWS_AS((void)Expression::parse("x + y"), ParseError);
  CHECK_THROWS_AS((void)Expression::parse("2 * (x"), ParseError);
  CHECK_THROWS_AS((void)Expression::parse("foo(x)"), ParseError);
}
