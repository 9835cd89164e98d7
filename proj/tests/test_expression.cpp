#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "sddi/expression.hpp"

using namespace sddi;

TEST_CASE("expressions evaluate with the usual precedence") {
  REQUIRE(parse_expression("1+2*3")->eval(0, 0) == Catch::Approx(7.0));
  REQUIRE(parse_expression("(1+2)*3")->eval(0, 0) == Catch::Approx(9.0));
  REQUIRE(parse_expression("2^3^2")->eval(0, 0) == Catch::Approx(512.0));  // right assoc
  REQUIRE(parse_expression("-2^2")->eval(0, 0) == Catch::Approx(-4.0));  // unary minus binds looser
  REQUIRE(parse_expression("6/3/2")->eval(0, 0) == Catch::Approx(1.0));
  REQUIRE(parse_expression("x - 2*y")->eval(3.0, 0.5) == Catch::Approx(2.0));
  REQUIRE(parse_expression("sin(0) + cos(0) + tanh(0) + exp(0)")->eval(0, 0) ==
          Catch::Approx(2.0));
}

TEST_CASE("malformed expressions are rejected with positions") {
  for (const char* bad : {"", "1+", "sin", "sin 3", "(1", "z+1", "1..2", "x**y", "3)"}) {
    REQUIRE_THROWS_AS(parse_expression(bad), std::runtime_error);
  }
}

TEST_CASE("symbolic derivatives match central finite differences") {
  const char* cases[] = {
      "-y + 0.1*sin(12.566370614359172*x)",
      "tanh(x*y) + exp(0.3*x) - cos(y)/(1.5+x)",
      "(x^2 + y^2)^0.5",
      "x*y*sin(x) - 2^x",
  };
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uni(0.2, 1.7);
  for (const char* text : cases) {
    Expr::Ptr f = parse_expression(text);
    Expr::Ptr fx = f->diff(0);
    Expr::Ptr fy = f->diff(1);
    for (int k = 0; k < 25; ++k) {
      const double x = uni(rng), y = uni(rng), h = 1e-6;
      const double dfx = (f->eval(x + h, y) - f->eval(x - h, y)) / (2 * h);
      const double dfy = (f->eval(x, y + h) - f->eval(x, y - h)) / (2 * h);
      REQUIRE(fx->eval(x, y) == Catch::Approx(dfx).margin(1e-6).epsilon(1e-6));
      REQUIRE(fy->eval(x, y) == Catch::Approx(dfy).margin(1e-6).epsilon(1e-6));
    }
  }
}

TEST_CASE("differentiating a variable exponent is rejected") {
  Expr::Ptr f = parse_expression("x^y");
  REQUIRE_THROWS_AS(f->diff(0), std::runtime_error);
}
