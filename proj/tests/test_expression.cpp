#include <cmath>

#include "doctest.h"
#include "masharp/error.hpp"
#include "masharp/expression.hpp"

using masharp::Expression;
using masharp::ExpressionError;

TEST_CASE("expression arithmetic and precedence") {
  const masharp::Point x{2.0, 3.0, 5.0};
  CHECK(Expression::parse("2 + 3*4")(x) == 14.0);
  CHECK(Expression::parse("(2 + 3)*4")(x) == 20.0);
  CHECK(Expression::parse("8/4/2")(x) == 1.0);
  CHECK(Expression::parse("2 - 3 - 4")(x) == -5.0);
  CHECK(Expression::parse("-x1 + x2*x3")(x) == 13.0);
  CHECK(Expression::parse("1.5e1")(x) == 15.0);
}

TEST_CASE("expression functions") {
  const masharp::Point x{0.5, 0.0, 0.0};
  CHECK(Expression::parse("pow(2, 3)")(x) == 8.0);
  CHECK(Expression::parse("exp(0) + cos(0) + sin(0) + log(1)")(x) == 2.0);
  CHECK(Expression::parse("pow(x1 - 1, 2)")(x) == doctest::Approx(0.25));
  CHECK(Expression::parse("exp(x1)")(x) == doctest::Approx(std::exp(0.5)));
}

TEST_CASE("expression errors") {
  CHECK_THROWS_AS(Expression::parse("1 +"), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("x4"), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("foo(1)"), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("(1 + 2"), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("pow(1)"), ExpressionError);
  CHECK_THROWS_AS(Expression::parse(""), ExpressionError);
}

TEST_CASE("constant expressions and text") {
  CHECK(Expression::constant(2.5)({0, 0, 0}) == 2.5);
  CHECK(Expression::parse("x1*x2").text() == "x1*x2");
}
