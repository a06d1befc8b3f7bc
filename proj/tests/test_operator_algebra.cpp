#include <gtest/gtest.h>

#include <cmath>

#include "stathedge/operator_algebra.hpp"

using stathedge::density::DiffOperator;

namespace {

double coeff(const DiffOperator& op, int x1, int x2, int d1, int d2) {
  for (const auto& t : op.terms())
    if (t.x[0] == x1 && t.x[1] == x2 && t.d[0] == d1 && t.d[1] == d2) return t.c;
  return 0.0;
}

}  // namespace

TEST(DiffOperator, CommutatorOfDerivativeAndVariable) {
  // d x = x d + 1
  const auto op = DiffOperator::partial(0) * DiffOperator::variable(0);
  EXPECT_EQ(op.terms().size(), 2u);
  EXPECT_EQ(coeff(op, 1, 0, 1, 0), 1.0);
  EXPECT_EQ(coeff(op, 0, 0, 0, 0), 1.0);
}

TEST(DiffOperator, SecondDerivativeOfSquare) {
  // d^2 x^2 = x^2 d^2 + 4 x d + 2
  const auto x = DiffOperator::variable(0), d = DiffOperator::partial(0);
  const auto op = d.pow(2) * x.pow(2);
  EXPECT_EQ(coeff(op, 2, 0, 2, 0), 1.0);
  EXPECT_EQ(coeff(op, 1, 0, 1, 0), 4.0);
  EXPECT_EQ(coeff(op, 0, 0, 0, 0), 2.0);
}

TEST(DiffOperator, DifferentVariablesCommute) {
  const auto op = DiffOperator::partial(1) * DiffOperator::variable(0);
  EXPECT_EQ(op.terms().size(), 1u);
  EXPECT_EQ(coeff(op, 1, 0, 0, 1), 1.0);
}

TEST(DiffOperator, CompositionIsAssociative) {
  const auto x = DiffOperator::variable(0), y = DiffOperator::variable(1);
  const auto a = DiffOperator::partial(0) + 2.0 * y * DiffOperator::partial(1);
  const auto b = x * x + DiffOperator::partial(0) * 0.5;
  const auto c = DiffOperator::partial(1) * x + y;
  const auto l = (a * b) * c, r = a * (b * c);
  ASSERT_EQ(l.terms().size(), r.terms().size());
  for (std::size_t i = 0; i < l.terms().size(); ++i) EXPECT_NEAR(l.terms()[i].c, r.terms()[i].c, 1e-14);
}

TEST(DiffOperator, FreezeAndEvaluate) {
  const auto x = DiffOperator::variable(0), y = DiffOperator::variable(1);
  const auto p = 3.0 * x * x * y + DiffOperator::constant(1.5);
  Eigen::VectorXd pt(2);
  pt << 2.0, -1.0;
  EXPECT_DOUBLE_EQ(p.evaluate_polynomial(pt), 3 * 4 * -1 + 1.5);
  const auto dp = p.polynomial_derivative(0);
  EXPECT_DOUBLE_EQ(dp.evaluate_polynomial(pt), 6 * 2 * -1);
  const auto op = (x * DiffOperator::partial(0)).freeze_at(pt);
  EXPECT_EQ(coeff(op, 0, 0, 1, 0), 2.0);
  EXPECT_EQ(op.max_polynomial_degree(), 0);
  EXPECT_EQ(op.max_derivative_order(), 1);
}

TEST(DiffOperator, CancellationLeavesZero) {
  const auto d = DiffOperator::partial(0);
  auto op = d + d * -1.0;
  op.prune();
  EXPECT_TRUE(op.is_zero());
}
