#include <gtest/gtest.h>

#include "drsplit/error.hpp"
#include "drsplit/hilbert.hpp"
#include "drsplit/io.hpp"
#include "generators.hpp"

using namespace drsplit;
using drsplit::testing::Gen;

TEST(Point, SymmetrizesOnConstruction) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 4, 3;
  const Point p = Point::symmetric(m);
  EXPECT_EQ(p.values()(0, 1), 3.0);
  EXPECT_EQ(p.values()(1, 0), 3.0);
}

TEST(Point, MixingShapesThrows) {
  const Point v = Point::vector({1, 2, 3, 4});
  const Point m = Point::symmetric(Eigen::MatrixXd::Identity(2, 2));
  EXPECT_THROW(v + m, ShapeError);
  EXPECT_THROW(v.dot(Point::vector({1, 2})), ShapeError);
}

TEST(Point, MeanSquareDividesByEntryCount) {
  EXPECT_DOUBLE_EQ(Point::vector({3, 4}).mean_square(), 12.5);
  const Point m = Point::symmetric(Eigen::MatrixXd::Constant(3, 3, 2.0));
  EXPECT_DOUBLE_EQ(m.mean_square(), 4.0);
}

TEST(Stack, RejectsMixedShapes) {
  EXPECT_THROW(Stack({Point::scalar(1), Point::vector({1, 2})}), ShapeError);
  EXPECT_THROW(Stack(std::vector<Point>{}), ShapeError);
}

TEST(Weights, Invariants) {
  EXPECT_THROW(Weights({0.5, 0.6}), DomainError);
  EXPECT_THROW(Weights({1.5, -0.5}), DomainError);
  EXPECT_THROW(Weights({0.0, 1.0}), DomainError);
  EXPECT_NO_THROW(Weights({0.25, 0.75}));
  EXPECT_DOUBLE_EQ(Weights::equal(4)[2], 0.25);
}

TEST(LambdaInner, UnitStack) {
  const Stack x({Point::scalar(1), Point::scalar(1)});
  EXPECT_DOUBLE_EQ(lambda_inner(x, x, Weights({0.5, 0.5})), 1.0);
}

TEST(LambdaInner, OrthonormalBlocks) {
  const Stack x({Point::vector({1, 0}), Point::vector({0, 1})});
  EXPECT_DOUBLE_EQ(lambda_inner(x, x, Weights({0.25, 0.75})), 1.0);
}

TEST(LambdaInner, MatchesElementwiseSum) {
  Gen g(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t blocks = static_cast<std::size_t>(g.integer(1, 5));
    const Shape s = g.coin() ? Shape{ShapeKind::vector, g.integer(1, 6)}
                             : Shape{ShapeKind::symmetric_matrix, g.integer(1, 4)};
    const Stack x = g.stack(s, blocks);
    const Stack y = g.stack(s, blocks);
    const Weights w = g.weights(blocks);
    double brute = 0.0;
    for (std::size_t i = 0; i < blocks; ++i)
      for (Eigen::Index e = 0; e < x[i].entries(); ++e) brute += x[i].at(e) * w[i] * y[i].at(e);
    EXPECT_NEAR(lambda_inner(x, y, w), brute, 1e-10 * std::max(1.0, std::abs(brute)));
  }
}

TEST(LambdaInner, ShapeMismatchThrows) {
  const Stack x({Point::scalar(1), Point::scalar(1)});
  const Stack y({Point::scalar(1)});
  EXPECT_THROW(lambda_inner(x, y, Weights({0.5, 0.5})), ShapeError);
  EXPECT_THROW(lambda_inner(x, x, Weights({1.0})), ShapeError);
}

TEST(LambdaInner, SymmetricBilinearPositive) {
  Gen g(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Shape s{ShapeKind::vector, 3};
    const Stack x = g.stack(s, 3), y = g.stack(s, 3), u = g.stack(s, 3);
    const Weights w = g.weights(3);
    const double a = g.uniform(-3, 3), b = g.uniform(-3, 3);
    EXPECT_NEAR(lambda_inner(x, y, w), lambda_inner(y, x, w), 1e-12);
    const double lhs = lambda_inner(a * x + b * u, y, w);
    const double rhs = a * lambda_inner(x, y, w) + b * lambda_inner(u, y, w);
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(lhs)));
    EXPECT_GT(lambda_inner(x, x, w), 0.0);
  }
}

TEST(Embed, Definition) {
  const Stack s = embed(Point::scalar(3), 2);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].at(0), 3.0);
  EXPECT_EQ(s[1].at(0), 3.0);
  const Stack z = embed(Point::scalar(0), 5);
  EXPECT_EQ(z.size(), 5u);
  for (const auto& b : z.blocks()) EXPECT_EQ(b.at(0), 0.0);
  EXPECT_THROW(embed(Point::scalar(1), 0), DomainError);
}

TEST(WeightedAverage, Examples) {
  EXPECT_DOUBLE_EQ(
      weighted_average(Stack({Point::scalar(2), Point::scalar(2)}), Weights({0.25, 0.75})).at(0),
      2.0);
  EXPECT_DOUBLE_EQ(
      weighted_average(Stack({Point::scalar(0), Point::scalar(4)}), Weights({0.5, 0.5})).at(0),
      2.0);
}

TEST(WeightedAverage, MatchesElementwiseSum) {
  Gen g(13);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t blocks = static_cast<std::size_t>(g.integer(1, 5));
    const Shape s{ShapeKind::symmetric_matrix, 3};
    const Stack x = g.stack(s, blocks);
    const Weights w = g.weights(blocks);
    const Point avg = weighted_average(x, w);
    for (Eigen::Index e = 0; e < avg.entries(); ++e) {
      double brute = 0.0;
      for (std::size_t i = 0; i < blocks; ++i) brute += w[i] * x[i].at(e);
      EXPECT_NEAR(avg.at(e), brute, 1e-12);
    }
  }
}

TEST(WeightedAverage, EmbedRoundTripIsExact) {
  Gen g(14);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = static_cast<std::size_t>(g.integer(1, 6));
    const Point x = g.symmetric_point(3);
    const Stack e = embed(x, k);
    EXPECT_EQ(embed(weighted_average(e, g.weights(k)), k), e);
  }
}

TEST(Identities, SquaredNorm) {
  Gen g(15);
  for (int trial = 0; trial < 200; ++trial) {
    const Point x = g.vector_point(4), y = g.vector_point(4);
    const double a = g.uniform(-3, 3), b = g.uniform(-3, 3);
    const double lhs = (a * x + b * y).squared_norm();
    const double rhs = a * (a + b) * x.squared_norm() + b * (a + b) * y.squared_norm() -
                       a * b * (x - y).squared_norm();
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(Identities, SquaredNormRearranged) {
  Gen g(16);
  for (int trial = 0; trial < 200; ++trial) {
    const Point x = g.symmetric_point(3), y = g.symmetric_point(3);
    const double a = g.uniform(-3, 3), b = g.uniform(-3, 3);
    if (std::abs(a + b) < 1e-3) continue;
    const double lhs = a * x.squared_norm() + b * y.squared_norm();
    const double rhs =
        a * b / (a + b) * (x - y).squared_norm() + (a * x + b * y).squared_norm() / (a + b);
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
  }
}

TEST(PointJson, RoundTrip) {
  Gen g(17);
  const Point v = g.vector_point(5);
  EXPECT_EQ(point_from_json(point_to_json(v)), v);
  const Point m = g.symmetric_point(4);
  EXPECT_EQ(point_from_json(point_to_json(m)), m);
  EXPECT_EQ(point_from_json("[1, 2, 3]"), Point::vector({1, 2, 3}));
  EXPECT_THROW(point_from_json(R"({"shape":[3],"values":[1,2]})"), ShapeError);
  EXPECT_THROW(point_from_json("{"), DomainError);
}
