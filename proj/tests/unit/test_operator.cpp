#include <gtest/gtest.h>

#include <cmath>

#include "drsplit/error.hpp"
#include "drsplit/operator.hpp"
#include "drsplit/prox.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace drsplit;
using drsplit::testing::Gen;

namespace {

OperatorSpec scalar_affine(double slope, double offset = 0.0,
                           std::optional<double> sigma = std::nullopt) {
  return OperatorSpec::affine(Eigen::MatrixXd::Constant(1, 1, slope),
                              Eigen::VectorXd::Constant(1, offset), sigma);
}

// f(w) = w^4 / 4 + c w^2 / 2 on the real line; sigma = c, L unbounded in general, so
// the declared L is only used for the range check
OperatorSpec quartic(double c) {
  return OperatorSpec::gradient(
      [c](const Point& x) {
        const double w = x.at(0);
        return w * w * w * w / 4.0 + c * w * w / 2.0;
      },
      [c](const Point& x) {
        const double w = x.at(0);
        return Point::scalar(w * w * w + c * w);
      },
      1e6, c);
}

}  // namespace

TEST(Resolvent, LinearScalar) {
  EXPECT_DOUBLE_EQ(resolvent(scalar_affine(2.0), 0.5, Point::scalar(4)).at(0), 2.0);
}

TEST(Resolvent, ConcaveQuadraticWithinRange) {
  // f(t) = -t^2 / 2, gradient -t
  EXPECT_NEAR(resolvent(scalar_affine(-1.0), 0.5, Point::scalar(1)).at(0), 2.0, 1e-15);
}

TEST(Resolvent, ConcaveQuadraticBeyondProxRange) {
  // the resolvent stays single-valued for gamma > 1, where the prox objective is unbounded
  const double gamma = 2.5, t = 1.7;
  EXPECT_NEAR(resolvent(scalar_affine(-1.0), gamma, Point::scalar(t)).at(0), t / (1.0 - gamma),
              1e-14);
  const auto p = prox_scalar_search([](double w) { return -0.5 * w * w; }, t, gamma);
  EXPECT_FALSE(p.has_value());
  // below the threshold the prox exists and agrees with the resolvent
  const auto q = prox_scalar_search([](double w) { return -0.5 * w * w; }, t, 0.5);
  ASSERT_TRUE(q.has_value());
  EXPECT_NEAR(*q, t / (1.0 - 0.5), 1e-6);
}

TEST(Resolvent, AffineMatchesDenseSolve) {
  Gen g(21);
  for (int trial = 0; trial < 50; ++trial) {
    const double gamma = g.uniform(0.1, 2.0);
    const Eigen::MatrixXd m = g.symmetric_with_min_eig(3, -0.9 / gamma);
    const Eigen::VectorXd b = g.vector(3);
    const OperatorSpec op = OperatorSpec::affine(m, b);
    const Point x = g.vector_point(3);
    const Eigen::VectorXd ref =
        (Eigen::MatrixXd::Identity(3, 3) + gamma * m).partialPivLu().solve(x.flat() - gamma * b);
    EXPECT_LT((resolvent(op, gamma, x).flat() - ref).norm(), 1e-10);
  }
}

TEST(Resolvent, GradientKindMatchesBisection) {
  Gen g(22);
  for (int trial = 0; trial < 100; ++trial) {
    const double c = g.uniform(-1.0, 2.0);
    const double gamma = g.uniform(0.05, 0.9);
    if (1.0 + gamma * c <= 0.05) continue;
    const double x = g.uniform(-5, 5);
    const double w = resolvent(quartic(c), gamma, Point::scalar(x)).at(0);
    const double ref =
        drsplit::testing::scalar_resolvent_oracle([c](double v) { return v * v * v + c * v; },
                                                  gamma, x);
    EXPECT_NEAR(w, ref, 1e-9 * std::max(1.0, std::abs(ref)));
  }
}

TEST(Resolvent, GradientKindVectorNewton) {
  // f(x) = sum log cosh(x_i) + x^T Q x / 2
  Gen g(23);
  const Eigen::MatrixXd q = g.symmetric_with_min_eig(4, 0.2);
  const OperatorSpec op = OperatorSpec::gradient(
      {},
      [q](const Point& x) {
        Eigen::VectorXd v = x.flat();
        return Point::vector(v.array().tanh().matrix() + q * v);
      },
      q.operatorNorm() + 1.0, 0.2);
  for (int trial = 0; trial < 20; ++trial) {
    const Point x = g.vector_point(4);
    const double gamma = g.uniform(0.1, 3.0);
    const Point w = resolvent(op, gamma, x);
    const Point r = w + gamma * op.apply(w) - x;
    EXPECT_LT(r.norm(), 1e-11 * std::max(1.0, x.norm()));
  }
}

TEST(Resolvent, IllPosedAndBadGamma) {
  EXPECT_THROW(resolvent(quartic(-1.0), 1.5, Point::scalar(1)), IllPosedError);
  EXPECT_THROW(resolvent(scalar_affine(1.0), 0.0, Point::scalar(1)), DomainError);
  EXPECT_THROW(resolvent(scalar_affine(1.0), -1.0, Point::scalar(1)), DomainError);
  // I + gamma M singular
  EXPECT_THROW(resolvent(scalar_affine(-1.0), 1.0, Point::scalar(1)), IllPosedError);
  EXPECT_THROW(resolvent(OperatorSpec::phi_elementwise(1.0, 1.0), 1.0, Point::scalar(1)),
               IllPosedError);
}

TEST(ReflectedResolvent, Examples) {
  const Point x = Point::vector({1.5, -2.0});
  EXPECT_EQ(reflected_resolvent(OperatorSpec::zero(2), 0.7, x), x);
  EXPECT_NEAR(reflected_resolvent(scalar_affine(1.0), 1.0, Point::scalar(2)).at(0), 0.0, 1e-15);
}

TEST(ReflectedResolvent, ContractionInequality) {
  Gen g(24);
  for (int trial = 0; trial < 200; ++trial) {
    const double gamma = g.uniform(0.1, 2.0);
    const double sigma = g.uniform(-0.9 / gamma, 2.0);
    const OperatorSpec op = OperatorSpec::affine(g.symmetric_with_min_eig(3, sigma), g.vector(3));
    const Point x = g.vector_point(3), y = g.vector_point(3);
    const double lhs =
        (reflected_resolvent(op, gamma, x) - reflected_resolvent(op, gamma, y)).squared_norm();
    const double jd = (resolvent(op, gamma, x) - resolvent(op, gamma, y)).squared_norm();
    const double rhs = (x - y).squared_norm() - 4.0 * gamma * op.sigma() * jd;
    EXPECT_LE(lhs, rhs + 1e-9 * std::max(1.0, rhs));
  }
}

TEST(Resolvent, Cocoercivity) {
  Gen g(25);
  std::vector<std::pair<OperatorSpec, Shape>> ops;
  const Shape v3{ShapeKind::vector, 3};
  const Shape m3{ShapeKind::symmetric_matrix, 3};
  ops.emplace_back(OperatorSpec::affine(g.symmetric_with_min_eig(3, -0.3), g.vector(3)), v3);
  ops.emplace_back(OperatorSpec::psd_indicator(), m3);
  ops.emplace_back(OperatorSpec::quadratic_tracking(g.symmetric_point(3)), m3);
  ops.emplace_back(OperatorSpec::phi_elementwise(0.4, 1.0), m3);
  ops.emplace_back(OperatorSpec::phi_spectral(0.4, 1.0), m3);
  for (const auto& [op, shape] : ops) {
    for (int trial = 0; trial < 100; ++trial) {
      double gamma = g.uniform(0.1, 2.0);
      if (1.0 + gamma * op.sigma() <= 0.05) gamma = 0.5 / std::abs(op.sigma());
      const Point x = g.point(shape), y = g.point(shape);
      const Point jx = resolvent(op, gamma, x), jy = resolvent(op, gamma, y);
      const double lhs = (x - y).dot(jx - jy);
      const double rhs = (1.0 + gamma * op.sigma()) * (jx - jy).squared_norm();
      EXPECT_GE(lhs, rhs - 1e-9 * std::max(1.0, std::abs(rhs))) << op.kind_name();
    }
  }
}

TEST(OperatorSpec, DeclaredModulusHolds) {
  Gen g(26);
  for (int trial = 0; trial < 50; ++trial) {
    const double sigma = g.uniform(-2, 2);
    const OperatorSpec op = OperatorSpec::affine(g.symmetric_with_min_eig(4, sigma), g.vector(4));
    EXPECT_NEAR(op.sigma(), sigma, 1e-10);
    for (int k = 0; k < 10; ++k) {
      const Point x = g.vector_point(4), y = g.vector_point(4);
      EXPECT_GE((x - y).dot(op.apply(x) - op.apply(y)),
                sigma * (x - y).squared_norm() - 1e-9);
    }
  }
  const Point t = g.symmetric_point(3);
  const OperatorSpec q = OperatorSpec::quadratic_tracking(t);
  const Point x = g.symmetric_point(3), y = g.symmetric_point(3);
  EXPECT_NEAR((x - y).dot(q.apply(x) - q.apply(y)), (x - y).squared_norm(), 1e-12);
}

TEST(OperatorSpec, ConstructionChecks) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0, 0, 3;
  EXPECT_THROW(OperatorSpec::affine(m, Eigen::VectorXd::Zero(2), 1.5), DomainError);
  EXPECT_NO_THROW(OperatorSpec::affine(m, Eigen::VectorXd::Zero(2), 0.5));
  EXPECT_THROW(OperatorSpec::affine(m, Eigen::VectorXd::Zero(3)), ShapeError);
  EXPECT_THROW(OperatorSpec::gradient({}, [](const Point& x) { return x; }, 1.0, -2.0),
               DomainError);
  EXPECT_DOUBLE_EQ(OperatorSpec::phi_spectral(0.1, 1.0).sigma(), -0.1);
  EXPECT_DOUBLE_EQ(OperatorSpec::phi_elementwise(0.3, 2.0).sigma(), -0.6);
  EXPECT_THROW(OperatorSpec::phi_elementwise(-0.1, 1.0), DomainError);
}

TEST(Modulus, OfF) {
  EXPECT_DOUBLE_EQ(modulus_of_F({0, 1, -0.1}).sigma, -0.1);
  EXPECT_DOUBLE_EQ(modulus_of_F({2, 2}).sigma, 2.0);
  EXPECT_EQ(modulus_of_F({2, 2}).source, Modulus::Source::derived);
  EXPECT_THROW(modulus_of_F({}), DomainError);
  Gen g(27);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(static_cast<std::size_t>(g.integer(1, 8)));
    for (auto& v : s) v = g.uniform(-3, 3);
    double brute = s[0];
    for (double v : s) brute = v < brute ? v : brute;
    EXPECT_EQ(modulus_of_F(s).sigma, brute);
  }
}

TEST(Modulus, OfG) {
  EXPECT_NEAR(modulus_of_G(3.0, Weights::equal(3)).sigma, 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(modulus_of_G(-0.1, Weights({0.25, 0.75})).sigma, -0.025);
  EXPECT_EQ(modulus_of_G(0.0, Weights({0.1, 0.9})).sigma, 0.0);
}
