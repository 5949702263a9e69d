#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "drsplit/engine.hpp"
#include "drsplit/error.hpp"
#include "drsplit/planner.hpp"
#include "generators.hpp"

using namespace drsplit;
using drsplit::testing::Gen;

namespace {

const Shape kScalar{ShapeKind::vector, 1};

OperatorSpec lin(double slope, double offset = 0.0) {
  return OperatorSpec::affine(Eigen::MatrixXd::Constant(1, 1, slope),
                              Eigen::VectorXd::Constant(1, offset));
}

Stack scalars(std::initializer_list<double> v) {
  std::vector<Point> b;
  for (double x : v) b.push_back(Point::scalar(x));
  return Stack(std::move(b));
}

InclusionProblem three_affine() {
  return InclusionProblem({lin(1.0, -3.0), lin(1.0), lin(2.0)}, kScalar);
}

DrParams params_for(double lambda, Weights w, Variant v = Variant::FG) {
  DrParams p;
  p.lambda = lambda;
  p.weights = std::move(w);
  p.variant = v;
  return p;
}

OperatorSpec diag(std::initializer_list<double> d) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v(i++) = x;
  return OperatorSpec::affine(v.asDiagonal().toDenseMatrix(), Eigen::VectorXd::Ones(v.size()));
}

}  // namespace

TEST(Params, Validation) {
  DrParams p = params_for(0.5, Weights::equal(2));
  EXPECT_NO_THROW(validate(p));
  p.mu = 2.0;
  EXPECT_THROW(validate(p), DomainError);
  p.mu = 0.0;
  EXPECT_THROW(validate(p), DomainError);
  p = params_for(0.0, Weights::equal(2));
  EXPECT_THROW(validate(p), DomainError);
}

TEST(Residual, Examples) {
  const Residual r = residual(scalars({1, 3}), Point::scalar(2), 0.5, Weights({0.5, 0.5}));
  EXPECT_DOUBLE_EQ(r.blocks[0].at(0), -1.0);
  EXPECT_DOUBLE_EQ(r.blocks[1].at(0), 1.0);
  EXPECT_DOUBLE_EQ(r.inf_f_sq, 1.0);
  EXPECT_EQ(residual(scalars({2, 2}), Point::scalar(2), 0.5, Weights({0.5, 0.5})).inf_f_sq, 0.0);
}

TEST(Residual, Homogeneous) {
  Gen g(61);
  for (int trial = 0; trial < 50; ++trial) {
    const Shape s{ShapeKind::symmetric_matrix, 3};
    const Stack z = g.stack(s, 3);
    const Point y = g.symmetric_point(3);
    const Weights w = g.weights(3);
    const double c = g.uniform(-4, 4);
    const double base = residual(z, y, 0.7, w).inf_f_sq;
    const Stack zc = embed(y, 3) + c * (z - embed(y, 3));
    EXPECT_NEAR(residual(zc, y, 0.7, w).inf_f_sq, c * c * base, 1e-10 * std::max(1.0, base));
  }
}

TEST(DrStep, OneStepByHand) {
  // gamma_i = 1: z_1 solves 2w - 3 = 0, z_2 solves 2w = 0, y solves 2y = 1.5
  const InclusionProblem p = three_affine();
  const DrState s = dr_step(params_for(0.5, Weights({0.5, 0.5})), p, initial_state(scalars({0, 0})));
  EXPECT_EQ(s.k, 1);
  EXPECT_DOUBLE_EQ(s.z[0].at(0), 1.5);
  EXPECT_DOUBLE_EQ(s.z[1].at(0), 0.0);
  EXPECT_DOUBLE_EQ(s.y[0].at(0), 0.75);
  EXPECT_DOUBLE_EQ(s.y[1].at(0), 0.75);
  EXPECT_DOUBLE_EQ(s.x[0].at(0), -0.75);
  EXPECT_DOUBLE_EQ(s.x[1].at(0), 0.75);
}

TEST(DrStep, GfOneStepByHand) {
  // a = J_{0.5 * 2x}(0.5 * 1 + 0.5 * 3) = 1; y_1 solves 2w - 3 = 1, y_2 solves 2w = -1
  const InclusionProblem p = three_affine();
  const DrState s = dr_step(params_for(0.5, Weights({0.5, 0.5}), Variant::GF), p,
                            initial_state(scalars({1, 3})));
  EXPECT_DOUBLE_EQ(s.z[0].at(0), 1.0);
  EXPECT_DOUBLE_EQ(s.y[0].at(0), 2.0);
  EXPECT_DOUBLE_EQ(s.y[1].at(0), -0.5);
  EXPECT_DOUBLE_EQ(s.x[0].at(0), 2.0);
  EXPECT_DOUBLE_EQ(s.x[1].at(0), 1.5);
}

TEST(DrStep, FixedPointIsUnchanged) {
  const InclusionProblem p = three_affine();
  const Weights w({0.5, 0.5});
  const ReformulationContext ctx(p, w, 0.5);
  const Stack fp = fixed_point_from_zero(ctx, p, Point::scalar(0.75));
  const DrState s = dr_step(params_for(0.5, w), p, initial_state(fp));
  EXPECT_LT(plain_norm(s.x - fp), 1e-15);
  const Stack gp = fixed_point_from_zero_gf(ctx, p, Point::scalar(0.75));
  const DrState t = dr_step(params_for(0.5, w, Variant::GF), p, initial_state(gp));
  EXPECT_LT(plain_norm(t.x - gp), 1e-15);
}

TEST(DrStep, ReflectedFormAgrees) {
  Gen g(62);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = static_cast<std::size_t>(g.integer(2, 5));
    const Weights w = g.weights(m - 1);
    const double lambda = g.uniform(0.05, 1.0);
    std::vector<OperatorSpec> ops;
    for (std::size_t i = 0; i + 1 < m; ++i)
      ops.push_back(OperatorSpec::affine(
          g.symmetric_with_min_eig(3, g.uniform(-0.9 * w[i] / lambda, 1.0)), g.vector(3)));
    ops.push_back(OperatorSpec::affine(g.symmetric_with_min_eig(3, g.uniform(-0.9 / lambda, 1.0)),
                                       g.vector(3)));
    const InclusionProblem p(std::move(ops), Shape{ShapeKind::vector, 3});
    for (Variant v : {Variant::FG, Variant::GF}) {
      DrParams params = params_for(lambda, w, v);
      params.mu = g.uniform(0.1, 1.9);
      const Stack x = g.stack(p.shape(), m - 1);
      const Stack three = dr_step(params, p, initial_state(x)).x;
      const Stack refl = dr_map_reflected(params, p, x);
      EXPECT_LT(plain_norm(three - refl), 1e-12 * std::max(1.0, plain_norm(x)));
    }
  }
}

TEST(Run, ThreeAffineConvergesBothVariants) {
  const InclusionProblem p = three_affine();
  for (Variant v : {Variant::FG, Variant::GF}) {
    DrParams params = params_for(0.5, Weights({0.5, 0.5}), v);
    params.tol = 1e-12;
    params.max_iter = 1000;
    const RunResult r = run(params, p, scalars({0, 0}));
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.iterations, 1000);
    EXPECT_NEAR(r.shadow.at(0), 0.75, 1e-6);
    EXPECT_TRUE(r.certificate.success);
    EXPECT_EQ(r.certificate.method, "evaluation");
    EXPECT_EQ(static_cast<long>(r.log.size()), r.iterations + 1);
  }
}

TEST(Run, ZeroOperatorsExitImmediately) {
  const Shape s{ShapeKind::vector, 2};
  const InclusionProblem p({OperatorSpec::zero(2), OperatorSpec::zero(2), OperatorSpec::zero(2)},
                           s);
  const Stack x0 = embed(Point::vector({1.5, -2}), 2);
  const RunResult r = run(params_for(0.3, Weights({0.4, 0.6})), p, x0);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.final_residual_sq, 0.0);
  EXPECT_EQ(r.state.x, x0);
}

TEST(Run, BudgetExhaustionIsReported) {
  const InclusionProblem p = three_affine();
  DrParams params = params_for(0.5, Weights({0.5, 0.5}));
  params.max_iter = 1;
  params.tol = 1e-30;
  const RunResult r = run(params, p, scalars({0, 0}));
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.log.size(), 2u);
}

TEST(Run, LogCadenceKeepsLastRow) {
  const InclusionProblem p = three_affine();
  DrParams params = params_for(0.5, Weights({0.5, 0.5}));
  params.tol = 1e-12;
  params.log_every = 7;
  const RunResult r = run(params, p, scalars({0, 0}));
  ASSERT_FALSE(r.log.empty());
  EXPECT_EQ(r.log.rows().back().k, r.iterations);
  EXPECT_EQ(r.log.rows().front().k, 0);
}

TEST(Fejer, ConstantSequence) {
  const Stack fp = scalars({1, 2});
  const FejerReport f = fejer_monitor({fp, fp, fp}, fp, Weights({0.5, 0.5}));
  EXPECT_TRUE(f.monotone());
  for (double d : f.distances) EXPECT_EQ(d, 0.0);
}

TEST(Fejer, ThreeAffineRunIsMonotone) {
  const InclusionProblem p = three_affine();
  const Weights w({0.5, 0.5});
  for (Variant v : {Variant::FG, Variant::GF}) {
    DrParams params = params_for(0.5, w, v);
    params.tol = 1e-12;
    params.keep_iterates = true;
    const RunResult r = run(params, p, scalars({0, 0}));
    const ReformulationContext ctx(p, w, 0.5);
    const Stack fp = v == Variant::FG ? fixed_point_from_zero(ctx, p, Point::scalar(0.75))
                                      : fixed_point_from_zero_gf(ctx, p, Point::scalar(0.75));
    const FejerReport f = fejer_monitor(r.iterates, fp, w);
    EXPECT_TRUE(f.monotone());
    EXPECT_EQ(f.distances.size(), r.iterates.size());
  }
}

TEST(Fejer, OverLargeStepIsCaught) {
  // sigma = (-1, 2): the certified range is lambda < 0.25; at 0.9 the scalar map
  // multiplies by 1 + (2a - 1) b - a with a = 10, b = 1 / 2.8, about -2.2
  const InclusionProblem p({lin(-1.0), lin(2.0)}, kScalar);
  DrParams params = params_for(0.9, Weights({1.0}));
  params.max_iter = 20;
  params.tol = 1e-30;
  params.keep_iterates = true;
  const RunResult r = run(params, p, scalars({1.0}));
  const FejerReport f = fejer_monitor(r.iterates, scalars({0.0}), Weights({1.0}));
  ASSERT_FALSE(f.monotone());
  EXPECT_EQ(*f.first_violation, 1u);
}

TEST(RateMonitor, GeometricDecayPasses) {
  IterateLog log;
  for (long k = 0; k < 200; ++k) {
    const double r = std::pow(0.9, static_cast<double>(k));
    log.push({k, r, static_cast<double>(k) * r, std::nullopt, std::nullopt});
  }
  const RateReport rep = rate_monitor(log);
  EXPECT_TRUE(rep.passed());
  EXPECT_TRUE(rep.plateau_ok);
}

TEST(RateMonitor, ConstantResidualFails) {
  IterateLog log;
  for (long k = 0; k < 200; ++k) log.push({k, 0.01, 0.01 * static_cast<double>(k), {}, {}});
  const RateReport rep = rate_monitor(log);
  EXPECT_TRUE(rep.eligible);
  EXPECT_FALSE(rep.passed());
  EXPECT_FALSE(rep.diagnostic.empty());
}

TEST(RateMonitor, ShortLogIsIneligible) {
  IterateLog log;
  for (long k = 0; k < 50; ++k) log.push({k, 1.0, static_cast<double>(k), {}, {}});
  const RateReport rep = rate_monitor(log);
  EXPECT_FALSE(rep.eligible);
  EXPECT_FALSE(rep.passed());
}

TEST(RateMonitor, SlowAffineRunPasses) {
  // weak curvature in the first coordinate keeps the run going for hundreds of steps
  const Shape s{ShapeKind::vector, 2};
  const InclusionProblem p({diag({1e-2, 1.0}), diag({0.0, 0.5}), diag({1e-2, 1.0})}, s);
  DrParams params = params_for(0.5, Weights({0.5, 0.5}));
  params.tol = 1e-14;
  const RunResult r = run(params, p, embed(Point::vector({5, -5}), 2));
  ASSERT_TRUE(r.converged);
  const RateReport rep = rate_monitor(r.log);
  EXPECT_TRUE(rep.eligible) << rep.diagnostic;
  EXPECT_TRUE(rep.passed()) << rep.diagnostic;
  EXPECT_TRUE(rep.plateau_ok) << rep.diagnostic;
}

TEST(IterateLog, RejectsNonIncreasingK) {
  IterateLog log;
  log.push({3, 1.0, 3.0, {}, {}});
  EXPECT_THROW(log.push({3, 1.0, 3.0, {}, {}}), DomainError);
  EXPECT_THROW(log.push({1, 1.0, 1.0, {}, {}}), DomainError);
}

TEST(IterateLog, CsvRoundTrip) {
  Gen g(63);
  IterateLog log;
  long k = 0;
  for (int i = 0; i < 50; ++i) {
    k += g.integer(1, 3);
    LogRow row{k, g.uniform(0, 1), 0.0, std::nullopt, std::nullopt};
    row.k_residual_sq = static_cast<double>(k) * row.residual_sq;
    if (g.coin()) row.fejer_dist = g.uniform(0, 10);
    if (g.coin()) row.merit = g.uniform(-10, 10);
    log.push(row);
  }
  std::stringstream ss;
  log.write_csv(ss);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), IterateLog::csv_header());
  EXPECT_EQ(IterateLog::read_csv(ss), log);
}

TEST(IterateLog, AttachFejer) {
  IterateLog log;
  log.push({0, 1.0, 0.0, {}, {}});
  log.push({2, 0.5, 1.0, {}, {}});
  log.attach_fejer({3.0, 2.0, 1.0, 0.5});
  EXPECT_EQ(log.rows()[0].fejer_dist, 3.0);
  EXPECT_EQ(log.rows()[1].fejer_dist, 1.0);
}

TEST(Merit, QuadraticSymbolic) {
  // f_1 = x^2 / 2 - 3x, f_2 = x^2 / 2, f_3 = x^2
  const InclusionProblem p = three_affine();
  const DrParams params = params_for(0.5, Weights({0.5, 0.5}));
  DrState s = initial_state(scalars({0.4, -1.2}));
  for (int k = 0; k < 5; ++k) {
    s = dr_step(params, p, s);
    const double z1 = s.z[0].at(0), z2 = s.z[1].at(0), y = s.y[0].at(0);
    const double gamma = 1.0;
    const double ref = (0.5 * z1 * z1 - 3 * z1) + (z1 - 3) * (y - z1) +
                       (y - z1) * (y - z1) / (2 * gamma) + 0.5 * z2 * z2 + z2 * (y - z2) +
                       (y - z2) * (y - z2) / (2 * gamma) + y * y;
    EXPECT_NEAR(merit_V(p, s, {gamma, gamma}), ref, 1e-12);
  }
}

TEST(Merit, ConstantAtFixedPoint) {
  const InclusionProblem p = three_affine();
  const Weights w({0.5, 0.5});
  const ReformulationContext ctx(p, w, 0.5);
  DrState s = initial_state(fixed_point_from_zero(ctx, p, Point::scalar(0.75)));
  s = dr_step(params_for(0.5, w), p, s);
  const double v0 = merit_V(p, s, {1.0, 1.0});
  for (int k = 0; k < 5; ++k) {
    s = dr_step(params_for(0.5, w), p, s);
    EXPECT_NEAR(merit_V(p, s, {1.0, 1.0}), v0, 1e-14);
  }
}

TEST(Merit, RequiresSmoothBlocks) {
  const Shape s{ShapeKind::symmetric_matrix, 2};
  const InclusionProblem p({OperatorSpec::psd_indicator(),
                            OperatorSpec::quadratic_tracking(Point::zeros(s))},
                           s);
  DrState st = dr_step(params_for(0.5, Weights({1.0})), p, initial_state(embed(Point::zeros(s), 1)));
  EXPECT_THROW(merit_V(p, st, {0.5}), DomainError);
}

TEST(Nonexpansive, CertifiedParameters) {
  Gen g(64);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = static_cast<std::size_t>(g.integer(2, 5));
    std::vector<double> sig(m);
    double sum = 0.0;
    for (auto& s : sig) {
      s = g.uniform(-1.0, 2.0);
      sum += s;
    }
    PlannerInput inp{sig, g.weights(m - 1), g.uniform(0.2, 1.8), std::nullopt};
    if (classify(inp).plan_case == PlanCase::Unsupported) continue;
    const PlannerResult plan = optimal_delta(inp);
    const double lambda =
        std::isinf(plan.lambda_bar_star) ? 1.0 : 0.99 * plan.lambda_bar_star;
    std::vector<OperatorSpec> ops;
    for (double s : sig) ops.push_back(OperatorSpec::affine(g.symmetric_with_min_eig(3, s), g.vector(3)));
    const InclusionProblem prob(std::move(ops), Shape{ShapeKind::vector, 3});
    for (Variant v : {Variant::FG, Variant::GF}) {
      DrParams params = params_for(lambda, inp.weights, v);
      params.mu = inp.mu;
      for (int pair = 0; pair < 10; ++pair) {
        const Stack x = g.stack(prob.shape(), m - 1), y = g.stack(prob.shape(), m - 1);
        const double lhs =
            std::pow(lambda_norm(dr_map_reflected(params, prob, x) - dr_map_reflected(params, prob, y),
                                 inp.weights),
                     2);
        const double rhs = std::pow(lambda_norm(x - y, inp.weights), 2);
        EXPECT_LE(lhs, rhs * (1 + 1e-9));
      }
    }
    ++checked;
  }
  EXPECT_GT(checked, 30);
}
