#include "drsplit/reformulation.hpp"

#include <algorithm>
#include <cmath>

#include "drsplit/error.hpp"

namespace drsplit {

InclusionProblem::InclusionProblem(std::vector<OperatorSpec> operators, Shape shape)
    : operators_(std::move(operators)), shape_(shape) {
  if (operators_.size() < 2) throw DomainError("inclusion problem: need at least two operators");
  for (std::size_t i = 0; i < operators_.size(); ++i) {
    const auto& op = operators_[i];
    if (op.kind() == OperatorSpec::Kind::affine &&
        (shape_.kind != ShapeKind::vector || op.matrix().rows() != shape_.dim))
      throw ShapeError("inclusion problem: operator " + std::to_string(i + 1) +
                       " does not act on " + shape_.describe());
    if (op.kind() == OperatorSpec::Kind::quadratic_tracking && !(op.target().shape() == shape_))
      throw ShapeError("inclusion problem: operator " + std::to_string(i + 1) +
                       " has a target of shape " + op.target().shape().describe());
    const bool matrix_only = op.kind() == OperatorSpec::Kind::psd_indicator ||
                             op.kind() == OperatorSpec::Kind::phi_spectral;
    if (matrix_only && shape_.kind != ShapeKind::symmetric_matrix)
      throw ShapeError("inclusion problem: operator " + std::to_string(i + 1) +
                       " needs symmetric matrix points");
  }
}

std::vector<double> InclusionProblem::sigmas() const {
  std::vector<double> s;
  s.reserve(operators_.size());
  for (const auto& op : operators_) s.push_back(op.sigma());
  return s;
}

ReformulationContext::ReformulationContext(const InclusionProblem& prob, Weights weights,
                                           double lambda)
    : weights_(std::move(weights)), lambda_(lambda) {
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_))
    throw DomainError("reformulation: lambda must be positive and finite");
  if (weights_.size() != prob.blocks())
    throw ShapeError("reformulation: " + std::to_string(weights_.size()) + " weights for " +
                     std::to_string(prob.blocks()) + " blocks");
  for (std::size_t i = 0; i < prob.blocks(); ++i) {
    if (1.0 + gamma(i) * prob.op(i).sigma() <= 0.0)
      throw IllPosedError("reformulation: block " + std::to_string(i + 1) +
                          " violates 1 + gamma_i sigma_i > 0 (gamma_i = " +
                          std::to_string(gamma(i)) + ")");
  }
  if (1.0 + lambda_ * prob.last().sigma() <= 0.0)
    throw IllPosedError("reformulation: block " + std::to_string(prob.m()) +
                        " violates 1 + lambda sigma_m > 0");
}

namespace {

void require_blocks(const InclusionProblem& prob, const Stack& x) {
  if (x.size() != prob.blocks())
    throw ShapeError("stack has " + std::to_string(x.size()) + " blocks, problem needs " +
                     std::to_string(prob.blocks()));
  if (!(x.shape() == prob.shape()))
    throw ShapeError("stack shape " + x.shape().describe() + " does not match problem shape " +
                     prob.shape().describe());
}

}  // namespace

Stack resolvent_F_warped(const ReformulationContext& ctx, const InclusionProblem& prob,
                         const Stack& x) {
  require_blocks(prob, x);
  std::vector<Point> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(resolvent(prob.op(i), ctx.gamma(i), x[i]));
  return Stack(std::move(out));
}

Point resolvent_G_point(const ReformulationContext& ctx, const InclusionProblem& prob,
                        const Stack& x) {
  require_blocks(prob, x);
  return resolvent(prob.last(), ctx.lambda(), weighted_average(x, ctx.weights()));
}

Stack resolvent_G_warped(const ReformulationContext& ctx, const InclusionProblem& prob,
                         const Stack& x) {
  return embed(resolvent_G_point(ctx, prob, x), x.size());
}

namespace {

bool passes(double residual, Eigen::Index entries, double tol) {
  const double ms = entries == 0 ? 0.0 : residual * residual / static_cast<double>(entries);
  return ms <= tol;
}

}  // namespace

ZeroCertificate zero_certificate(const InclusionProblem& prob, const Point& z, double tol) {
  ZeroCertificate cert;
  cert.tol = tol;
  cert.method = "evaluation";
  Point sum = Point::zeros(z.shape());
  for (std::size_t i = 0; i < prob.m(); ++i) {
    if (!prob.op(i).evaluable()) {
      cert.unverifiable.push_back(i);
      continue;
    }
    sum += prob.op(i).apply(z);
  }
  cert.residual = sum.norm();
  cert.success = cert.unverifiable.empty() && passes(cert.residual, z.entries(), tol);
  return cert;
}

ZeroCertificate zero_certificate(const ReformulationContext& ctx, const InclusionProblem& prob,
                                 Variant variant, const Stack& x, const Stack& z, const Stack& y,
                                 double tol) {
  require_blocks(prob, x);
  require_blocks(prob, z);
  require_blocks(prob, y);
  ZeroCertificate cert;
  cert.tol = tol;
  cert.method = "resolvent";
  const auto& w = ctx.weights();
  const double lam = ctx.lambda();
  Point sum = Point::zeros(x.shape());
  if (variant == Variant::FG) {
    // u_i = (x_i - z_i) / gamma_i, u_m = (v - y) / lambda with v = sum lambda_i (2 z_i - x_i)
    Point v = Point::zeros(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
      sum += (1.0 / ctx.gamma(i)) * (x[i] - z[i]);
      v += w[i] * (2.0 * z[i] - x[i]);
    }
    sum += (1.0 / lam) * (v - y[0]);
  } else {
    // u_m = (sum lambda_i x_i - a) / lambda, u_i = (2a - x_i - y_i) / gamma_i
    const Point& a = z[0];
    sum += (1.0 / lam) * (weighted_average(x, w) - a);
    for (std::size_t i = 0; i < x.size(); ++i) sum += (1.0 / ctx.gamma(i)) * (2.0 * a - x[i] - y[i]);
  }
  cert.residual = sum.norm();
  for (std::size_t i = 0; i < x.size(); ++i)
    cert.spread = std::max(cert.spread, (z[i] - y[i]).norm());
  cert.success = passes(cert.residual, x.shape().entries(), tol) &&
                 passes(cert.spread, x.shape().entries(), tol);
  return cert;
}

namespace {

Stack fixed_point(const ReformulationContext& ctx, const InclusionProblem& prob, const Point& zero,
                  double sign) {
  std::vector<Point> blocks;
  blocks.reserve(prob.blocks());
  for (std::size_t i = 0; i < prob.blocks(); ++i) {
    if (!prob.op(i).evaluable())
      throw DomainError("fixed point: operator " + std::to_string(i + 1) + " is not evaluable");
    blocks.push_back(zero + (sign * ctx.gamma(i)) * prob.op(i).apply(zero));
  }
  return Stack(std::move(blocks));
}

}  // namespace

Stack fixed_point_from_zero(const ReformulationContext& ctx, const InclusionProblem& prob,
                            const Point& zero) {
  return fixed_point(ctx, prob, zero, 1.0);
}

Stack fixed_point_from_zero_gf(const ReformulationContext& ctx, const InclusionProblem& prob,
                               const Point& zero) {
  return fixed_point(ctx, prob, zero, -1.0);
}

}  // namespace drsplit
