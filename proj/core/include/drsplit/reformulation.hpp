#pragma once

#include <string>
#include <vector>

#include "drsplit/hilbert.hpp"
#include "drsplit/operator.hpp"

namespace drsplit {

// 0 in A_1(x) + ... + A_m(x); the last operator is the distinguished A_m
class InclusionProblem {
 public:
  InclusionProblem(std::vector<OperatorSpec> operators, Shape shape);

  std::size_t m() const { return operators_.size(); }
  std::size_t blocks() const { return operators_.size() - 1; }
  const OperatorSpec& op(std::size_t i) const { return operators_.at(i); }
  const OperatorSpec& last() const { return operators_.back(); }
  const std::vector<OperatorSpec>& operators() const { return operators_; }
  const Shape& shape() const { return shape_; }
  std::vector<double> sigmas() const;

 private:
  std::vector<OperatorSpec> operators_;
  Shape shape_;
};

// weights and step of the reformulation; block steps are gamma_i = lambda / lambda_i
class ReformulationContext {
 public:
  // throws IllPosedError naming the first block with 1 + gamma_i sigma_i <= 0
  ReformulationContext(const InclusionProblem& prob, Weights weights, double lambda);

  const Weights& weights() const { return weights_; }
  double lambda() const { return lambda_; }
  double gamma(std::size_t i) const { return lambda_ / weights_[i]; }

 private:
  Weights weights_;
  double lambda_;
};

Stack resolvent_F_warped(const ReformulationContext& ctx, const InclusionProblem& prob,
                         const Stack& x);
// single point a = J_{lambda A_m}(sum_i lambda_i x_i); the warped resolvent of G is embed(a)
Point resolvent_G_point(const ReformulationContext& ctx, const InclusionProblem& prob,
                        const Stack& x);
Stack resolvent_G_warped(const ReformulationContext& ctx, const InclusionProblem& prob,
                         const Stack& x);

enum class Variant { FG, GF };

// success compares residual^2 / entries with tol, the units of the stopping rule
struct ZeroCertificate {
  double residual = 0.0;  // norm of the (sub)gradient sum
  double tol = 0.0;
  bool success = false;
  // "evaluation" when every operator was evaluated, "resolvent" when the sum
  // was assembled from the final resolvent relations
  std::string method;
  // operators that could not be evaluated at z (0-based)
  std::vector<std::size_t> unverifiable;
  // largest distance between paired resolvent outputs, resolvent method only
  double spread = 0.0;
};

// ||sum_i A_i(z)|| for evaluable problems
ZeroCertificate zero_certificate(const InclusionProblem& prob, const Point& z, double tol);

// certificate assembled from one step taken at x: each resolvent output w = J_{gA}(v)
// yields the element (v - w) / g of A(w); the reported residual is the norm of their sum,
// which equals ||(1/lambda) sum_i lambda_i (z_i - y_i)||
ZeroCertificate zero_certificate(const ReformulationContext& ctx, const InclusionProblem& prob,
                                 Variant variant, const Stack& x, const Stack& z, const Stack& y,
                                 double tol);

// fixed point of the FG map attached to a known zero of an evaluable problem
Stack fixed_point_from_zero(const ReformulationContext& ctx, const InclusionProblem& prob,
                            const Point& zero);
// same for the GF map
Stack fixed_point_from_zero_gf(const ReformulationContext& ctx, const InclusionProblem& prob,
                               const Point& zero);

}  // namespace drsplit
