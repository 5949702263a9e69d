#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "drsplit/hilbert.hpp"

namespace drsplit {

struct Modulus {
  enum class Source { declared, derived };
  double sigma = 0.0;
  Source source = Source::declared;
};

// Operator with a single-valued resolvent in the regime 1 + gamma sigma > 0.
// Moduli of custom operators are trusted as declared.
class OperatorSpec {
 public:
  enum class Kind {
    affine,
    gradient,
    prox_defined,
    psd_indicator,
    quadratic_tracking,
    phi_elementwise,
    phi_spectral
  };

  using ValueFn = std::function<double(const Point&)>;
  using MapFn = std::function<Point(const Point&)>;
  using HessianFn = std::function<Eigen::MatrixXd(const Point&)>;
  // prox(x, gamma)
  using ProxFn = std::function<Point(const Point&, double)>;

  // A(x) = M x + b on vector points; sigma defaults to the smallest eigenvalue
  // of the symmetric part of M
  static OperatorSpec affine(Eigen::MatrixXd m, Eigen::VectorXd b,
                             std::optional<double> sigma = std::nullopt);
  static OperatorSpec zero(Eigen::Index n);
  // A = grad f with f L-smooth; hessian is optional (finite differences otherwise)
  static OperatorSpec gradient(ValueFn f, MapFn grad, double lipschitz, double sigma,
                               HessianFn hessian = {});
  // A = subdifferential of f, accessed only through its prox
  static OperatorSpec prox_defined(ProxFn prox, double sigma, ValueFn value = {});
  static OperatorSpec psd_indicator();
  static OperatorSpec quadratic_tracking(Point target);
  static OperatorSpec phi_elementwise(double tau, double omega);
  static OperatorSpec phi_spectral(double tau, double omega);

  Kind kind() const { return kind_; }
  std::string kind_name() const;
  double sigma() const { return sigma_; }
  Modulus modulus() const { return {sigma_, Modulus::Source::declared}; }
  const std::optional<double>& lipschitz() const { return lipschitz_; }

  // affine, gradient and quadratic_tracking can be evaluated pointwise
  bool evaluable() const;
  Point apply(const Point& x) const;
  // Jacobian of apply on the flattened point, when available
  Eigen::MatrixXd jacobian(const Point& x) const;
  // function value for kinds built from a function; nullopt otherwise
  std::optional<double> value(const Point& x) const;
  bool has_value() const;

  // parameters for kinds that carry them
  const Eigen::MatrixXd& matrix() const;
  const Eigen::VectorXd& offset() const;
  const Point& target() const;
  double tau() const { return tau_; }
  double omega() const { return omega_; }
  const ProxFn& prox_fn() const { return prox_; }

 private:
  OperatorSpec() = default;

  Kind kind_ = Kind::affine;
  double sigma_ = 0.0;
  std::optional<double> lipschitz_;
  std::shared_ptr<const Eigen::MatrixXd> m_;
  std::shared_ptr<const Eigen::VectorXd> b_;
  std::shared_ptr<const Point> target_;
  double tau_ = 0.0;
  double omega_ = 0.0;
  ValueFn f_;
  MapFn grad_;
  HessianFn hessian_;
  ProxFn prox_;
};

// unique w with x in w + gamma A(w)
Point resolvent(const OperatorSpec& op, double gamma, const Point& x);
Point reflected_resolvent(const OperatorSpec& op, double gamma, const Point& x);

Modulus modulus_of_F(const std::vector<double>& sigmas);
Modulus modulus_of_G(double sigma_m, const Weights& w);

}  // namespace drsplit
