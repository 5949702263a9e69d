#include "drsplit/operator.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "drsplit/error.hpp"
#include "drsplit/prox.hpp"

namespace drsplit {

namespace {

constexpr int kNewtonMaxIter = 200;
constexpr double kNewtonTol = 1e-12;
// moduli are checked against the spectrum only up to this dimension
constexpr Eigen::Index kSpectrumCheckDim = 500;

double min_symmetric_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolveError("affine operator: eigenvalue solve failed");
  return es.eigenvalues().minCoeff();
}

void require_vector(const Point& x, Eigen::Index n, const char* what) {
  if (x.shape().kind != ShapeKind::vector || x.shape().dim != n)
    throw ShapeError(std::string(what) + ": expected vector(" + std::to_string(n) + "), got " +
                     x.shape().describe());
}

}  // namespace

OperatorSpec OperatorSpec::affine(Eigen::MatrixXd m, Eigen::VectorXd b,
                                  std::optional<double> sigma) {
  if (m.rows() != m.cols()) throw ShapeError("affine operator: matrix must be square");
  if (b.size() != m.rows()) throw ShapeError("affine operator: offset length mismatch");
  if (!m.allFinite() || !b.allFinite()) throw DomainError("affine operator: non-finite entries");
  OperatorSpec op;
  op.kind_ = Kind::affine;
  if (sigma) {
    if (m.rows() <= kSpectrumCheckDim) {
      const double lo = min_symmetric_eigenvalue(m);
      if (*sigma > lo + 1e-9 * std::max(1.0, std::abs(lo)))
        throw DomainError("affine operator: declared sigma " + std::to_string(*sigma) +
                          " exceeds the smallest eigenvalue " + std::to_string(lo));
    }
    op.sigma_ = *sigma;
  } else {
    op.sigma_ = min_symmetric_eigenvalue(m);
  }
  op.lipschitz_ = m.rows() == 0 ? 0.0 : m.operatorNorm();
  op.m_ = std::make_shared<const Eigen::MatrixXd>(std::move(m));
  op.b_ = std::make_shared<const Eigen::VectorXd>(std::move(b));
  return op;
}

OperatorSpec OperatorSpec::zero(Eigen::Index n) {
  return affine(Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), 0.0);
}

OperatorSpec OperatorSpec::gradient(ValueFn f, MapFn grad, double lipschitz, double sigma,
                                    HessianFn hessian) {
  if (!grad) throw DomainError("gradient operator: gradient callback is required");
  if (!(lipschitz >= 0.0)) throw DomainError("gradient operator: L must be nonnegative");
  if (std::abs(sigma) > lipschitz * (1.0 + 1e-12))
    throw DomainError("gradient operator: sigma must lie in [-L, L]");
  OperatorSpec op;
  op.kind_ = Kind::gradient;
  op.sigma_ = sigma;
  op.lipschitz_ = lipschitz;
  op.f_ = std::move(f);
  op.grad_ = std::move(grad);
  op.hessian_ = std::move(hessian);
  return op;
}

OperatorSpec OperatorSpec::prox_defined(ProxFn prox, double sigma, ValueFn value) {
  if (!prox) throw DomainError("prox-defined operator: prox callback is required");
  OperatorSpec op;
  op.kind_ = Kind::prox_defined;
  op.sigma_ = sigma;
  op.prox_ = std::move(prox);
  op.f_ = std::move(value);
  return op;
}

OperatorSpec OperatorSpec::psd_indicator() {
  OperatorSpec op;
  op.kind_ = Kind::psd_indicator;
  op.sigma_ = 0.0;
  return op;
}

OperatorSpec OperatorSpec::quadratic_tracking(Point target) {
  OperatorSpec op;
  op.kind_ = Kind::quadratic_tracking;
  op.sigma_ = 1.0;
  op.lipschitz_ = 1.0;
  op.target_ = std::make_shared<const Point>(std::move(target));
  return op;
}

namespace {

void check_penalty(double tau, double omega) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("phi operator: tau must be >= 0");
  if (!(omega >= 0.0) || !std::isfinite(omega))
    throw DomainError("phi operator: omega must be >= 0");
}

}  // namespace

OperatorSpec OperatorSpec::phi_elementwise(double tau, double omega) {
  check_penalty(tau, omega);
  OperatorSpec op;
  op.kind_ = Kind::phi_elementwise;
  op.tau_ = tau;
  op.omega_ = omega;
  op.sigma_ = -tau * omega;
  return op;
}

OperatorSpec OperatorSpec::phi_spectral(double tau, double omega) {
  check_penalty(tau, omega);
  OperatorSpec op;
  op.kind_ = Kind::phi_spectral;
  op.tau_ = tau;
  op.omega_ = omega;
  op.sigma_ = -tau * omega;
  return op;
}

std::string OperatorSpec::kind_name() const {
  switch (kind_) {
    case Kind::affine: return "affine";
    case Kind::gradient: return "gradient";
    case Kind::prox_defined: return "prox_defined";
    case Kind::psd_indicator: return "psd_indicator";
    case Kind::quadratic_tracking: return "quadratic_tracking";
    case Kind::phi_elementwise: return "phi_elementwise";
    case Kind::phi_spectral: return "phi_spectral";
  }
  return "unknown";
}

bool OperatorSpec::evaluable() const {
  return kind_ == Kind::affine || kind_ == Kind::gradient || kind_ == Kind::quadratic_tracking;
}

Point OperatorSpec::apply(const Point& x) const {
  switch (kind_) {
    case Kind::affine:
      require_vector(x, m_->rows(), "affine operator");
      return Point::vector((*m_) * x.flat() + *b_);
    case Kind::gradient: {
      Point g = grad_(x);
      if (!(g.shape() == x.shape())) throw ShapeError("gradient operator: gradient shape mismatch");
      return g;
    }
    case Kind::quadratic_tracking: return x - *target_;
    default: throw DomainError(kind_name() + " operator cannot be evaluated pointwise");
  }
}

Eigen::MatrixXd OperatorSpec::jacobian(const Point& x) const {
  switch (kind_) {
    case Kind::affine: return *m_;
    case Kind::quadratic_tracking:
      return Eigen::MatrixXd::Identity(x.entries(), x.entries());
    case Kind::gradient: {
      if (hessian_) return hessian_(x);
      require_vector(x, x.entries(), "gradient operator");
      const Eigen::VectorXd base = x.flat();
      const Eigen::Index n = base.size();
      Eigen::MatrixXd jac(n, n);
      for (Eigen::Index j = 0; j < n; ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(base(j)));
        Eigen::VectorXd plus = base;
        Eigen::VectorXd minus = base;
        plus(j) += h;
        minus(j) -= h;
        jac.col(j) = (grad_(Point::vector(plus)).flat() - grad_(Point::vector(minus)).flat()) /
                     (2.0 * h);
      }
      return jac;
    }
    default: throw DomainError(kind_name() + " operator has no Jacobian");
  }
}

bool OperatorSpec::has_value() const {
  switch (kind_) {
    case Kind::affine:
      return m_->size() == 0 ||
             (*m_ - m_->transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m_->cwiseAbs().maxCoeff());
    case Kind::gradient:
    case Kind::prox_defined: return static_cast<bool>(f_);
    default: return true;
  }
}

std::optional<double> OperatorSpec::value(const Point& x) const {
  if (!has_value()) return std::nullopt;
  switch (kind_) {
    case Kind::affine: {
      require_vector(x, m_->rows(), "affine operator");
      const Eigen::VectorXd v = x.flat();
      return 0.5 * v.dot((*m_) * v) + b_->dot(v);
    }
    case Kind::gradient:
    case Kind::prox_defined: return f_(x);
    case Kind::psd_indicator: {
      if (x.shape().kind != ShapeKind::symmetric_matrix) return std::nullopt;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x.values(), Eigen::EigenvaluesOnly);
      const double lo = es.eigenvalues().minCoeff();
      return lo >= -1e-10 * std::max(1.0, x.max_abs()) ? 0.0
                                                       : std::numeric_limits<double>::infinity();
    }
    case Kind::quadratic_tracking: return 0.5 * (x - *target_).squared_norm();
    case Kind::phi_elementwise: {
      double s = 0.0;
      const Eigen::VectorXd v = x.flat();
      for (Eigen::Index i = 0; i < v.size(); ++i) s += phi(v(i), omega_);
      return tau_ * s;
    }
    case Kind::phi_spectral: {
      if (x.shape().kind != ShapeKind::symmetric_matrix) return std::nullopt;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x.values(), Eigen::EigenvaluesOnly);
      double s = 0.0;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        s += phi(es.eigenvalues()(i), omega_);
      return tau_ * s;
    }
  }
  return std::nullopt;
}

const Eigen::MatrixXd& OperatorSpec::matrix() const {
  if (!m_) throw DomainError(kind_name() + " operator has no matrix");
  return *m_;
}

const Eigen::VectorXd& OperatorSpec::offset() const {
  if (!b_) throw DomainError(kind_name() + " operator has no offset");
  return *b_;
}

const Point& OperatorSpec::target() const {
  if (!target_) throw DomainError(kind_name() + " operator has no target");
  return *target_;
}

namespace {

Point affine_resolvent(const OperatorSpec& op, double gamma, const Point& x) {
  const auto& m = op.matrix();
  require_vector(x, m.rows(), "affine resolvent");
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) + gamma * m;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  if (!lu.isInvertible())
    throw IllPosedError("affine resolvent: I + gamma M is singular at gamma = " +
                        std::to_string(gamma));
  return Point::vector(lu.solve(x.flat() - gamma * op.offset()));
}

Point gradient_resolvent(const OperatorSpec& op, double gamma, const Point& x) {
  if (x.shape().kind != ShapeKind::vector)
    throw ShapeError("gradient resolvent: only vector points are supported");
  const Eigen::VectorXd target = x.flat();
  const Eigen::Index n = target.size();
  const double scale = std::max(1.0, target.norm());
  const double strong = 1.0 + gamma * op.sigma();

  auto residual = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    return w + gamma * op.apply(Point::vector(w)).flat() - target;
  };

  Eigen::VectorXd w = target;
  Eigen::VectorXd r = residual(w);
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    const double nr = r.norm();
    if (nr <= kNewtonTol * scale) return Point::vector(w);

    Eigen::MatrixXd jac =
        Eigen::MatrixXd::Identity(n, n) + gamma * op.jacobian(Point::vector(w));
    Eigen::VectorXd d = -jac.fullPivLu().solve(r);
    if (!d.allFinite()) d = -r / strong;

    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      Eigen::VectorXd trial = w + t * d;
      Eigen::VectorXd rt = residual(trial);
      if (rt.norm() < (1.0 - 1e-4 * t) * nr) {
        w = std::move(trial);
        r = std::move(rt);
        accepted = true;
        break;
      }
    }
    if (accepted) continue;

    if (n != 1) break;
    // scalar safeguard: the root lies within |r| / (1 + gamma sigma) of w
    double lo = w(0) - nr / strong;
    double hi = w(0) + nr / strong;
    auto r1 = [&](double v) { return residual(Eigen::VectorXd::Constant(1, v))(0); };
    for (int b = 0; b < 200 && hi - lo > 1e-15 * scale; ++b) {
      const double mid = 0.5 * (lo + hi);
      if (r1(mid) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    w(0) = 0.5 * (lo + hi);
    r = residual(w);
    if (std::abs(r(0)) <= kNewtonTol * scale) return Point::vector(w);
    break;
  }
  if (r.norm() <= kNewtonTol * scale) return Point::vector(w);
  throw SolveError("gradient resolvent: Newton stalled at residual " + std::to_string(r.norm()));
}

}  // namespace

Point resolvent(const OperatorSpec& op, double gamma, const Point& x) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw DomainError("resolvent: gamma must be positive, got " + std::to_string(gamma));
  // the affine solve only needs I + gamma M invertible, which also covers
  // strongly concave quadratics with gamma beyond the prox threshold
  if (op.kind() == OperatorSpec::Kind::affine) return affine_resolvent(op, gamma, x);
  if (1.0 + gamma * op.sigma() <= 0.0)
    throw IllPosedError("resolvent: 1 + gamma * sigma = " +
                        std::to_string(1.0 + gamma * op.sigma()) + " <= 0");
  switch (op.kind()) {
    case OperatorSpec::Kind::gradient: return gradient_resolvent(op, gamma, x);
    case OperatorSpec::Kind::prox_defined: {
      Point out = op.prox_fn()(x, gamma);
      if (!(out.shape() == x.shape())) throw ShapeError("prox callback returned a wrong shape");
      return out;
    }
    case OperatorSpec::Kind::psd_indicator: return prox_psd(x, gamma);
    case OperatorSpec::Kind::quadratic_tracking:
      return prox_quadratic_tracking(x, op.target(), gamma);
    case OperatorSpec::Kind::phi_elementwise:
      return prox_phi_elementwise(x, op.omega(), op.tau(), gamma);
    case OperatorSpec::Kind::phi_spectral:
      return prox_phi_spectral(x, op.omega(), op.tau(), gamma);
    case OperatorSpec::Kind::affine: break;
  }
  throw DomainError("resolvent: unsupported operator kind");
}

Point reflected_resolvent(const OperatorSpec& op, double gamma, const Point& x) {
  return 2.0 * resolvent(op, gamma, x) - x;
}

Modulus modulus_of_F(const std::vector<double>& sigmas) {
  if (sigmas.empty()) throw DomainError("modulus_of_F: empty modulus list");
  return {*std::min_element(sigmas.begin(), sigmas.end()), Modulus::Source::derived};
}

Modulus modulus_of_G(double sigma_m, const Weights& w) {
  return {sigma_m * w.min(), Modulus::Source::derived};
}

}  // namespace drsplit
