#include "drsplit/prox.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "drsplit/error.hpp"

namespace drsplit {

double phi(double t, double omega) {
  const double a = std::abs(t);
  return a / (1.0 + 0.5 * omega * a);
}

Point prox_quadratic_tracking(const Point& x, const Point& target, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("prox_quadratic_tracking: gamma must be positive");
  return (x + gamma * target) * (1.0 / (1.0 + gamma));
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen_of(const Point& x, const char* op) {
  if (x.shape().kind != ShapeKind::symmetric_matrix)
    throw ShapeError(std::string(op) + ": expected a symmetric matrix, got " +
                     x.shape().describe());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x.values());
  if (es.info() != Eigen::Success)
    throw SolveError(std::string(op) + ": eigendecomposition failed");
  return es;
}

Point recompose(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es,
                const Eigen::VectorXd& values) {
  const auto& q = es.eigenvectors();
  return Point::symmetric(q * values.asDiagonal() * q.transpose());
}

void check_phi_args(double omega, double kappa) {
  if (!(omega >= 0.0)) throw DomainError("prox_phi: omega must be nonnegative");
  if (!(kappa >= 0.0)) throw DomainError("prox_phi: kappa must be nonnegative");
  if (kappa * omega >= 1.0)
    throw IllPosedError("prox_phi: kappa * omega = " + std::to_string(kappa * omega) +
                        " >= 1, prox is not single-valued");
}

}  // namespace

Point prox_psd(const Point& x, double /*gamma*/) {
  auto es = eigen_of(x, "prox_psd");
  return recompose(es, es.eigenvalues().cwiseMax(0.0));
}

double prox_phi_scalar(double t, double omega, double kappa) {
  check_phi_args(omega, kappa);
  const double a = std::abs(t);
  if (a == 0.0 || kappa == 0.0) return t;

  // s(w) = w - a + kappa / (1 + omega w / 2)^2 is increasing on [0, inf)
  auto s = [&](double w) {
    const double d = 1.0 + 0.5 * omega * w;
    return w - a + kappa / (d * d);
  };
  auto ds = [&](double w) {
    const double d = 1.0 + 0.5 * omega * w;
    return 1.0 - kappa * omega / (d * d * d);
  };
  auto objective = [&](double w) { return kappa * phi(w, omega) + 0.5 * (w - a) * (w - a); };

  double w = 0.0;
  if (s(0.0) < 0.0) {
    double lo = 0.0;
    double hi = a;
    w = std::max(0.0, a - kappa);
    for (int it = 0; it < 200; ++it) {
      const double v = s(w);
      if (v == 0.0) break;
      if (v < 0.0)
        lo = w;
      else
        hi = w;
      double next = w - v / ds(w);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - w) <= 1e-15 * std::max(1.0, a) || hi - lo <= 1e-15 * std::max(1.0, a)) {
        w = next;
        break;
      }
      w = next;
    }
  }
  if (objective(0.0) <= objective(w)) w = 0.0;
  return std::copysign(w, t);
}

Point prox_phi_elementwise(const Point& x, double omega, double tau, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("prox_phi_elementwise: gamma must be positive");
  if (!(tau >= 0.0)) throw DomainError("prox_phi_elementwise: tau must be nonnegative");
  const double kappa = gamma * tau;
  check_phi_args(omega, kappa);
  Eigen::VectorXd v = x.flat();
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = prox_phi_scalar(v(i), omega, kappa);
  return x.with_flat(v);
}

Point prox_phi_spectral(const Point& x, double omega, double tau, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("prox_phi_spectral: gamma must be positive");
  if (!(tau >= 0.0)) throw DomainError("prox_phi_spectral: tau must be nonnegative");
  const double kappa = gamma * tau;
  check_phi_args(omega, kappa);
  auto es = eigen_of(x, "prox_phi_spectral");
  // singular values of a symmetric matrix are |eigenvalues|; the sign rides along
  Eigen::VectorXd e = es.eigenvalues();
  for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = prox_phi_scalar(e(i), omega, kappa);
  return recompose(es, e);
}

namespace {

struct GridBest {
  double w;
  double value;
};

GridBest grid_scan(const ScalarFunction& f, double t, double gamma, double lo, double hi,
                   double step) {
  const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  GridBest best{lo, std::numeric_limits<double>::infinity()};
  for (long long j = 0; j <= n; ++j) {
    const double w = lo + static_cast<double>(j) * step;
    const double v = f(w) + (w - t) * (w - t) / (2.0 * gamma);
    if (v < best.value || (v == best.value && std::abs(w) < std::abs(best.w))) best = {w, v};
  }
  return best;
}

}  // namespace

double prox_grid_oracle(const ScalarFunction& f, double t, double gamma, double radius,
                        double step) {
  if (!(step > 0.0) || !(radius > 0.0))
    throw DomainError("prox_grid_oracle: step and radius must be positive");
  return grid_scan(f, t, gamma, t - radius, t + radius, step).w;
}

double prox_grid_oracle(const ScalarFunction& f, double t, double gamma) {
  return prox_grid_oracle(f, t, gamma, 2.0 * std::abs(t) + 1.0, 1e-6);
}

double prox_grid_oracle_refined(const ScalarFunction& f, double t, double gamma, double radius,
                                double step) {
  if (!(step > 0.0) || !(radius > 0.0))
    throw DomainError("prox_grid_oracle_refined: step and radius must be positive");
  double lo = t - radius;
  double hi = t + radius;
  double h = std::max(step, (hi - lo) / 2000.0);
  GridBest best = grid_scan(f, t, gamma, lo, hi, h);
  while (h > step) {
    const double next = std::max(step, h / 100.0);
    lo = std::max(t - radius, best.w - 2.0 * h);
    hi = std::min(t + radius, best.w + 2.0 * h);
    h = next;
    best = grid_scan(f, t, gamma, lo, hi, h);
  }
  return best.w;
}

std::optional<double> prox_scalar_search(const ScalarFunction& f, double t, double gamma,
                                         double max_radius) {
  if (!(gamma > 0.0)) throw DomainError("prox_scalar_search: gamma must be positive");
  for (double r = 2.0 * std::abs(t) + 1.0; r <= max_radius; r *= 4.0) {
    const double h = r / 1000.0;
    const GridBest best = grid_scan(f, t, gamma, t - r, t + r, h);
    if (std::abs(best.w - (t - r)) > 2.0 * h && std::abs(best.w - (t + r)) > 2.0 * h)
      return prox_grid_oracle_refined(f, t, gamma, r, 1e-9 * std::max(1.0, r));
  }
  return std::nullopt;
}

}  // namespace drsplit
