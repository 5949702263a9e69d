#pragma once

#include <functional>
#include <optional>

#include "drsplit/hilbert.hpp"

namespace drsplit {

// phi(t; omega) = |t| / (1 + omega |t| / 2)
double phi(double t, double omega);

struct ScalarPenalty {
  double omega = 0.0;
  double tau = 0.0;

  double value(double t) const { return tau * phi(t, omega); }
  double sigma() const { return -tau * omega; }
};

Point prox_quadratic_tracking(const Point& x, const Point& target, double gamma);
Point prox_psd(const Point& x, double gamma = 1.0);

// minimizer of kappa * phi(w; omega) + (w - t)^2 / 2, requires kappa * omega < 1
double prox_phi_scalar(double t, double omega, double kappa);
Point prox_phi_elementwise(const Point& x, double omega, double tau, double gamma);
Point prox_phi_spectral(const Point& x, double omega, double tau, double gamma);

using ScalarFunction = std::function<double(double)>;

// exhaustive grid argmin of f(w) + (w - t)^2 / (2 gamma) over [t - radius, t + radius]
double prox_grid_oracle(const ScalarFunction& f, double t, double gamma, double radius,
                        double step);
// radius = 2|t| + 1, step = 1e-6
double prox_grid_oracle(const ScalarFunction& f, double t, double gamma);

// coarse-to-fine grid search ending at `step`; only sound when the prox
// objective has a single basin
double prox_grid_oracle_refined(const ScalarFunction& f, double t, double gamma, double radius,
                                double step);

// grid search that widens the window until the minimizer is interior; returns
// nullopt when the objective keeps decreasing toward the window edge
std::optional<double> prox_scalar_search(const ScalarFunction& f, double t, double gamma,
                                         double max_radius = 1e6);

}  // namespace drsplit
