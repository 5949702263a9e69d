#pragma once

#include <optional>
#include <string>
#include <vector>

#include "drsplit/hilbert.hpp"

namespace drsplit {

enum class PlanCase { MonotoneB, NonmonotoneA, Unsupported };

std::string to_string(PlanCase c);

struct PlannerInput {
  std::vector<double> sigmas;  // sigma_1 .. sigma_m
  Weights weights;             // lambda_1 .. lambda_{m-1}
  double mu = 1.0;
  std::optional<std::vector<double>> lipschitz;  // L_1 .. L_{m-1}

  // throws on length mismatch or mu outside (0, 2)
  void validate() const;
};

// 0-based indices into sigma_1 .. sigma_{m-1}
struct IndexSets {
  std::vector<std::size_t> I;
  std::vector<std::size_t> I_minus;
  std::vector<std::size_t> I_plus;
};

IndexSets index_sets(const std::vector<double>& sigmas);

struct Classification {
  PlanCase plan_case = PlanCase::Unsupported;
  std::string reason;
};

Classification classify(const PlannerInput& inp);

// closed-form admissible delta over I: sums to one and keeps sigma_i + sigma_m delta_i > 0
std::vector<double> feasible_delta(const std::vector<double>& sigmas,
                                   const std::vector<std::size_t>& I);

// f_i(delta_i) = lambda_i (sigma_i + sigma_m delta_i) / (-sigma_i sigma_m delta_i) when the
// denominator is positive, +inf otherwise
double step_bound(double lambda_i, double sigma_i, double sigma_m, double delta_i);

struct PlannerResult {
  PlanCase plan_case = PlanCase::Unsupported;
  std::vector<std::size_t> index_set;  // I, 0-based
  std::vector<double> delta_star;      // aligned with index_set
  double lambda_bar_star = 0.0;        // +inf in the monotone case
  double t_star = 0.0;                 // common value of the f_i at delta_star
  std::vector<double> certificate;     // slacks at certificate_lambda
  double certificate_lambda = 0.0;
  bool root_monotone = true;           // g decreased at every bisection probe
  std::string note;
};

// MonotoneB returns lambda_bar_star = +inf; Unsupported throws PlannerError
PlannerResult optimal_delta(const PlannerInput& inp);

// 1 + (lambda / lambda_i) sigma_i sigma_m delta_i / (sigma_i + sigma_m delta_i) - mu / 2 over I
std::vector<double> certificate_slacks(const PlannerInput& inp, const std::vector<std::size_t>& I,
                                       const std::vector<double>& delta, double lambda);

struct BruteForceResult {
  std::vector<double> delta;  // over I
  double lambda_bar = 0.0;
};

// grid search of max_delta min_i (1 - mu/2) f_i(delta_i) over the sum-one slice, refined
// `levels - 1` times by halving the box around the incumbent; throws PlannerError when no
// grid point is feasible
BruteForceResult brute_force_delta(const PlannerInput& inp, int grid, int levels = 1);

// step bound of the classical analysis under equal weights, on the lambda scale;
// nullopt when neither of its conditions holds
std::optional<double> naive_stepsize(const std::vector<double>& sigmas, double mu);

struct SmoothStepsize {
  std::vector<double> gamma_bar;
  double lambda_max = 0.0;
};

SmoothStepsize smooth_stepsize(const std::vector<double>& lipschitz,
                               const std::vector<double>& sigmas, const Weights& w, double mu);
// descent coefficient c_i(gamma) of a smooth block
double smooth_coefficient(double lipschitz, double sigma, double mu, double gamma);

}  // namespace drsplit
