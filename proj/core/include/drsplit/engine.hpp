#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "drsplit/hilbert.hpp"
#include "drsplit/reformulation.hpp"

namespace drsplit {

struct DrParams {
  double mu = 1.0;
  double lambda = 0.0;
  Weights weights = Weights::equal(1);
  Variant variant = Variant::FG;
  long max_iter = 100000;
  double tol = 1e-6;
  long log_every = 1;
  // store every x^k for a post-hoc Fejer replay
  bool keep_iterates = false;
  // log merit_V; blocks 1..m-1 must be smooth with values
  bool track_merit = false;
  // lambda was supplied by the user rather than certified by the planner
  bool lambda_override = false;
};

// throws DomainError on mu outside (0, 2), non-positive lambda, tol or log cadence
void validate(const DrParams& params);

// x holds x^{k}; after dr_step, z and y hold the resolvent outputs computed from the
// previous x and k counts completed steps. For FG every block of y is the same point.
struct DrState {
  Stack x;
  Stack z;
  Stack y;
  long k = 0;
};

DrState initial_state(const Stack& x0);

DrState dr_step(const DrParams& params, const InclusionProblem& prob, const DrState& state);

// T x written with reflected warped resolvents: ((2 - mu) x + mu R_G R_F x) / 2 for FG,
// with F and G swapped for GF
Stack dr_map_reflected(const DrParams& params, const InclusionProblem& prob, const Stack& x);
Stack reflected_F_warped(const ReformulationContext& ctx, const InclusionProblem& prob,
                         const Stack& x);
Stack reflected_G_warped(const ReformulationContext& ctx, const InclusionProblem& prob,
                         const Stack& x);

struct Residual {
  Stack blocks;           // block i = (lambda_i / lambda)(z_i - y_i)
  double inf_f_sq = 0.0;  // max over blocks of the mean squared entry
};

Residual residual(const Stack& z, const Point& y, double lambda, const Weights& w);
Residual residual(const Stack& z, const Stack& y, double lambda, const Weights& w);

struct LogRow {
  long k = 0;
  double residual_sq = 0.0;
  double k_residual_sq = 0.0;
  std::optional<double> fejer_dist;
  std::optional<double> merit;

  friend bool operator==(const LogRow&, const LogRow&) = default;
};

class IterateLog {
 public:
  // rows must arrive with strictly increasing k
  void push(const LogRow& row);
  const std::vector<LogRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  // fills fejer_dist for rows whose k indexes into distances
  void attach_fejer(const std::vector<double>& distances);

  static const char* csv_header();
  void write_csv(std::ostream& out) const;
  static IterateLog read_csv(std::istream& in);

  friend bool operator==(const IterateLog&, const IterateLog&) = default;

 private:
  std::vector<LogRow> rows_;
};

struct RunResult {
  DrState state;
  // y^k for FG, the common block of z^k for GF
  Point shadow;
  IterateLog log;
  ZeroCertificate certificate;
  bool converged = false;
  long iterations = 0;  // k of the last residual evaluated
  double final_residual_sq = 0.0;
  // x^0, ..., x^{k+1} when keep_iterates is set
  std::vector<Stack> iterates;
  bool lambda_override = false;
};

RunResult run(const DrParams& params, const InclusionProblem& prob, const Stack& x0);

struct FejerReport {
  std::vector<double> distances;
  std::optional<std::size_t> first_violation;
  bool monotone() const { return !first_violation.has_value(); }
};

// Lambda-norm distances to the fixed point; a violation is an increase beyond
// slack * max(1, first distance)
FejerReport fejer_monitor(const std::vector<Stack>& iterates, const Stack& fixed_point,
                          const Weights& w, double slack = 1e-10);

struct RateReport {
  bool eligible = false;  // at least 100 rows
  double head_mean = 0.0;
  double tail_mean = 0.0;
  bool decay_ok = false;
  double tail_increment_fraction = 0.0;
  bool plateau_ok = false;
  std::vector<double> k_residual_sq;
  std::string diagnostic;
  bool passed() const { return eligible && decay_ok; }
};

RateReport rate_monitor(const IterateLog& log);

// V = sum_i [f_i(z_i) + <grad f_i(z_i), y - z_i> + |y - z_i|^2 / (2 gamma_i)] + f_m(y)
double merit_V(const InclusionProblem& prob, const DrState& state,
               const std::vector<double>& gammas);

}  // namespace drsplit
