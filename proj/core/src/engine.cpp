#include "drsplit/engine.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "drsplit/error.hpp"
#include "drsplit/format.hpp"

namespace drsplit {

void validate(const DrParams& params) {
  if (!(params.mu > 0.0 && params.mu < 2.0))
    throw DomainError("mu must lie in (0, 2), got " + format_double(params.mu));
  if (!(params.lambda > 0.0) || !std::isfinite(params.lambda))
    throw DomainError("lambda must be positive and finite, got " + format_double(params.lambda));
  if (!(params.tol > 0.0)) throw DomainError("tol must be positive");
  if (params.max_iter < 0) throw DomainError("max_iter must be nonnegative");
  if (params.log_every < 1) throw DomainError("log_every must be at least 1");
}

DrState initial_state(const Stack& x0) { return DrState{x0, Stack{}, Stack{}, 0}; }

DrState dr_step(const DrParams& params, const InclusionProblem& prob, const DrState& state) {
  const ReformulationContext ctx(prob, params.weights, params.lambda);
  const Stack& x = state.x;
  const auto& w = params.weights;
  DrState next;
  next.k = state.k + 1;
  std::vector<Point> xs;
  xs.reserve(x.size());
  if (params.variant == Variant::FG) {
    next.z = resolvent_F_warped(ctx, prob, x);
    Point v = Point::zeros(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) v += w[i] * (2.0 * next.z[i] - x[i]);
    const Point y = resolvent(prob.last(), params.lambda, v);
    next.y = embed(y, x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xs.push_back(x[i] + params.mu * (y - next.z[i]));
  } else {
    const Point a = resolvent_G_point(ctx, prob, x);
    next.z = embed(a, x.size());
    std::vector<Point> ys;
    ys.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      ys.push_back(resolvent(prob.op(i), ctx.gamma(i), 2.0 * a - x[i]));
      xs.push_back(x[i] + params.mu * (ys.back() - a));
    }
    next.y = Stack(std::move(ys));
  }
  next.x = Stack(std::move(xs));
  return next;
}

Stack reflected_F_warped(const ReformulationContext& ctx, const InclusionProblem& prob,
                         const Stack& x) {
  return 2.0 * resolvent_F_warped(ctx, prob, x) - x;
}

Stack reflected_G_warped(const ReformulationContext& ctx, const InclusionProblem& prob,
                         const Stack& x) {
  return 2.0 * resolvent_G_warped(ctx, prob, x) - x;
}

Stack dr_map_reflected(const DrParams& params, const InclusionProblem& prob, const Stack& x) {
  const ReformulationContext ctx(prob, params.weights, params.lambda);
  const Stack composed = params.variant == Variant::FG
                             ? reflected_G_warped(ctx, prob, reflected_F_warped(ctx, prob, x))
                             : reflected_F_warped(ctx, prob, reflected_G_warped(ctx, prob, x));
  return 0.5 * ((2.0 - params.mu) * x + params.mu * composed);
}

Residual residual(const Stack& z, const Stack& y, double lambda, const Weights& w) {
  if (z.size() != y.size() || z.size() != w.size())
    throw ShapeError("residual: block counts of z, y and weights differ");
  std::vector<Point> blocks;
  blocks.reserve(z.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    blocks.push_back((w[i] / lambda) * (z[i] - y[i]));
    worst = std::max(worst, blocks.back().mean_square());
  }
  return Residual{Stack(std::move(blocks)), worst};
}

Residual residual(const Stack& z, const Point& y, double lambda, const Weights& w) {
  return residual(z, embed(y, z.size()), lambda, w);
}

void IterateLog::push(const LogRow& row) {
  if (!rows_.empty() && row.k <= rows_.back().k)
    throw DomainError("iterate log: k must increase, got " + std::to_string(row.k) + " after " +
                      std::to_string(rows_.back().k));
  rows_.push_back(row);
}

void IterateLog::attach_fejer(const std::vector<double>& distances) {
  for (auto& row : rows_) {
    if (row.k >= 0 && static_cast<std::size_t>(row.k) < distances.size())
      row.fejer_dist = distances[static_cast<std::size_t>(row.k)];
  }
}

const char* IterateLog::csv_header() { return "k,res_inf_F_sq,k_res_inf_F_sq,fejer_dist,merit_V"; }

void IterateLog::write_csv(std::ostream& out) const {
  out << csv_header() << '\n';
  for (const auto& r : rows_) {
    out << r.k << ',' << format_double(r.residual_sq) << ',' << format_double(r.k_residual_sq)
        << ',' << (r.fejer_dist ? format_double(*r.fejer_dist) : "") << ','
        << (r.merit ? format_double(*r.merit) : "") << '\n';
  }
}

IterateLog IterateLog::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("iterate log: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header()) throw DomainError("iterate log: unexpected header '" + line + "'");
  IterateLog log;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 5) throw DomainError("iterate log: malformed row '" + line + "'");
    LogRow row;
    row.k = std::stol(cells[0]);
    row.residual_sq = parse_double(cells[1]);
    row.k_residual_sq = parse_double(cells[2]);
    if (!cells[3].empty()) row.fejer_dist = parse_double(cells[3]);
    if (!cells[4].empty()) row.merit = parse_double(cells[4]);
    log.push(row);
  }
  return log;
}

namespace {

bool all_evaluable(const InclusionProblem& prob) {
  return std::all_of(prob.operators().begin(), prob.operators().end(),
                     [](const OperatorSpec& op) { return op.evaluable(); });
}

std::vector<double> block_steps(const DrParams& params) {
  std::vector<double> g;
  for (double w : params.weights.values()) g.push_back(params.lambda / w);
  return g;
}

}  // namespace

RunResult run(const DrParams& params, const InclusionProblem& prob, const Stack& x0) {
  validate(params);
  const ReformulationContext ctx(prob, params.weights, params.lambda);
  if (x0.size() != prob.blocks() || !(x0.shape() == prob.shape()))
    throw ShapeError("run: initial stack does not match the problem");

  const std::vector<double> gammas = block_steps(params);
  RunResult result;
  result.lambda_override = params.lambda_override;
  DrState state = initial_state(x0);
  Stack prev_x = x0;
  if (params.keep_iterates) result.iterates.push_back(x0);

  for (long k = 0;; ++k) {
    prev_x = state.x;
    state = dr_step(params, prob, state);
    if (params.keep_iterates) result.iterates.push_back(state.x);
    const double r = residual(state.z, state.y, params.lambda, params.weights).inf_f_sq;
    const bool done = r < params.tol;
    const bool out_of_budget = k >= params.max_iter;
    if (k % params.log_every == 0 || done || out_of_budget) {
      LogRow row{k, r, static_cast<double>(k) * r, std::nullopt, std::nullopt};
      if (params.track_merit) row.merit = merit_V(prob, state, gammas);
      result.log.push(row);
    }
    result.iterations = k;
    result.final_residual_sq = r;
    if (done) {
      result.converged = true;
      break;
    }
    if (out_of_budget) break;
  }

  result.shadow = params.variant == Variant::FG ? state.y[0] : state.z[0];
  const double cert_tol = 10.0 * params.tol;
  result.certificate = all_evaluable(prob)
                           ? zero_certificate(prob, result.shadow, cert_tol)
                           : zero_certificate(ctx, prob, params.variant, prev_x, state.z,
                                              state.y, cert_tol);
  result.state = std::move(state);
  return result;
}

FejerReport fejer_monitor(const std::vector<Stack>& iterates, const Stack& fixed_point,
                          const Weights& w, double slack) {
  FejerReport report;
  report.distances.reserve(iterates.size());
  for (const auto& x : iterates) report.distances.push_back(lambda_norm(x - fixed_point, w));
  if (report.distances.empty()) return report;
  const double allowance = slack * std::max(1.0, report.distances.front());
  for (std::size_t k = 1; k < report.distances.size(); ++k) {
    if (report.distances[k] > report.distances[k - 1] + allowance) {
      report.first_violation = k;
      break;
    }
  }
  return report;
}

RateReport rate_monitor(const IterateLog& log) {
  RateReport report;
  const auto& rows = log.rows();
  for (const auto& r : rows) report.k_residual_sq.push_back(r.k_residual_sq);
  if (rows.size() < 100) {
    report.diagnostic = "needs at least 100 rows, got " + std::to_string(rows.size());
    return report;
  }
  report.eligible = true;
  const std::size_t q = rows.size() / 4;
  double head = 0.0;
  double tail = 0.0;
  double total = 0.0;
  double tail_sum = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    total += rows[i].residual_sq;
    if (i < q) head += rows[i].k_residual_sq;
    if (i >= rows.size() - q) {
      tail += rows[i].k_residual_sq;
      tail_sum += rows[i].residual_sq;
    }
  }
  report.head_mean = head / static_cast<double>(q);
  report.tail_mean = tail / static_cast<double>(q);
  report.decay_ok = report.tail_mean < 0.5 * report.head_mean;
  report.tail_increment_fraction = total > 0.0 ? tail_sum / total : 0.0;
  report.plateau_ok = report.tail_increment_fraction < 0.05;
  if (!report.decay_ok)
    report.diagnostic = "k*res^2 tail mean " + format_double(report.tail_mean) +
                        " is not below half the head mean " + format_double(report.head_mean);
  else if (!report.plateau_ok)
    report.diagnostic = "last quartile adds " + format_double(report.tail_increment_fraction) +
                        " of the residual sum";
  return report;
}

double merit_V(const InclusionProblem& prob, const DrState& state,
               const std::vector<double>& gammas) {
  if (state.z.empty() || state.y.empty()) throw DomainError("merit_V: state has no step yet");
  if (gammas.size() != prob.blocks()) throw ShapeError("merit_V: one gamma per block required");
  const Point& y = state.y[0];
  double v = 0.0;
  for (std::size_t i = 0; i < prob.blocks(); ++i) {
    const auto& op = prob.op(i);
    if (!op.evaluable() || !op.has_value())
      throw DomainError("merit_V: block " + std::to_string(i + 1) + " is not smooth");
    const Point& z = state.z[i];
    const Point d = y - z;
    v += *op.value(z) + op.apply(z).dot(d) + d.squared_norm() / (2.0 * gammas[i]);
  }
  const auto fm = prob.last().value(y);
  if (!fm) throw DomainError("merit_V: last function cannot be evaluated");
  return v + *fm;
}

}  // namespace drsplit
