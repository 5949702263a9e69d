#include "drsplit/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "drsplit/error.hpp"
#include "drsplit/format.hpp"

namespace drsplit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sum_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

std::string to_string(PlanCase c) {
  switch (c) {
    case PlanCase::MonotoneB: return "MonotoneB";
    case PlanCase::NonmonotoneA: return "NonmonotoneA";
    case PlanCase::Unsupported: return "Unsupported";
  }
  return "Unsupported";
}

void PlannerInput::validate() const {
  if (sigmas.size() < 2) throw DomainError("planner: need at least two moduli");
  if (weights.size() != sigmas.size() - 1)
    throw ShapeError("planner: " + std::to_string(weights.size()) + " weights for " +
                     std::to_string(sigmas.size()) + " moduli, expected " +
                     std::to_string(sigmas.size() - 1));
  for (double s : sigmas)
    if (!std::isfinite(s)) throw DomainError("planner: moduli must be finite");
  if (!(mu > 0.0 && mu < 2.0)) throw DomainError("planner: mu must lie in (0, 2)");
  if (lipschitz && lipschitz->size() != sigmas.size() - 1)
    throw ShapeError("planner: one Lipschitz constant per block 1..m-1 required");
}

IndexSets index_sets(const std::vector<double>& sigmas) {
  IndexSets sets;
  for (std::size_t i = 0; i + 1 < sigmas.size(); ++i) {
    if (sigmas[i] == 0.0) continue;
    sets.I.push_back(i);
    (sigmas[i] < 0.0 ? sets.I_minus : sets.I_plus).push_back(i);
  }
  return sets;
}

Classification classify(const PlannerInput& inp) {
  inp.validate();
  const auto& s = inp.sigmas;
  if (std::all_of(s.begin(), s.end(), [](double v) { return v >= 0.0; }))
    return {PlanCase::MonotoneB, "all moduli are nonnegative"};
  const double total = sum_of(s);
  if (s.back() == 0.0)
    return {PlanCase::Unsupported,
            "sigma_m = 0 while some sigma_i < 0; reorder so an operator with nonzero modulus "
            "is last"};
  if (!(total > 0.0))
    return {PlanCase::Unsupported, "sum of moduli is " + format_double(total) + ", not positive"};
  return {PlanCase::NonmonotoneA, "some sigma_i < 0, sigma_m != 0 and the moduli sum to " +
                                      format_double(total) + " > 0"};
}

std::vector<double> feasible_delta(const std::vector<double>& sigmas,
                                   const std::vector<std::size_t>& I) {
  if (sigmas.size() < 2) throw PlannerError("feasible_delta: need at least two moduli");
  const double sm = sigmas.back();
  if (sm == 0.0) throw PlannerError("feasible_delta: sigma_m must be nonzero");
  if (I.empty()) throw PlannerError("feasible_delta: index set is empty");
  if (!(sum_of(sigmas) > 0.0)) throw PlannerError("feasible_delta: moduli must sum to > 0");
  const double n = static_cast<double>(I.size());
  double sum_I = 0.0;
  for (auto i : I) sum_I += sigmas[i];
  std::vector<double> delta;
  delta.reserve(I.size());
  for (auto i : I) {
    const double others = sum_I - sigmas[i];
    delta.push_back(1.0 / n + (others - (n - 1.0) * sigmas[i]) / (sm * n));
  }
  return delta;
}

double step_bound(double lambda_i, double sigma_i, double sigma_m, double delta_i) {
  const double den = -sigma_i * sigma_m * delta_i;
  if (!(den > 0.0)) return kInf;
  return lambda_i * (sigma_i + sigma_m * delta_i) / den;
}

std::vector<double> certificate_slacks(const PlannerInput& inp, const std::vector<std::size_t>& I,
                                       const std::vector<double>& delta, double lambda) {
  if (delta.size() != I.size()) throw ShapeError("certificate_slacks: delta does not match I");
  const double sm = inp.sigmas.back();
  std::vector<double> out;
  out.reserve(I.size());
  for (std::size_t j = 0; j < I.size(); ++j) {
    const std::size_t i = I[j];
    const double si = inp.sigmas[i];
    const double li = inp.weights[i];
    out.push_back(1.0 + (lambda / li) * si * sm * delta[j] / (si + sm * delta[j]) - inp.mu / 2.0);
  }
  return out;
}

PlannerResult optimal_delta(const PlannerInput& inp) {
  const Classification cls = classify(inp);
  PlannerResult res;
  res.plan_case = cls.plan_case;
  res.note = cls.reason;
  const IndexSets sets = index_sets(inp.sigmas);
  res.index_set = sets.I;
  if (cls.plan_case == PlanCase::MonotoneB) {
    res.lambda_bar_star = kInf;
    res.t_star = kInf;
    res.certificate_lambda = kInf;
    return res;
  }
  if (cls.plan_case == PlanCase::Unsupported)
    throw PlannerError("planner: unsupported modulus profile: " + cls.reason);

  const double sm = inp.sigmas.back();
  const auto& I = sets.I;
  // g(t) = sigma_m (1 - sum_i delta_i(t)) is strictly decreasing with g(0) = sum of moduli
  auto g = [&](double t) {
    double v = sm;
    for (auto i : I) v += inp.weights[i] * inp.sigmas[i] / (t * inp.sigmas[i] + inp.weights[i]);
    return v;
  };

  double lo = 0.0;
  double g_lo = g(0.0);
  double hi;
  double g_hi;
  if (!sets.I_minus.empty()) {
    hi = kInf;
    for (auto i : sets.I_minus) hi = std::min(hi, inp.weights[i] / (-inp.sigmas[i]));
    g_hi = -kInf;
  } else {
    hi = 1.0;
    g_hi = g(hi);
    for (int d = 0; g_hi > 0.0 && d < 2000; ++d) {
      lo = hi;
      g_lo = g_hi;
      hi *= 2.0;
      g_hi = g(hi);
    }
  }
  if (!(g_lo > 0.0) || !(g_hi < 0.0))
    throw PlannerError("planner: no root in bracket, g(" + format_double(lo) + ") = " +
                       format_double(g_lo) + ", g(" + format_double(hi) +
                       ") = " + format_double(g_hi));

  for (int it = 0; it < 5000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double gm = g(mid);
    if (gm > g_lo || gm < g_hi) res.root_monotone = false;
    if (gm > 0.0) {
      lo = mid;
      g_lo = gm;
    } else if (gm < 0.0) {
      hi = mid;
      g_hi = gm;
    } else {
      lo = hi = mid;
      break;
    }
  }
  const double t = std::abs(g_lo) <= std::abs(g_hi) ? lo : hi;

  res.t_star = t;
  res.lambda_bar_star = (1.0 - inp.mu / 2.0) * t;
  res.delta_star.reserve(I.size());
  for (auto i : I)
    res.delta_star.push_back(-inp.weights[i] * inp.sigmas[i] /
                             (sm * (t * inp.sigmas[i] + inp.weights[i])));
  res.certificate_lambda = 0.99 * res.lambda_bar_star;
  res.certificate = certificate_slacks(inp, I, res.delta_star, res.certificate_lambda);
  if (!res.root_monotone) res.note += "; root function was not monotone on the bracket";
  return res;
}

namespace {

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

// value of min_i (1 - mu/2) f_i over I, or -inf when delta leaves the feasible set
double brute_value(const PlannerInput& inp, const std::vector<std::size_t>& I,
                   const std::vector<double>& delta) {
  const double sm = inp.sigmas.back();
  double v = kInf;
  for (std::size_t j = 0; j < I.size(); ++j) {
    const double si = inp.sigmas[I[j]];
    if (!(si + sm * delta[j] > 0.0)) return -kInf;
    v = std::min(v, (1.0 - inp.mu / 2.0) * step_bound(inp.weights[I[j]], si, sm, delta[j]));
  }
  return v;
}

double sup_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s = std::max(s, std::abs(e));
  return s;
}

}  // namespace

BruteForceResult brute_force_delta(const PlannerInput& inp, int grid, int levels) {
  inp.validate();
  if (grid < 1) throw DomainError("brute_force_delta: grid must be positive");
  if (levels < 1) throw DomainError("brute_force_delta: levels must be positive");
  const double sm = inp.sigmas.back();
  if (sm == 0.0) throw PlannerError("brute_force_delta: sigma_m must be nonzero");
  const auto I = index_sets(inp.sigmas).I;
  if (I.empty()) throw PlannerError("brute_force_delta: index set is empty");
  const std::size_t n = I.size();

  if (n == 1) {
    const std::vector<double> delta{1.0};
    const double v = brute_value(inp, I, delta);
    if (v == -kInf) throw PlannerError("brute_force_delta: empty feasible grid");
    return {delta, v};
  }

  // every delta_i lies between its own constraint and the sum-one slice
  std::vector<double> bound(n);
  for (std::size_t j = 0; j < n; ++j) bound[j] = -inp.sigmas[I[j]] / sm;
  const double bound_sum = sum_of(bound);
  Box box;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double other = 1.0 - (bound_sum - bound[j]);
    box.lo.push_back(sm > 0.0 ? bound[j] : other);
    box.hi.push_back(sm > 0.0 ? other : bound[j]);
  }
  const Box full = box;

  BruteForceResult best{{}, -kInf};
  std::vector<double> delta(n);
  std::vector<long> idx(n - 1, 0);
  for (int level = 0; level < levels; ++level) {
    std::vector<double> step(n - 1);
    bool empty_box = false;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      if (!(box.hi[j] > box.lo[j])) empty_box = true;
      step[j] = (box.hi[j] - box.lo[j]) / grid;
    }
    if (empty_box) break;
    std::fill(idx.begin(), idx.end(), 0);
    for (;;) {
      double partial = 0.0;
      for (std::size_t j = 0; j + 1 < n; ++j) {
        delta[j] = box.lo[j] + static_cast<double>(idx[j]) * step[j];
        partial += delta[j];
      }
      delta[n - 1] = 1.0 - partial;
      const double v = brute_value(inp, I, delta);
      if (v > best.lambda_bar ||
          (v == best.lambda_bar && v > -kInf && sup_norm(delta) < sup_norm(best.delta)))
        best = {delta, v};
      std::size_t d = 0;
      while (d + 1 < n && ++idx[d] > grid) idx[d++] = 0;
      if (d + 1 == n) break;
    }
    if (best.lambda_bar == -kInf) break;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      // halve the window around the incumbent; a tight window can miss a thin ridge
      const double half = std::max(2.0 * step[j], 0.25 * (box.hi[j] - box.lo[j]));
      box.lo[j] = std::max(full.lo[j], best.delta[j] - half);
      box.hi[j] = std::min(full.hi[j], best.delta[j] + half);
    }
  }
  if (best.lambda_bar == -kInf) throw PlannerError("brute_force_delta: empty feasible grid");
  return best;
}

std::optional<double> naive_stepsize(const std::vector<double>& sigmas, double mu) {
  if (sigmas.size() < 2) throw DomainError("naive_stepsize: need at least two moduli");
  if (!(mu > 0.0 && mu < 2.0)) throw DomainError("naive_stepsize: mu must lie in (0, 2)");
  const double m1 = static_cast<double>(sigmas.size() - 1);
  const double shat = *std::min_element(sigmas.begin(), sigmas.end() - 1);
  const double sm = sigmas.back();
  if (shat + sm / m1 > 0.0) {
    const double den = shat * m1 + sm;
    const double s = shat * sm / den;
    if (s >= 0.0) return kInf;
    return (mu / 2.0 - 1.0) * den / (m1 * shat * sm);
  }
  if (shat == 0.0 && sm == 0.0) return kInf;
  return std::nullopt;
}

SmoothStepsize smooth_stepsize(const std::vector<double>& lipschitz,
                               const std::vector<double>& sigmas, const Weights& w, double mu) {
  if (lipschitz.size() != sigmas.size() || sigmas.size() != w.size())
    throw ShapeError("smooth_stepsize: L, sigma and weights must have equal length");
  if (!(mu > 0.0 && mu < 2.0)) throw DomainError("smooth_stepsize: mu must lie in (0, 2)");
  SmoothStepsize out;
  out.lambda_max = kInf;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    const double L = lipschitz[i];
    const double s = sigmas[i];
    if (!(s <= 0.0 && s >= -L))
      throw DomainError("smooth_stepsize: sigma_" + std::to_string(i + 1) +
                        " must lie in [-L_i, 0]");
    double gb;
    if (-2.0 * s < (2.0 - mu) * L)
      gb = 1.0 / L;
    else
      gb = s == 0.0 ? kInf : -(1.0 / s) * (1.0 - mu / 2.0);
    out.gamma_bar.push_back(gb);
    out.lambda_max = std::min(out.lambda_max, w[i] * gb);
  }
  return out;
}

double smooth_coefficient(double lipschitz, double sigma, double mu, double gamma) {
  const double L = lipschitz;
  const double alpha = L + sigma > 0.0 ? mu / (2.0 * (L + sigma)) : kInf;
  const double beta = sigma < 0.0 ? (1.0 - mu / 2.0) / (-sigma) : kInf;
  if (-2.0 * sigma < (2.0 - mu) * L && alpha < gamma && gamma < beta)
    return -(2.0 * gamma * gamma * L * L - mu * gamma * L - (2.0 - mu)) / (2.0 * mu * gamma);
  return -(2.0 * gamma * gamma * sigma * sigma - mu * gamma * sigma - (2.0 - mu)) /
         (2.0 * mu * gamma);
}

}  // namespace drsplit
