#include "verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "drsplit/drsplit.hpp"

namespace drsplit::cli {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  Eigen::VectorXd vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }
  Eigen::MatrixXd matrix(Eigen::Index n) {
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = normal();
    return m;
  }
  // symmetric matrix with smallest eigenvalue lo
  Eigen::MatrixXd with_min_eig(Eigen::Index n, double lo, double spread = 2.0) {
    Eigen::VectorXd e(n);
    e(0) = lo;
    for (Eigen::Index i = 1; i < n; ++i) e(i) = lo + uniform(0.0, spread);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(matrix(n));
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd m = q * e.asDiagonal() * q.transpose();
    return 0.5 * (m + m.transpose());
  }
  Stack stack(Eigen::Index n, std::size_t blocks) {
    std::vector<Point> b;
    for (std::size_t i = 0; i < blocks; ++i) b.push_back(Point::vector(vector(n)));
    return Stack(std::move(b));
  }
  Weights weights(std::size_t n) {
    std::vector<double> w(n);
    double s = 0.0;
    for (auto& v : w) s += (v = uniform(0.05, 1.0));
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) rest -= (w[i] /= s);
    w.back() = rest;
    return Weights(std::move(w));
  }

 private:
  std::mt19937_64 eng_;
};

class Tally {
 public:
  Tally(std::string suite, std::string name) : c_{std::move(suite), std::move(name), 0, 0, ""} {}
  void expect(bool ok, const std::string& what) {
    ++c_.total;
    if (ok)
      ++c_.passed;
    else if (c_.detail.empty())
      c_.detail = what;
  }
  Check done() const { return c_; }

 private:
  Check c_;
};

double bisect_root(const std::function<double(double)>& h, double x) {
  double r = 1.0 + std::abs(x);
  while (h(-r) > 0.0 || h(r) < 0.0) r *= 2.0;
  double lo = -r, hi = r;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

OperatorSpec scalar_affine(double slope, double offset) {
  return OperatorSpec::affine(Eigen::MatrixXd::Constant(1, 1, slope),
                              Eigen::VectorXd::Constant(1, offset));
}

double sq(double v) { return v * v; }

std::string trial(int t) { return "trial " + std::to_string(t); }

// ---------------------------------------------------------------- identities

std::vector<Check> identities(std::uint64_t seed) {
  Rng g(seed);
  Tally sym("identities", "lambda_inner_symmetric"), bil("identities", "lambda_inner_bilinear"),
      pos("identities", "lambda_inner_positive"), rt("identities", "embed_average_roundtrip"),
      id1("identities", "squared_norm_identity"), id2("identities", "squared_norm_rearranged");
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = static_cast<std::size_t>(g.integer(1, 5));
    const Eigen::Index n = g.integer(1, 5);
    const Weights w = g.weights(k);
    const Stack x = g.stack(n, k), y = g.stack(n, k), u = g.stack(n, k);
    const double a = g.uniform(-3, 3), b = g.uniform(-3, 3);
    sym.expect(std::abs(lambda_inner(x, y, w) - lambda_inner(y, x, w)) <= 1e-12, trial(t));
    const double lhs = lambda_inner(a * x + b * u, y, w);
    const double rhs = a * lambda_inner(x, y, w) + b * lambda_inner(u, y, w);
    bil.expect(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)), trial(t));
    pos.expect(lambda_inner(x, x, w) > 0.0, trial(t));
    const Point p = Point::vector(g.vector(n));
    rt.expect(embed(weighted_average(embed(p, k), w), k) == embed(p, k), trial(t));

    const Point px = Point::vector(g.vector(n)), py = Point::vector(g.vector(n));
    const double l1 = (a * px + b * py).squared_norm();
    const double r1 = a * (a + b) * px.squared_norm() + b * (a + b) * py.squared_norm() -
                      a * b * (px - py).squared_norm();
    id1.expect(std::abs(l1 - r1) <= 1e-10 * std::max(1.0, std::abs(l1)), trial(t));
    if (std::abs(a + b) > 1e-3) {
      const double l2 = a * px.squared_norm() + b * py.squared_norm();
      const double r2 = a * b / (a + b) * (px - py).squared_norm() +
                        (a * px + b * py).squared_norm() / (a + b);
      id2.expect(std::abs(l2 - r2) <= 1e-10 * std::max({1.0, std::abs(l2), std::abs(r2)}),
                 trial(t));
    }
  }
  return {sym.done(), bil.done(), pos.done(), rt.done(), id1.done(), id2.done()};
}

// ----------------------------------------------------------------- resolvent

std::vector<Check> resolvents(std::uint64_t seed) {
  Rng g(seed);
  Tally aff("resolvent", "affine_definition"), grad("resolvent", "gradient_vs_bisection"),
      fw("resolvent", "F_warped_blockwise"), gw("resolvent", "G_warped_definitional"),
      rf("resolvent", "reflected_F_inequality"), rg("resolvent", "reflected_G_inequality"),
      concave("resolvent", "concave_beyond_prox_range");

  for (int t = 0; t < 200; ++t) {
    const double gamma = g.uniform(0.1, 2.0);
    const Eigen::MatrixXd m = g.with_min_eig(3, g.uniform(-0.9 / gamma, 2.0));
    const Eigen::VectorXd b = g.vector(3);
    const Point x = Point::vector(g.vector(3));
    const Point w = resolvent(OperatorSpec::affine(m, b), gamma, x);
    const Eigen::VectorXd r = w.flat() + gamma * (m * w.flat() + b) - x.flat();
    aff.expect(r.norm() <= 1e-10 * std::max(1.0, x.norm()), trial(t));
  }

  for (int t = 0; t < 200; ++t) {
    // A = grad(w^4/4 + c w^2/2)
    const double c = g.uniform(-1.0, 2.0);
    double gamma = g.uniform(0.05, 0.9);
    if (1.0 + gamma * c <= 0.05) gamma = 0.5 / std::abs(c);
    const double x = g.uniform(-5, 5);
    const OperatorSpec op = OperatorSpec::gradient(
        [c](const Point& p) { return sq(sq(p.at(0))) / 4.0 + c * sq(p.at(0)) / 2.0; },
        [c](const Point& p) {
          const double v = p.at(0);
          return Point::scalar(v * v * v + c * v);
        },
        1e6, c);
    const double got = resolvent(op, gamma, Point::scalar(x)).at(0);
    const double ref = bisect_root([&](double v) { return v + gamma * (v * v * v + c * v) - x; }, x);
    grad.expect(std::abs(got - ref) <= 1e-9 * std::max(1.0, std::abs(ref)), trial(t));
  }

  const Shape scalar{ShapeKind::vector, 1};
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = static_cast<std::size_t>(g.integer(1, 4));
    const Weights w = g.weights(k);
    const double lambda = g.uniform(0.05, 1.5);
    std::vector<OperatorSpec> ops;
    std::vector<double> slope(k + 1), off(k + 1);
    for (std::size_t i = 0; i <= k; ++i) {
      const double step = i < k ? lambda / w[i] : lambda;
      slope[i] = g.uniform(-0.9 / step, 3.0);
      off[i] = g.uniform(-2, 2);
      ops.push_back(scalar_affine(slope[i], off[i]));
    }
    const InclusionProblem prob(std::move(ops), scalar);
    const ReformulationContext ctx(prob, w, lambda);
    std::vector<Point> xb;
    for (std::size_t i = 0; i < k; ++i) xb.push_back(Point::scalar(g.uniform(-5, 5)));
    const Stack x(xb);
    const Stack z = resolvent_F_warped(ctx, prob, x);
    bool ok = true;
    for (std::size_t i = 0; i < k; ++i) {
      const double gi = lambda / w[i];
      const double ref = bisect_root(
          [&](double v) { return v + gi * (slope[i] * v + off[i]) - x[i].at(0); }, x[i].at(0));
      ok = ok && std::abs(z[i].at(0) - ref) <= 1e-8;
    }
    fw.expect(ok, trial(t));
    // Lambda x in Lambda a + lambda G(a) reduces to sum_i lambda_i x_i = a + lambda A_m(a)
    const Stack a = resolvent_G_warped(ctx, prob, x);
    const double avg = weighted_average(x, w).at(0);
    const double ref = bisect_root(
        [&](double v) { return v + lambda * (slope[k] * v + off[k]) - avg; }, avg);
    bool same = true;
    for (std::size_t i = 0; i < k; ++i) same = same && std::abs(a[i].at(0) - ref) <= 1e-8;
    gw.expect(same, trial(t));
  }

  for (int t = 0; t < 200; ++t) {
    const std::size_t m = static_cast<std::size_t>(g.integer(2, 5));
    const Weights w = g.weights(m - 1);
    const double lambda = g.uniform(0.05, 1.0);
    std::vector<OperatorSpec> ops;
    for (std::size_t i = 0; i < m; ++i) {
      const double step = i + 1 < m ? lambda / w[i] : lambda;
      ops.push_back(OperatorSpec::affine(g.with_min_eig(3, g.uniform(-0.9 / step, 1.0)), g.vector(3)));
    }
    const InclusionProblem prob(std::move(ops), Shape{ShapeKind::vector, 3});
    const ReformulationContext ctx(prob, w, lambda);
    const Stack x = g.stack(3, m - 1), y = g.stack(3, m - 1);
    {
      const Stack a = resolvent_F_warped(ctx, prob, x), b = resolvent_F_warped(ctx, prob, y);
      double drop = 0.0;
      for (std::size_t i = 0; i + 1 < m; ++i) drop += prob.op(i).sigma() * (a[i] - b[i]).squared_norm();
      const double lhs = sq(lambda_norm((2.0 * a - x) - (2.0 * b - y), w));
      const double rhs = sq(lambda_norm(x - y, w)) - 4.0 * lambda * drop;
      rf.expect(lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs)), trial(t));
    }
    {
      const Stack a = resolvent_G_warped(ctx, prob, x), b = resolvent_G_warped(ctx, prob, y);
      const double lhs = sq(lambda_norm((2.0 * a - x) - (2.0 * b - y), w));
      const double rhs = sq(lambda_norm(x - y, w)) -
                         4.0 * lambda * prob.last().sigma() * sq(lambda_norm(a - b, w));
      rg.expect(lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs)), trial(t));
    }
  }

  // f(t) = -t^2/2: the prox objective is unbounded for gamma > 1, the resolvent is t/(1-gamma)
  for (double gamma : {1.5, 2.0, 3.0, 10.0}) {
    const double t = g.uniform(-3, 3);
    const double w = resolvent(scalar_affine(-1.0, 0.0), gamma, Point::scalar(t)).at(0);
    const bool res_ok = std::abs(w - t / (1.0 - gamma)) <= 1e-12 * std::max(1.0, std::abs(w));
    const bool prox_empty =
        !prox_scalar_search([](double v) { return -0.5 * v * v; }, t, gamma).has_value();
    concave.expect(res_ok && prox_empty, "gamma " + format_double(gamma));
  }
  return {aff.done(), grad.done(), fw.done(), gw.done(), rf.done(), rg.done(), concave.done()};
}

// ------------------------------------------------------------------- planner

PlannerInput random_nonmonotone(Rng& g) {
  for (;;) {
    const std::size_t m = static_cast<std::size_t>(g.integer(2, 5));
    std::vector<double> s(m);
    for (auto& v : s) v = g.uniform(-2.0, 3.0);
    PlannerInput inp{s, g.weights(m - 1), g.uniform(0.1, 1.9), std::nullopt};
    if (classify(inp).plan_case == PlanCase::NonmonotoneA) return inp;
  }
}

std::vector<Check> planner(std::uint64_t seed) {
  Rng g(seed);
  Tally agree("planner", "oracle_agreement"), eq("planner", "equalization"),
      dom("planner", "dominance_over_naive"), slack("planner", "certificate_slacks");
  for (int t = 0; t < 100; ++t) {
    const PlannerInput inp = random_nonmonotone(g);
    const PlannerResult r = optimal_delta(inp);
    const BruteForceResult b = brute_force_delta(inp, 30, 40);
    agree.expect(std::abs(b.lambda_bar - r.lambda_bar_star) <= 1e-3 * r.lambda_bar_star,
                 trial(t) + ": oracle " + format_double(b.lambda_bar) + " vs " +
                     format_double(r.lambda_bar_star));
    bool ok = r.root_monotone;
    double sum = 0.0;
    for (std::size_t j = 0; j < r.index_set.size(); ++j) {
      const std::size_t i = r.index_set[j];
      sum += r.delta_star[j];
      const double f = step_bound(inp.weights[i], inp.sigmas[i], inp.sigmas.back(), r.delta_star[j]);
      ok = ok && std::abs(f - r.t_star) <= 1e-9 * r.t_star;
    }
    eq.expect(ok && std::abs(sum - 1.0) <= 1e-10, trial(t));
    bool below = true;
    for (double s : certificate_slacks(inp, r.index_set, r.delta_star, 0.999 * r.lambda_bar_star))
      below = below && s > 0.0;
    double lo = 1.0;
    for (double s : certificate_slacks(inp, r.index_set, r.delta_star, 1.001 * r.lambda_bar_star))
      lo = std::min(lo, s);
    slack.expect(below && lo <= 0.0, trial(t));
  }
  int t = 0;
  while (dom.done().total < 100 && t < 100000) {
    const PlannerInput base = random_nonmonotone(g);
    ++t;
    const PlannerInput inp{base.sigmas, Weights::equal(base.sigmas.size() - 1), base.mu,
                           std::nullopt};
    const auto naive = naive_stepsize(inp.sigmas, inp.mu);
    if (!naive) continue;
    const double opt = optimal_delta(inp).lambda_bar_star;
    dom.expect(opt >= *naive * (1 - 1e-12), trial(t));
  }
  return {agree.done(), eq.done(), dom.done(), slack.done()};
}

// --------------------------------------------------------------------- fejer

std::vector<Check> fejer(std::uint64_t seed) {
  Rng g(seed);
  Tally fg("fejer", "monotone_FG"), gf("fejer", "monotone_GF");
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = static_cast<std::size_t>(g.integer(2, 5));
    std::vector<double> sig(m);
    for (auto& s : sig) s = g.uniform(-0.5, 2.0);
    PlannerInput inp{sig, g.weights(m - 1), g.uniform(0.2, 1.8), std::nullopt};
    if (classify(inp).plan_case == PlanCase::Unsupported) {
      --t;
      continue;
    }
    const double bar = optimal_delta(inp).lambda_bar_star;
    const double lambda = std::isinf(bar) ? 1.0 : 0.9 * bar;
    std::vector<OperatorSpec> ops;
    Eigen::MatrixXd msum = Eigen::MatrixXd::Zero(3, 3);
    Eigen::VectorXd bsum = Eigen::VectorXd::Zero(3);
    for (double s : sig) {
      const Eigen::MatrixXd mm = g.with_min_eig(3, s);
      const Eigen::VectorXd bb = g.vector(3);
      msum += mm;
      bsum += bb;
      ops.push_back(OperatorSpec::affine(mm, bb));
    }
    const InclusionProblem prob(std::move(ops), Shape{ShapeKind::vector, 3});
    const Point zero = Point::vector(msum.fullPivLu().solve(-bsum));
    const ReformulationContext ctx(prob, inp.weights, lambda);
    for (Variant v : {Variant::FG, Variant::GF}) {
      DrParams p;
      p.mu = inp.mu;
      p.lambda = lambda;
      p.weights = inp.weights;
      p.variant = v;
      p.tol = 1e-14;
      p.max_iter = 2000;
      p.keep_iterates = true;
      const RunResult r = run(p, prob, g.stack(3, m - 1));
      const Stack fp = v == Variant::FG ? fixed_point_from_zero(ctx, prob, zero)
                                        : fixed_point_from_zero_gf(ctx, prob, zero);
      const FejerReport rep = fejer_monitor(r.iterates, fp, inp.weights);
      std::string what = trial(t);
      if (rep.first_violation) what += ": first violation at k = " + std::to_string(*rep.first_violation);
      (v == Variant::FG ? fg : gf).expect(rep.monotone(), what);
    }
  }
  return {fg.done(), gf.done()};
}

// --------------------------------------------------------------------- merit

std::vector<Check> merit(std::uint64_t seed) {
  Rng g(seed);
  Tally descent("merit", "descent_inequality"), pos("merit", "positive_coefficients");
  const double mu = 1.0, kappa = 1.0;
  const Eigen::Index n = 3;
  for (int inst = 0; inst < 3; ++inst) {
    std::vector<OperatorSpec> ops;
    std::vector<double> L, sig;
    for (int i = 0; i < 2; ++i) {
      const double eps = g.uniform(0.05, 0.2);
      const Eigen::MatrixXd q = g.with_min_eig(n, -eps);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q, Eigen::EigenvaluesOnly);
      L.push_back(es.eigenvalues().cwiseAbs().maxCoeff());
      sig.push_back(-eps);
      ops.push_back(OperatorSpec::affine(q, g.vector(n)));
    }
    // f_m = |x|_1 + kappa |x|^2 / 2
    ops.push_back(OperatorSpec::prox_defined(
        [kappa](const Point& v, double gamma) {
          Eigen::VectorXd w = v.flat();
          for (Eigen::Index i = 0; i < w.size(); ++i)
            w(i) = std::copysign(std::max(std::abs(w(i)) - gamma, 0.0), w(i)) / (1.0 + gamma * kappa);
          return Point::vector(w);
        },
        kappa,
        [kappa](const Point& x) { return x.flat().lpNorm<1>() + 0.5 * kappa * x.squared_norm(); }));
    const InclusionProblem prob(std::move(ops), Shape{ShapeKind::vector, n});

    const auto bars = smooth_stepsize(L, sig, Weights::equal(2), mu).gamma_bar;
    // weights proportional to 1 / gamma_bar put every block at the same fraction of its bound
    const double s = 1.0 / bars[0] + 1.0 / bars[1];
    const Weights w({(1.0 / bars[0]) / s, 1.0 - (1.0 / bars[0]) / s});
    const double lambda = 0.9 * w[0] * bars[0];
    const std::vector<double> gammas{lambda / w[0], lambda / w[1]};
    std::vector<double> c;
    for (int i = 0; i < 2; ++i) {
      c.push_back(smooth_coefficient(L[static_cast<std::size_t>(i)], sig[static_cast<std::size_t>(i)], mu,
                                     gammas[static_cast<std::size_t>(i)]));
      pos.expect(c.back() > 0.0, "instance " + std::to_string(inst));
    }
    DrParams p;
    p.mu = mu;
    p.lambda = lambda;
    p.weights = w;
    DrState st = dr_step(p, prob, initial_state(g.stack(n, 2)));
    double v = merit_V(prob, st, gammas);
    bool ok = true;
    std::string what;
    for (int k = 0; k < 1000; ++k) {
      const DrState next = dr_step(p, prob, st);
      const double vn = merit_V(prob, next, gammas);
      double margin = 0.0;
      for (std::size_t i = 0; i < 2; ++i) margin += c[i] * (next.z[i] - st.z[i]).squared_norm();
      if (v - vn < margin - 1e-8 && ok) {
        ok = false;
        what = "instance " + std::to_string(inst) + " step " + std::to_string(k);
      }
      st = next;
      v = vn;
    }
    descent.expect(ok, what);
  }
  return {descent.done(), pos.done()};
}

// ---------------------------------------------------------------------- prox

std::vector<Check> prox(std::uint64_t seed) {
  Rng g(seed);
  Tally scalar("prox", "phi_scalar_vs_grid"), psd("prox", "psd_beats_samples"),
      spec("prox", "spectral_conjugation"), elem("prox", "elementwise_is_scalar");
  for (int t = 0; t < 200; ++t) {
    const double omega = g.uniform(0.0, 3.0);
    const double kappa = g.uniform(0.0, 0.99) / std::max(omega, 0.1);
    const double x = g.uniform(-5, 5);
    const double got = prox_phi_scalar(x, omega, kappa);
    const double ref = prox_grid_oracle_refined(
        [&](double w) { return kappa * phi(w, omega); }, x, 1.0, std::abs(x) + 1.0, 1e-6);
    scalar.expect(std::abs(got - ref) <= 1e-5, trial(t));
  }
  for (int t = 0; t < 3; ++t) {
    const Point x = Point::symmetric(g.matrix(3));
    const double d = (prox_psd(x) - x).norm();
    bool ok = true;
    for (int s = 0; s < 2000; ++s) {
      const Eigen::MatrixXd a = g.matrix(3);
      ok = ok && d <= (Point::symmetric(a * a.transpose()) - x).norm() + 1e-12;
    }
    psd.expect(ok, trial(t));
  }
  for (int t = 0; t < 50; ++t) {
    const Point x = Point::symmetric(g.matrix(4));
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g.matrix(4));
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(4, 4);
    const double tau = g.uniform(0.0, 0.5), gamma = g.uniform(0.1, 1.5);
    const Point lhs =
        prox_phi_spectral(Point::symmetric(q * x.values() * q.transpose()), 1.0, tau, gamma);
    const Point rhs =
        Point::symmetric(q * prox_phi_spectral(x, 1.0, tau, gamma).values() * q.transpose());
    spec.expect((lhs - rhs).norm() <= 1e-10, trial(t));
    const Point e = prox_phi_elementwise(x, 1.0, tau, gamma);
    bool ok = true;
    for (Eigen::Index i = 0; i < x.entries(); ++i)
      ok = ok && e.at(i) == prox_phi_scalar(x.at(i), 1.0, gamma * tau);
    elem.expect(ok, trial(t));
  }
  return {scalar.done(), psd.done(), spec.done(), elem.done()};
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"identities", "resolvent", "planner",
                                              "fejer",      "merit",     "prox"};
  return names;
}

bool is_suite(const std::string& name) {
  const auto& n = suite_names();
  return name == "all" || std::find(n.begin(), n.end(), name) != n.end();
}

std::vector<Check> run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "all") {
    std::vector<Check> out;
    for (const auto& s : suite_names()) {
      auto part = run_suite(s, seed);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  if (name == "identities") return identities(seed);
  if (name == "resolvent") return resolvents(seed);
  if (name == "planner") return planner(seed);
  if (name == "fejer") return fejer(seed);
  if (name == "merit") return merit(seed);
  if (name == "prox") return prox(seed);
  throw DomainError("unknown suite '" + name + "'");
}

}  // namespace drsplit::cli
