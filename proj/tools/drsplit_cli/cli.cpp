#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "drsplit/drsplit.hpp"
#include "json.hpp"
#include "problem_file.hpp"
#include "verify.hpp"

namespace drsplit::cli {

using json = nlohmann::json;

namespace {

// non-finite values are written as strings so the output stays valid JSON
json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json optional_num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

std::vector<double> parse_list(const std::string& s, const char* flag) {
  std::vector<double> out;
  try {
    for (const auto& part : split(s, ',')) out.push_back(parse_double(part));
  } catch (const Error&) {
    throw DomainError(std::string(flag) + ": expected comma-separated numbers, got '" + s + "'");
  }
  if (out.empty()) throw DomainError(std::string(flag) + ": empty list");
  return out;
}

void print(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------- plan

struct PlanArgs {
  std::string sigmas, weights, lipschitz;
  double mu = 1.0;
};

int cmd_plan(const PlanArgs& a, std::ostream& out) {
  PlannerInput inp{parse_list(a.sigmas, "--sigmas"), Weights(parse_list(a.weights, "--weights")),
                   a.mu, std::nullopt};
  if (!a.lipschitz.empty()) inp.lipschitz = parse_list(a.lipschitz, "--lipschitz");
  inp.validate();

  json j;
  j["schema_version"] = 1;
  j["command"] = "plan";
  j["sigmas"] = nums(inp.sigmas);
  j["weights"] = nums(inp.weights.values());
  j["mu"] = inp.mu;
  const Classification cls = classify(inp);
  j["case"] = to_string(cls.plan_case);
  j["reason"] = cls.reason;

  const auto naive = naive_stepsize(inp.sigmas, inp.mu);
  j["naive_lambda"] = optional_num(naive);
  j["naive_applicable"] = naive.has_value();
  j["smooth_lambda_max"] = nullptr;
  if (inp.lipschitz) {
    const std::vector<double> head(inp.sigmas.begin(), inp.sigmas.end() - 1);
    if (inp.lipschitz->size() != head.size())
      throw ShapeError("--lipschitz: expected " + std::to_string(head.size()) + " values");
    try {
      const SmoothStepsize s = smooth_stepsize(*inp.lipschitz, head, inp.weights, inp.mu);
      j["smooth_lambda_max"] = num(s.lambda_max);
      j["smooth_gamma_bar"] = nums(s.gamma_bar);
    } catch (const DomainError& e) {
      j["smooth_note"] = e.what();
    }
  }

  if (cls.plan_case == PlanCase::Unsupported) {
    j["lambda_bar_star"] = nullptr;
    j["delta_star"] = nullptr;
    j["certificate"] = nullptr;
    print(out, j);
    return kUnsupported;
  }
  const PlannerResult r = optimal_delta(inp);
  json idx = json::array();
  for (auto i : r.index_set) idx.push_back(i + 1);
  j["index_set"] = idx;
  j["delta_star"] = nums(r.delta_star);
  j["lambda_bar_star"] = num(r.lambda_bar_star);
  j["t_star"] = r.plan_case == PlanCase::NonmonotoneA ? num(r.t_star) : json(nullptr);
  j["certificate"] = nums(r.certificate);
  j["certificate_lambda"] = num(r.certificate_lambda);
  j["root_monotone"] = r.root_monotone;
  if (!r.note.empty() && r.note != cls.reason) j["note"] = r.note;
  print(out, j);
  return kOk;
}

// --------------------------------------------------------------------- solve

struct SolveArgs {
  std::string problem, out, variant;
  double mu = 1.0;
  std::optional<double> lambda;
  double tol = 1e-6;
  long max_iter = 100000;
  long log_every = 1;
  bool merit = false;
};

json certificate_json(const ZeroCertificate& c) {
  json j;
  j["residual"] = num(c.residual);
  j["tol"] = num(c.tol);
  j["success"] = c.success;
  j["method"] = c.method;
  json u = json::array();
  for (auto i : c.unverifiable) u.push_back(i + 1);
  j["unverifiable"] = u;
  if (c.method == "resolvent") j["spread"] = num(c.spread);
  return j;
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const ProblemFile pf = load_problem(a.problem);
  const InclusionProblem& prob = pf.problem;
  const Weights w = pf.weights ? *pf.weights : Weights::equal(prob.blocks());
  if (w.size() != prob.blocks())
    throw ShapeError("problem: " + std::to_string(w.size()) + " weights for " +
                     std::to_string(prob.blocks()) + " blocks");

  DrParams p;
  p.mu = a.mu;
  p.weights = w;
  p.variant = !a.variant.empty() ? parse_variant(a.variant)
                                 : pf.variant.value_or(Variant::FG);
  p.tol = a.tol;
  p.max_iter = a.max_iter;
  p.log_every = a.log_every;
  p.track_merit = a.merit;

  const PlannerInput inp{prob.sigmas(), w, a.mu, std::nullopt};
  const Classification cls = classify(inp);
  std::string lambda_source;
  std::optional<double> lambda_bar;
  if (cls.plan_case != PlanCase::Unsupported) lambda_bar = optimal_delta(inp).lambda_bar_star;
  if (a.lambda) {
    p.lambda = *a.lambda;
    p.lambda_override = true;
    lambda_source = "override";
    if (!lambda_bar || !(*a.lambda < *lambda_bar))
      err << "warning: lambda " << format_double(*a.lambda)
          << " is outside the certified range (" << cls.reason << ")\n";
  } else if (!lambda_bar) {
    json j;
    j["schema_version"] = 1;
    j["command"] = "solve";
    j["case"] = to_string(cls.plan_case);
    j["reason"] = cls.reason;
    print(out, j);
    err << "error: planner cannot certify a step (" << cls.reason
        << "); pass --lambda to override\n";
    return kUnsupported;
  } else {
    p.lambda = std::isinf(*lambda_bar) ? 1.0 : 0.95 * *lambda_bar;
    lambda_source = std::isinf(*lambda_bar) ? "default" : "planner";
  }

  const Point x0 = pf.x0 ? *pf.x0 : Point::zeros(prob.shape());
  const RunResult r = run(p, prob, embed(x0, prob.blocks()));

  std::filesystem::create_directories(a.out);
  {
    std::ofstream csv(std::filesystem::path(a.out) / "log.csv");
    r.log.write_csv(csv);
    if (!csv) throw Error("cannot write " + (std::filesystem::path(a.out) / "log.csv").string());
  }
  json j;
  j["schema_version"] = 1;
  j["command"] = "solve";
  j["case"] = to_string(cls.plan_case);
  j["variant"] = variant_name(p.variant);
  j["mu"] = p.mu;
  j["lambda"] = num(p.lambda);
  j["lambda_source"] = lambda_source;
  j["lambda_override"] = r.lambda_override;
  j["lambda_bar_star"] = optional_num(lambda_bar);
  j["weights"] = nums(w.values());
  j["tol"] = num(p.tol);
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["final_residual_sq"] = num(r.final_residual_sq);
  j["shadow"] = json::parse(point_to_json(r.shadow));
  j["certificate"] = certificate_json(r.certificate);
  {
    std::ofstream res(std::filesystem::path(a.out) / "result.json");
    res << j.dump(2) << '\n';
    if (!res) throw Error("cannot write " + (std::filesystem::path(a.out) / "result.json").string());
  }
  print(out, j);
  return r.converged ? kOk : kMaxIter;
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
  std::string config, out;
  int parallel = 1;
};

int cmd_experiment(const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
  const covlab::ExperimentConfig config = covlab::load_config(a.config);
  if (a.parallel < 1) throw DomainError("--parallel must be at least 1");
  const covlab::SweepResult s = covlab::sweep(config, a.parallel);
  const auto files = covlab::emit(s.records, s.logs, a.out);
  int failed = 0, terminated = 0;
  for (const auto& r : s.records) {
    if (!r.error.empty()) {
      ++failed;
      err << "run " << covlab::ordering_name(r.ordering) << " seed " << r.seed << ": " << r.error
          << '\n';
    }
    if (r.terminated) ++terminated;
  }
  json j;
  j["schema_version"] = 1;
  j["command"] = "experiment";
  j["runs"] = s.records.size();
  j["terminated"] = terminated;
  j["failed"] = failed;
  json f = json::array();
  for (const auto& p : files) f.push_back(p.filename().string());
  j["files"] = f;
  print(out, j);
  return !s.records.empty() && failed == static_cast<int>(s.records.size()) ? kAllFailed : kOk;
}

// -------------------------------------------------------------------- verify

int cmd_verify(const std::string& suite, std::uint64_t seed, std::ostream& out,
               std::ostream& err) {
  if (!is_suite(suite)) {
    err << "error: unknown suite '" << suite << "' (known: all";
    for (const auto& s : suite_names()) err << ", " << s;
    err << ")\n";
    return kUsage;
  }
  const auto checks = run_suite(suite, seed);
  bool all = true;
  json list = json::array();
  for (const auto& c : checks) {
    all = all && c.ok();
    json e;
    e["suite"] = c.suite;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["total"] = c.total;
    e["ok"] = c.ok();
    if (!c.detail.empty()) e["first_failure"] = c.detail;
    list.push_back(e);
    err << (c.ok() ? "pass " : "FAIL ") << c.suite << '/' << c.name << ' ' << c.passed << '/'
        << c.total << '\n';
  }
  json j;
  j["schema_version"] = 1;
  j["command"] = "verify";
  j["suite"] = suite;
  j["seed"] = seed;
  j["passed"] = all;
  j["checks"] = list;
  print(out, j);
  return all ? kOk : kVerifyFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted product-space Douglas-Rachford splitting", "drsplit"};
  app.require_subcommand(1, 1);

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "certify a step size from the moduli");
  plan_cmd->add_option("--sigmas", plan.sigmas, "sigma_1,...,sigma_m")->required();
  plan_cmd->add_option("--weights", plan.weights, "lambda_1,...,lambda_{m-1}, summing to 1")
      ->required();
  plan_cmd->add_option("--mu", plan.mu, "relaxation in (0, 2)")->capture_default_str();
  plan_cmd->add_option("--lipschitz", plan.lipschitz, "L_1,...,L_{m-1} for smooth blocks");

  SolveArgs solve;
  double lambda = 0.0;
  auto* solve_cmd = app.add_subcommand("solve", "run Douglas-Rachford on a problem file");
  solve_cmd->add_option("--problem", solve.problem, "problem JSON")->required();
  solve_cmd->add_option("--out", solve.out, "output directory")->required();
  solve_cmd->add_option("--mu", solve.mu, "relaxation in (0, 2)")->capture_default_str();
  auto* lambda_opt = solve_cmd->add_option("--lambda", lambda, "step; overrides the planner");
  solve_cmd->add_option("--tol", solve.tol, "stop when the residual drops below")
      ->capture_default_str();
  solve_cmd->add_option("--max-iter", solve.max_iter, "iteration budget")->capture_default_str();
  solve_cmd->add_option("--log-every", solve.log_every, "log cadence")->capture_default_str();
  solve_cmd->add_option("--variant", solve.variant, "FG or GF (default: file, then FG)");
  solve_cmd->add_flag("--merit", solve.merit, "log the merit function (smooth blocks only)");

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "covariance estimation sweep");
  exp_cmd->add_option("--config", exp.config, "config JSON")->required();
  exp_cmd->add_option("--out", exp.out, "output directory")->required();
  exp_cmd->add_option("--parallel", exp.parallel, "worker threads")->capture_default_str();

  std::string suite;
  std::uint64_t seed = 7;
  auto* verify_cmd = app.add_subcommand("verify", "run invariant suites");
  verify_cmd->add_option("--suite", suite, "identities, resolvent, planner, fejer, merit, prox or all")
      ->required();
  verify_cmd->add_option("--seed", seed, "generator seed")->capture_default_str();

  std::vector<std::string> argv_store{"drsplit"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*plan_cmd) return cmd_plan(plan, out);
    if (*solve_cmd) {
      if (*lambda_opt) solve.lambda = lambda;
      return cmd_solve(solve, out, err);
    }
    if (*exp_cmd) return cmd_experiment(exp, out, err);
    if (*verify_cmd) return cmd_verify(suite, seed, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace drsplit::cli
