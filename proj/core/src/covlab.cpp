#include "drsplit/covlab.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "drsplit/error.hpp"
#include "drsplit/format.hpp"
#include "drsplit/planner.hpp"
#include "json.hpp"
#include "svg.hpp"

namespace drsplit::covlab {

using nlohmann::json;

std::string ordering_name(const Ordering& o) {
  return std::to_string(o[0]) + "-" + std::to_string(o[1]) + "-" + std::to_string(o[2]) + "-" +
         std::to_string(o[3]);
}

namespace {

void check_ordering(const Ordering& o) {
  std::array<int, 4> sorted = o;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != Ordering{1, 2, 3, 4})
    throw DomainError("ordering " + ordering_name(o) + " is not a permutation of 1..4");
  if (o[3] == 1)
    throw DomainError("ordering " + ordering_name(o) + " puts the PSD indicator last");
}

}  // namespace

Ordering parse_ordering(const std::string& s) {
  const auto parts = split(s, '-');
  if (parts.size() != 4) throw DomainError("ordering '" + s + "' must look like 1-2-3-4");
  Ordering o{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (parts[i].size() != 1 || parts[i][0] < '1' || parts[i][0] > '4')
      throw DomainError("ordering '" + s + "' has an invalid entry");
    o[i] = parts[i][0] - '0';
  }
  check_ordering(o);
  return o;
}

void ExperimentConfig::validate() const {
  if (K < 1) throw DomainError("config: K must be at least 1");
  if (p < K) throw DomainError("config: p must be at least K");
  if (n < 2) throw DomainError("config: n must be at least 2");
  if (seeds.empty()) throw DomainError("config: seeds must be nonempty");
  if (!(tau0 >= 0.0) || !(tau1 >= 0.0)) throw DomainError("config: tau0 and tau1 must be >= 0");
  if (!(omega0 >= 0.0) || !(omega1 >= 0.0))
    throw DomainError("config: omega0 and omega1 must be >= 0");
  if (!(mu > 0.0 && mu < 2.0)) throw DomainError("config: mu must lie in (0, 2)");
  if (orderings.empty()) throw DomainError("config: orderings must be nonempty");
  for (const auto& o : orderings) check_ordering(o);
  if (weight_grid_denominator < 3)
    throw DomainError("config: weight_grid_step must be at most 1/3");
  if (!(tol > 0.0)) throw DomainError("config: tol must be positive");
  if (max_iter < 0) throw DomainError("config: max_iter must be nonnegative");
  if (!(step_factor > 0.0 && step_factor < 1.0))
    throw DomainError("config: step_factor must lie in (0, 1)");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DomainError("config: expected a JSON object");
  static const std::set<std::string> known{"p",      "K",      "n",    "seeds",
                                           "tau0",   "tau1",   "omega0", "omega1",
                                           "mu",     "orderings", "weight_grid_step",
                                           "tol",    "max_iter", "step_factor"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw DomainError("config: unknown field '" + key + "'");

  ExperimentConfig c;
  try {
    if (j.contains("p")) c.p = j.at("p").get<int>();
    if (j.contains("K")) c.K = j.at("K").get<int>();
    if (j.contains("n")) c.n = j.at("n").get<int>();
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("tau0")) c.tau0 = j.at("tau0").get<double>();
    if (j.contains("tau1")) c.tau1 = j.at("tau1").get<double>();
    if (j.contains("omega0")) c.omega0 = j.at("omega0").get<double>();
    if (j.contains("omega1")) c.omega1 = j.at("omega1").get<double>();
    if (j.contains("mu")) c.mu = j.at("mu").get<double>();
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("max_iter")) c.max_iter = j.at("max_iter").get<long>();
    if (j.contains("step_factor")) c.step_factor = j.at("step_factor").get<double>();
    if (j.contains("orderings")) {
      c.orderings.clear();
      for (const auto& o : j.at("orderings")) {
        if (o.is_string()) {
          c.orderings.push_back(parse_ordering(o.get<std::string>()));
        } else {
          const auto v = o.get<std::vector<int>>();
          if (v.size() != 4) throw DomainError("config: an ordering needs four entries");
          c.orderings.push_back({v[0], v[1], v[2], v[3]});
        }
      }
    }
    if (j.contains("weight_grid_step")) {
      const auto& s = j.at("weight_grid_step");
      if (s.is_string()) {
        const auto parts = split(s.get<std::string>(), '/');
        if (parts.size() != 2 || parts[0] != "1")
          throw DomainError("config: weight_grid_step must be 1/N");
        c.weight_grid_denominator = std::stoi(parts[1]);
      } else {
        const double step = s.get<double>();
        if (!(step > 0.0)) throw DomainError("config: weight_grid_step must be positive");
        const long den = std::lround(1.0 / step);
        if (den < 1 || std::abs(1.0 / static_cast<double>(den) - step) > 1e-9)
          throw DomainError("config: weight_grid_step must be the reciprocal of an integer");
        c.weight_grid_denominator = static_cast<int>(den);
      }
    }
  } catch (const json::exception& e) {
    throw DomainError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw DomainError("config: weight_grid_step must be 1/N");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Instance generate_instance(int p, int K, int n, std::uint64_t seed) {
  if (K < 1 || p < K) throw DomainError("generate_instance: need p >= K >= 1");
  if (n < 2) throw DomainError("generate_instance: need n >= 2");
  std::mt19937_64 rng(seed);

  // uniform composition of p into K positive parts: K - 1 distinct cuts in 1..p-1
  std::vector<int> slots(static_cast<std::size_t>(p - 1));
  for (int i = 0; i < p - 1; ++i) slots[static_cast<std::size_t>(i)] = i + 1;
  for (int i = 0; i < K - 1; ++i) {
    std::uniform_int_distribution<int> pick(i, p - 2);
    std::swap(slots[static_cast<std::size_t>(i)], slots[static_cast<std::size_t>(pick(rng))]);
  }
  std::vector<int> cuts(slots.begin(), slots.begin() + (K - 1));
  std::sort(cuts.begin(), cuts.end());
  Instance inst;
  int prev = 0;
  for (int c : cuts) {
    inst.block_sizes.push_back(c - prev);
    prev = c;
  }
  inst.block_sizes.push_back(p - prev);

  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd s0 = Eigen::MatrixXd::Zero(p, p);
  int off = 0;
  for (int b : inst.block_sizes) {
    Eigen::VectorXd v(b);
    for (int i = 0; i < b; ++i) v(i) = unif(rng);
    s0.block(off, off, b, b) = v * v.transpose();
    off += b;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s0);
  if (es.info() != Eigen::Success) throw SolveError("generate_instance: eigensolve failed");
  const Eigen::MatrixXd root = es.eigenvectors() *
                               es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                               es.eigenvectors().transpose();

  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd X(p, n);
  for (int l = 0; l < n; ++l) {
    Eigen::VectorXd z(p);
    for (int i = 0; i < p; ++i) z(i) = gauss(rng);
    X.col(l) = root * z;
  }
  const Eigen::VectorXd mean = X.rowwise().mean();
  const Eigen::MatrixXd centered = X.colwise() - mean;
  const Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(n - 1);

  inst.sigma0 = Point::symmetric(s0);
  inst.y = Point::symmetric(cov);
  return inst;
}

namespace {

OperatorSpec term(int id, const Point& y, const ExperimentConfig& c) {
  switch (id) {
    case 1: return OperatorSpec::psd_indicator();
    case 2: return OperatorSpec::quadratic_tracking(y);
    case 3: return OperatorSpec::phi_spectral(c.tau0, c.omega0);
    case 4: return OperatorSpec::phi_elementwise(c.tau1, c.omega1);
    default: throw DomainError("unknown term " + std::to_string(id));
  }
}

}  // namespace

InclusionProblem build_problem(const Ordering& ordering, const Point& y,
                               const ExperimentConfig& config) {
  check_ordering(ordering);
  std::vector<OperatorSpec> ops;
  for (int id : ordering) ops.push_back(term(id, y, config));
  return InclusionProblem(std::move(ops), y.shape());
}

std::vector<double> sigma_profile(const Ordering& ordering, const ExperimentConfig& config) {
  check_ordering(ordering);
  const std::array<double, 4> by_term{0.0, 1.0, -config.tau0 * config.omega0,
                                      -config.tau1 * config.omega1};
  std::vector<double> s;
  for (int id : ordering) s.push_back(by_term[static_cast<std::size_t>(id - 1)]);
  return s;
}

double mse(const Point& yk, const Point& sigma0) { return (yk - sigma0).mean_square(); }

std::vector<std::array<double, 3>> weight_grid(int denominator) {
  if (denominator < 3) throw DomainError("weight_grid: denominator must be at least 3");
  std::vector<std::array<double, 3>> out;
  const double d = static_cast<double>(denominator);
  for (int a = 1; a < denominator; ++a)
    for (int b = 1; a + b < denominator; ++b) {
      const int c = denominator - a - b;
      out.push_back({a / d, b / d, c / d});
    }
  return out;
}

bool RunRecord::same_row(const RunRecord& o) const {
  return ordering == o.ordering && weights == o.weights && seed == o.seed &&
         iterations == o.iterations && mse == o.mse && terminated == o.terminated;
}

namespace {

Weights to_weights(const std::array<double, 3>& w) {
  // renormalize so the sum is one within rounding
  const double s = w[0] + w[1] + w[2];
  return Weights({w[0] / s, w[1] / s, w[2] / s});
}

RunRecord run_instance(const ExperimentConfig& config, const Instance& inst,
                       const Ordering& ordering, const std::array<double, 3>& weights,
                       std::uint64_t seed, IterateLog* log) {
  RunRecord rec;
  rec.ordering = ordering;
  rec.weights = weights;
  rec.seed = seed;
  rec.raw_mse = mse(inst.y, inst.sigma0);
  try {
    const Weights w = to_weights(weights);
    PlannerInput inp{sigma_profile(ordering, config), w, config.mu, std::nullopt};
    const PlannerResult plan = optimal_delta(inp);
    DrParams params;
    params.mu = config.mu;
    params.lambda = std::isfinite(plan.lambda_bar_star)
                        ? config.step_factor * plan.lambda_bar_star
                        : 1.0;
    params.weights = w;
    params.max_iter = config.max_iter;
    params.tol = config.tol;
    const InclusionProblem prob = build_problem(ordering, inst.y, config);
    const RunResult res = run(params, prob, embed(inst.y, 3));
    rec.iterations = res.iterations;
    rec.terminated = res.converged;
    rec.final_residual_sq = res.final_residual_sq;
    rec.mse = mse(res.shadow, inst.sigma0);
    if (log) *log = res.log;
  } catch (const std::exception& e) {
    rec.error = e.what();
    rec.terminated = false;
    rec.mse = std::numeric_limits<double>::quiet_NaN();
  }
  return rec;
}

}  // namespace

RunRecord run_one(const ExperimentConfig& config, const Ordering& ordering,
                  const std::array<double, 3>& weights, std::uint64_t seed, IterateLog* log) {
  config.validate();
  const Instance inst = generate_instance(config.p, config.K, config.n, seed);
  return run_instance(config, inst, ordering, weights, seed, log);
}

SweepResult sweep(const ExperimentConfig& config, int parallel) {
  config.validate();
  std::vector<Ordering> orderings = config.orderings;
  std::sort(orderings.begin(), orderings.end());
  orderings.erase(std::unique(orderings.begin(), orderings.end()), orderings.end());
  std::vector<std::uint64_t> seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  const auto grid = weight_grid(config.weight_grid_denominator);

  std::size_t representative = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double gap = 0.0;
    for (double v : grid[g]) gap = std::max(gap, std::abs(v - 1.0 / 3.0));
    if (gap < best_gap) {
      best_gap = gap;
      representative = g;
    }
  }

  std::vector<Instance> instances;
  for (auto s : seeds) instances.push_back(generate_instance(config.p, config.K, config.n, s));

  struct Task {
    std::size_t ordering, weight, seed;
  };
  std::vector<Task> tasks;
  for (std::size_t o = 0; o < orderings.size(); ++o)
    for (std::size_t g = 0; g < grid.size(); ++g)
      for (std::size_t s = 0; s < seeds.size(); ++s) tasks.push_back({o, g, s});

  SweepResult out;
  out.records.resize(tasks.size());
  std::vector<IterateLog> logs(orderings.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const Task& task = tasks[t];
      const bool keep = task.weight == representative && task.seed == 0;
      out.records[t] = run_instance(config, instances[task.seed], orderings[task.ordering],
                                    grid[task.weight], seeds[task.seed],
                                    keep ? &logs[task.ordering] : nullptr);
    }
  };
  const int threads = std::max(1, std::min<int>(parallel, static_cast<int>(tasks.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const RunRecord& a, const RunRecord& b) {
                     return std::tie(a.ordering, a.weights, a.seed) <
                            std::tie(b.ordering, b.weights, b.seed);
                   });
  for (std::size_t o = 0; o < orderings.size(); ++o)
    out.logs[ordering_name(orderings[o])] = std::move(logs[o]);
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  std::map<std::pair<Ordering, std::array<double, 3>>, SummaryRow> groups;
  std::map<std::pair<Ordering, std::array<double, 3>>, int> finite_runs;
  for (const auto& r : records) {
    auto& g = groups[{r.ordering, r.weights}];
    g.kind = "mean";
    g.ordering = r.ordering;
    g.weights = r.weights;
    ++g.runs;
    if (r.terminated) ++g.terminated;
    if (r.error.empty() && std::isfinite(r.mse)) {
      g.mean_iterations += static_cast<double>(r.iterations);
      g.mean_mse += r.mse;
      ++finite_runs[{r.ordering, r.weights}];
    }
  }
  std::vector<SummaryRow> rows;
  for (auto& [key, g] : groups) {
    const int k = finite_runs[key];
    if (k > 0) {
      g.mean_iterations /= k;
      g.mean_mse /= k;
    } else {
      g.mean_iterations = std::numeric_limits<double>::quiet_NaN();
      g.mean_mse = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(g);
  }

  std::vector<SummaryRow> argmins;
  std::set<Ordering> seen;
  for (const auto& r : rows) seen.insert(r.ordering);
  for (const auto& o : seen) {
    double best_mse = std::numeric_limits<double>::infinity();
    double best_it = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      if (r.ordering != o) continue;
      if (r.mean_mse < best_mse) best_mse = r.mean_mse;
      if (r.mean_iterations < best_it) best_it = r.mean_iterations;
    }
    for (const auto& r : rows)
      if (r.ordering == o && r.mean_mse == best_mse) {
        SummaryRow a = r;
        a.kind = "argmin_mse";
        argmins.push_back(a);
      }
    for (const auto& r : rows)
      if (r.ordering == o && r.mean_iterations == best_it) {
        SummaryRow a = r;
        a.kind = "argmin_iterations";
        argmins.push_back(a);
      }
  }
  rows.insert(rows.end(), argmins.begin(), argmins.end());
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "ordering,lambda1,lambda2,lambda3,seed,iterations,mse,terminated\n";
  for (const auto& r : records) {
    out << ordering_name(r.ordering) << ',' << format_double(r.weights[0]) << ','
        << format_double(r.weights[1]) << ',' << format_double(r.weights[2]) << ',' << r.seed
        << ',' << r.iterations << ',' << format_double(r.mse) << ','
        << (r.terminated ? "true" : "false") << '\n';
  }
}

std::vector<RunRecord> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("sweep csv: missing header");
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c = split(line, ',');
    if (c.size() != 8) throw DomainError("sweep csv: malformed row '" + line + "'");
    RunRecord r;
    r.ordering = parse_ordering(c[0]);
    r.weights = {parse_double(c[1]), parse_double(c[2]), parse_double(c[3])};
    r.seed = std::stoull(c[4]);
    r.iterations = std::stol(c[5]);
    r.mse = parse_double(c[6]);
    if (c[7] != "true" && c[7] != "false")
      throw DomainError("sweep csv: terminated must be true or false");
    r.terminated = c[7] == "true";
    out.push_back(r);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "kind,ordering,lambda1,lambda2,lambda3,mean_iterations,mean_mse,runs,terminated\n";
  for (const auto& r : rows) {
    out << r.kind << ',' << ordering_name(r.ordering) << ',' << format_double(r.weights[0])
        << ',' << format_double(r.weights[1]) << ',' << format_double(r.weights[2]) << ','
        << format_double(r.mean_iterations) << ',' << format_double(r.mean_mse) << ','
        << r.runs << ',' << r.terminated << '\n';
  }
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::vector<std::filesystem::path> emit(const std::vector<RunRecord>& records,
                                        const std::map<std::string, IterateLog>& logs,
                                        const std::filesystem::path& out_dir) {
  if (records.empty()) throw DomainError("emit: no records");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;

  std::ostringstream sweep_csv;
  write_sweep_csv(sweep_csv, records);
  written.push_back(out_dir / "sweep.csv");
  write_file(written.back(), sweep_csv.str());

  const auto rows = summarize(records);
  std::ostringstream summary_csv;
  write_summary_csv(summary_csv, rows);
  written.push_back(out_dir / "summary.csv");
  write_file(written.back(), summary_csv.str());

  std::set<Ordering> orderings;
  for (const auto& r : records) orderings.insert(r.ordering);
  for (const auto& o : orderings) {
    const std::string name = ordering_name(o);
    svg::Series series;
    if (auto it = logs.find(name); it != logs.end()) {
      for (const auto& row : it->second.rows()) {
        if (row.k == 0) continue;
        series.x.push_back(static_cast<double>(row.k));
        series.y.push_back(row.k_residual_sq);
      }
    }
    written.push_back(out_dir / ("rate_" + name + ".svg"));
    write_file(written.back(), svg::line_plot("ordering " + name, "k",
                                              "k·‖Res‖²_{∞,F}", series));

    svg::HeatPanel mse_panel{"mean MSE", {}};
    svg::HeatPanel it_panel{"mean iterations", {}};
    double cell = 1.0;
    for (const auto& r : rows) {
      if (r.kind != "mean" || r.ordering != o) continue;
      mse_panel.cells.push_back({r.weights[0], r.weights[1], r.mean_mse});
      it_panel.cells.push_back({r.weights[0], r.weights[1], r.mean_iterations});
      cell = std::min(cell, std::min(r.weights[0], r.weights[1]));
    }
    written.push_back(out_dir / ("heatmap_" + name + ".svg"));
    write_file(written.back(), svg::heatmaps("ordering " + name, "λ1", "λ2", cell,
                                             {mse_panel, it_panel}));
  }
  return written;
}

}  // namespace drsplit::covlab
