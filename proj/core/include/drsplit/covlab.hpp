#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "drsplit/engine.hpp"
#include "drsplit/hilbert.hpp"
#include "drsplit/reformulation.hpp"

namespace drsplit::covlab {

// permutation of the four terms, 1 = PSD indicator, 2 = quadratic tracking,
// 3 = spectral penalty, 4 = entrywise penalty; the last entry is the distinguished block
using Ordering = std::array<int, 4>;

std::string ordering_name(const Ordering& o);  // "1-2-3-4"
Ordering parse_ordering(const std::string& s);

struct ExperimentConfig {
  int p = 60;
  int K = 3;
  int n = 50;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double tau0 = 0.1;
  double tau1 = 0.1;
  double omega0 = 1.0;
  double omega1 = 1.0;
  double mu = 1.0;
  std::vector<Ordering> orderings{{1, 2, 3, 4}, {1, 4, 3, 2}};
  // weight grid step is 1 / weight_grid_denominator
  int weight_grid_denominator = 30;
  double tol = 1e-6;
  long max_iter = 10000;
  // lambda = step_factor * lambda_bar_star
  double step_factor = 0.95;

  // throws DomainError naming the offending field
  void validate() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text);

struct Instance {
  Point sigma0;
  Point y;
  std::vector<int> block_sizes;
};

Instance generate_instance(int p, int K, int n, std::uint64_t seed);

InclusionProblem build_problem(const Ordering& ordering, const Point& y,
                               const ExperimentConfig& config);
std::vector<double> sigma_profile(const Ordering& ordering, const ExperimentConfig& config);

double mse(const Point& yk, const Point& sigma0);

// weights on the simplex with positive coordinates that are multiples of 1 / denominator
std::vector<std::array<double, 3>> weight_grid(int denominator);

struct RunRecord {
  Ordering ordering{};
  std::array<double, 3> weights{};
  std::uint64_t seed = 0;
  long iterations = 0;
  double mse = 0.0;
  bool terminated = false;
  // not serialized
  double final_residual_sq = 0.0;
  double raw_mse = 0.0;
  std::string error;

  bool same_row(const RunRecord& o) const;
};

struct SweepResult {
  std::vector<RunRecord> records;  // sorted by (ordering, weights, seed)
  // one representative log per ordering: the weights closest to equal, first seed
  std::map<std::string, IterateLog> logs;
};

SweepResult sweep(const ExperimentConfig& config, int parallel = 1);

// runs a single (ordering, weights, seed) cell; failures are captured in the record
RunRecord run_one(const ExperimentConfig& config, const Ordering& ordering,
                  const std::array<double, 3>& weights, std::uint64_t seed,
                  IterateLog* log = nullptr);

struct SummaryRow {
  std::string kind;  // "mean", "argmin_mse" or "argmin_iterations"
  Ordering ordering{};
  std::array<double, 3> weights{};
  double mean_iterations = 0.0;
  double mean_mse = 0.0;
  int runs = 0;
  int terminated = 0;
};

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

void write_sweep_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_sweep_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

// writes sweep.csv, summary.csv and, per ordering, rate_<ordering>.svg and heatmap_<ordering>.svg
std::vector<std::filesystem::path> emit(const std::vector<RunRecord>& records,
                                        const std::map<std::string, IterateLog>& logs,
                                        const std::filesystem::path& out_dir);

}  // namespace drsplit::covlab
