#pragma once

// Config-driven experiment runner: sweeps (algorithm, horizon, seed) cells,
// computes cumulative regret against a fixed reference value, fits log-log
// growth rates, and emits deterministic CSV outputs.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cmab/cetc.hpp"
#include "cmab/core.hpp"
#include "cmab/environment.hpp"
#include "cmab/offline.hpp"

namespace cmab {

struct EnvironmentSpec {
  std::string kind;  // "coverage" | "independent-cascade"
  // coverage
  std::string features_path;
  std::string weights_path;  // optional
  std::string noise = "bernoulli";  // "bernoulli" | "none"
  // independent-cascade
  std::string edges_path;
  bool symmetrize = true;
  double seed_pool_percentile = 95.0;
  int64_t mc_samples = 10000;
};

struct ConstraintSpec {
  std::string kind;  // "cardinality" | "knapsack" | "unconstrained"
  int k = 0;
  double budget = 0.0;
  std::vector<double> costs;      // inline costs
  std::string costs_csv;          // or a costs file
  bool costs_from_environment = false;
};

struct ExperimentConfig {
  EnvironmentSpec environment;
  ConstraintSpec constraint;
  std::vector<std::string> algorithms;  // "cetc-<offline alg>" or "ogo"
  std::vector<int64_t> horizons;
  int replications = 10;
  uint64_t seed = 0;
  std::string reference = "offline-greedy";  // or "brute-force-opt"
  double eps_prime = 0.1;
  std::string output_dir = "out";
  bool write_traces = true;
  int threads = 1;  // 0 = hardware concurrency
};

// Parses and validates; error messages carry the offending field path.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);
void validate_config(const ExperimentConfig& config);

std::unique_ptr<Environment> build_environment(const ExperimentConfig& config);
Constraint build_constraint(const ExperimentConfig& config, const Environment& env);

enum class ReferencePolicy { OfflineGreedy, BruteForceOpt };

struct ReferenceValue {
  double value = 0.0;       // per-round reference
  double std_error = 0.0;   // Monte-Carlo SE when the mean is estimated
  Subset set;               // the reference set (empty for scaled-OPT)
  std::string description;
};

// offline-greedy: f(S_grd) with the greedy family matched to the constraint
// kind; brute-force-opt: alpha * f(OPT) (requires n <= 20).
ReferenceValue reference_value(const Environment& env, const Constraint& constraint,
                               ReferencePolicy policy, double alpha = 1.0,
                               double eps_prime = 0.1, uint64_t seed = 0);

// R(t) = t*ref - sum_{s<=t} reward_s for t = 1..T.
std::vector<double> cumulative_regret(const std::vector<double>& rewards,
                                      double per_round_reference);

// Trailing mean with partial windows at the head.
std::vector<double> moving_average(const std::vector<double>& series, int window = 100);

// Per-round analysis of one run against a constant reference.  Regret is
// stored raw; it need not be nondecreasing.
struct RegretSeries {
  int64_t horizon = 0;
  double reference = 0.0;
  std::vector<double> cumulative_reward;
  std::vector<double> cumulative_regret;
  std::vector<double> smoothed_reward;  // trailing mean, window 100 by default
};

RegretSeries analyze_trace(const RunTrace& trace, double per_round_reference,
                           int window = 100);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  int used = 0;
  int dropped = 0;  // nonpositive-regret points skipped
};

// Least-squares slope of ln(regret) against ln(horizon); needs >= 3 usable
// points.
SlopeFit loglog_slope(const std::vector<double>& horizons,
                      const std::vector<double>& regrets);

struct SummaryRow {
  std::string algorithm;
  int64_t horizon = 0;
  int replications = 0;
  double reference = 0.0;
  double reference_se = 0.0;  // nonzero when the reference mean is Monte-Carlo
  double mean_reward = 0.0;   // cumulative
  double se_reward = 0.0;
  double mean_regret = 0.0;   // cumulative, at the horizon
  double se_regret = 0.0;
};

struct ExperimentResult {
  ReferenceValue reference;
  std::vector<SummaryRow> summary;
  std::vector<std::pair<std::string, SlopeFit>> slopes;
  std::vector<std::string> files_written;
  // final cumulative rewards, indexed [algorithm][horizon][replication]
  std::vector<std::vector<std::vector<double>>> rewards;
};

// Runs every (algorithm, horizon, replication) cell, writes summary.csv,
// slopes.csv and optionally per-run traces under config.output_dir.
// Deterministic for a fixed config and master seed, independent of threads.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace cmab
