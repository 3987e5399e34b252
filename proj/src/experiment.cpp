#include "cmab/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cmab/envs.hpp"
#include "cmab/ogo.hpp"
#include "cmab/robustlab.hpp"

namespace cmab {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

namespace {

template <typename T>
T get_field(const json& j, const std::string& path, const std::string& key, T fallback,
            bool required = false) {
  if (!j.contains(key)) {
    if (required) throw ConfigError(path + "." + key + ": missing required field");
    return fallback;
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path + "." + key + ": " + e.what());
  }
}

std::vector<int64_t> parse_horizons(const json& j) {
  if (!j.contains("horizons")) throw ConfigError("horizons: missing required field");
  const json& h = j.at("horizons");
  std::vector<int64_t> horizons;
  if (h.is_array()) {
    for (const auto& v : h) horizons.push_back(v.get<int64_t>());
  } else if (h.is_object()) {
    double lo = get_field<double>(h, "horizons", "log10_start", 0.0, true);
    double hi = get_field<double>(h, "horizons", "log10_stop", 0.0, true);
    int points = get_field<int>(h, "horizons", "points", 0, true);
    if (points < 1) throw ConfigError("horizons.points: must be >= 1");
    for (int i = 0; i < points; ++i) {
      double x = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
      horizons.push_back(static_cast<int64_t>(std::llround(std::pow(10.0, x))));
    }
  } else {
    throw ConfigError("horizons: expected an array or {log10_start,log10_stop,points}");
  }
  return horizons;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig c;

  if (!j.contains("environment")) throw ConfigError("environment: missing required field");
  const json& env = j.at("environment");
  c.environment.kind = get_field<std::string>(env, "environment", "kind", "", true);
  c.environment.features_path = get_field<std::string>(env, "environment", "features", "");
  c.environment.weights_path = get_field<std::string>(env, "environment", "weights", "");
  c.environment.noise = get_field<std::string>(env, "environment", "noise", "bernoulli");
  c.environment.edges_path = get_field<std::string>(env, "environment", "edges", "");
  c.environment.symmetrize = get_field<bool>(env, "environment", "symmetrize", true);
  c.environment.seed_pool_percentile =
      get_field<double>(env, "environment", "seed_pool_percentile", 95.0);
  c.environment.mc_samples = get_field<int64_t>(env, "environment", "mc_samples", 10000);

  if (!j.contains("constraint")) throw ConfigError("constraint: missing required field");
  const json& con = j.at("constraint");
  c.constraint.kind = get_field<std::string>(con, "constraint", "kind", "", true);
  c.constraint.k = get_field<int>(con, "constraint", "k", 0);
  c.constraint.budget = get_field<double>(con, "constraint", "budget", 0.0);
  c.constraint.costs_csv = get_field<std::string>(con, "constraint", "costs_csv", "");
  c.constraint.costs_from_environment =
      get_field<bool>(con, "constraint", "costs_from_environment", false);
  if (con.contains("costs"))
    c.constraint.costs = con.at("costs").get<std::vector<double>>();

  c.algorithms = get_field<std::vector<std::string>>(j, "config", "algorithms", {}, true);
  c.horizons = parse_horizons(j);
  c.replications = get_field<int>(j, "config", "replications", 10);
  c.seed = get_field<uint64_t>(j, "config", "seed", 0);
  c.reference = get_field<std::string>(j, "config", "reference", "offline-greedy");
  c.eps_prime = get_field<double>(j, "config", "eps_prime", 0.1);
  c.output_dir = get_field<std::string>(j, "config", "output_dir", "out");
  c.write_traces = get_field<bool>(j, "config", "write_traces", true);
  c.threads = get_field<int>(j, "config", "threads", 1);

  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& c) {
  const auto& e = c.environment;
  if (e.kind == "coverage") {
    if (e.features_path.empty())
      throw ConfigError("environment.features: required for coverage environments");
    if (!fs::exists(e.features_path))
      throw ConfigError("environment.features: file not found: " + e.features_path);
    if (!e.weights_path.empty() && !fs::exists(e.weights_path))
      throw ConfigError("environment.weights: file not found: " + e.weights_path);
    if (e.noise != "bernoulli" && e.noise != "none")
      throw ConfigError("environment.noise: expected 'bernoulli' or 'none'");
  } else if (e.kind == "independent-cascade") {
    if (e.edges_path.empty())
      throw ConfigError("environment.edges: required for independent-cascade environments");
    if (!fs::exists(e.edges_path))
      throw ConfigError("environment.edges: file not found: " + e.edges_path);
    if (e.mc_samples < 1) throw ConfigError("environment.mc_samples: must be >= 1");
  } else {
    throw ConfigError("environment.kind: expected 'coverage' or 'independent-cascade', got '" +
                      e.kind + "'");
  }

  const auto& k = c.constraint;
  if (k.kind == "cardinality") {
    if (k.k < 1) throw ConfigError("constraint.k: must be >= 1");
  } else if (k.kind == "knapsack") {
    if (!(k.budget > 0.0)) throw ConfigError("constraint.budget: must be positive");
    int sources = (!k.costs.empty() ? 1 : 0) + (!k.costs_csv.empty() ? 1 : 0) +
                  (k.costs_from_environment ? 1 : 0);
    if (sources != 1)
      throw ConfigError(
          "constraint: exactly one of costs, costs_csv, costs_from_environment required");
    if (!k.costs_csv.empty() && !fs::exists(k.costs_csv))
      throw ConfigError("constraint.costs_csv: file not found: " + k.costs_csv);
  } else if (k.kind != "unconstrained") {
    throw ConfigError("constraint.kind: expected cardinality|knapsack|unconstrained");
  }

  if (c.algorithms.empty()) throw ConfigError("algorithms: need at least one entry");
  for (const auto& a : c.algorithms) {
    if (a == "ogo") {
      if (k.kind != "knapsack")
        throw ConfigError("algorithms: ogo requires a knapsack constraint");
      continue;
    }
    if (a.rfind("cetc-", 0) != 0)
      throw ConfigError("algorithms: expected 'ogo' or 'cetc-<offline>', got '" + a + "'");
    offline_alg_from_string(a.substr(5));  // throws on unknown names
  }
  if (c.horizons.empty()) throw ConfigError("horizons: need at least one entry");
  for (size_t i = 1; i < c.horizons.size(); ++i)
    if (c.horizons[i] <= c.horizons[i - 1])
      throw ConfigError("horizons: must be strictly increasing");
  if (c.replications < 1) throw ConfigError("replications: must be >= 1");
  if (c.reference != "offline-greedy" && c.reference != "brute-force-opt")
    throw ConfigError("reference: expected 'offline-greedy' or 'brute-force-opt'");
  if (!(c.eps_prime > 0.0 && c.eps_prime < 1.0))
    throw ConfigError("eps_prime: must lie in (0,1)");
  if (c.threads < 0) throw ConfigError("threads: must be >= 0");
}

std::unique_ptr<Environment> build_environment(const ExperimentConfig& c) {
  const auto& e = c.environment;
  if (e.kind == "coverage") {
    CoverageModel model = load_coverage_csv(e.features_path);
    if (!e.weights_path.empty()) load_user_weights(model, e.weights_path);
    NoiseKind noise = e.noise == "none" ? NoiseKind::None : NoiseKind::Bernoulli;
    std::vector<double> costs;
    if (c.constraint.kind == "knapsack" && !c.constraint.costs_csv.empty())
      costs = load_costs_csv(c.constraint.costs_csv, model.element_count());
    return std::make_unique<CoverageEnvironment>(std::move(model), noise, std::move(costs));
  }
  DirectedGraph graph = load_edge_list(e.edges_path, e.symmetrize);
  std::vector<int> pool = high_out_degree_pool(graph, e.seed_pool_percentile);
  if (pool.empty())
    throw ConfigError("environment.seed_pool_percentile: empty seed pool");
  uint64_t mean_seed = RngStream(c.seed).substream("ic-mean-seed").seed();
  return std::make_unique<ICEnvironment>(std::move(graph), std::move(pool), mean_seed,
                                         e.mc_samples);
}

Constraint build_constraint(const ExperimentConfig& c, const Environment& env) {
  const auto& k = c.constraint;
  int n = env.ground_set_size();
  if (k.kind == "cardinality") return Constraint::cardinality(n, k.k);
  if (k.kind == "unconstrained") return Constraint::unconstrained(n);
  std::vector<double> costs;
  if (!k.costs.empty()) {
    costs = k.costs;
  } else if (!k.costs_csv.empty()) {
    costs = load_costs_csv(k.costs_csv, n);
  } else {
    costs = env.costs();
    if (costs.empty())
      throw ConfigError("constraint.costs_from_environment: environment has no costs");
  }
  if (static_cast<int>(costs.size()) != n)
    throw ConfigError("constraint.costs: size does not match the ground set");
  return Constraint::knapsack(std::move(costs), k.budget);
}

// ---------------------------------------------------------------------------
// Reference, regret, slope
// ---------------------------------------------------------------------------

ReferenceValue reference_value(const Environment& env, const Constraint& constraint,
                               ReferencePolicy policy, double alpha, double eps_prime,
                               uint64_t seed) {
  (void)eps_prime;
  ReferenceValue ref;
  if (policy == ReferencePolicy::BruteForceOpt) {
    if (env.ground_set_size() > 20)
      throw ContractError("reference_value: brute-force-opt requires n <= 20");
    FunctionOracle oracle([&](const Subset& s) { return env.mean(s); });
    BruteForceResult opt = brute_force_opt(oracle, constraint, env.ground_set_size());
    ref.value = alpha * opt.value;
    ref.set = opt.opt;
    ref.description = "alpha*f(OPT), alpha=" + std::to_string(alpha);
    return ref;
  }
  FunctionOracle oracle([&](const Subset& s) { return env.mean(s); });
  Subset s_grd;
  switch (constraint.kind()) {
    case ConstraintKind::Cardinality:
      s_grd = greedy_cardinality(oracle, constraint.ground_set_size(),
                                 constraint.cardinality_k());
      break;
    case ConstraintKind::Knapsack:
      s_grd = greedy_plus_max(oracle, constraint.costs(), constraint.budget());
      break;
    case ConstraintKind::Unconstrained: {
      RngStream rng = RngStream(seed).substream("reference-usm");
      s_grd = randomized_usm(oracle, constraint.ground_set_size(), rng);
      break;
    }
  }
  ref.value = env.mean(s_grd);
  ref.set = s_grd;
  ref.description = "f(S_grd) for " + s_grd.to_string();
  // Monte-Carlo-backed means report the estimate's standard error.
  if (const auto* ic = dynamic_cast<const ICEnvironment*>(&env))
    ref.std_error = ic->mean_std_error(s_grd);
  return ref;
}

std::vector<double> cumulative_regret(const std::vector<double>& rewards,
                                      double per_round_reference) {
  std::vector<double> regret(rewards.size());
  double cum = 0.0;
  for (size_t t = 0; t < rewards.size(); ++t) {
    cum += rewards[t];
    regret[t] = per_round_reference * static_cast<double>(t + 1) - cum;
  }
  return regret;
}

std::vector<double> moving_average(const std::vector<double>& series, int window) {
  if (window < 1) throw ContractError("moving_average: window must be >= 1");
  std::vector<double> out(series.size());
  double acc = 0.0;
  for (size_t i = 0; i < series.size(); ++i) {
    acc += series[i];
    if (i >= static_cast<size_t>(window)) acc -= series[i - static_cast<size_t>(window)];
    size_t denom = std::min(i + 1, static_cast<size_t>(window));
    out[i] = acc / static_cast<double>(denom);
  }
  return out;
}

RegretSeries analyze_trace(const RunTrace& trace, double per_round_reference,
                           int window) {
  RegretSeries series;
  series.horizon = static_cast<int64_t>(trace.rewards.size());
  series.reference = per_round_reference;
  series.cumulative_reward.resize(trace.rewards.size());
  double cum = 0.0;
  for (size_t t = 0; t < trace.rewards.size(); ++t) {
    cum += trace.rewards[t];
    series.cumulative_reward[t] = cum;
  }
  series.cumulative_regret = cumulative_regret(trace.rewards, per_round_reference);
  series.smoothed_reward = moving_average(trace.rewards, window);
  return series;
}

SlopeFit loglog_slope(const std::vector<double>& horizons,
                      const std::vector<double>& regrets) {
  if (horizons.size() != regrets.size())
    throw ContractError("loglog_slope: horizons/regrets length mismatch");
  std::vector<double> xs, ys;
  SlopeFit fit;
  for (size_t i = 0; i < horizons.size(); ++i) {
    if (!(regrets[i] > 0.0)) {
      ++fit.dropped;
      continue;
    }
    xs.push_back(std::log(horizons[i]));
    ys.push_back(std::log(regrets[i]));
  }
  fit.used = static_cast<int>(xs.size());
  if (fit.used < 3)
    throw ContractError("loglog_slope: need at least 3 positive-regret points, have " +
                        std::to_string(fit.used));
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= fit.used;
  my /= fit.used;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  auto env = build_environment(config);
  Constraint constraint = build_constraint(config, *env);

  ReferencePolicy policy = config.reference == "brute-force-opt"
                               ? ReferencePolicy::BruteForceOpt
                               : ReferencePolicy::OfflineGreedy;

  // Offline specs are shared across cells; ogo is handled separately.
  struct AlgEntry {
    std::string name;
    bool is_ogo = false;
    std::optional<OfflineAlgSpec> spec;
  };
  std::vector<AlgEntry> algs;
  for (const auto& name : config.algorithms) {
    AlgEntry entry;
    entry.name = name;
    if (name == "ogo") {
      entry.is_ogo = true;
    } else {
      entry.spec = make_offline_spec(offline_alg_from_string(name.substr(5)), constraint,
                                     config.eps_prime);
    }
    algs.push_back(std::move(entry));
  }

  ExperimentResult result;
  // A single shared reference for the offline-greedy policy; per-algorithm
  // alpha scaling for the brute-force policy.
  ReferenceValue shared_ref;
  if (policy == ReferencePolicy::OfflineGreedy)
    shared_ref = reference_value(*env, constraint, policy, 1.0, config.eps_prime,
                                 config.seed);
  auto ref_for = [&](const AlgEntry& a) {
    if (policy == ReferencePolicy::OfflineGreedy) return shared_ref;
    double alpha = a.is_ogo ? 1.0 - std::exp(-1.0) : a.spec->alpha;
    return reference_value(*env, constraint, policy, alpha, config.eps_prime, config.seed);
  };

  const size_t n_algs = algs.size();
  const size_t n_h = config.horizons.size();
  const size_t reps = static_cast<size_t>(config.replications);
  result.rewards.assign(n_algs, std::vector<std::vector<double>>(
                                    n_h, std::vector<double>(reps, 0.0)));

  fs::create_directories(config.output_dir);
  std::vector<std::string> trace_files(n_algs * n_h * reps);

  RngStream root(config.seed);
  std::atomic<size_t> next_cell{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;

  auto run_cell = [&](size_t cell) {
    size_t a = cell / (n_h * reps);
    size_t h = (cell / reps) % n_h;
    size_t r = cell % reps;
    RngStream rng = root.substream("cell", static_cast<uint64_t>(cell));
    int64_t horizon = config.horizons[h];
    RunTrace trace;
    if (algs[a].is_ogo) {
      trace = run_ogo(*env, constraint.costs(), constraint.budget(), horizon, rng);
    } else {
      trace = run_cetc(*env, *algs[a].spec, horizon, rng);
    }
    result.rewards[a][h][r] = trace.total_reward();
    if (config.write_traces) {
      std::ostringstream body;
      trace.write_csv(body);
      std::string fname = "trace_" + algs[a].name + "_T" + std::to_string(horizon) +
                          "_r" + std::to_string(r) + ".csv";
      write_atomic(fs::path(config.output_dir) / fname, body.str());
      trace_files[cell] = fname;
    }
  };

  int threads = config.threads == 0
                    ? static_cast<int>(std::thread::hardware_concurrency())
                    : config.threads;
  threads = std::max(1, threads);
  const size_t total_cells = n_algs * n_h * reps;
  if (threads == 1) {
    for (size_t cell = 0; cell < total_cells; ++cell) run_cell(cell);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        while (true) {
          size_t cell = next_cell.fetch_add(1);
          if (cell >= total_cells || failed.load()) break;
          try {
            run_cell(cell);
          } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!failed.exchange(true)) first_error = e.what();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failed.load()) throw ConfigError("experiment cell failed: " + first_error);
  }

  // Summary and slopes, in fixed order.
  std::ostringstream summary_csv;
  summary_csv << "algorithm,horizon,replications,reference,reference_se,"
                 "mean_reward,se_reward,mean_regret,se_regret\n";
  std::ostringstream slopes_csv;
  slopes_csv << "algorithm,slope,intercept,points_used,points_dropped\n";
  for (size_t a = 0; a < n_algs; ++a) {
    ReferenceValue ref = ref_for(algs[a]);
    if (a == 0) result.reference = ref;
    std::vector<double> h_values, mean_regrets;
    for (size_t h = 0; h < n_h; ++h) {
      double sum = 0.0, sum_sq = 0.0;
      for (size_t r = 0; r < reps; ++r) {
        double x = result.rewards[a][h][r];
        sum += x;
        sum_sq += x * x;
      }
      double mean = sum / static_cast<double>(reps);
      double se = 0.0;
      if (reps > 1) {
        double var = (sum_sq - sum * sum / static_cast<double>(reps)) /
                     static_cast<double>(reps - 1);
        se = std::sqrt(std::max(0.0, var) / static_cast<double>(reps));
      }
      SummaryRow row;
      row.algorithm = algs[a].name;
      row.horizon = config.horizons[h];
      row.replications = static_cast<int>(reps);
      row.reference = ref.value;
      row.reference_se = ref.std_error;
      row.mean_reward = mean;
      row.se_reward = se;
      row.mean_regret = ref.value * static_cast<double>(config.horizons[h]) - mean;
      row.se_regret = se;
      result.summary.push_back(row);
      summary_csv << row.algorithm << ',' << row.horizon << ',' << row.replications
                  << ',' << format_double(row.reference) << ','
                  << format_double(row.reference_se) << ','
                  << format_double(row.mean_reward) << ',' << format_double(row.se_reward)
                  << ',' << format_double(row.mean_regret) << ','
                  << format_double(row.se_regret) << '\n';
      h_values.push_back(static_cast<double>(config.horizons[h]));
      mean_regrets.push_back(row.mean_regret);
    }
    if (n_h >= 3) {
      try {
        SlopeFit fit = loglog_slope(h_values, mean_regrets);
        result.slopes.emplace_back(algs[a].name, fit);
        slopes_csv << algs[a].name << ',' << format_double(fit.slope) << ','
                   << format_double(fit.intercept) << ',' << fit.used << ','
                   << fit.dropped << '\n';
      } catch (const ContractError&) {
        // fewer than 3 positive points: no slope row for this algorithm
      }
    }
  }

  write_atomic(fs::path(config.output_dir) / "summary.csv", summary_csv.str());
  result.files_written.push_back("summary.csv");
  if (n_h >= 3) {
    write_atomic(fs::path(config.output_dir) / "slopes.csv", slopes_csv.str());
    result.files_written.push_back("slopes.csv");
  }
  for (const auto& f : trace_files)
    if (!f.empty()) result.files_written.push_back(f);
  return result;
}

}  // namespace cmab
