// Command-line front end: config-driven experiment sweeps, robustness-corpus
// verification, log-log slope fitting, and config validation.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmab/experiment.hpp"
#include "cmab/robustlab.hpp"

using nlohmann::json;

namespace {

int fail(const std::string& kind, const std::string& message) {
  json err;
  err["error"] = kind;
  err["message"] = message;
  std::cerr << err.dump() << "\n";
  return 1;
}

int cmd_run(const std::string& config_path) {
  cmab::ExperimentConfig config = cmab::load_config(config_path);
  cmab::ExperimentResult result = cmab::run_experiment(config);
  std::cout << "reference: " << result.reference.description << " = "
            << result.reference.value;
  if (result.reference.std_error > 0.0)
    std::cout << " (se " << result.reference.std_error << ")";
  std::cout << "\n";
  for (const auto& [alg, fit] : result.slopes)
    std::cout << "slope " << alg << ": " << fit.slope << " (" << fit.used
              << " points, " << fit.dropped << " dropped)\n";
  std::cout << "wrote " << result.files_written.size() << " files to "
            << config.output_dir << "\n";
  return 0;
}

int cmd_robustness(int instances, uint64_t seed, const std::string& out_path,
                   int trials, int randomized_runs, std::vector<double> eps_list) {
  if (eps_list.empty()) eps_list = {0.01, 0.05};
  auto corpus = cmab::make_corpus(instances, seed);
  std::ofstream out(out_path);
  if (!out) return fail("io", "cannot write " + out_path);
  cmab::MarginReport::write_csv_header(out);
  cmab::RngStream root(seed);
  int failures = 0;
  int cells = 0;
  for (const auto& inst : corpus) {
    std::vector<cmab::OfflineAlg> algs;
    switch (inst.constraint.kind()) {
      case cmab::ConstraintKind::Cardinality:
        algs = {cmab::OfflineAlg::GreedyCardinality, cmab::OfflineAlg::ThresholdGreedy};
        break;
      case cmab::ConstraintKind::Knapsack:
        algs = {cmab::OfflineAlg::GreedyPlus, cmab::OfflineAlg::GreedyPlusMax,
                cmab::OfflineAlg::PartialEnumeration};
        break;
      case cmab::ConstraintKind::Unconstrained:
        algs = {cmab::OfflineAlg::RandomizedUsm};
        break;
    }
    for (auto alg : algs) {
      auto spec = cmab::make_offline_spec(alg, inst.constraint);
      for (double eps : eps_list) {
        cmab::RngStream rng = root.substream(
            "verify", static_cast<uint64_t>(cells) * 1000003ull);
        auto report = cmab::verify_robustness(spec, inst, eps, trials, rng,
                                              randomized_runs);
        report.write_csv_rows(out);
        if (!report.pass) ++failures;
        ++cells;
      }
    }
  }
  std::cout << "robustness: " << cells - failures << "/" << cells
            << " cells passed; report: " << out_path << "\n";
  return failures == 0 ? 0 : 2;
}

int cmd_slope(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) return fail("io", "cannot open " + csv_path);
  // Accepts two-column "horizon,regret" data, or the summary.csv schema
  // (slope fitted per algorithm from the mean_regret column).
  std::string line;
  if (!std::getline(in, line)) return fail("data", "empty file");
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> series;
  bool summary_schema = line.rfind("algorithm,", 0) == 0;
  size_t regret_col = 0;
  if (summary_schema) {
    std::stringstream hs(line);
    std::string name;
    std::vector<std::string> header;
    while (std::getline(hs, name, ',')) header.push_back(name);
    auto it = std::find(header.begin(), header.end(), "mean_regret");
    if (it == header.end()) return fail("data", "summary.csv lacks a mean_regret column");
    regret_col = static_cast<size_t>(it - header.begin());
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (summary_schema) {
      if (cells.size() <= regret_col) return fail("data", "bad summary row: " + line);
      series[cells[0]].first.push_back(std::stod(cells[1]));
      series[cells[0]].second.push_back(std::stod(cells[regret_col]));
    } else {
      if (cells.size() < 2) return fail("data", "expected horizon,regret rows");
      series["-"].first.push_back(std::stod(cells[0]));
      series["-"].second.push_back(std::stod(cells[1]));
    }
  }
  for (auto& [name, data] : series) {
    cmab::SlopeFit fit = cmab::loglog_slope(data.first, data.second);
    if (name == "-")
      std::cout << "slope: " << fit.slope << "\n";
    else
      std::cout << "slope " << name << ": " << fit.slope << "\n";
    if (fit.dropped > 0)
      std::cerr << "warning: dropped " << fit.dropped
                << " nonpositive-regret points for " << name << "\n";
  }
  return 0;
}

int cmd_validate(const std::string& config_path) {
  cmab::load_config(config_path);
  std::cout << "config ok: " << config_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Combinatorial bandit experiment toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment sweep from a config file");
  run->add_option("config", config_path, "JSON config path")->required();

  auto* validate = app.add_subcommand("validate", "Validate a config file");
  validate->add_option("config", config_path, "JSON config path")->required();

  int instances = 200;
  uint64_t seed = 7;
  std::string out_path = "robustness.csv";
  int trials = 8;
  int randomized_runs = 1000;
  std::vector<double> eps_list;
  auto* rob = app.add_subcommand("robustness", "Verify offline-algorithm robustness "
                                               "margins on a random corpus");
  rob->add_option("--instances", instances, "corpus size")->capture_default_str();
  rob->add_option("--seed", seed, "corpus seed")->capture_default_str();
  rob->add_option("--out", out_path, "margin report CSV")->capture_default_str();
  rob->add_option("--trials", trials, "surrogates per cell")->capture_default_str();
  rob->add_option("--randomized-runs", randomized_runs,
                  "internal runs per surrogate for randomized algorithms")
      ->capture_default_str();
  rob->add_option("--eps", eps_list, "perturbation magnitudes (default 0.01 0.05)");

  std::string csv_path;
  auto* slope = app.add_subcommand("slope", "Fit log-log regret slope from CSV");
  slope->add_option("csv", csv_path, "horizon,regret CSV or summary.csv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (validate->parsed()) return cmd_validate(config_path);
    if (rob->parsed())
      return cmd_robustness(instances, seed, out_path, trials, randomized_runs, eps_list);
    if (slope->parsed()) return cmd_slope(csv_path);
  } catch (const cmab::ConfigError& e) {
    return fail("config", e.what());
  } catch (const cmab::DataError& e) {
    return fail("data", e.what());
  } catch (const cmab::HorizonError& e) {
    return fail("horizon", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
