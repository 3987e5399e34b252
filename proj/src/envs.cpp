#include "cmab/envs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace cmab {

// ---------------------------------------------------------------------------
// DirectedGraph and independent cascade
// ---------------------------------------------------------------------------

void DirectedGraph::add_edge(int u, int v) {
  int needed = std::max(u, v) + 1;
  if (needed > node_count) {
    node_count = needed;
    out_edges.resize(static_cast<size_t>(node_count));
  }
  out_edges[static_cast<size_t>(u)].push_back(Edge{v, 0.0});
}

void DirectedGraph::finalize() {
  in_degree.assign(static_cast<size_t>(node_count), 0);
  out_degree.assign(static_cast<size_t>(node_count), 0);
  for (int u = 0; u < node_count; ++u) {
    out_degree[static_cast<size_t>(u)] =
        static_cast<int>(out_edges[static_cast<size_t>(u)].size());
    for (const Edge& e : out_edges[static_cast<size_t>(u)])
      ++in_degree[static_cast<size_t>(e.to)];
  }
  for (auto& edges : out_edges)
    for (Edge& e : edges)
      e.prob = 1.0 / static_cast<double>(in_degree[static_cast<size_t>(e.to)]);
}

DirectedGraph load_edge_list(const std::string& path, bool symmetrize) {
  std::ifstream in(path);
  if (!in) throw DataError("load_edge_list: cannot open " + path);
  DirectedGraph g;
  std::set<std::pair<int, int>> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    long long u, v;
    std::string extra;
    if (!(ls >> u >> v) || (ls >> extra)) {
      throw DataError("load_edge_list: " + path + ":" + std::to_string(line_no) +
                      ": expected two integers, got '" + line + "'");
    }
    if (u < 0 || v < 0)
      throw DataError("load_edge_list: " + path + ":" + std::to_string(line_no) +
                      ": negative node id");
    if (u == v)
      throw DataError("load_edge_list: " + path + ":" + std::to_string(line_no) +
                      ": self-loop rejected");
    auto add = [&](int a, int b) {
      if (!seen.insert({a, b}).second)
        throw DataError("load_edge_list: " + path + ":" + std::to_string(line_no) +
                        ": duplicate edge " + std::to_string(a) + "->" +
                        std::to_string(b));
      g.add_edge(a, b);
    };
    add(static_cast<int>(u), static_cast<int>(v));
    if (symmetrize) add(static_cast<int>(v), static_cast<int>(u));
  }
  if (g.node_count == 0) throw DataError("load_edge_list: " + path + " has no edges");
  g.finalize();
  return g;
}

double ic_sample(const DirectedGraph& g, const Subset& seeds, RngStream& rng) {
  if (!seeds.empty() && seeds.max_element() >= g.node_count)
    throw InstanceMismatchError("ic_sample: seed id outside graph");
  std::vector<uint8_t> active(static_cast<size_t>(g.node_count), 0);
  std::vector<int> frontier;
  for (ElementId s : seeds) {
    active[static_cast<size_t>(s)] = 1;
    frontier.push_back(s);
  }
  int activated = static_cast<int>(frontier.size());
  std::vector<int> next;
  while (!frontier.empty()) {
    next.clear();
    for (int u : frontier) {
      for (const DirectedGraph::Edge& e : g.out_edges[static_cast<size_t>(u)]) {
        if (active[static_cast<size_t>(e.to)]) continue;
        if (rng.uniform01() < e.prob) {
          active[static_cast<size_t>(e.to)] = 1;
          next.push_back(e.to);
          ++activated;
        }
      }
    }
    frontier.swap(next);
  }
  return static_cast<double>(activated) / static_cast<double>(g.node_count);
}

MeanEstimate ic_mean(const DirectedGraph& g, const Subset& seeds, int64_t n_samples,
                     RngStream& rng) {
  if (n_samples < 1) throw ContractError("ic_mean: need n_samples >= 1");
  double sum = 0.0, sum_sq = 0.0;
  for (int64_t i = 0; i < n_samples; ++i) {
    double r = ic_sample(g, seeds, rng);
    sum += r;
    sum_sq += r * r;
  }
  MeanEstimate est;
  est.samples = n_samples;
  est.mean = sum / static_cast<double>(n_samples);
  if (n_samples > 1) {
    double var = (sum_sq - sum * sum / static_cast<double>(n_samples)) /
                 static_cast<double>(n_samples - 1);
    est.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(n_samples));
  }
  return est;
}

std::vector<int> high_out_degree_pool(const DirectedGraph& g, double percentile) {
  if (!(percentile >= 0.0 && percentile < 100.0))
    throw ContractError("high_out_degree_pool: percentile in [0,100)");
  std::vector<int> degrees = g.out_degree;
  std::sort(degrees.begin(), degrees.end());
  // Nearest-rank percentile; pool keeps nodes strictly above it.
  size_t rank = static_cast<size_t>(
      std::ceil(percentile / 100.0 * static_cast<double>(degrees.size())));
  rank = std::min(std::max<size_t>(rank, 1), degrees.size());
  int threshold = degrees[rank - 1];
  std::vector<int> pool;
  for (int u = 0; u < g.node_count; ++u)
    if (g.out_degree[static_cast<size_t>(u)] > threshold) pool.push_back(u);
  return pool;
}

std::vector<double> bim_costs(const DirectedGraph& g, const std::vector<int>& seed_pool) {
  if (seed_pool.empty()) throw ContractError("bim_costs: empty seed pool");
  std::vector<double> costs;
  costs.reserve(seed_pool.size());
  for (int u : seed_pool) {
    if (u < 0 || u >= g.node_count)
      throw InstanceMismatchError("bim_costs: pool node outside graph");
    costs.push_back(0.01 * g.out_degree[static_cast<size_t>(u)] + 1.0);
  }
  return costs;
}

// ---------------------------------------------------------------------------
// Probabilistic coverage
// ---------------------------------------------------------------------------

double coverage_mean(const CoverageModel& model, const std::vector<double>& weights,
                     const Subset& s) {
  if (!s.empty() && s.max_element() >= model.element_count())
    throw InstanceMismatchError("coverage_mean: element outside model");
  double total = 0.0;
  for (int gidx = 0; gidx < model.genre_count(); ++gidx) {
    double miss = 1.0;
    for (ElementId e : s)
      miss *= 1.0 - model.features[static_cast<size_t>(e)][static_cast<size_t>(gidx)];
    total += weights[static_cast<size_t>(gidx)] * (1.0 - miss);
  }
  return total;
}

double coverage_mean(const CoverageModel& model, const Subset& s) {
  double total = 0.0;
  for (const auto& row : model.user_weights) total += coverage_mean(model, row, s);
  return total / static_cast<double>(model.user_weights.size());
}

double coverage_sample(const CoverageModel& model, const Subset& s, RngStream& rng) {
  if (model.user_weights.empty())
    throw ContractError("coverage_sample: model has no weight rows");
  double hits = 0.0;
  for (const auto& row : model.user_weights) {
    double f = coverage_mean(model, row, s);
    if (!(f >= 0.0 && f <= 1.0))
      throw ContractError("coverage_sample: per-user mean outside [0,1]");
    if (rng.bernoulli(f)) hits += 1.0;
  }
  return hits / static_cast<double>(model.user_weights.size());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
      cell.pop_back();
    size_t first = cell.find_first_not_of(' ');
    cells.push_back(first == std::string::npos ? "" : cell.substr(first));
  }
  return cells;
}

double parse_prob(const std::string& cell, const std::string& path, int line_no,
                  size_t col) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    throw DataError(path + ":" + std::to_string(line_no) + ": column " +
                    std::to_string(col + 1) + ": not a number: '" + cell + "'");
  }
  if (pos != cell.size())
    throw DataError(path + ":" + std::to_string(line_no) + ": column " +
                    std::to_string(col + 1) + ": trailing junk in '" + cell + "'");
  if (v < 0.0 || v > 1.0)
    throw DataError(path + ":" + std::to_string(line_no) + ": column " +
                    std::to_string(col + 1) + ": probability " + cell +
                    " outside [0,1]");
  return v;
}

}  // namespace

CoverageModel load_coverage_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_coverage_csv: cannot open " + path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  ++line_no;
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "element")
    throw DataError(path + ":1: expected header 'element,<genre>,...'");
  CoverageModel model;
  model.genres.assign(header.begin() + 1, header.end());
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " cells, got " +
                      std::to_string(cells.size()));
    int id = std::stoi(cells[0]);
    if (id != static_cast<int>(model.features.size()))
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": element ids must be dense from 0, got " + cells[0]);
    std::vector<double> row;
    for (size_t c = 1; c < cells.size(); ++c)
      row.push_back(parse_prob(cells[c], path, line_no, c));
    model.features.push_back(std::move(row));
  }
  if (model.features.empty()) throw DataError(path + ": no element rows");
  // Single shared uniform weight row until a user table is loaded.
  model.user_weights.assign(
      1, std::vector<double>(static_cast<size_t>(model.genre_count()),
                             1.0 / static_cast<double>(model.genre_count())));
  return model;
}

void load_user_weights(CoverageModel& model, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_user_weights: cannot open " + path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  ++line_no;
  auto header = split_csv_line(line);
  if (header.size() != model.genres.size() + 1 || header[0] != "user")
    throw DataError(path + ":1: expected header 'user,<genre>,...' matching the model");
  for (size_t g = 0; g < model.genres.size(); ++g)
    if (header[g + 1] != model.genres[g])
      throw DataError(path + ":1: genre column '" + header[g + 1] +
                      "' does not match model genre '" + model.genres[g] + "'");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " cells");
    std::vector<double> row;
    double sum = 0.0;
    for (size_t c = 1; c < cells.size(); ++c) {
      double w = std::stod(cells[c]);
      if (w < 0.0)
        throw DataError(path + ":" + std::to_string(line_no) + ": negative weight");
      row.push_back(w);
      sum += w;
    }
    if (sum > 1.0 + 1e-12) {
      std::cerr << "warning: " << path << ":" << line_no << ": weights sum to " << sum
                << " > 1; renormalizing to sum 1\n";
      for (double& w : row) w /= sum;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no user rows");
  model.user_weights = std::move(rows);
}

std::vector<double> load_costs_csv(const std::string& path, int expected_elements) {
  std::ifstream in(path);
  if (!in) throw DataError("load_costs_csv: cannot open " + path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  ++line_no;
  auto header = split_csv_line(line);
  if (header.size() != 2 || header[0] != "element" || header[1] != "cost")
    throw DataError(path + ":1: expected header 'element,cost'");
  std::vector<double> costs;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 2)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected 2 cells");
    if (std::stoi(cells[0]) != static_cast<int>(costs.size()))
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": element ids must be dense from 0");
    double c = std::stod(cells[1]);
    if (!(c > 0.0))
      throw DataError(path + ":" + std::to_string(line_no) + ": cost must be positive");
    costs.push_back(c);
  }
  if (expected_elements >= 0 && static_cast<int>(costs.size()) != expected_elements)
    throw DataError(path + ": expected " + std::to_string(expected_elements) +
                    " cost rows, got " + std::to_string(costs.size()));
  return costs;
}

// ---------------------------------------------------------------------------
// Environments
// ---------------------------------------------------------------------------

CoverageEnvironment::CoverageEnvironment(CoverageModel model, NoiseKind noise,
                                         std::vector<double> costs)
    : model_(std::move(model)), noise_(noise), costs_(std::move(costs)) {
  if (!costs_.empty() && static_cast<int>(costs_.size()) != model_.element_count())
    throw ContractError("CoverageEnvironment: costs/model size mismatch");
  for (const auto& row : model_.user_weights) {
    double sum = 0.0;
    for (double w : row) sum += w;
    if (sum > 1.0 + 1e-9)
      throw ContractError("CoverageEnvironment: user weights sum above 1");
  }
}

double CoverageEnvironment::sample(const Subset& action, RngStream& rng) const {
  if (noise_ == NoiseKind::None) return mean(action);
  return coverage_sample(model_, action, rng);
}

double CoverageEnvironment::mean(const Subset& action) const {
  return coverage_mean(model_, action);
}

ICEnvironment::ICEnvironment(DirectedGraph graph, std::vector<int> seed_pool,
                             uint64_t mean_seed, int64_t mean_samples)
    : graph_(std::move(graph)), pool_(std::move(seed_pool)), mean_seed_(mean_seed),
      mean_samples_(mean_samples) {
  if (pool_.empty()) throw ContractError("ICEnvironment: empty seed pool");
  costs_ = bim_costs(graph_, pool_);
}

Subset ICEnvironment::to_nodes(const Subset& action) const {
  std::vector<ElementId> nodes;
  nodes.reserve(action.size());
  for (ElementId e : action) {
    if (e < 0 || e >= static_cast<int>(pool_.size()))
      throw InstanceMismatchError("ICEnvironment: element outside seed pool");
    nodes.push_back(pool_[static_cast<size_t>(e)]);
  }
  return Subset(std::move(nodes));
}

double ICEnvironment::sample(const Subset& action, RngStream& rng) const {
  return ic_sample(graph_, to_nodes(action), rng);
}

double ICEnvironment::mean(const Subset& action) const {
  // Fixed per-subset substream: the estimate is deterministic and independent
  // of evaluation order.
  RngStream rng =
      RngStream(mean_seed_).substream("ic-mean", SubsetHash{}(action));
  return ic_mean(graph_, to_nodes(action), mean_samples_, rng).mean;
}

double ICEnvironment::mean_std_error(const Subset& action) const {
  RngStream rng =
      RngStream(mean_seed_).substream("ic-mean", SubsetHash{}(action));
  return ic_mean(graph_, to_nodes(action), mean_samples_, rng).std_error;
}

}  // namespace cmab
