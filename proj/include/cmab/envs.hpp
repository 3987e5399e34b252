#pragma once

// Reward environments: independent-cascade influence maximization over a
// directed graph, probabilistic-coverage recommendation, and the text formats
// that feed them.

#include <string>
#include <vector>

#include "cmab/core.hpp"
#include "cmab/environment.hpp"

namespace cmab {

// ---------------------------------------------------------------------------
// Independent cascade
// ---------------------------------------------------------------------------

struct DirectedGraph {
  struct Edge {
    int to;
    double prob;
  };
  int node_count = 0;
  std::vector<std::vector<Edge>> out_edges;
  std::vector<int> in_degree;
  std::vector<int> out_degree;

  // Adds the edge with probability to be filled in by finalize().
  void add_edge(int u, int v);
  // Computes degrees and sets every edge (u,v) to probability 1/d_in(v).
  void finalize();
};

// Edge-list text format: whitespace-separated "u v" pairs, one per line;
// blank lines and lines starting with '#' are skipped.  Self-loops and
// duplicate edges are rejected with the offending line number.  With
// `symmetrize`, every pair yields both directions.
DirectedGraph load_edge_list(const std::string& path, bool symmetrize = false);

// One cascade: every newly activated node attempts each inactive out-neighbor
// once with the edge probability.  Returns (#activated)/(node count).
double ic_sample(const DirectedGraph& g, const Subset& seeds, RngStream& rng);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int64_t samples = 0;
};

MeanEstimate ic_mean(const DirectedGraph& g, const Subset& seeds, int64_t n_samples,
                     RngStream& rng);

// Nodes with out-degree strictly above the given percentile (nearest-rank).
std::vector<int> high_out_degree_pool(const DirectedGraph& g, double percentile);

// c(u) = 0.01 * d_out(u) + 1 for each pool member.
std::vector<double> bim_costs(const DirectedGraph& g, const std::vector<int>& seed_pool);

// ---------------------------------------------------------------------------
// Probabilistic coverage
// ---------------------------------------------------------------------------

struct CoverageModel {
  std::vector<std::string> genres;
  // features[e][g] in [0,1]: probability element e covers genre g
  std::vector<std::vector<double>> features;
  // one weight row per user, each summing to <= 1; a single uniform row is
  // installed when no user table is supplied
  std::vector<std::vector<double>> user_weights;

  int element_count() const { return static_cast<int>(features.size()); }
  int genre_count() const { return static_cast<int>(genres.size()); }
};

// sum_g w_g * (1 - prod_{e in S} (1 - P_g(e))) for one weight row.
double coverage_mean(const CoverageModel& model, const std::vector<double>& weights,
                     const Subset& s);
// Average of coverage_mean over all user rows.
double coverage_mean(const CoverageModel& model, const Subset& s);
// Average over users of independent Bernoulli(f_user(S)) draws.
double coverage_sample(const CoverageModel& model, const Subset& s, RngStream& rng);

// Features CSV: header "element,<genre>,...," then one row per element.
// Probabilities outside [0,1] are rejected with cell coordinates.  Installs a
// single uniform weight row; load_user_weights replaces it.
CoverageModel load_coverage_csv(const std::string& path);

// Weights CSV: header "user,<genre>,...": genre columns must match the model.
// Rows summing to more than 1 are renormalized with a warning on stderr.
void load_user_weights(CoverageModel& model, const std::string& path);

// Costs CSV: header "element,cost", one row per element.
std::vector<double> load_costs_csv(const std::string& path, int expected_elements);

// ---------------------------------------------------------------------------
// Environments
// ---------------------------------------------------------------------------

enum class NoiseKind { Bernoulli, None };

// Coverage environment: mean is the exact closed form; samples average
// independent Bernoulli(f_user(S)) draws across users (or return the mean
// when noiseless).
class CoverageEnvironment final : public Environment {
 public:
  CoverageEnvironment(CoverageModel model, NoiseKind noise = NoiseKind::Bernoulli,
                      std::vector<double> costs = {});

  int ground_set_size() const override { return model_.element_count(); }
  double sample(const Subset& action, RngStream& rng) const override;
  double mean(const Subset& action) const override;
  const std::vector<double>& costs() const override { return costs_; }
  const CoverageModel& model() const { return model_; }

 private:
  CoverageModel model_;
  NoiseKind noise_;
  std::vector<double> costs_;
};

// Influence-maximization environment over a seed pool.  Element i of the
// ground set is pool node pool[i]; rewards are cascade sizes normalized by
// the node count.  mean() is a Monte-Carlo estimate with a fixed per-subset
// substream, so it is deterministic and independent of call order.
class ICEnvironment final : public Environment {
 public:
  ICEnvironment(DirectedGraph graph, std::vector<int> seed_pool, uint64_t mean_seed,
                int64_t mean_samples = 10000);

  int ground_set_size() const override { return static_cast<int>(pool_.size()); }
  double sample(const Subset& action, RngStream& rng) const override;
  double mean(const Subset& action) const override;
  double mean_std_error(const Subset& action) const;
  const std::vector<double>& costs() const override { return costs_; }
  const DirectedGraph& graph() const { return graph_; }
  const std::vector<int>& pool() const { return pool_; }

 private:
  Subset to_nodes(const Subset& action) const;

  DirectedGraph graph_;
  std::vector<int> pool_;
  std::vector<double> costs_;
  uint64_t mean_seed_;
  int64_t mean_samples_;
};

}  // namespace cmab
