#pragma once

// Offline approximation algorithms for constrained submodular maximization,
// expressed purely as value-oracle query sequences.  Each algorithm carries a
// certified (alpha, delta) robustness pair and a query bound N so it can be
// dropped into the explore-then-commit adapter as a black box.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cmab/core.hpp"

namespace cmab {

enum class OfflineAlg {
  GreedyCardinality,   // cardinality constraint, (1-1/e, 2k), N = kn
  ThresholdGreedy,     // cardinality, (1-1/e-eps', 2(2-eps')k), N = (n/eps')ln(n/eps')
  PartialEnumeration,  // knapsack, (1-1/e, 4+2K~+2beta), N = K~ n^4
  GreedyPlus,          // knapsack, (1/2(1-1/e), 2+K~+beta), N = K~ n
  GreedyPlusMax,       // knapsack, (1/2, 1/2+K~+2beta), N = K~ n
  RandomizedUsm,       // unconstrained, (1/2, 5n/2), N = 4n
};

std::string to_string(OfflineAlg alg);
OfflineAlg offline_alg_from_string(const std::string& name);

// Nested sets produced by the density-greedy subroutine, with the per-level
// best-gain augmentation candidates read off the same queries.
struct GreedyTrace {
  std::vector<Subset> sets;            // G_0 = {} .. G_L
  std::vector<ElementId> picks;        // g_1 .. g_L
  std::vector<double> set_values;      // fhat(G_i), with fhat({}) := 0
  std::vector<ElementId> augments;     // a_i = argmax feasible fhat(G_i u e), i in [0, L)
  std::vector<double> augment_values;  // fhat(G_i u a_i)
  const Subset& output() const { return sets.back(); }
};

Subset greedy_cardinality(ValueOracle& oracle, int n, int k);
Subset threshold_greedy(ValueOracle& oracle, int n, int k, double eps_prime);
GreedyTrace greedy_density_sequence(ValueOracle& oracle,
                                    const std::vector<double>& costs, double budget);
Subset greedy_plus(ValueOracle& oracle, const std::vector<double>& costs, double budget);
Subset greedy_plus_max(ValueOracle& oracle, const std::vector<double>& costs, double budget);
Subset partial_enumeration(ValueOracle& oracle, const std::vector<double>& costs,
                           double budget);
Subset randomized_usm(ValueOracle& oracle, int n, RngStream& rng);

// An offline algorithm bound to a concrete instance, with its certified
// robustness pair and query bounds.
struct OfflineAlgSpec {
  OfflineAlg id;
  Constraint constraint;
  double alpha = 0.0;
  double delta = 0.0;
  int64_t query_bound = 0;        // the bound used by the schedule formula
  int64_t tight_query_bound = 0;  // (n - K~/2 + 1/2) K~ for the knapsack greedy
                                  // family; equals query_bound otherwise
  bool randomized = false;
  bool small_horizon_fallback = false;  // knapsack greedy family only
  double eps_prime = 0.0;               // ThresholdGreedy accuracy knob

  Subset run(ValueOracle& oracle, RngStream& rng) const;
  std::string name() const { return to_string(id); }
};

// Builds the spec for an algorithm/constraint pair; throws ContractError when
// the kinds do not match.
OfflineAlgSpec make_offline_spec(OfflineAlg alg, const Constraint& constraint,
                                 double eps_prime = 0.1);

// Upper bound on distinct value-oracle queries.  `tight` selects the sharper
// (n - K~/2 + 1/2) K~ bound available for the knapsack greedy family.
int64_t query_bound(OfflineAlg alg, const Constraint& constraint,
                    double eps_prime = 0.1, bool tight = false);

}  // namespace cmab
