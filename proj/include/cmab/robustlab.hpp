#pragma once

// Empirical robustness verification: brute-force optima, bounded-perturbation
// surrogate oracles, and margin measurement of E[f(S*)] >= alpha*f(OPT) - delta*eps
// for every offline algorithm.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cmab/core.hpp"
#include "cmab/offline.hpp"

namespace cmab {

struct BruteForceResult {
  Subset opt;
  double value = 0.0;
  int64_t enumerated = 0;  // feasible sets inspected
};

// Exhaustive search over feasible subsets; ties resolve to the
// lexicographically smallest member list.  Refuses n > 20.
BruteForceResult brute_force_opt(ValueOracle& exact_oracle, const Constraint& constraint,
                                 int n);

enum class PerturbMode { UniformRandom, WorstCaseSign, FixedOffset };

struct PerturbationSpec {
  double epsilon = 0.0;
  PerturbMode mode = PerturbMode::UniformRandom;
  uint64_t seed = 0;
  double offset_sign = 1.0;  // FixedOffset: fhat = f + sign*eps
  // WorstCaseSign: +eps on sets disjoint from this target, -eps on sets
  // intersecting it (a cheap adversary aimed at the exact greedy trajectory).
  Subset adversary_target;
};

// Lazily realized memoized surrogate with |fhat(A) - f(A)| <= eps for every
// queried A.  Uniform perturbations are drawn per subset from the spec seed,
// so the surrogate is independent of query order.
class PerturbedOracle final : public ValueOracle {
 public:
  PerturbedOracle(ValueOracle& exact, PerturbationSpec spec)
      : exact_(exact), spec_(std::move(spec)) {}

 protected:
  double evaluate(const Subset& s) override;

 private:
  ValueOracle& exact_;
  PerturbationSpec spec_;
};

// A benchmark instance: a set function with its constraint.
struct Instance {
  std::string id;
  int n = 0;
  Constraint constraint;
  std::function<double(const Subset&)> mean;
};

// Deterministic random corpus over modular / probabilistic-coverage / cut
// families paired with cardinality (k <= 4), knapsack (beta <= 6) and
// unconstrained instances, n in [n_min, n_max].
std::vector<Instance> make_corpus(int count, uint64_t seed, int n_min = 5,
                                  int n_max = 10);

struct MarginRow {
  std::string algorithm;
  std::string instance_id;
  std::string surrogate;
  double epsilon = 0.0;
  double f_opt = 0.0;
  double f_out = 0.0;   // E[f(S*)] for randomized algorithms
  double bound = 0.0;   // alpha*f(OPT) - delta*eps
  double margin = 0.0;  // f_out - bound
  double std_error = 0.0;
  bool pass = false;
};

struct MarginReport {
  std::vector<MarginRow> rows;
  double min_margin = 0.0;
  bool pass = false;

  static void write_csv_header(std::ostream& out);
  void write_csv_rows(std::ostream& out) const;
};

// Runs the algorithm on `trials` perturbed surrogates of the instance (fixed
// +eps / -eps offsets, the worst-case-sign adversary, then uniform draws) and
// reports the worst margin against alpha*f(OPT) - delta*eps.  Randomized
// algorithms are averaged over `randomized_runs` internal runs per surrogate
// and pass at >= -3 standard errors.
MarginReport verify_robustness(const OfflineAlgSpec& spec, const Instance& instance,
                               double epsilon, int trials, RngStream& rng,
                               int randomized_runs = 1000);

}  // namespace cmab
