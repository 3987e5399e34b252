#include "cmab/offline.hpp"

#include <cmath>
#include <limits>

namespace cmab {

namespace {

// The empty set is worth 0 by normalization; never spend a query on it.
double value_of(ValueOracle& oracle, const Subset& s) {
  return s.empty() ? 0.0 : oracle.query(s);
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

std::string to_string(OfflineAlg alg) {
  switch (alg) {
    case OfflineAlg::GreedyCardinality: return "greedy";
    case OfflineAlg::ThresholdGreedy: return "threshold-greedy";
    case OfflineAlg::PartialEnumeration: return "partial-enumeration";
    case OfflineAlg::GreedyPlus: return "greedy-plus";
    case OfflineAlg::GreedyPlusMax: return "greedy-plus-max";
    case OfflineAlg::RandomizedUsm: return "randomized-usm";
  }
  return "?";
}

OfflineAlg offline_alg_from_string(const std::string& name) {
  for (OfflineAlg a : {OfflineAlg::GreedyCardinality, OfflineAlg::ThresholdGreedy,
                       OfflineAlg::PartialEnumeration, OfflineAlg::GreedyPlus,
                       OfflineAlg::GreedyPlusMax, OfflineAlg::RandomizedUsm}) {
    if (to_string(a) == name) return a;
  }
  throw ContractError("unknown offline algorithm: " + name);
}

Subset greedy_cardinality(ValueOracle& oracle, int n, int k) {
  if (k < 1 || k > n) throw ContractError("greedy_cardinality: need 1 <= k <= n");
  Subset g;
  for (int round = 0; round < k; ++round) {
    ElementId best = -1;
    double best_value = kNegInf;
    for (ElementId e = 0; e < n; ++e) {
      if (g.contains(e)) continue;
      double v = value_of(oracle, g.with(e));
      if (v > best_value) {  // strict: ties keep the lowest id
        best_value = v;
        best = e;
      }
    }
    g = g.with(best);
  }
  return g;
}

Subset threshold_greedy(ValueOracle& oracle, int n, int k, double eps_prime) {
  if (k < 1 || k > n) throw ContractError("threshold_greedy: need 1 <= k <= n");
  if (!(eps_prime > 0.0 && eps_prime < 1.0))
    throw ContractError("threshold_greedy: need 0 < eps_prime < 1");

  double d = kNegInf;
  for (ElementId e = 0; e < n; ++e) d = std::max(d, value_of(oracle, Subset{e}));
  if (!(d > 0.0)) return Subset{};  // no singleton clears any positive threshold

  const int64_t cap = query_bound(OfflineAlg::ThresholdGreedy,
                                  Constraint::cardinality(n, k), eps_prime);
  Subset g;
  double g_value = 0.0;
  for (double tau = d; tau >= (eps_prime / n) * d; tau *= (1.0 - eps_prime)) {
    for (ElementId e = 0; e < n && static_cast<int>(g.size()) < k; ++e) {
      if (g.contains(e)) continue;
      double v = value_of(oracle, g.with(e));
      if (v - g_value >= tau) {
        g = g.with(e);
        g_value = v;
      }
    }
    if (static_cast<int>(g.size()) >= k) break;
    if (oracle.query_count() > cap) break;  // enforce the certified bound
  }
  return g;
}

GreedyTrace greedy_density_sequence(ValueOracle& oracle,
                                    const std::vector<double>& costs, double budget) {
  const int n = static_cast<int>(costs.size());
  GreedyTrace trace;
  trace.sets.push_back(Subset{});
  trace.set_values.push_back(0.0);

  Subset g;
  double g_cost = 0.0;
  double g_value = 0.0;
  while (true) {
    ElementId best = -1;
    double best_density = kNegInf;
    ElementId best_aug = -1;
    double best_aug_value = kNegInf;
    for (ElementId e = 0; e < n; ++e) {
      if (g.contains(e)) continue;
      if (g_cost + costs[static_cast<size_t>(e)] > budget) continue;  // never query infeasible sets
      double v = value_of(oracle, g.with(e));
      double density = (v - g_value) / costs[static_cast<size_t>(e)];
      if (density > best_density) {
        best_density = density;
        best = e;
      }
      if (v > best_aug_value) {
        best_aug_value = v;
        best_aug = e;
      }
    }
    if (best < 0) break;  // no feasible element remains
    trace.augments.push_back(best_aug);
    trace.augment_values.push_back(best_aug_value);
    g = g.with(best);
    g_cost += costs[static_cast<size_t>(best)];
    g_value = value_of(oracle, g);  // memo hit: queried as a candidate above
    trace.sets.push_back(g);
    trace.picks.push_back(best);
    trace.set_values.push_back(g_value);
  }
  return trace;
}

Subset greedy_plus(ValueOracle& oracle, const std::vector<double>& costs, double budget) {
  GreedyTrace trace = greedy_density_sequence(oracle, costs, budget);
  // Best feasible singleton, re-read from the level-1 queries.
  ElementId a_star = -1;
  double a_star_value = kNegInf;
  for (ElementId e = 0; e < static_cast<int>(costs.size()); ++e) {
    if (costs[static_cast<size_t>(e)] > budget) continue;
    double v = value_of(oracle, Subset{e});
    if (v > a_star_value) {
      a_star_value = v;
      a_star = e;
    }
  }
  if (a_star < 0) return trace.output();
  // Ties favor the greedy output.
  return trace.set_values.back() >= a_star_value ? trace.output() : Subset{a_star};
}

Subset greedy_plus_max(ValueOracle& oracle, const std::vector<double>& costs,
                       double budget) {
  GreedyTrace trace = greedy_density_sequence(oracle, costs, budget);
  Subset best = trace.sets[0];
  double best_value = trace.set_values[0];
  for (size_t i = 0; i < trace.sets.size(); ++i) {
    if (trace.set_values[i] > best_value) {
      best_value = trace.set_values[i];
      best = trace.sets[i];
    }
    if (i < trace.augments.size() && trace.augment_values[i] > best_value) {
      best_value = trace.augment_values[i];
      best = trace.sets[i].with(trace.augments[i]);
    }
  }
  return best;
}

Subset partial_enumeration(ValueOracle& oracle, const std::vector<double>& costs,
                           double budget) {
  const int n = static_cast<int>(costs.size());
  if (n < 1) throw ContractError("partial_enumeration: empty ground set");

  Subset best;  // the empty set, value 0
  double best_value = 0.0;
  auto consider = [&](const Subset& s, double v) {
    if (v > best_value) {
      best_value = v;
      best = s;
    }
  };
  auto fits = [&](const Subset& s) { return subset_cost(costs, s) <= budget; };

  // All feasible seeds of cardinality 1 and 2.
  for (ElementId a = 0; a < n; ++a) {
    Subset s1{a};
    if (!fits(s1)) continue;
    consider(s1, value_of(oracle, s1));
    for (ElementId b = a + 1; b < n; ++b) {
      Subset s2 = s1.with(b);
      if (!fits(s2)) continue;
      consider(s2, value_of(oracle, s2));
    }
  }
  // Triplet seeds, each completed by density greedy on fhat(R u .).
  for (ElementId a = 0; a < n; ++a) {
    for (ElementId b = a + 1; b < n; ++b) {
      for (ElementId c = b + 1; c < n; ++c) {
        Subset seed({a, b, c});
        if (!fits(seed)) continue;
        Subset g = seed;
        double g_cost = subset_cost(costs, g);
        double g_value = value_of(oracle, g);
        consider(g, g_value);
        while (true) {
          ElementId pick = -1;
          double pick_density = kNegInf;
          for (ElementId e = 0; e < n; ++e) {
            if (g.contains(e)) continue;
            if (g_cost + costs[static_cast<size_t>(e)] > budget) continue;
            double v = value_of(oracle, g.with(e));
            consider(g.with(e), v);
            double density = (v - g_value) / costs[static_cast<size_t>(e)];
            if (density > pick_density) {
              pick_density = density;
              pick = e;
            }
          }
          if (pick < 0) break;
          g = g.with(pick);
          g_cost += costs[static_cast<size_t>(pick)];
          g_value = value_of(oracle, g);
        }
      }
    }
  }
  return best;
}

Subset randomized_usm(ValueOracle& oracle, int n, RngStream& rng) {
  if (n < 1) throw ContractError("randomized_usm: empty ground set");
  Subset x;
  Subset y = Subset::full(n);
  for (ElementId u = 0; u < n; ++u) {
    double a = value_of(oracle, x.with(u)) - value_of(oracle, x);
    double b = value_of(oracle, y.without(u)) - value_of(oracle, y);
    double a_pos = std::max(a, 0.0);
    double b_pos = std::max(b, 0.0);
    double p_add = (a_pos + b_pos == 0.0) ? 1.0 : a_pos / (a_pos + b_pos);
    if (rng.uniform01() < p_add) {
      x = x.with(u);
    } else {
      y = y.without(u);
    }
  }
  return x;
}

int64_t query_bound(OfflineAlg alg, const Constraint& constraint, double eps_prime,
                    bool tight) {
  const int n = constraint.ground_set_size();
  auto require = [&](ConstraintKind kind, const char* what) {
    if (constraint.kind() != kind)
      throw ContractError(std::string("query_bound: ") + to_string(alg) +
                          " requires a " + what + " constraint");
  };
  switch (alg) {
    case OfflineAlg::GreedyCardinality:
      require(ConstraintKind::Cardinality, "cardinality");
      return static_cast<int64_t>(constraint.cardinality_k()) * n;
    case OfflineAlg::ThresholdGreedy: {
      require(ConstraintKind::Cardinality, "cardinality");
      if (!(eps_prime > 0.0 && eps_prime < 1.0))
        throw ContractError("query_bound: need 0 < eps_prime < 1");
      double ratio = n / eps_prime;
      return static_cast<int64_t>(std::ceil(ratio * std::log(ratio)));
    }
    case OfflineAlg::PartialEnumeration: {
      require(ConstraintKind::Knapsack, "knapsack");
      int64_t k_tilde = knapsack_params(constraint).k_tilde;
      return k_tilde * static_cast<int64_t>(n) * n * n * n;
    }
    case OfflineAlg::GreedyPlus:
    case OfflineAlg::GreedyPlusMax: {
      require(ConstraintKind::Knapsack, "knapsack");
      int64_t k_tilde = knapsack_params(constraint).k_tilde;
      if (tight)
        return static_cast<int64_t>(
            std::floor((n - 0.5 * static_cast<double>(k_tilde) + 0.5) *
                       static_cast<double>(k_tilde)));
      return k_tilde * static_cast<int64_t>(n);
    }
    case OfflineAlg::RandomizedUsm:
      require(ConstraintKind::Unconstrained, "unconstrained");
      return 4ll * n;
  }
  throw ContractError("query_bound: unknown algorithm");
}

OfflineAlgSpec make_offline_spec(OfflineAlg alg, const Constraint& constraint,
                                 double eps_prime) {
  OfflineAlgSpec spec;
  spec.id = alg;
  spec.constraint = constraint;
  spec.eps_prime = eps_prime;
  spec.query_bound = query_bound(alg, constraint, eps_prime, /*tight=*/false);
  spec.tight_query_bound = spec.query_bound;

  const int n = constraint.ground_set_size();
  switch (alg) {
    case OfflineAlg::GreedyCardinality:
      spec.alpha = 1.0 - std::exp(-1.0);
      spec.delta = 2.0 * constraint.cardinality_k();
      break;
    case OfflineAlg::ThresholdGreedy:
      spec.alpha = 1.0 - std::exp(-1.0) - eps_prime;
      spec.delta = 2.0 * (2.0 - eps_prime) * constraint.cardinality_k();
      break;
    case OfflineAlg::PartialEnumeration: {
      auto p = knapsack_params(constraint);
      spec.alpha = 1.0 - std::exp(-1.0);
      spec.delta = 4.0 + 2.0 * p.k_tilde + 2.0 * p.beta;
      break;
    }
    case OfflineAlg::GreedyPlus: {
      auto p = knapsack_params(constraint);
      spec.alpha = 0.5 * (1.0 - std::exp(-1.0));
      spec.delta = 2.0 + p.k_tilde + p.beta;
      spec.tight_query_bound = query_bound(alg, constraint, eps_prime, /*tight=*/true);
      spec.small_horizon_fallback = true;
      break;
    }
    case OfflineAlg::GreedyPlusMax: {
      auto p = knapsack_params(constraint);
      spec.alpha = 0.5;
      spec.delta = 0.5 + p.k_tilde + 2.0 * p.beta;
      spec.tight_query_bound = query_bound(alg, constraint, eps_prime, /*tight=*/true);
      spec.small_horizon_fallback = true;
      break;
    }
    case OfflineAlg::RandomizedUsm:
      if (constraint.kind() != ConstraintKind::Unconstrained)
        throw ContractError("randomized-usm requires an unconstrained instance");
      spec.alpha = 0.5;
      spec.delta = 2.5 * n;
      spec.randomized = true;
      break;
  }
  return spec;
}

Subset OfflineAlgSpec::run(ValueOracle& oracle, RngStream& rng) const {
  switch (id) {
    case OfflineAlg::GreedyCardinality:
      return greedy_cardinality(oracle, constraint.ground_set_size(),
                                constraint.cardinality_k());
    case OfflineAlg::ThresholdGreedy:
      return threshold_greedy(oracle, constraint.ground_set_size(),
                              constraint.cardinality_k(), eps_prime);
    case OfflineAlg::PartialEnumeration:
      return partial_enumeration(oracle, constraint.costs(), constraint.budget());
    case OfflineAlg::GreedyPlus:
      return greedy_plus(oracle, constraint.costs(), constraint.budget());
    case OfflineAlg::GreedyPlusMax:
      return greedy_plus_max(oracle, constraint.costs(), constraint.budget());
    case OfflineAlg::RandomizedUsm:
      return randomized_usm(oracle, constraint.ground_set_size(), rng);
  }
  throw ContractError("run: unknown algorithm");
}

}  // namespace cmab
