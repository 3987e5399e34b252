#include <doctest.h>

#include <cmath>

#include "cmab/offline.hpp"
#include "cmab/robustlab.hpp"

using namespace cmab;

namespace {

FunctionOracle modular_oracle(std::vector<double> w) {
  return FunctionOracle([w = std::move(w)](const Subset& s) {
    double v = 0.0;
    for (ElementId e : s) v += w[static_cast<size_t>(e)];
    return v;
  });
}

// coverage toy: e0 -> {a,b}, e1 -> {b,c}, e2 -> {d}; value = |union| / 4
double cover4(const Subset& s) {
  bool a = s.contains(0), b = s.contains(0) || s.contains(1), c = s.contains(1),
       d = s.contains(2);
  return (static_cast<int>(a) + static_cast<int>(b) + static_cast<int>(c) +
          static_cast<int>(d)) / 4.0;
}

// all subsets of {0..n-1} of size exactly k, lexicographic order
std::vector<Subset> k_subsets(int n, int k) {
  std::vector<Subset> out;
  std::vector<ElementId> members;
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    members.clear();
    for (int e = 0; e < n; ++e)
      if (mask & (1u << e)) members.push_back(e);
    out.emplace_back(members);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("greedy_cardinality picks top weights on modular objectives") {
  auto oracle = modular_oracle({0.5, 0.3, 0.2});
  CHECK(greedy_cardinality(oracle, 3, 2) == Subset{0, 1});
}

TEST_CASE("greedy_cardinality matches brute force on the coverage toy") {
  FunctionOracle oracle(cover4);
  Subset result = greedy_cardinality(oracle, 3, 2);

  // independent check: best pair by exhaustive enumeration, lexicographic ties
  Subset best;
  double best_value = -1.0;
  for (const Subset& s : k_subsets(3, 2)) {
    double v = cover4(s);
    if (v > best_value) {
      best_value = v;
      best = s;
    }
  }
  CHECK(result == best);
  CHECK(result == Subset{0, 1});
  CHECK(cover4(result) == doctest::Approx(0.75));
}

TEST_CASE("greedy_cardinality with k = n returns the full set") {
  auto oracle = modular_oracle({0.2, 0.5, 0.3});
  CHECK(greedy_cardinality(oracle, 3, 3) == Subset::full(3));
}

TEST_CASE("threshold_greedy matches an independent modular simulation") {
  std::vector<double> w{0.5, 0.3, 0.2};
  auto oracle = modular_oracle(w);
  Subset result = threshold_greedy(oracle, 3, 2, 0.1);

  // modular marginals equal the weights, so the pass structure is direct
  double d = *std::max_element(w.begin(), w.end());
  Subset expect;
  for (double tau = d; tau >= 0.1 / 3 * d && expect.size() < 2; tau *= 0.9)
    for (ElementId e = 0; e < 3 && expect.size() < 2; ++e)
      if (!expect.contains(e) && w[static_cast<size_t>(e)] >= tau)
        expect = expect.with(e);
  CHECK(result == expect);
  CHECK(result == Subset{0, 1});
}

TEST_CASE("threshold_greedy with k = 1 returns the best singleton") {
  auto oracle = modular_oracle({0.1, 0.6, 0.3});
  CHECK(threshold_greedy(oracle, 3, 1, 0.2) == Subset{1});
}

TEST_CASE("threshold_greedy approaches greedy value for small eps_prime") {
  RngStream rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 6 + rng.uniform_int(4);
    int k = 2 + rng.uniform_int(2);
    std::vector<double> w(static_cast<size_t>(n));
    double total = 0;
    double d = 0;
    for (double& x : w) {
      x = rng.uniform01();
      total += x;
    }
    for (double& x : w) {
      x /= total;
      d = std::max(d, x);
    }
    auto greedy_oracle = modular_oracle(w);
    auto tg_oracle = modular_oracle(w);
    double eps_prime = 0.001;
    double g = 0.0, t = 0.0;
    for (ElementId e : greedy_cardinality(greedy_oracle, n, k)) g += w[static_cast<size_t>(e)];
    for (ElementId e : threshold_greedy(tg_oracle, n, k, eps_prime)) t += w[static_cast<size_t>(e)];
    CHECK(t >= g - 2.0 * k * eps_prime * d);
  }
}

TEST_CASE("greedy_density_sequence on the two-element instance") {
  // densities 0.21/1 vs 0.40/2: element 0 wins, then nothing else fits
  auto oracle = modular_oracle({0.21, 0.4});
  GreedyTrace trace = greedy_density_sequence(oracle, {1, 2}, 2);
  REQUIRE(trace.sets.size() == 2);
  CHECK(trace.sets[0] == Subset{});
  CHECK(trace.sets[1] == Subset{0});
  CHECK(trace.picks == std::vector<ElementId>{0});
  CHECK(trace.augments == std::vector<ElementId>{1});  // f({1}) = 0.4 tops level 1
  CHECK(trace.set_values[1] == doctest::Approx(0.21));
}

TEST_CASE("unit-cost density greedy reproduces the cardinality trace") {
  std::vector<double> w{0.15, 0.4, 0.1, 0.35};
  auto card_oracle = modular_oracle(w);
  auto knap_oracle = modular_oracle(w);
  Subset via_card = greedy_cardinality(card_oracle, 4, 2);
  GreedyTrace trace = greedy_density_sequence(knap_oracle, {1, 1, 1, 1}, 2);
  CHECK(trace.output() == via_card);
}

TEST_CASE("greedy_density_sequence single element consuming the budget") {
  auto oracle = modular_oracle({0.7});
  GreedyTrace trace = greedy_density_sequence(oracle, {2.0}, 2.0);
  CHECK(trace.output() == Subset{0});
}

TEST_CASE("greedy_plus prefers the best singleton when greedy stalls") {
  auto oracle = modular_oracle({0.21, 0.4});
  CHECK(greedy_plus(oracle, {1, 2}, 2) == Subset{1});
}

TEST_CASE("greedy_plus keeps the greedy output under unit costs") {
  auto oracle = modular_oracle({0.3, 0.5, 0.2});
  CHECK(greedy_plus(oracle, {1, 1, 1}, 2) == Subset{0, 1});
}

TEST_CASE("greedy_plus trivial single-element instance") {
  auto oracle = modular_oracle({0.9});
  CHECK(greedy_plus(oracle, {1}, 1) == Subset{0});
}

TEST_CASE("greedy_plus_max beats plain greedy via augmentation") {
  auto oracle = modular_oracle({0.21, 0.4});
  Subset result = greedy_plus_max(oracle, {1, 2}, 2);

  // exhaustive check over feasible sets {}, {0}, {1}
  CHECK(result == Subset{1});
  CHECK(oracle.query(Subset{1}) == doctest::Approx(0.4));
}

TEST_CASE("greedy_plus_max reduces to greedy when nothing can augment") {
  auto oracle = modular_oracle({0.9});
  CHECK(greedy_plus_max(oracle, {1}, 1) == Subset{0});
}

TEST_CASE("partial_enumeration is exact for n <= 3") {
  auto oracle = modular_oracle({0.2, 0.3, 0.5});
  CHECK(partial_enumeration(oracle, {1, 1, 1}, 3) == Subset::full(3));

  auto oracle2 = modular_oracle({0.2, 0.3, 0.5});
  // budget admits only pairs; best pair is {1,2}
  CHECK(partial_enumeration(oracle2, {1, 1, 1}, 2) == Subset{1, 2});
}

TEST_CASE("partial_enumeration dominates greedy_plus on random instances") {
  auto corpus = make_corpus(12, 99, 6, 6);
  for (const auto& inst : corpus) {
    if (inst.constraint.kind() != ConstraintKind::Knapsack) continue;
    FunctionOracle pe_oracle(inst.mean);
    FunctionOracle gp_oracle(inst.mean);
    Subset pe = partial_enumeration(pe_oracle, inst.constraint.costs(),
                                    inst.constraint.budget());
    Subset gp = greedy_plus(gp_oracle, inst.constraint.costs(), inst.constraint.budget());
    CHECK(inst.mean(pe) >= inst.mean(gp) - 1e-12);
  }
}

TEST_CASE("randomized_usm on strictly positive modular returns everything") {
  RngStream rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto oracle = modular_oracle({0.3, 0.1, 0.2, 0.15});
    RngStream sub = rng.substream("usm", static_cast<uint64_t>(trial));
    CHECK(randomized_usm(oracle, 4, sub) == Subset::full(4));
  }
}

TEST_CASE("randomized_usm adds on zero marginals by convention") {
  FunctionOracle oracle([](const Subset&) { return 0.0; });
  RngStream rng(11);
  CHECK(randomized_usm(oracle, 3, rng) == Subset::full(3));
}

TEST_CASE("randomized_usm achieves half of OPT on the two-element cut") {
  // f({0}) = f({1}) = 1, f({}) = f({0,1}) = 0.  Both coin paths end at value 1.
  auto cut = [](const Subset& s) { return s.size() == 1 ? 1.0 : 0.0; };
  RngStream rng(17);
  double total = 0.0;
  const int runs = 400;
  for (int i = 0; i < runs; ++i) {
    FunctionOracle oracle(cut);
    RngStream sub = rng.substream("run", static_cast<uint64_t>(i));
    Subset s = randomized_usm(oracle, 2, sub);
    CHECK(s.size() == 1);
    total += cut(s);
  }
  CHECK(total / runs >= 0.5);  // OPT = 1, guarantee is OPT/2
  CHECK(total / runs == doctest::Approx(1.0));
}

TEST_CASE("query_bound formulas") {
  CHECK(query_bound(OfflineAlg::GreedyCardinality, Constraint::cardinality(18, 6)) == 108);
  CHECK(query_bound(OfflineAlg::RandomizedUsm, Constraint::unconstrained(20)) == 80);

  std::vector<double> costs(18, 1.0);
  Constraint knap = Constraint::knapsack(costs, 6.0);  // K~ = 6
  CHECK(query_bound(OfflineAlg::GreedyPlusMax, knap) == 108);
  CHECK(query_bound(OfflineAlg::GreedyPlusMax, knap, 0.1, /*tight=*/true) == 93);
  CHECK(query_bound(OfflineAlg::PartialEnumeration, knap) == 6ll * 18 * 18 * 18 * 18);

  CHECK_THROWS_AS(query_bound(OfflineAlg::GreedyCardinality, knap), ContractError);
  CHECK_THROWS_AS(query_bound(OfflineAlg::GreedyPlus, Constraint::cardinality(5, 2)),
                  ContractError);
}

TEST_CASE("every algorithm respects its query bound and only queries feasible sets") {
  auto corpus = make_corpus(30, 1234, 5, 9);
  RngStream rng(55);
  for (const auto& inst : corpus) {
    std::vector<OfflineAlg> algs;
    switch (inst.constraint.kind()) {
      case ConstraintKind::Cardinality:
        algs = {OfflineAlg::GreedyCardinality, OfflineAlg::ThresholdGreedy};
        break;
      case ConstraintKind::Knapsack:
        algs = {OfflineAlg::GreedyPlus, OfflineAlg::GreedyPlusMax,
                OfflineAlg::PartialEnumeration};
        break;
      case ConstraintKind::Unconstrained:
        algs = {OfflineAlg::RandomizedUsm};
        break;
    }
    for (OfflineAlg alg : algs) {
      OfflineAlgSpec spec = make_offline_spec(alg, inst.constraint);
      FunctionOracle oracle(inst.mean);
      RngStream sub = rng.substream(inst.id + to_string(alg));
      Subset out = spec.run(oracle, sub);
      CHECK(oracle.query_count() <= spec.query_bound);
      CHECK(inst.constraint.feasible(out));
      for (const auto& [queried, value] : oracle.memo()) {
        CHECK(inst.constraint.feasible(queried));
        CHECK(!queried.empty());  // the empty set is never spent on
      }
    }
  }
}

TEST_CASE("greedy trace values are monotone for monotone exact oracles") {
  auto corpus = make_corpus(20, 77, 5, 9);
  for (const auto& inst : corpus) {
    if (inst.constraint.kind() != ConstraintKind::Knapsack) continue;
    FunctionOracle oracle(inst.mean);
    GreedyTrace trace = greedy_density_sequence(oracle, inst.constraint.costs(),
                                                inst.constraint.budget());
    for (size_t i = 1; i < trace.set_values.size(); ++i)
      CHECK(trace.set_values[i] >= trace.set_values[i - 1] - 1e-12);
  }
}

TEST_CASE("deterministic algorithms produce identical outputs across reruns") {
  auto corpus = make_corpus(10, 2024, 5, 8);
  RngStream rng(1);
  for (const auto& inst : corpus) {
    if (inst.constraint.kind() == ConstraintKind::Unconstrained) continue;
    std::vector<OfflineAlg> algs =
        inst.constraint.kind() == ConstraintKind::Cardinality
            ? std::vector<OfflineAlg>{OfflineAlg::GreedyCardinality,
                                      OfflineAlg::ThresholdGreedy}
            : std::vector<OfflineAlg>{OfflineAlg::GreedyPlus, OfflineAlg::GreedyPlusMax,
                                      OfflineAlg::PartialEnumeration};
    for (OfflineAlg alg : algs) {
      OfflineAlgSpec spec = make_offline_spec(alg, inst.constraint);
      FunctionOracle o1(inst.mean), o2(inst.mean);
      CHECK(spec.run(o1, rng) == spec.run(o2, rng));
    }
  }
}

TEST_CASE("offline spec constants match the certified pairs") {
  Constraint card = Constraint::cardinality(10, 3);
  auto greedy = make_offline_spec(OfflineAlg::GreedyCardinality, card);
  CHECK(greedy.alpha == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(greedy.delta == doctest::Approx(6.0));
  CHECK(greedy.query_bound == 30);

  auto tg = make_offline_spec(OfflineAlg::ThresholdGreedy, card, 0.1);
  CHECK(tg.alpha == doctest::Approx(1.0 - std::exp(-1.0) - 0.1));
  CHECK(tg.delta == doctest::Approx(2.0 * 1.9 * 3));

  std::vector<double> costs(10, 1.0);
  Constraint knap = Constraint::knapsack(costs, 4.0);  // beta = K~ = 4
  auto gp = make_offline_spec(OfflineAlg::GreedyPlus, knap);
  CHECK(gp.alpha == doctest::Approx(0.5 * (1.0 - std::exp(-1.0))));
  CHECK(gp.delta == doctest::Approx(2.0 + 4 + 4.0));
  CHECK(gp.small_horizon_fallback);

  auto gpm = make_offline_spec(OfflineAlg::GreedyPlusMax, knap);
  CHECK(gpm.alpha == doctest::Approx(0.5));
  CHECK(gpm.delta == doctest::Approx(0.5 + 4 + 8.0));

  auto pe = make_offline_spec(OfflineAlg::PartialEnumeration, knap);
  CHECK(pe.alpha == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(pe.delta == doctest::Approx(4.0 + 8 + 8.0));

  auto usm = make_offline_spec(OfflineAlg::RandomizedUsm, Constraint::unconstrained(10));
  CHECK(usm.alpha == doctest::Approx(0.5));
  CHECK(usm.delta == doctest::Approx(25.0));
  CHECK(usm.randomized);
  CHECK(usm.query_bound == 40);
}
