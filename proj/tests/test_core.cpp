#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "cmab/core.hpp"

using namespace cmab;

TEST_CASE("subset canonical form is insertion-order independent") {
  RngStream rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + rng.uniform_int(12);
    std::vector<ElementId> members;
    for (int e = 0; e < n; ++e)
      if (rng.bernoulli(0.5)) members.push_back(e);
    Subset canonical(members);
    // shuffle, with a duplicate thrown in
    std::vector<ElementId> permuted = members;
    for (size_t i = permuted.size(); i > 1; --i)
      std::swap(permuted[i - 1], permuted[static_cast<size_t>(rng.uniform_int(static_cast<int>(i)))]);
    if (!permuted.empty()) permuted.push_back(permuted.front());
    Subset reordered(permuted);
    CHECK(canonical == reordered);
    CHECK(SubsetHash{}(canonical) == SubsetHash{}(reordered));
  }
}

TEST_CASE("subset with/without/contains") {
  Subset s{2, 0};
  CHECK(s.size() == 2);
  CHECK(s.contains(0));
  CHECK(!s.contains(1));
  Subset t = s.with(1);
  CHECK(t.members() == std::vector<ElementId>{0, 1, 2});
  CHECK(s.with(0) == s);
  CHECK(t.without(1) == s);
  CHECK(t.without(5) == t);
  CHECK(Subset::full(3) == Subset{0, 1, 2});
  CHECK(Subset{}.to_string() == "{}");
  CHECK(t.to_string() == "{0;1;2}");
}

TEST_CASE("is_feasible across constraint kinds") {
  CHECK_FALSE(Constraint::cardinality(3, 2).feasible(Subset{0, 1, 2}));
  CHECK(Constraint::knapsack({1, 2, 3}, 3).feasible(Subset{0, 1}));
  CHECK(Constraint::unconstrained(4).feasible(Subset::full(4)));
  CHECK_THROWS_AS(Constraint::cardinality(3, 2).feasible(Subset{7}),
                  InstanceMismatchError);
}

TEST_CASE("constraint invariants are validated") {
  CHECK_THROWS_AS(Constraint::cardinality(3, 0), ContractError);
  CHECK_THROWS_AS(Constraint::cardinality(3, 4), ContractError);
  CHECK_THROWS_AS(Constraint::knapsack({1, 5}, 3), ContractError);  // cost > budget
  CHECK_THROWS_AS(Constraint::knapsack({1, 1}, 10), ContractError); // budget > total
  CHECK_THROWS_AS(Constraint::knapsack({0.0, 1.0}, 1), ContractError);
}

TEST_CASE("subset_cost") {
  std::vector<double> c{1, 2, 3};
  CHECK(subset_cost(c, Subset{}) == 0.0);
  CHECK(subset_cost(c, Subset{0, 2}) == 4.0);
  CHECK(subset_cost({0.5, 0.5}, Subset{0, 1}) == 1.0);
  CHECK_THROWS_AS(subset_cost(c, Subset{3}), InstanceMismatchError);
}

TEST_CASE("knapsack_params") {
  auto p1 = knapsack_params(Constraint::knapsack({1, 1, 1}, 2));
  CHECK(p1.c_min == 1.0);
  CHECK(p1.beta == 2.0);
  CHECK(p1.k_tilde == 2);

  auto p2 = knapsack_params(Constraint::knapsack({2, 4}, 5));
  CHECK(p2.beta == doctest::Approx(2.5));
  CHECK(p2.k_tilde == 2);  // floor(2.5), then min with n=2

  auto p3 = knapsack_params(Constraint::knapsack(std::vector<double>(10, 1.0), 10));
  CHECK(p3.k_tilde == 10);  // beta = 10 >= n

  CHECK_THROWS_AS(knapsack_params(Constraint::cardinality(3, 2)), ContractError);
}

TEST_CASE("oracle memoizes and counts distinct queries") {
  int evaluations = 0;
  FunctionOracle oracle([&](const Subset& s) {
    ++evaluations;
    return 0.25 * static_cast<double>(s.size());
  });
  double first = oracle.query(Subset{1, 2});
  double second = oracle.query(Subset{2, 1});
  CHECK(first == second);
  CHECK(evaluations == 1);
  CHECK(oracle.query_count() == 1);
  oracle.query(Subset{1});
  CHECK(oracle.query_count() == 2);
}

TEST_CASE("rng streams are deterministic and substreams independent") {
  RngStream a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream root(9);
  RngStream s1 = root.substream("x", 0);
  RngStream s2 = root.substream("x", 1);
  RngStream s3 = root.substream("y", 0);
  // draws from the root do not shift substream derivation
  root.next_u64();
  RngStream s1_again = root.substream("x", 0);
  CHECK(s1.next_u64() == s1_again.next_u64());
  CHECK(s1.next_u64() != s2.next_u64());
  CHECK(s2.next_u64() != s3.next_u64());
}

TEST_CASE("rng helpers stay in range") {
  RngStream rng(7);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    int k = rng.uniform_int(7);
    CHECK(k >= 0);
    CHECK(k < 7);
  }
  CHECK_THROWS_AS(rng.uniform_int(0), ContractError);
}
