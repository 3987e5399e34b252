#include "cmab/core.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace cmab {

std::string Subset::to_string() const {
  std::ostringstream out;
  out << '{';
  for (size_t i = 0; i < members_.size(); ++i) {
    if (i) out << ';';
    out << members_[i];
  }
  out << '}';
  return out.str();
}

Constraint Constraint::cardinality(int n, int k) {
  if (n <= 0) throw ContractError("cardinality: ground set must be nonempty");
  if (k < 1 || k > n)
    throw ContractError("cardinality: need 1 <= k <= n, got k=" + std::to_string(k) +
                        " n=" + std::to_string(n));
  Constraint c;
  c.kind_ = ConstraintKind::Cardinality;
  c.n_ = n;
  c.k_ = k;
  return c;
}

Constraint Constraint::knapsack(std::vector<double> costs, double budget) {
  if (costs.empty()) throw ContractError("knapsack: ground set must be nonempty");
  double total = 0.0;
  for (size_t i = 0; i < costs.size(); ++i) {
    if (!(costs[i] > 0.0))
      throw ContractError("knapsack: cost of element " + std::to_string(i) +
                          " must be positive");
    if (costs[i] > budget)
      throw ContractError("knapsack: cost of element " + std::to_string(i) +
                          " exceeds budget (items must have non-trivial costs)");
    total += costs[i];
  }
  if (budget > total)
    throw ContractError("knapsack: budget exceeds total cost of the ground set");
  Constraint c;
  c.kind_ = ConstraintKind::Knapsack;
  c.n_ = static_cast<int>(costs.size());
  c.costs_ = std::move(costs);
  c.budget_ = budget;
  return c;
}

Constraint Constraint::unconstrained(int n) {
  if (n <= 0) throw ContractError("unconstrained: ground set must be nonempty");
  Constraint c;
  c.kind_ = ConstraintKind::Unconstrained;
  c.n_ = n;
  return c;
}

int Constraint::cardinality_k() const {
  if (kind_ != ConstraintKind::Cardinality)
    throw ContractError("cardinality_k: not a cardinality constraint");
  return k_;
}

double Constraint::budget() const {
  if (kind_ != ConstraintKind::Knapsack)
    throw ContractError("budget: not a knapsack constraint");
  return budget_;
}

const std::vector<double>& Constraint::costs() const {
  if (kind_ != ConstraintKind::Knapsack)
    throw ContractError("costs: not a knapsack constraint");
  return costs_;
}

namespace {
void check_ids(const Subset& s, int n, const char* where) {
  if (!s.empty() && (s.members().front() < 0 || s.max_element() >= n))
    throw InstanceMismatchError(std::string(where) + ": element id outside ground set [0," +
                                std::to_string(n) + ")");
}
// Tolerant comparison so that budgets met exactly by a sum of costs do not
// flip on the last ulp.
bool leq_tol(double lhs, double rhs) {
  return lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs));
}
}  // namespace

bool Constraint::feasible(const Subset& s) const {
  check_ids(s, n_, "feasible");
  switch (kind_) {
    case ConstraintKind::Cardinality:
      return static_cast<int>(s.size()) <= k_;
    case ConstraintKind::Knapsack:
      return leq_tol(cost_of(s), budget_);
    case ConstraintKind::Unconstrained:
      return true;
  }
  return false;
}

double Constraint::cost_of(const Subset& s) const {
  if (kind_ != ConstraintKind::Knapsack)
    throw ContractError("cost_of: not a knapsack constraint");
  return subset_cost(costs_, s);
}

double subset_cost(const std::vector<double>& costs, const Subset& s) {
  check_ids(s, static_cast<int>(costs.size()), "subset_cost");
  double total = 0.0;
  for (ElementId e : s) total += costs[static_cast<size_t>(e)];
  return total;
}

bool is_feasible(const Constraint& c, const Subset& s) { return c.feasible(s); }

KnapsackParams knapsack_params(const Constraint& c) {
  if (c.kind() != ConstraintKind::Knapsack)
    throw ContractError("knapsack_params: not a knapsack constraint");
  const auto& costs = c.costs();
  double c_min = *std::min_element(costs.begin(), costs.end());
  KnapsackParams p;
  p.c_min = c_min;
  p.beta = c.budget() / c_min;
  p.k_tilde = std::min(c.ground_set_size(), static_cast<int>(std::floor(p.beta)));
  return p;
}

RngStream RngStream::substream(std::string_view label, uint64_t index) const {
  uint64_t h = 1469598103934665603ull;
  for (char ch : label) {
    h ^= static_cast<uint64_t>(static_cast<unsigned char>(ch));
    h *= 1099511628211ull;
  }
  uint64_t child = seed_;
  child = mix_(child ^ h);
  child = mix_(child ^ index);
  return RngStream(child);
}

}  // namespace cmab
