#pragma once

// Ground-set, subset, constraint and value-oracle primitives shared by the
// whole toolkit, plus the deterministic RNG substream contract.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cmab {

using ElementId = int32_t;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

// Violated API contract (bad argument, mismatched algorithm/constraint kind).
struct ContractError : std::runtime_error {
  explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

// Subset references an element outside the instance's ground set.
struct InstanceMismatchError : std::runtime_error {
  explicit InstanceMismatchError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// Horizon too small for the requested schedule.
struct HorizonError : std::runtime_error {
  explicit HorizonError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid run configuration (bad config file, mid-run budget exhaustion).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data file.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Subset
// ---------------------------------------------------------------------------

// A set of ground-set elements kept in canonical (sorted, deduplicated) form.
// The canonical form doubles as the memoization key for value oracles.
class Subset {
 public:
  Subset() = default;
  explicit Subset(std::vector<ElementId> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }
  Subset(std::initializer_list<ElementId> members)
      : Subset(std::vector<ElementId>(members)) {}

  static Subset full(int n) {
    std::vector<ElementId> m(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) m[static_cast<size_t>(i)] = i;
    Subset s;
    s.members_ = std::move(m);
    return s;
  }

  bool contains(ElementId e) const {
    return std::binary_search(members_.begin(), members_.end(), e);
  }
  Subset with(ElementId e) const {
    if (contains(e)) return *this;
    Subset s = *this;
    s.members_.insert(std::upper_bound(s.members_.begin(), s.members_.end(), e), e);
    return s;
  }
  Subset without(ElementId e) const {
    Subset s = *this;
    auto it = std::lower_bound(s.members_.begin(), s.members_.end(), e);
    if (it != s.members_.end() && *it == e) s.members_.erase(it);
    return s;
  }

  size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const std::vector<ElementId>& members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  ElementId max_element() const { return members_.empty() ? -1 : members_.back(); }

  friend bool operator==(const Subset& a, const Subset& b) {
    return a.members_ == b.members_;
  }
  friend bool operator!=(const Subset& a, const Subset& b) { return !(a == b); }
  // Lexicographic order on the canonical member list; used for tie-breaks.
  friend bool operator<(const Subset& a, const Subset& b) {
    return a.members_ < b.members_;
  }

  std::string to_string() const;  // "{0;2;5}" style, ids semicolon-joined

 private:
  std::vector<ElementId> members_;
};

struct SubsetHash {
  size_t operator()(const Subset& s) const {
    uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (ElementId e : s.members()) {
      h ^= static_cast<uint64_t>(static_cast<uint32_t>(e));
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

// ---------------------------------------------------------------------------
// Constraints
// ---------------------------------------------------------------------------

enum class ConstraintKind { Cardinality, Knapsack, Unconstrained };

struct KnapsackParams {
  double c_min = 0.0;
  double beta = 0.0;   // budget / c_min
  int k_tilde = 0;     // min(n, floor(beta)): bounds the cardinality of any feasible set
};

class Constraint {
 public:
  Constraint() = default;  // placeholder; build real ones via the factories
  static Constraint cardinality(int n, int k);
  static Constraint knapsack(std::vector<double> costs, double budget);
  static Constraint unconstrained(int n);

  ConstraintKind kind() const { return kind_; }
  int ground_set_size() const { return n_; }
  int cardinality_k() const;
  double budget() const;
  const std::vector<double>& costs() const;

  // Checks membership in the feasible family; throws InstanceMismatchError on
  // out-of-range element ids.
  bool feasible(const Subset& s) const;
  double cost_of(const Subset& s) const;

 private:
  ConstraintKind kind_ = ConstraintKind::Unconstrained;
  int n_ = 0;
  int k_ = 0;
  std::vector<double> costs_;
  double budget_ = 0.0;
};

double subset_cost(const std::vector<double>& costs, const Subset& s);
bool is_feasible(const Constraint& c, const Subset& s);
KnapsackParams knapsack_params(const Constraint& c);

// ---------------------------------------------------------------------------
// Value oracle
// ---------------------------------------------------------------------------

// Memoizing value oracle: repeated queries of the same canonical subset return
// the identical value and count once.  The memo makes the surrogate a fixed
// function per run, which the query-budget accounting relies on.
class ValueOracle {
 public:
  virtual ~ValueOracle() = default;

  double query(const Subset& s) {
    auto it = memo_.find(s);
    if (it != memo_.end()) return it->second;
    double v = evaluate(s);
    memo_.emplace(s, v);
    ++count_;
    return v;
  }

  int64_t query_count() const { return count_; }
  const std::unordered_map<Subset, double, SubsetHash>& memo() const { return memo_; }

 protected:
  virtual double evaluate(const Subset& s) = 0;

 private:
  std::unordered_map<Subset, double, SubsetHash> memo_;
  int64_t count_ = 0;
};

// Exact oracle over an arbitrary set function.
class FunctionOracle final : public ValueOracle {
 public:
  explicit FunctionOracle(std::function<double(const Subset&)> fn) : fn_(std::move(fn)) {}

 protected:
  double evaluate(const Subset& s) override { return fn_(s); }

 private:
  std::function<double(const Subset&)> fn_;
};

// ---------------------------------------------------------------------------
// Deterministic RNG streams
// ---------------------------------------------------------------------------

// Seeded RNG with independent substreams addressable by (label, index).
// Substreams derive from the root seed, not from engine state, so the draw
// order in one stream never perturbs another.  All draws go through
// hand-rolled conversions for bit-identical sequences across platforms.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : seed_(seed), state_(mix_(seed)) {}

  RngStream substream(std::string_view label, uint64_t index = 0) const;

  uint64_t next_u64() {
    // splitmix64
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform01() {  // [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  int uniform_int(int n) {  // [0, n)
    if (n <= 0) throw ContractError("uniform_int: n must be positive");
    return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                             static_cast<uint64_t>(n)) >> 64);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  uint64_t seed() const { return seed_; }

 private:
  static uint64_t mix_(uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ull;
    x ^= x >> 33;
    return x;
  }

  uint64_t seed_;
  uint64_t state_;
};

}  // namespace cmab
