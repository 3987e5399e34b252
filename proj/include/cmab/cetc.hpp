#pragma once

// Explore-then-commit adapter: intercepts the offline algorithm's oracle
// queries, plays each queried action m times, feeds the empirical mean back,
// then commits to the offline output for the remaining rounds.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cmab/core.hpp"
#include "cmab/environment.hpp"
#include "cmab/offline.hpp"

namespace cmab {

struct CETCSchedule {
  int64_t horizon = 0;
  int64_t m = 0;          // plays per queried action
  double rad = 0.0;       // sqrt(ln T / 2m)
  int64_t query_bound = 0;
  double delta = 0.0;
  bool precondition_ok = false;  // T >= max{N, 2*sqrt(2)*N/delta}
  bool small_horizon_adjusted = false;
};

// m = ceil(delta^{2/3} T^{2/3} ln(T)^{1/3} / (2 N^{2/3})).
// Throws HorizonError when T < max{N, 2*sqrt(2)*N/delta}; small horizons are
// only supported through adjust_m_small_T for the knapsack greedy family.
int64_t compute_m(double delta, int64_t query_bound, int64_t horizon);

// Small-horizon fallback: caps m so that exploration provably finishes, using
// the sharper query bound (n - K~/2 + 1/2) K~.  Throws HorizonError when even
// m = 1 cannot fit.
int64_t adjust_m_small_T(int64_t m_dagger, int n, int k_tilde, int64_t horizon);

CETCSchedule make_schedule(const OfflineAlgSpec& spec, int64_t horizon);

enum class Phase : uint8_t { Explore = 0, Exploit = 1 };

// Full per-round record of one bandit run.  Actions are deduplicated through
// a table so long horizons stay cheap to hold.
struct RunTrace {
  int64_t horizon = 0;
  std::vector<Subset> actions;           // distinct actions, first-play order
  std::vector<double> empirical_means;   // per distinct action (explored ones)
  std::vector<int32_t> action_index;     // per round, into `actions`
  std::vector<double> rewards;           // per round
  std::vector<uint8_t> phases;           // per round, Phase values
  int64_t explore_rounds = 0;            // exploration/exploitation boundary
  Subset committed;                      // exploitation action
  CETCSchedule schedule;

  const Subset& action_at(int64_t t) const {  // t is 0-based
    return actions[static_cast<size_t>(action_index[static_cast<size_t>(t)])];
  }
  double total_reward() const;

  // CSV columns: t,action,reward,phase with action ids semicolon-joined.
  void write_csv(std::ostream& out) const;
};

RunTrace run_cetc(const Environment& env, const OfflineAlgSpec& spec, int64_t horizon,
                  RngStream& rng);

// Horizon-oblivious variant: restarts run_cetc on the geometric grid
// T_j = T0 * 2^j (epoch lengths T0, T0, 2*T0, 4*T0, ...) until the true stop
// round, discarding learned state across epochs.
RunTrace anytime_cetc(const Environment& env, const OfflineAlgSpec& spec,
                      int64_t initial_horizon, int64_t stop_round, RngStream& rng);

}  // namespace cmab
