#include "cmab/cetc.hpp"

#include <cmath>
#include <ostream>

namespace cmab {

namespace {

int64_t m_formula(double delta, double query_bound, double horizon) {
  double m = std::pow(delta, 2.0 / 3.0) * std::pow(horizon, 2.0 / 3.0) *
             std::cbrt(std::log(horizon)) /
             (2.0 * std::pow(query_bound, 2.0 / 3.0));
  return std::max<int64_t>(1, static_cast<int64_t>(std::ceil(m)));
}

}  // namespace

int64_t compute_m(double delta, int64_t query_bound, int64_t horizon) {
  if (!(delta > 0.0) || query_bound < 1 || horizon < 1)
    throw ContractError("compute_m: need delta > 0, N >= 1, T >= 1");
  double threshold =
      std::max(static_cast<double>(query_bound),
               2.0 * std::sqrt(2.0) * static_cast<double>(query_bound) / delta);
  if (static_cast<double>(horizon) < threshold)
    throw HorizonError("compute_m: horizon " + std::to_string(horizon) +
                       " below max{N, 2*sqrt(2)*N/delta} = " + std::to_string(threshold));
  return m_formula(delta, static_cast<double>(query_bound),
                   static_cast<double>(horizon));
}

int64_t adjust_m_small_T(int64_t m_dagger, int n, int k_tilde, int64_t horizon) {
  if (m_dagger < 1 || n < 1 || k_tilde < 1)
    throw ContractError("adjust_m_small_T: bad arguments");
  double tight = (n - 0.5 * k_tilde + 0.5) * k_tilde;
  if (tight * static_cast<double>(m_dagger) < static_cast<double>(horizon))
    return m_dagger;
  int64_t m = static_cast<int64_t>(std::floor(static_cast<double>(horizon) / tight));
  if (m < 1)
    throw HorizonError("adjust_m_small_T: horizon " + std::to_string(horizon) +
                       " cannot fit one play of every candidate query (need >= " +
                       std::to_string(static_cast<int64_t>(std::ceil(tight))) + ")");
  return m;
}

CETCSchedule make_schedule(const OfflineAlgSpec& spec, int64_t horizon) {
  CETCSchedule s;
  s.horizon = horizon;
  s.query_bound = spec.query_bound;
  s.delta = spec.delta;
  double threshold = std::max(static_cast<double>(spec.query_bound),
                              2.0 * std::sqrt(2.0) * spec.query_bound / spec.delta);
  s.precondition_ok = static_cast<double>(horizon) >= threshold;
  if (spec.small_horizon_fallback) {
    int64_t m_dagger = m_formula(spec.delta, static_cast<double>(spec.query_bound),
                                 static_cast<double>(horizon));
    auto params = knapsack_params(spec.constraint);
    s.m = adjust_m_small_T(m_dagger, spec.constraint.ground_set_size(),
                           params.k_tilde, horizon);
    s.small_horizon_adjusted = s.m != m_dagger;
  } else {
    s.m = compute_m(spec.delta, spec.query_bound, horizon);
  }
  s.rad = std::sqrt(std::log(static_cast<double>(horizon)) /
                    (2.0 * static_cast<double>(s.m)));
  return s;
}

double RunTrace::total_reward() const {
  double total = 0.0;
  for (double r : rewards) total += r;
  return total;
}

void RunTrace::write_csv(std::ostream& out) const {
  out << "t,action,reward,phase\n";
  char buf[64];
  for (size_t t = 0; t < rewards.size(); ++t) {
    const Subset& a = actions[static_cast<size_t>(action_index[t])];
    out << (t + 1) << ',';
    const auto& m = a.members();
    for (size_t i = 0; i < m.size(); ++i) {
      if (i) out << ';';
      out << m[i];
    }
    std::snprintf(buf, sizeof(buf), "%.12g", rewards[t]);
    out << ',' << buf << ','
        << (phases[t] == static_cast<uint8_t>(Phase::Explore) ? "explore" : "exploit")
        << '\n';
  }
}

namespace {

// Plays every queried action m times against the environment and reports the
// empirical mean, recording rounds into the trace.  Memoization in the base
// class guarantees re-queried sets never consume extra plays.
class BanditOracle final : public ValueOracle {
 public:
  BanditOracle(const Environment& env, const Constraint& constraint, int64_t m,
               int64_t horizon, RngStream& rng, RunTrace& trace)
      : env_(env), constraint_(constraint), m_(m), horizon_(horizon), rng_(rng),
        trace_(trace) {}

 protected:
  double evaluate(const Subset& action) override {
    if (!constraint_.feasible(action))
      throw ContractError("exploration queried an infeasible action " +
                          action.to_string());
    if (static_cast<int64_t>(trace_.rewards.size()) + m_ > horizon_)
      throw ConfigError(
          "horizon exhausted during exploration; the schedule cannot fit the "
          "query sequence (small-horizon fallback applies to the knapsack "
          "greedy family only)");
    int32_t idx = static_cast<int32_t>(trace_.actions.size());
    trace_.actions.push_back(action);
    double sum = 0.0;
    for (int64_t i = 0; i < m_; ++i) {
      double r = env_.sample(action, rng_);
      if (!(r >= 0.0 && r <= 1.0))
        throw ContractError("environment produced reward outside [0,1]: " +
                            std::to_string(r));
      sum += r;
      trace_.rewards.push_back(r);
      trace_.action_index.push_back(idx);
      trace_.phases.push_back(static_cast<uint8_t>(Phase::Explore));
    }
    double mean = sum / static_cast<double>(m_);
    trace_.empirical_means.push_back(mean);
    return mean;
  }

 private:
  const Environment& env_;
  const Constraint& constraint_;
  int64_t m_;
  int64_t horizon_;
  RngStream& rng_;
  RunTrace& trace_;
};

}  // namespace

RunTrace run_cetc(const Environment& env, const OfflineAlgSpec& spec, int64_t horizon,
                  RngStream& rng) {
  if (env.ground_set_size() != spec.constraint.ground_set_size())
    throw InstanceMismatchError("run_cetc: environment and constraint disagree on n");
  RunTrace trace;
  trace.horizon = horizon;
  trace.schedule = make_schedule(spec, horizon);

  RngStream explore_rng = rng.substream("cetc-explore");
  RngStream alg_rng = rng.substream("cetc-alg");
  RngStream exploit_rng = rng.substream("cetc-exploit");

  BanditOracle oracle(env, spec.constraint, trace.schedule.m, horizon, explore_rng,
                      trace);
  trace.committed = spec.run(oracle, alg_rng);
  trace.explore_rounds = static_cast<int64_t>(trace.rewards.size());

  if (!spec.constraint.feasible(trace.committed))
    throw ContractError("offline algorithm committed an infeasible set");

  int32_t commit_idx = -1;
  for (size_t i = 0; i < trace.actions.size(); ++i) {
    if (trace.actions[i] == trace.committed) {
      commit_idx = static_cast<int32_t>(i);
      break;
    }
  }
  if (commit_idx < 0) {
    commit_idx = static_cast<int32_t>(trace.actions.size());
    trace.actions.push_back(trace.committed);
  }
  for (int64_t t = trace.explore_rounds; t < horizon; ++t) {
    double r = env.sample(trace.committed, exploit_rng);
    if (!(r >= 0.0 && r <= 1.0))
      throw ContractError("environment produced reward outside [0,1]: " +
                          std::to_string(r));
    trace.rewards.push_back(r);
    trace.action_index.push_back(commit_idx);
    trace.phases.push_back(static_cast<uint8_t>(Phase::Exploit));
  }
  return trace;
}

RunTrace anytime_cetc(const Environment& env, const OfflineAlgSpec& spec,
                      int64_t initial_horizon, int64_t stop_round, RngStream& rng) {
  if (initial_horizon < 1 || stop_round < 1)
    throw ContractError("anytime_cetc: need T0 >= 1 and stop >= 1");
  RunTrace combined;
  combined.horizon = stop_round;

  int64_t played = 0;
  for (int epoch = 0; played < stop_round; ++epoch) {
    int64_t length = epoch == 0 ? initial_horizon : initial_horizon << (epoch - 1);
    RngStream epoch_rng = rng.substream("anytime-epoch", static_cast<uint64_t>(epoch));
    RunTrace t = run_cetc(env, spec, length, epoch_rng);
    int64_t keep = std::min(length, stop_round - played);
    int32_t base = static_cast<int32_t>(combined.actions.size());
    combined.actions.insert(combined.actions.end(), t.actions.begin(), t.actions.end());
    for (int64_t i = 0; i < keep; ++i) {
      combined.rewards.push_back(t.rewards[static_cast<size_t>(i)]);
      combined.action_index.push_back(base + t.action_index[static_cast<size_t>(i)]);
      combined.phases.push_back(t.phases[static_cast<size_t>(i)]);
    }
    played += keep;
    combined.committed = t.committed;
    combined.schedule = t.schedule;
  }
  // No single boundary exists across epochs; report total exploration rounds.
  for (uint8_t p : combined.phases)
    if (p == static_cast<uint8_t>(Phase::Explore)) ++combined.explore_rounds;
  return combined;
}

}  // namespace cmab
