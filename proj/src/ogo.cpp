#include "cmab/ogo.hpp"

#include <cmath>
#include <unordered_map>

namespace cmab {

OGOParams ogo_params(int n, double beta, int64_t horizon) {
  if (n < 2 || beta < 1.0 || horizon < 1)
    throw ContractError("ogo_params: need n >= 2, beta >= 1, T >= 1");
  OGOParams p;
  double raw = std::cbrt(static_cast<double>(n)) * beta *
               std::cbrt(std::log(static_cast<double>(n)) /
                         static_cast<double>(horizon));
  p.gamma = std::min(0.5, raw);
  p.eta = std::sqrt(beta * std::log(static_cast<double>(n)) /
                    (p.gamma * static_cast<double>(horizon)));
  return p;
}

OGOState::OGOState(int experts, int arms) : experts_(experts), arms_(arms) {
  if (experts < 1 || arms < 1) throw ContractError("OGOState: bad dimensions");
  w_.assign(static_cast<size_t>(experts) * static_cast<size_t>(arms), 1.0);
}

int OGOState::sample_arm(int expert, const Subset& taken, RngStream& rng) const {
  const double* row = &w_[static_cast<size_t>(expert) * static_cast<size_t>(arms_)];
  double total = 0.0;
  for (int a = 0; a < arms_; ++a)
    if (!taken.contains(a)) total += row[a];
  if (total <= 0.0) return -1;
  double u = rng.uniform01() * total;
  double acc = 0.0;
  int last = -1;
  for (int a = 0; a < arms_; ++a) {
    if (taken.contains(a)) continue;
    acc += row[a];
    last = a;
    if (u < acc) return a;
  }
  return last;
}

void OGOState::apply_loss(int expert, int spared_arm, double loss, double eta) {
  double* row = &w_[static_cast<size_t>(expert) * static_cast<size_t>(arms_)];
  double factor = std::exp(-eta * loss);
  double max_w = 0.0;
  for (int a = 0; a < arms_; ++a) {
    if (a != spared_arm) row[a] *= factor;
    max_w = std::max(max_w, row[a]);
  }
  for (int a = 0; a < arms_; ++a) row[a] /= max_w;
}

void OGOState::apply_payoff(int expert, int arm, double payoff, double eta) {
  double* row = &w_[static_cast<size_t>(expert) * static_cast<size_t>(arms_)];
  row[arm] *= std::exp(eta * payoff);
  double max_w = 0.0;
  for (int a = 0; a < arms_; ++a) max_w = std::max(max_w, row[a]);
  for (int a = 0; a < arms_; ++a) row[a] /= max_w;
}

RunTrace run_ogo(const Environment& env, const std::vector<double>& costs,
                 double budget, int64_t horizon, RngStream& rng,
                 const OGOConfig& config, OGOState* final_state) {
  const int n = static_cast<int>(costs.size());
  if (env.ground_set_size() != n)
    throw InstanceMismatchError("run_ogo: environment and costs disagree on n");
  Constraint constraint = Constraint::knapsack(costs, budget);
  KnapsackParams kp = knapsack_params(constraint);
  const int experts = std::max(1, static_cast<int>(std::floor(kp.beta)));

  OGOParams params;
  if (n >= 2) params = ogo_params(n, kp.beta, horizon);
  if (config.gamma_override >= 0.0) params.gamma = config.gamma_override;
  if (config.eta_override >= 0.0) params.eta = config.eta_override;

  OGOState state(experts, n);
  RunTrace trace;
  trace.horizon = horizon;

  std::unordered_map<Subset, int32_t, SubsetHash> action_ids;
  auto intern = [&](const Subset& s) {
    auto [it, fresh] = action_ids.emplace(s, static_cast<int32_t>(trace.actions.size()));
    if (fresh) trace.actions.push_back(s);
    return it->second;
  };

  for (int64_t t = 0; t < horizon; ++t) {
    Subset action;
    bool exploring = rng.uniform01() < params.gamma;
    if (exploring) {
      int e = rng.uniform_int(experts);  // explore slot, 0-based
      for (int i = 0; i < e; ++i) {
        int arm = state.sample_arm(i, action, rng);
        if (arm < 0) break;
        if (rng.uniform01() < kp.c_min / costs[static_cast<size_t>(arm)])
          action = action.with(arm);
      }
      int explored = -1;
      if (static_cast<int>(action.size()) < n) {
        int pick = rng.uniform_int(n - static_cast<int>(action.size()));
        for (int a = 0; a < n; ++a) {
          if (action.contains(a)) continue;
          if (pick-- == 0) {
            explored = a;
            break;
          }
        }
        action = action.with(explored);
      }
      double reward = env.sample(action, rng);
      if (!(reward >= 0.0 && reward <= 1.0))
        throw ContractError("environment produced reward outside [0,1]");
      if (explored >= 0) {
        double signal = kp.c_min * reward / costs[static_cast<size_t>(explored)];
        if (config.reward_to_played_arm)
          state.apply_payoff(e, explored, signal, params.eta);
        else
          state.apply_loss(e, explored, signal, params.eta);
      }
      trace.rewards.push_back(reward);
      trace.action_index.push_back(intern(action));
      trace.phases.push_back(static_cast<uint8_t>(Phase::Explore));
    } else {
      for (int i = 0; i < experts; ++i) {
        int arm = state.sample_arm(i, action, rng);
        if (arm < 0) break;
        if (rng.uniform01() < kp.c_min / costs[static_cast<size_t>(arm)])
          action = action.with(arm);
      }
      double reward = env.sample(action, rng);
      if (!(reward >= 0.0 && reward <= 1.0))
        throw ContractError("environment produced reward outside [0,1]");
      trace.rewards.push_back(reward);
      trace.action_index.push_back(intern(action));
      trace.phases.push_back(static_cast<uint8_t>(Phase::Exploit));
    }
  }
  trace.explore_rounds = 0;
  for (uint8_t p : trace.phases)
    if (p == static_cast<uint8_t>(Phase::Explore)) ++trace.explore_rounds;
  if (final_state) *final_state = state;
  return trace;
}

}  // namespace cmab
