#pragma once

// Online greedy baseline for the opaque (full-bandit) feedback model: one
// randomized-weighted-majority expert per budget slot, epsilon-greedy
// exploration, and a knapsack budget honored in expectation only.

#include <cstdint>
#include <vector>

#include "cmab/cetc.hpp"
#include "cmab/core.hpp"
#include "cmab/environment.hpp"

namespace cmab {

struct OGOParams {
  double gamma = 0.0;  // exploration probability, capped at 1/2
  double eta = 0.0;    // expert learning rate
};

// gamma = min(1/2, n^{1/3} beta (ln n / T)^{1/3}); eta = sqrt(beta ln n / (gamma T)),
// computed from the capped gamma.
OGOParams ogo_params(int n, double beta, int64_t horizon);

// Expert-slot weight matrix.  Rows are renormalized by their maximum after
// every update; sampling is scale-invariant so this only guards against
// underflow.
class OGOState {
 public:
  OGOState(int experts, int arms);

  int experts() const { return experts_; }
  int arms() const { return arms_; }
  double weight(int expert, int arm) const {
    return w_[static_cast<size_t>(expert) * static_cast<size_t>(arms_) +
              static_cast<size_t>(arm)];
  }

  // Weighted draw from row `expert` among arms not in `taken`; -1 if none left.
  int sample_arm(int expert, const Subset& taken, RngStream& rng) const;

  // Multiplies every entry of row `expert` except `spared_arm` by exp(-eta*loss).
  void apply_loss(int expert, int spared_arm, double loss, double eta);

  // Multiplies only (expert, arm) by exp(+eta*payoff): the alternative
  // reward-to-played-arm update.
  void apply_payoff(int expert, int arm, double payoff, double eta);

 private:
  int experts_;
  int arms_;
  std::vector<double> w_;
};

struct OGOConfig {
  double gamma_override = -1.0;  // < 0: use ogo_params
  double eta_override = -1.0;
  bool reward_to_played_arm = false;  // alternative update; default matches
                                      // the loss-to-unplayed-arms rule
};

// Runs the baseline for `horizon` rounds; emits the same trace schema as the
// explore-then-commit adapter.  Per-round phase marks whether the exploration
// branch fired.  `final_state`, when given, receives the weight matrix after
// the last round.
RunTrace run_ogo(const Environment& env, const std::vector<double>& costs,
                 double budget, int64_t horizon, RngStream& rng,
                 const OGOConfig& config = {}, OGOState* final_state = nullptr);

}  // namespace cmab
