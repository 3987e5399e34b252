#pragma once

// Stochastic reward environment contract: per-round rewards in [0,1], i.i.d.
// conditioned on the action, with an evaluable (or Monte-Carlo) mean.

#include <vector>

#include "cmab/core.hpp"

namespace cmab {

class Environment {
 public:
  virtual ~Environment() = default;

  virtual int ground_set_size() const = 0;

  // Draws one reward for playing `action`; must land in [0,1].
  virtual double sample(const Subset& action, RngStream& rng) const = 0;

  // Expected reward of `action` (exact, or a deterministic Monte-Carlo
  // estimate depending on the environment).
  virtual double mean(const Subset& action) const = 0;

  // Element costs when the environment defines them (empty otherwise).
  virtual const std::vector<double>& costs() const {
    static const std::vector<double> kNone;
    return kNone;
  }
};

}  // namespace cmab
