#pragma once

#include <string>

#include "b3c/mlp.hpp"

namespace b3c {

// Per-network Adam accumulators. Moments are shaped like the parameters.
struct AdamState {
  MlpGrads m;
  MlpGrads v;
  long step_count = 0;
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState make_adam(const Mlp& net, double lr);

// One bias-corrected Adam update: theta -= lr * m_hat / (sqrt(v_hat) + eps).
// Throws DivergenceError naming `label` if any gradient entry is non-finite.
void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state, const std::string& label);

// target = (1 - tau) * target + tau * online, elementwise in that literal
// form. tau must lie in (0, 1]; tau = 1 is a hard copy.
void polyak_blend(Mlp& target, const Mlp& online, double tau);

}  // namespace b3c
