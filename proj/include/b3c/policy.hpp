#pragma once

#include <vector>

#include "b3c/env.hpp"
#include "b3c/mlp.hpp"
#include "b3c/rng.hpp"

namespace b3c {

// One deterministic actor per agent: obs -> action in [-1, 1]^2 via a tanh
// output layer. Execution is decentralized: each net sees only its own obs.
struct PolicySet {
  std::vector<Mlp> nets;

  int n_agents() const { return static_cast<int>(nets.size()); }
  bool operator==(const PolicySet&) const = default;
};

// Builds n_agents actors with the given hidden stack (depth x width).
PolicySet make_policy_set(const EnvConfig& env, int hidden_width, int hidden_depth, Rng& rng);

// Greedy joint action (no exploration noise).
JointAction act(const PolicySet& policies, const JointObservation& obs);

}  // namespace b3c
