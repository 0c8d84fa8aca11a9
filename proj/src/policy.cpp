#include "b3c/policy.hpp"

#include "b3c/errors.hpp"

namespace b3c {

PolicySet make_policy_set(const EnvConfig& env, int hidden_width, int hidden_depth, Rng& rng) {
  PolicySet p;
  p.nets.reserve(env.n_agents);
  std::vector<int> dims;
  dims.push_back(env.obs_dim());
  for (int l = 0; l < hidden_depth; ++l) dims.push_back(hidden_width);
  dims.push_back(env.act_dim());
  for (int i = 0; i < env.n_agents; ++i)
    p.nets.push_back(make_mlp(dims, Act::kRelu, Act::kTanh, rng));
  return p;
}

JointAction act(const PolicySet& policies, const JointObservation& obs) {
  if (obs.size() != policies.nets.size())
    throw DimensionError("act: observation count does not match policy count");
  JointAction actions(policies.nets.size());
  for (size_t i = 0; i < policies.nets.size(); ++i)
    actions[i] = mlp_apply(policies.nets[i], obs[i]);
  return actions;
}

}  // namespace b3c
