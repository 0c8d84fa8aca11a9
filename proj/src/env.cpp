#include "b3c/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "b3c/errors.hpp"

namespace b3c {
namespace {

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

double dist2d(const double* a, const double* b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

void EnvConfig::validate() const {
  if (n_agents < 2) throw ConfigError("env: n_agents must be at least 2");
  if (obs_k && (*obs_k < 1 || *obs_k >= n_agents))
    throw ConfigError("env: obs_k must lie in [1, n_agents)");
  if (episode_len < 1) throw ConfigError("env: episode_len must be at least 1");
  if (arena_half_width <= 0.0) throw ConfigError("env: arena_half_width must be positive");
  if (step_size <= 0.0) throw ConfigError("env: step_size must be positive");
  if (collision_radius < 0.0) throw ConfigError("env: collision_radius must be non-negative");
  if (collision_penalty < 0.0) throw ConfigError("env: collision_penalty must be non-negative");
}

EnvState reset_env(const EnvConfig& config, std::uint64_t episode_seed) {
  config.validate();
  Rng rng(episode_seed);
  EnvState state;
  state.agent_pos.resize(2 * config.n_agents);
  state.landmark_pos.resize(2 * config.n_agents);
  const double w = config.arena_half_width;
  for (double& x : state.agent_pos) x = rng.uniform(-w, w);
  for (double& x : state.landmark_pos) x = rng.uniform(-w, w);
  state.t = 0;
  return state;
}

JointObservation observe(const EnvConfig& config, const EnvState& state) {
  const int n = config.n_agents;
  const int k = config.visible_agents();
  JointObservation obs(n);
  std::vector<std::pair<double, int>> order;
  order.reserve(n - 1);
  for (int i = 0; i < n; ++i) {
    const double* self = &state.agent_pos[2 * i];
    std::vector<double>& o = obs[i];
    o.reserve(config.obs_dim());
    o.push_back(self[0]);
    o.push_back(self[1]);
    order.clear();
    for (int j = 0; j < n; ++j)
      if (j != i) order.emplace_back(dist2d(self, &state.agent_pos[2 * j]), j);
    std::sort(order.begin(), order.end());
    for (int r = 0; r < k; ++r) {
      const double* other = &state.agent_pos[2 * order[r].second];
      o.push_back(other[0] - self[0]);
      o.push_back(other[1] - self[1]);
    }
    for (int j = 0; j < n; ++j) {
      const double* lm = &state.landmark_pos[2 * j];
      o.push_back(lm[0] - self[0]);
      o.push_back(lm[1] - self[1]);
    }
  }
  return obs;
}

double env_reward(const EnvConfig& config, const EnvState& state) {
  const int n = config.n_agents;
  double reward = 0.0;
  for (int j = 0; j < n; ++j) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      nearest = std::min(nearest, dist2d(&state.agent_pos[2 * i], &state.landmark_pos[2 * j]));
    reward -= nearest;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (dist2d(&state.agent_pos[2 * i], &state.agent_pos[2 * j]) < config.collision_radius)
        reward -= config.collision_penalty;
  return reward;
}

StepResult step_env(const EnvConfig& config, EnvState& state, const JointAction& actions) {
  if (state.t >= config.episode_len)
    throw ProtocolError("step after episode end (t = " + std::to_string(state.t) + ")");
  if (static_cast<int>(actions.size()) != config.n_agents)
    throw DimensionError("step: expected " + std::to_string(config.n_agents) + " actions, got " +
                         std::to_string(actions.size()));
  const double w = config.arena_half_width;
  for (int i = 0; i < config.n_agents; ++i) {
    if (actions[i].size() != 2) throw DimensionError("step: actions must be 2-vectors");
    for (int d = 0; d < 2; ++d) {
      const double a = clamp(actions[i][d], -1.0, 1.0);
      state.agent_pos[2 * i + d] = clamp(state.agent_pos[2 * i + d] + config.step_size * a, -w, w);
    }
  }
  state.t += 1;
  StepResult result;
  result.reward = env_reward(config, state);
  result.done = state.t == config.episode_len;
  result.obs = observe(config, state);
  return result;
}

std::vector<double> global_state_vector(const EnvState& state) {
  std::vector<double> v;
  v.reserve(state.agent_pos.size() + state.landmark_pos.size());
  v.insert(v.end(), state.agent_pos.begin(), state.agent_pos.end());
  v.insert(v.end(), state.landmark_pos.begin(), state.landmark_pos.end());
  return v;
}

EnvState state_from_vector(const EnvConfig& config, const std::vector<double>& v, int t) {
  const size_t half = static_cast<size_t>(2 * config.n_agents);
  if (v.size() != 2 * half)
    throw DimensionError("state_from_vector: expected length " + std::to_string(2 * half) +
                         ", got " + std::to_string(v.size()));
  EnvState state;
  state.agent_pos.assign(v.begin(), v.begin() + half);
  state.landmark_pos.assign(v.begin() + half, v.end());
  state.t = t;
  return state;
}

}  // namespace b3c
