#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "b3c/rng.hpp"

namespace b3c {

// Cooperative navigation: N agents cover N landmarks under a shared team
// reward, with a collision penalty and optional K-nearest partial
// observability.
struct EnvConfig {
  int n_agents = 3;
  double arena_half_width = 1.0;
  int episode_len = 25;
  double step_size = 0.1;
  double collision_radius = 0.2;
  double collision_penalty = 1.0;
  std::optional<int> obs_k;  // absent = every other agent is visible
  std::uint64_t seed = 0;

  int visible_agents() const { return obs_k ? *obs_k : n_agents - 1; }
  int obs_dim() const { return 2 + 2 * visible_agents() + 2 * n_agents; }
  int act_dim() const { return 2; }
  int state_dim() const { return 4 * n_agents; }
  void validate() const;  // throws ConfigError on bad field combinations
};

struct EnvState {
  std::vector<double> agent_pos;     // n_agents x 2, flattened row-major
  std::vector<double> landmark_pos;  // n_agents x 2, flattened row-major
  int t = 0;
};

// Per-agent observation vectors, each of length config.obs_dim().
using JointObservation = std::vector<std::vector<double>>;
// Per-agent 2-vectors with components in [-1, 1].
using JointAction = std::vector<std::vector<double>>;

struct StepResult {
  JointObservation obs;
  double reward = 0.0;
  bool done = false;
};

// Uniform positions for agents and landmarks, t = 0. Deterministic given
// episode_seed.
EnvState reset_env(const EnvConfig& config, std::uint64_t episode_seed);

JointObservation observe(const EnvConfig& config, const EnvState& state);

// Applies clamped actions, advances t, computes the shared reward. Throws
// ProtocolError if the episode is already over.
StepResult step_env(const EnvConfig& config, EnvState& state, const JointAction& actions);

double env_reward(const EnvConfig& config, const EnvState& state);

// agent_pos ++ landmark_pos, flattened; length 4 * n_agents.
std::vector<double> global_state_vector(const EnvState& state);

// Inverse of global_state_vector (positions only; timestep supplied).
EnvState state_from_vector(const EnvConfig& config, const std::vector<double>& v, int t);

}  // namespace b3c
