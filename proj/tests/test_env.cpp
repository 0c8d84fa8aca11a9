#include <doctest.h>

#include <cmath>
#include <set>

#include "b3c/env.hpp"
#include "b3c/errors.hpp"

using namespace b3c;

namespace {

EnvState place(const EnvConfig& env, const std::vector<double>& agents,
               const std::vector<double>& landmarks, int t = 0) {
  std::vector<double> v = agents;
  v.insert(v.end(), landmarks.begin(), landmarks.end());
  return state_from_vector(env, v, t);
}

JointAction zero_actions(const EnvConfig& env) {
  return JointAction(env.n_agents, std::vector<double>(2, 0.0));
}

}  // namespace

TEST_SUITE("env") {

TEST_CASE("reset is deterministic and stays inside the arena") {
  EnvConfig env;
  const EnvState a = reset_env(env, 99);
  const EnvState b = reset_env(env, 99);
  CHECK(a.agent_pos == b.agent_pos);
  CHECK(a.landmark_pos == b.landmark_pos);
  CHECK(a.t == 0);
  for (double p : a.agent_pos) CHECK(std::fabs(p) <= env.arena_half_width);
  for (double p : a.landmark_pos) CHECK(std::fabs(p) <= env.arena_half_width);
}

TEST_CASE("a hundred seeds give a hundred layouts") {
  EnvConfig env;
  std::set<std::vector<double>> layouts;
  for (uint64_t s = 0; s < 100; ++s) layouts.insert(reset_env(env, s).agent_pos);
  CHECK(layouts.size() == 100);
}

TEST_CASE("exact coverage with no collisions scores zero") {
  EnvConfig env;
  const std::vector<double> spots = {0.8, 0.8, -0.8, 0.8, 0.0, -0.8};
  const EnvState s = place(env, spots, spots);
  CHECK(env_reward(env, s) == 0.0);
}

TEST_CASE("three coincident agents pay three pairwise penalties") {
  EnvConfig env;
  env.collision_penalty = 1.25;
  const std::vector<double> pile = {0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
  const EnvState s = place(env, pile, pile);
  CHECK(env_reward(env, s) == -3.0 * 1.25);
}

TEST_CASE("reward matches a hand-computed two-agent layout") {
  EnvConfig env;
  env.n_agents = 2;
  env.collision_radius = 0.2;
  env.collision_penalty = 1.0;
  // Agents at (0,0) and (1,0); landmarks at (0.3,0.4) and (1,1).
  const EnvState s = place(env, {0.0, 0.0, 1.0, 0.0}, {0.3, 0.4, 1.0, 1.0});
  const double d_l0 = std::min(std::hypot(0.3, 0.4), std::hypot(0.7, 0.4));
  const double d_l1 = std::min(std::hypot(1.0, 1.0), std::hypot(0.0, 1.0));
  CHECK(env_reward(env, s) == doctest::Approx(-(d_l0 + d_l1)).epsilon(1e-12));
}

TEST_CASE("state vector round-trips") {
  EnvConfig env;
  const EnvState s = reset_env(env, 5);
  const std::vector<double> v = global_state_vector(s);
  CHECK(v.size() == static_cast<size_t>(env.state_dim()));
  const EnvState back = state_from_vector(env, v, s.t);
  CHECK(back.agent_pos == s.agent_pos);
  CHECK(back.landmark_pos == s.landmark_pos);
}

TEST_CASE("observation layout: own position, sorted neighbors, landmarks") {
  EnvConfig env;
  // Agent 0 at origin; agent 1 near, agent 2 far.
  const EnvState s = place(env, {0.0, 0.0, 0.3, 0.0, 0.9, 0.0}, {0.1, 0.2, -0.5, 0.5, 0.7, -0.7});
  const JointObservation obs = observe(env, s);
  REQUIRE(obs.size() == 3);
  REQUIRE(obs[0].size() == static_cast<size_t>(env.obs_dim()));

  CHECK(obs[0][0] == 0.0);  // own position
  CHECK(obs[0][1] == 0.0);
  CHECK(obs[0][2] == 0.3);  // nearest other agent, relative
  CHECK(obs[0][3] == 0.0);
  CHECK(obs[0][4] == 0.9);  // farther agent
  CHECK(obs[0][5] == 0.0);
  CHECK(obs[0][6] == 0.1);  // landmarks, relative, in index order
  CHECK(obs[0][7] == 0.2);
  CHECK(obs[0][8] == -0.5);
  CHECK(obs[0][9] == 0.5);
  CHECK(obs[0][10] == 0.7);
  CHECK(obs[0][11] == -0.7);

  // Agent 1 sees agent 0 (distance 0.3) before agent 2 (distance 0.6).
  CHECK(obs[1][2] == -0.3);
  CHECK(obs[1][4] == 0.9 - 0.3);  // relative offset, same rounding as the env
}

TEST_CASE("distance ties between neighbors break by agent index") {
  EnvConfig env;
  env.obs_k = 1;
  // Agents 1 and 2 are equidistant from agent 0.
  const EnvState s = place(env, {0.0, 0.0, 0.4, 0.0, -0.4, 0.0}, {0, 0, 0, 0, 0, 0});
  const JointObservation obs = observe(env, s);
  CHECK(obs[0][2] == 0.4);  // agent 1 wins the tie
  CHECK(obs[0][3] == 0.0);
}

TEST_CASE("obs_k as n-1 matches the full default") {
  EnvConfig full;
  EnvConfig capped;
  capped.obs_k = 2;
  const EnvState s = reset_env(full, 31);
  CHECK(observe(full, s) == observe(capped, s));
}

TEST_CASE("steps clamp actions and positions, and finish on schedule") {
  EnvConfig env;
  env.episode_len = 3;
  EnvState s = place(env, {0.95, 0.0, -0.95, 0.0, 0.0, 0.0}, {0, 0, 0, 0, 0, 0});
  JointAction push = zero_actions(env);
  push[0] = {5.0, 0.0};    // clamps to +1 -> moves step_size
  push[1] = {-5.0, 0.0};   // clamps to -1
  StepResult r1 = step_env(env, s, push);
  CHECK(s.agent_pos[0] == 1.0);   // 0.95 + 0.1 clamped to the arena
  CHECK(s.agent_pos[2] == -1.0);
  CHECK(!r1.done);
  CHECK(r1.obs.size() == 3);

  StepResult r2 = step_env(env, s, zero_actions(env));
  CHECK(!r2.done);
  StepResult r3 = step_env(env, s, zero_actions(env));
  CHECK(r3.done);
  CHECK(s.t == 3);
  CHECK_THROWS_AS(step_env(env, s, zero_actions(env)), ProtocolError);
}

TEST_CASE("a step moves by exactly step_size times the clamped action") {
  EnvConfig env;
  EnvState s = place(env, {0.0, 0.0, 0.5, 0.5, -0.5, -0.5}, {0, 0, 0, 0, 0, 0});
  JointAction a = zero_actions(env);
  a[0] = {0.25, -0.5};
  step_env(env, s, a);
  CHECK(s.agent_pos[0] == 0.1 * 0.25);
  CHECK(s.agent_pos[1] == 0.1 * -0.5);
}

TEST_CASE("rewards from random play are never positive") {
  EnvConfig env;
  Rng rng(17);
  EnvState s = reset_env(env, 23);
  for (int t = 0; t < env.episode_len; ++t) {
    JointAction a = zero_actions(env);
    for (auto& v : a) {
      v[0] = rng.uniform(-1.0, 1.0);
      v[1] = rng.uniform(-1.0, 1.0);
    }
    const StepResult r = step_env(env, s, a);
    CHECK(r.reward <= 0.0);
  }
}

TEST_CASE("step rejects malformed joint actions") {
  EnvConfig env;
  EnvState s = reset_env(env, 1);
  const JointAction too_few(2, std::vector<double>(2, 0.0));
  CHECK_THROWS_AS(step_env(env, s, too_few), DimensionError);
  JointAction bad_width = zero_actions(env);
  bad_width[1] = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(step_env(env, s, bad_width), DimensionError);
}

TEST_CASE("config validation rejects bad shapes") {
  EnvConfig env;
  env.n_agents = 0;
  CHECK_THROWS_AS(env.validate(), ConfigError);
  env = EnvConfig{};
  env.obs_k = 5;  // more neighbors than exist
  CHECK_THROWS_AS(env.validate(), ConfigError);
  env = EnvConfig{};
  env.episode_len = 0;
  CHECK_THROWS_AS(env.validate(), ConfigError);
}

}  // TEST_SUITE
