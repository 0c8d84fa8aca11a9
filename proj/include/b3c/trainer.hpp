#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "b3c/critic.hpp"
#include "b3c/dataset.hpp"
#include "b3c/env.hpp"
#include "b3c/metrics.hpp"
#include "b3c/policy.hpp"

namespace b3c {

// b3c = BC-regularized actor with critic target clipping; bc = the same
// BC-regularized actor without the clipping path (the ablation baseline).
enum class Algorithm { kB3c, kBc };
// How the bootstrapped target is combined with the return cap. The cap is a
// ceiling, so kMin is the default; kMax preserves the alternative reading
// for comparison runs.
enum class ClipOperator { kMin, kMax };

struct TrainConfig {
  double alpha = 8.0;       // RL coefficient
  double beta = 1.0;        // BC coefficient
  double clip_scale = 1.0;  // M; infinity disables clipping
  double gamma = 0.99;
  double tau = 0.005;
  int batch_size = 256;
  CriticKind critic_kind = CriticKind::kFactored;
  MixerVariant mixer = MixerVariant::kNonmono;
  std::optional<bool> twin_critics;        // default: joint yes, factored no
  std::optional<int> policy_delay;         // default: joint 2, factored 1
  std::optional<double> target_noise_std;  // default: joint 0.2, factored 0
  double target_noise_clip = 0.5;
  long total_steps = 50000;
  long eval_every = 1000;
  int eval_episodes = 10;
  double explore_noise = 0.1;
  long buffer_capacity = 100000;
  long checkpoint_every = 5000;
  double lr_actor = 3e-4;
  double lr_critic = 3e-4;
  int hidden_width = 64;
  int hidden_depth = 2;
  int mixer_hidden = 32;
  Algorithm algorithm = Algorithm::kB3c;
  ClipOperator clip_operator = ClipOperator::kMin;
  uint64_t seed = 0;

  bool twin() const { return twin_critics.value_or(critic_kind == CriticKind::kJoint); }
  int delay() const { return policy_delay.value_or(critic_kind == CriticKind::kJoint ? 2 : 1); }
  double smoothing_std() const {
    return target_noise_std.value_or(critic_kind == CriticKind::kJoint ? 0.2 : 0.0);
  }
  void validate() const;  // throws ConfigError
};

// Dataset transitions staged as 64-bit matrices for one update.
struct TrainBatch {
  int b = 0;
  Matrix state, next_state;             // B x state_dim
  std::vector<Matrix> obs, next_obs;    // per agent, B x obs_dim
  std::vector<Matrix> act;              // per agent, B x act_dim
  Matrix reward, done;                  // B x 1
};

void fill_batch(TrainBatch& batch, std::span<const Transition* const> rows, const DatasetMeta& dims);

struct TrainState {
  EnvConfig env;
  TrainConfig cfg;
  std::vector<Mlp> policies, target_policies;
  CriticStack critic, target_critic;
  std::vector<AdamState> policy_adam;
  CriticAdam critic_adam;
  long step = 0;

  // Clipping inputs, fixed once a dataset is attached.
  double max_data_return = 0.0;
  double return_cap = std::numeric_limits<double>::infinity();
  double divergence_threshold = 0.0;

  // Lifetime counters backing the clipping-bound invariant and the clip
  // activity diagnostics.
  long clip_checks = 0;
  long clip_active = 0;
  long bound_checks = 0;
  long bound_violations = 0;
  bool denom_warned = false;
};

TrainState make_train_state(const EnvConfig& env, const TrainConfig& cfg);

// Validates dims, records the max dataset return, and freezes the return cap
// R* = clip_scale x max return (clipping is active only for algorithm b3c
// with finite clip_scale) plus the divergence halt threshold.
void attach_dataset(TrainState& state, const OfflineDataset& dataset);

// R* itself: scale x max undiscounted episode return; +infinity disables.
double compute_return_cap(const OfflineDataset& dataset, double scale);

// Elementwise upper clip (or the literal max under ClipOperator::kMax).
double clip_target_q(double q, double return_cap, ClipOperator op);

struct TargetStats {
  double mean = 0.0;
  double max = 0.0;
  double clip_fraction = 0.0;
};

// y = r + gamma * (1 - done) * clip(min over twins of Q_target(s', tau',
// pi_target(tau') + smoothing noise)). Throws DivergenceError when a target
// is non-finite or exceeds the divergence threshold.
Matrix compute_targets(TrainState& state, const TrainBatch& batch, TargetStats* stats);

// Sum over critic members of the mean squared TD error against fixed y.
double critic_loss(const TrainState& state, const TrainBatch& batch, const Matrix& y);
double critic_loss_and_grads(TrainState& state, const TrainBatch& batch, const Matrix& y,
                             CriticGrads& grads);

struct PolicyLossParts {
  double rl_term = 0.0;
  double bc_term = 0.0;
  double w = 1.0;
};

// w = alpha / (batch mean of |Q_jt(s, tau, a_data)|), a constant with no
// gradient; a zero denominator falls back to alpha / 1e-8 once with a
// warning flag on the state.
double compute_policy_weight(TrainState& state, const TrainBatch& batch, double alpha);

// loss = -w * mean Q_jt(s, tau, pi(tau)) + beta * mean sum_i |pi^i - a^i|^2,
// with w and beta passed explicitly so callers control the variant.
double policy_loss(const TrainState& state, const TrainBatch& batch, double w, double beta);
PolicyLossParts policy_loss_and_grads(TrainState& state, const TrainBatch& batch, double w,
                                      double beta, std::vector<MlpGrads>& pgrads);

struct StepMetrics {
  double critic_loss = 0.0;
  double target_mean = 0.0;
  double target_max = 0.0;
  double clip_fraction = 0.0;
  bool policy_updated = false;
  double rl_term = 0.0;
  double bc_term = 0.0;
  double w = 0.0;
};

// One full update: critic step every call, delayed policy step + Polyak
// target blend. online=true uses the unnormalized w=1, beta=0 actor loss.
StepMetrics train_step(TrainState& state, const TrainBatch& batch, bool online);

struct EvalResult {
  double mean_return = 0.0;
  std::vector<double> episode_returns;
};

// Deterministic noise-free rollouts; episode e uses the env episode stream
// of `seed`, matching generate_dataset's rollouts for the same seed.
EvalResult evaluate_policy(const PolicySet& policies, const EnvConfig& env, int n_episodes,
                           uint64_t seed);

struct TrainResult {
  PolicySet policies;
  MetricsLog log;
  long bound_checks = 0;
  long bound_violations = 0;
  long clip_checks = 0;
  long clip_active = 0;
  std::optional<long> diverged_at;
};

TrainResult train_offline(const OfflineDataset& dataset, const EnvConfig& env,
                          const TrainConfig& cfg);

struct OnlineCheckpoint {
  long step = 0;
  double eval_return = 0.0;
  long episodes_completed = 0;
  PolicySet policies;
};

struct OnlineResult {
  PolicySet policies;
  std::vector<OnlineCheckpoint> checkpoints;
  OfflineDataset episode_stream;  // every completed episode, in order
  MetricsLog log;
  long final_buffer_size = 0;
  std::optional<long> diverged_at;
};

// Off-policy loop: explore with Gaussian noise, FIFO replay, one update per
// env step once the buffer holds a batch, checkpoints for tier construction.
OnlineResult train_online(const EnvConfig& env, const TrainConfig& cfg);

// Earliest checkpoint whose evaluation return reaches halfway between the
// random baseline and the final checkpoint; -1 when no checkpoints exist.
int pick_medium_checkpoint(const std::vector<OnlineCheckpoint>& checkpoints,
                           double random_return);

}  // namespace b3c
