#include "b3c/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "b3c/errors.hpp"
#include "b3c/replay.hpp"

namespace b3c {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNormEpsilon = 1e-8;  // fallback denominator for w

// Loose magnitude bound on any episode return; backs the divergence
// threshold for runs that have no dataset to take a scale from.
double env_return_bound(const EnvConfig& env) {
  const double per_step = env.n_agents * 2.0 * std::sqrt(2.0) * env.arena_half_width +
                          env.collision_penalty * env.n_agents * (env.n_agents - 1) / 2.0;
  return env.episode_len * per_step;
}

void check_batch_dims(const Transition& t, const DatasetMeta& dims) {
  const size_t per_obs = static_cast<size_t>(dims.n_agents) * dims.obs_dim;
  const size_t per_act = static_cast<size_t>(dims.n_agents) * dims.act_dim;
  if (t.state.size() != static_cast<size_t>(dims.state_dim) || t.obs.size() != per_obs ||
      t.actions.size() != per_act || t.next_state.size() != static_cast<size_t>(dims.state_dim) ||
      t.next_obs.size() != per_obs)
    throw DimensionError("fill_batch: transition does not match dataset dims");
}

struct Aggregator {
  double closs = 0.0, tmean = 0.0, cfrac = 0.0;
  double tmax = -kInf;
  long csteps = 0;
  double rl = 0.0, bc = 0.0, wsum = 0.0;
  long psteps = 0;

  void add(const StepMetrics& m) {
    closs += m.critic_loss;
    tmean += m.target_mean;
    tmax = std::max(tmax, m.target_max);
    cfrac += m.clip_fraction;
    csteps += 1;
    if (m.policy_updated) {
      rl += m.rl_term;
      bc += m.bc_term;
      wsum += m.w;
      psteps += 1;
    }
  }

  MetricsRecord flush(long step, double eval_return) {
    MetricsRecord r;
    r.step = step;
    r.eval_return = eval_return;
    if (csteps > 0) {
      r.critic_loss = closs / csteps;
      r.target_q_mean = tmean / csteps;
      r.target_q_max = tmax;
      r.clip_active_fraction = cfrac / csteps;
    }
    if (psteps > 0) {
      r.policy_loss_rl = rl / psteps;
      r.policy_loss_bc = bc / psteps;
      r.w = wsum / psteps;
    }
    *this = Aggregator{};
    return r;
  }
};

void elementwise_min(Matrix& a, const Matrix& b) {
  double* pa = a.data();
  const double* pb = b.data();
  for (size_t i = 0; i < a.size(); ++i) pa[i] = std::min(pa[i], pb[i]);
}

}  // namespace

void TrainConfig::validate() const {
  if (alpha < 0.0) throw ConfigError("train: alpha must be non-negative");
  if (beta < 0.0) throw ConfigError("train: beta must be non-negative");
  if (!(clip_scale > 0.0)) throw ConfigError("train: m must be positive (or inf to disable)");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("train: gamma must lie in [0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("train: tau must lie in (0, 1]");
  if (batch_size < 1) throw ConfigError("train: batch_size must be at least 1");
  if (policy_delay && *policy_delay < 1) throw ConfigError("train: policy_delay must be at least 1");
  if (target_noise_std && *target_noise_std < 0.0)
    throw ConfigError("train: target_noise_std must be non-negative");
  if (target_noise_clip < 0.0) throw ConfigError("train: target_noise_clip must be non-negative");
  if (total_steps < 0) throw ConfigError("train: total_steps must be non-negative");
  if (eval_every < 1) throw ConfigError("train: eval_every must be at least 1");
  if (eval_episodes < 1) throw ConfigError("train: eval_episodes must be at least 1");
  if (explore_noise < 0.0) throw ConfigError("train: explore_noise must be non-negative");
  if (buffer_capacity < 1) throw ConfigError("train: buffer_capacity must be at least 1");
  if (checkpoint_every < 1) throw ConfigError("train: checkpoint_every must be at least 1");
  if (!(lr_actor > 0.0) || !(lr_critic > 0.0)) throw ConfigError("train: learning rates must be positive");
  if (hidden_width < 1 || hidden_depth < 0) throw ConfigError("train: bad hidden layer shape");
  if (mixer_hidden < 1) throw ConfigError("train: mixer_hidden must be at least 1");
}

void fill_batch(TrainBatch& batch, std::span<const Transition* const> rows,
                const DatasetMeta& dims) {
  const int b = static_cast<int>(rows.size());
  if (b == 0) throw ConfigError("fill_batch: empty batch");
  check_batch_dims(*rows[0], dims);
  const int n = dims.n_agents;
  batch.b = b;
  batch.state.resize(b, dims.state_dim);
  batch.next_state.resize(b, dims.state_dim);
  batch.reward.resize(b, 1);
  batch.done.resize(b, 1);
  batch.obs.resize(n);
  batch.next_obs.resize(n);
  batch.act.resize(n);
  for (int i = 0; i < n; ++i) {
    batch.obs[i].resize(b, dims.obs_dim);
    batch.next_obs[i].resize(b, dims.obs_dim);
    batch.act[i].resize(b, dims.act_dim);
  }
  for (int r = 0; r < b; ++r) {
    const Transition& t = *rows[r];
    for (int k = 0; k < dims.state_dim; ++k) {
      batch.state.at(r, k) = static_cast<double>(t.state[k]);
      batch.next_state.at(r, k) = static_cast<double>(t.next_state[k]);
    }
    for (int i = 0; i < n; ++i) {
      const size_t o0 = static_cast<size_t>(i) * dims.obs_dim;
      for (int k = 0; k < dims.obs_dim; ++k) {
        batch.obs[i].at(r, k) = static_cast<double>(t.obs[o0 + k]);
        batch.next_obs[i].at(r, k) = static_cast<double>(t.next_obs[o0 + k]);
      }
      const size_t a0 = static_cast<size_t>(i) * dims.act_dim;
      for (int k = 0; k < dims.act_dim; ++k)
        batch.act[i].at(r, k) = static_cast<double>(t.actions[a0 + k]);
    }
    batch.reward.at(r, 0) = static_cast<double>(t.reward);
    batch.done.at(r, 0) = t.done ? 1.0 : 0.0;
  }
}

TrainState make_train_state(const EnvConfig& env, const TrainConfig& cfg) {
  env.validate();
  cfg.validate();
  TrainState st;
  st.env = env;
  st.cfg = cfg;
  Rng init(derive_seed(cfg.seed, streams::kInit));
  PolicySet p = make_policy_set(env, cfg.hidden_width, cfg.hidden_depth, init);
  st.policies = std::move(p.nets);
  CriticSizes sizes;
  sizes.n_agents = env.n_agents;
  sizes.obs_dim = env.obs_dim();
  sizes.act_dim = env.act_dim();
  sizes.state_dim = env.state_dim();
  sizes.hidden_width = cfg.hidden_width;
  sizes.hidden_depth = cfg.hidden_depth;
  sizes.mixer_hidden = cfg.mixer_hidden;
  st.critic = make_critic_stack(cfg.critic_kind, cfg.mixer, cfg.twin(), sizes, init);
  st.target_policies = st.policies;
  st.target_critic = st.critic;
  st.policy_adam.reserve(st.policies.size());
  for (const Mlp& net : st.policies) st.policy_adam.push_back(make_adam(net, cfg.lr_actor));
  st.critic_adam = make_critic_adam(st.critic, cfg.lr_critic);
  st.divergence_threshold = 100.0 * std::max(1.0, env_return_bound(env));
  return st;
}

double compute_return_cap(const OfflineDataset& dataset, double scale) {
  if (!(scale > 0.0)) throw ConfigError("return cap scale must be positive");
  if (!std::isfinite(scale)) return kInf;
  return scale * compute_stats(dataset).max_return;
}

void attach_dataset(TrainState& state, const OfflineDataset& dataset) {
  const DatasetMeta& m = dataset.meta;
  if (m.n_agents != state.env.n_agents || m.obs_dim != state.env.obs_dim() ||
      m.act_dim != state.env.act_dim() || m.state_dim != state.env.state_dim())
    throw DimensionError("attach_dataset: dataset dims do not match the environment");
  const DatasetStats stats = compute_stats(dataset);
  state.max_data_return = stats.max_return;
  const bool clipping =
      state.cfg.algorithm == Algorithm::kB3c && std::isfinite(state.cfg.clip_scale);
  state.return_cap = clipping ? state.cfg.clip_scale * stats.max_return : kInf;
  const double scale = clipping ? std::fabs(state.return_cap) : std::fabs(stats.max_return);
  state.divergence_threshold = 100.0 * std::max(1.0, scale);
}

double clip_target_q(double q, double return_cap, ClipOperator op) {
  return op == ClipOperator::kMin ? std::min(q, return_cap) : std::max(q, return_cap);
}

Matrix compute_targets(TrainState& state, const TrainBatch& batch, TargetStats* stats) {
  const TrainConfig& cfg = state.cfg;
  const int n = static_cast<int>(state.policies.size());
  const int b = batch.b;

  std::vector<Matrix> tact(n);
  for (int i = 0; i < n; ++i) mlp_forward(state.target_policies[i], batch.next_obs[i], tact[i]);
  const double sstd = cfg.smoothing_std();
  if (sstd > 0.0) {
    Rng noise(derive_seed(cfg.seed, streams::kTargetNoise, static_cast<uint64_t>(state.step)));
    for (int i = 0; i < n; ++i) {
      double* p = tact[i].data();
      for (size_t k = 0; k < tact[i].size(); ++k) {
        const double eps = std::clamp(noise.gaussian(0.0, sstd), -cfg.target_noise_clip,
                                      cfg.target_noise_clip);
        p[k] = std::clamp(p[k] + eps, -1.0, 1.0);
      }
    }
  }

  Matrix q, qm;
  critic_forward(state.target_critic, 0, batch.next_state, batch.next_obs, tact, q);
  for (int m = 1; m < state.target_critic.members(); ++m) {
    critic_forward(state.target_critic, m, batch.next_state, batch.next_obs, tact, qm);
    elementwise_min(q, qm);
  }

  const bool clipping = std::isfinite(state.return_cap);
  Matrix y(b, 1);
  long checks = 0, active = 0;
  double sum = 0.0, maxv = -kInf, maxabs = 0.0;
  bool finite = true;
  for (int r = 0; r < b; ++r) {
    const double reward = batch.reward.at(r, 0);
    double yv;
    if (batch.done.at(r, 0) != 0.0) {
      yv = reward;
    } else {
      double qv = q.at(r, 0);
      if (clipping) {
        checks += 1;
        const double clipped = clip_target_q(qv, state.return_cap, cfg.clip_operator);
        if (clipped != qv) active += 1;
        qv = clipped;
      }
      yv = reward + cfg.gamma * qv;
      if (clipping && cfg.clip_operator == ClipOperator::kMin) {
        state.bound_checks += 1;
        if (yv > reward + cfg.gamma * state.return_cap) state.bound_violations += 1;
      }
    }
    y.at(r, 0) = yv;
    sum += yv;
    maxv = std::max(maxv, yv);
    maxabs = std::max(maxabs, std::fabs(yv));
    finite = finite && std::isfinite(yv);
  }
  state.clip_checks += checks;
  state.clip_active += active;
  if (!finite)
    throw DivergenceError(state.step, "non-finite TD target at step " + std::to_string(state.step + 1));
  if (maxabs > state.divergence_threshold)
    throw DivergenceError(state.step, "TD target magnitude " + std::to_string(maxabs) +
                                          " exceeds divergence threshold " +
                                          std::to_string(state.divergence_threshold) + " at step " +
                                          std::to_string(state.step + 1));
  if (stats) {
    stats->mean = sum / b;
    stats->max = maxv;
    stats->clip_fraction = checks > 0 ? static_cast<double>(active) / checks : 0.0;
  }
  return y;
}

double critic_loss(const TrainState& state, const TrainBatch& batch, const Matrix& y) {
  double total = 0.0;
  Matrix q;
  for (int m = 0; m < state.critic.members(); ++m) {
    critic_forward(state.critic, m, batch.state, batch.obs, batch.act, q);
    double loss = 0.0;
    for (int r = 0; r < batch.b; ++r) {
      const double d = q.at(r, 0) - y.at(r, 0);
      loss += d * d;
    }
    total += loss / batch.b;
  }
  return total;
}

double critic_loss_and_grads(TrainState& state, const TrainBatch& batch, const Matrix& y,
                             CriticGrads& grads) {
  double total = 0.0;
  CriticCache cache;
  Matrix q, dq(batch.b, 1);
  for (int m = 0; m < state.critic.members(); ++m) {
    critic_forward(state.critic, m, batch.state, batch.obs, batch.act, q, &cache);
    double loss = 0.0;
    for (int r = 0; r < batch.b; ++r) {
      const double d = q.at(r, 0) - y.at(r, 0);
      loss += d * d;
      dq.at(r, 0) = 2.0 * d / batch.b;
    }
    total += loss / batch.b;
    critic_backward(state.critic, m, cache, dq, &grads, nullptr);
  }
  return total;
}

double compute_policy_weight(TrainState& state, const TrainBatch& batch, double alpha) {
  Matrix q;
  critic_forward(state.critic, 0, batch.state, batch.obs, batch.act, q);
  double denom = 0.0;
  for (int r = 0; r < batch.b; ++r) denom += std::fabs(q.at(r, 0));
  denom /= batch.b;
  if (denom == 0.0) {
    if (!state.denom_warned)
      std::fprintf(stderr, "warning: batch mean |Q| is zero; using epsilon normalization\n");
    state.denom_warned = true;
    return alpha / kNormEpsilon;
  }
  return alpha / denom;
}

double policy_loss(const TrainState& state, const TrainBatch& batch, double w, double beta) {
  const int n = static_cast<int>(state.policies.size());
  std::vector<Matrix> pact(n);
  for (int i = 0; i < n; ++i) mlp_forward(state.policies[i], batch.obs[i], pact[i]);
  Matrix q;
  critic_forward(state.critic, 0, batch.state, batch.obs, pact, q);
  double qsum = 0.0;
  for (int r = 0; r < batch.b; ++r) qsum += q.at(r, 0);
  double bc_raw = 0.0;
  for (int i = 0; i < n; ++i) {
    const double* p = pact[i].data();
    const double* a = batch.act[i].data();
    for (size_t k = 0; k < pact[i].size(); ++k) {
      const double d = p[k] - a[k];
      bc_raw += d * d;
    }
  }
  return -w * qsum / batch.b + beta * bc_raw / batch.b;
}

PolicyLossParts policy_loss_and_grads(TrainState& state, const TrainBatch& batch, double w,
                                      double beta, std::vector<MlpGrads>& pgrads) {
  const int n = static_cast<int>(state.policies.size());
  std::vector<MlpCache> pcache(n);
  std::vector<Matrix> pact(n);
  for (int i = 0; i < n; ++i) mlp_forward(state.policies[i], batch.obs[i], pact[i], &pcache[i]);

  CriticCache cache;
  Matrix q;
  critic_forward(state.critic, 0, batch.state, batch.obs, pact, q, &cache);
  double qsum = 0.0;
  for (int r = 0; r < batch.b; ++r) qsum += q.at(r, 0);

  PolicyLossParts parts;
  parts.w = w;
  parts.rl_term = -w * qsum / batch.b;

  Matrix dq(batch.b, 1);
  dq.fill(-w / batch.b);
  std::vector<Matrix> dact;
  critic_backward(state.critic, 0, cache, dq, nullptr, &dact);

  double bc_raw = 0.0;
  for (int i = 0; i < n; ++i) {
    double* g = dact[i].data();
    const double* p = pact[i].data();
    const double* a = batch.act[i].data();
    for (size_t k = 0; k < pact[i].size(); ++k) {
      const double d = p[k] - a[k];
      bc_raw += d * d;
      g[k] += 2.0 * beta * d / batch.b;
    }
  }
  parts.bc_term = beta * bc_raw / batch.b;
  if (!std::isfinite(parts.rl_term + parts.bc_term))
    throw DivergenceError(state.step, "non-finite policy loss at step " + std::to_string(state.step + 1));

  for (int i = 0; i < n; ++i) mlp_backward(state.policies[i], pcache[i], dact[i], &pgrads[i]);
  return parts;
}

StepMetrics train_step(TrainState& state, const TrainBatch& batch, bool online) {
  const TrainConfig& cfg = state.cfg;
  StepMetrics m;
  TargetStats ts;
  const Matrix y = compute_targets(state, batch, &ts);
  m.target_mean = ts.mean;
  m.target_max = ts.max;
  m.clip_fraction = ts.clip_fraction;

  CriticGrads cgrads = make_critic_grads(state.critic);
  m.critic_loss = critic_loss_and_grads(state, batch, y, cgrads);
  if (!std::isfinite(m.critic_loss))
    throw DivergenceError(state.step, "non-finite critic loss at step " + std::to_string(state.step + 1));
  critic_adam_step(state.critic, cgrads, state.critic_adam);

  if ((state.step + 1) % cfg.delay() == 0) {
    const double w = online ? 1.0 : compute_policy_weight(state, batch, cfg.alpha);
    const double beta = online ? 0.0 : cfg.beta;
    std::vector<MlpGrads> pgrads;
    pgrads.reserve(state.policies.size());
    for (const Mlp& net : state.policies) pgrads.push_back(make_grads(net));
    const PolicyLossParts parts = policy_loss_and_grads(state, batch, w, beta, pgrads);
    for (size_t i = 0; i < state.policies.size(); ++i)
      adam_step(state.policies[i], pgrads[i], state.policy_adam[i],
                "policy " + std::to_string(i));
    for (size_t i = 0; i < state.policies.size(); ++i)
      polyak_blend(state.target_policies[i], state.policies[i], cfg.tau);
    polyak_stack(state.target_critic, state.critic, cfg.tau);
    m.policy_updated = true;
    m.rl_term = parts.rl_term;
    m.bc_term = parts.bc_term;
    m.w = parts.w;
  }
  state.step += 1;
  return m;
}

EvalResult evaluate_policy(const PolicySet& policies, const EnvConfig& env, int n_episodes,
                           uint64_t seed) {
  env.validate();
  if (n_episodes < 1) throw ConfigError("evaluate_policy: n_episodes must be at least 1");
  if (policies.n_agents() != env.n_agents)
    throw DimensionError("evaluate_policy: policy count does not match n_agents");
  EvalResult result;
  result.episode_returns.reserve(n_episodes);
  double sum = 0.0;
  for (int e = 0; e < n_episodes; ++e) {
    EnvState state = reset_env(env, derive_seed(seed, streams::kEnvEpisode, static_cast<uint64_t>(e)));
    JointObservation obs = observe(env, state);
    double ret = 0.0;
    for (int t = 0; t < env.episode_len; ++t) {
      StepResult sr = step_env(env, state, act(policies, obs));
      ret += sr.reward;
      obs = std::move(sr.obs);
    }
    result.episode_returns.push_back(ret);
    sum += ret;
  }
  result.mean_return = sum / n_episodes;
  return result;
}

TrainResult train_offline(const OfflineDataset& dataset, const EnvConfig& env,
                          const TrainConfig& cfg) {
  TrainState st = make_train_state(env, cfg);
  attach_dataset(st, dataset);
  const std::vector<const Transition*> flat = flatten(dataset);
  if (flat.empty()) throw ConfigError("train_offline: dataset has no transitions");

  TrainResult out;
  TrainBatch batch;
  std::vector<const Transition*> rows(cfg.batch_size);
  Aggregator agg;
  for (long t = 0; t < cfg.total_steps; ++t) {
    Rng pick(derive_seed(cfg.seed, streams::kBatch, static_cast<uint64_t>(t)));
    for (int i = 0; i < cfg.batch_size; ++i)
      rows[i] = flat[static_cast<size_t>(pick.below(flat.size()))];
    fill_batch(batch, rows, dataset.meta);
    bool diverged = false;
    try {
      agg.add(train_step(st, batch, false));
    } catch (const DivergenceError&) {
      diverged = true;
    }
    if (diverged || (t + 1) % cfg.eval_every == 0) {
      const double ret = evaluate_policy(PolicySet{st.policies}, env, cfg.eval_episodes,
                                         derive_seed(cfg.seed, streams::kEval,
                                                     static_cast<uint64_t>(t + 1)))
                             .mean_return;
      MetricsRecord rec = agg.flush(t + 1, ret);
      if (diverged) {
        rec.diverged_at = t + 1;
        out.diverged_at = t + 1;
      }
      out.log.records.push_back(rec);
    }
    if (diverged) break;
  }
  out.policies = PolicySet{st.policies};
  out.bound_checks = st.bound_checks;
  out.bound_violations = st.bound_violations;
  out.clip_checks = st.clip_checks;
  out.clip_active = st.clip_active;
  return out;
}

OnlineResult train_online(const EnvConfig& env, const TrainConfig& cfg) {
  TrainState st = make_train_state(env, cfg);
  ReplayBuffer buffer(cfg.buffer_capacity);
  const DatasetMeta dims = make_meta(env, cfg.seed, "stream");

  OnlineResult out;
  out.episode_stream.meta = dims;
  TrainBatch batch;
  Aggregator agg;
  long g = 0;  // env steps taken
  uint64_t ep = 0;
  bool diverged = false;

  while (g < cfg.total_steps && !diverged) {
    Rng explore(derive_seed(cfg.seed, streams::kExplore, ep));
    EnvState es = reset_env(env, derive_seed(cfg.seed, streams::kEnvEpisode, ep));
    JointObservation obs = observe(env, es);
    Episode episode;
    episode.transitions.reserve(env.episode_len);

    for (int t = 0; t < env.episode_len && g < cfg.total_steps && !diverged; ++t) {
      JointAction actions(env.n_agents);
      for (int i = 0; i < env.n_agents; ++i) {
        actions[i] = mlp_apply(st.policies[i], obs[i]);
        for (double& a : actions[i]) {
          if (cfg.explore_noise > 0.0) a += explore.gaussian(0.0, cfg.explore_noise);
          a = std::clamp(a, -1.0, 1.0);
        }
      }
      Transition tr;
      {
        const std::vector<double> sv = global_state_vector(es);
        tr.state.assign(sv.begin(), sv.end());
      }
      tr.obs.reserve(static_cast<size_t>(env.n_agents) * env.obs_dim());
      for (const auto& o : obs)
        for (double v : o) tr.obs.push_back(static_cast<float>(v));
      for (const auto& a : actions)
        for (double v : a) tr.actions.push_back(static_cast<float>(v));
      StepResult sr = step_env(env, es, actions);
      tr.reward = static_cast<float>(sr.reward);
      {
        const std::vector<double> sv = global_state_vector(es);
        tr.next_state.assign(sv.begin(), sv.end());
      }
      for (const auto& o : sr.obs)
        for (double v : o) tr.next_obs.push_back(static_cast<float>(v));
      tr.done = sr.done;

      episode.episode_return += static_cast<double>(tr.reward);
      episode.transitions.push_back(tr);
      buffer.push(std::move(tr));
      obs = std::move(sr.obs);
      g += 1;

      if (sr.done) {
        out.episode_stream.episodes.push_back(std::move(episode));
        episode = Episode{};
        episode.transitions.reserve(env.episode_len);
      }

      if (buffer.size() >= cfg.batch_size) {
        Rng pick(derive_seed(cfg.seed, streams::kBatch, static_cast<uint64_t>(g)));
        const std::vector<const Transition*> rows = buffer.sample(cfg.batch_size, pick);
        fill_batch(batch, rows, dims);
        try {
          agg.add(train_step(st, batch, true));
        } catch (const DivergenceError&) {
          diverged = true;
          out.diverged_at = g;
        }
      }

      const bool want_eval = !diverged && g % cfg.eval_every == 0;
      const bool want_ckpt =
          !diverged && (g % cfg.checkpoint_every == 0 || g == cfg.total_steps);
      if (want_eval || want_ckpt || diverged) {
        const double ret = evaluate_policy(PolicySet{st.policies}, env, cfg.eval_episodes,
                                           derive_seed(cfg.seed, streams::kEval,
                                                       static_cast<uint64_t>(g)))
                               .mean_return;
        if (want_eval || diverged) {
          MetricsRecord rec = agg.flush(g, ret);
          if (diverged) rec.diverged_at = g;
          out.log.records.push_back(rec);
        }
        if (want_ckpt) {
          OnlineCheckpoint ck;
          ck.step = g;
          ck.eval_return = ret;
          ck.episodes_completed = static_cast<long>(out.episode_stream.episodes.size());
          ck.policies = PolicySet{st.policies};
          out.checkpoints.push_back(std::move(ck));
        }
      }
    }
    ep += 1;
  }

  out.episode_stream.meta.episode_count = static_cast<int>(out.episode_stream.episodes.size());
  out.policies = PolicySet{st.policies};
  out.final_buffer_size = buffer.size();
  return out;
}

int pick_medium_checkpoint(const std::vector<OnlineCheckpoint>& checkpoints,
                           double random_return) {
  if (checkpoints.empty()) return -1;
  const double expert = checkpoints.back().eval_return;
  const double threshold = random_return + 0.5 * (expert - random_return);
  for (size_t i = 0; i < checkpoints.size(); ++i)
    if (checkpoints[i].eval_return >= threshold) return static_cast<int>(i);
  return static_cast<int>(checkpoints.size()) - 1;
}

}  // namespace b3c
