#pragma once

#include <vector>

#include "b3c/mixer.hpp"
#include "b3c/mlp.hpp"
#include "b3c/optim.hpp"

namespace b3c {

enum class CriticKind { kFactored, kJoint };

// Centralized but factored critic: per-agent utilities Q^i(obs^i, act^i)
// combined by a state-conditioned mixer into Q_jt.
struct FactoredCritic {
  int obs_dim = 0;
  int act_dim = 0;
  std::vector<Mlp> locals;  // agent i: (obs_dim + act_dim) -> 1
  Mixer mixer;

  bool operator==(const FactoredCritic&) const = default;
};

// Non-factored centralized critic: Q(state ++ all actions) -> scalar.
struct JointCritic {
  int state_dim = 0;
  int n_agents = 0;
  int act_dim = 0;
  Mlp net;

  bool operator==(const JointCritic&) const = default;
};

// One or two critics of one kind; two enables the twin minimum in targets.
struct CriticStack {
  CriticKind kind = CriticKind::kFactored;
  std::vector<FactoredCritic> factored;
  std::vector<JointCritic> joint;

  int members() const {
    return kind == CriticKind::kFactored ? static_cast<int>(factored.size())
                                         : static_cast<int>(joint.size());
  }
  bool operator==(const CriticStack&) const = default;
};

struct CriticSizes {
  int n_agents = 0;
  int obs_dim = 0;
  int act_dim = 0;
  int state_dim = 0;
  int hidden_width = 64;
  int hidden_depth = 2;
  int mixer_hidden = 32;
};

CriticStack make_critic_stack(CriticKind kind, MixerVariant mixer, bool twin,
                              const CriticSizes& sizes, Rng& rng);

struct FactoredCache {
  std::vector<MlpCache> locals;
  Matrix qlocals;  // B x N
  MixerCache mix;
};

struct JointCache {
  MlpCache net;
};

struct CriticCache {
  std::vector<FactoredCache> factored;
  std::vector<JointCache> joint;
};

struct FactoredGrads {
  std::vector<MlpGrads> locals;
  MixerGrads mixer;
  void zero();
};

struct CriticGrads {
  std::vector<FactoredGrads> factored;
  std::vector<MlpGrads> joint;
  void zero();
};

CriticGrads make_critic_grads(const CriticStack& stack);

struct FactoredAdam {
  std::vector<AdamState> locals;
  AdamState mw1, mb1, mw2, mb2;
};

struct CriticAdam {
  std::vector<FactoredAdam> factored;
  std::vector<AdamState> joint;
};

CriticAdam make_critic_adam(const CriticStack& stack, double lr);

// Evaluates member `m` on a batch: state B x S, per-agent obs/act matrices.
// out receives B x 1. Pass a cache to enable backward.
void critic_forward(const CriticStack& stack, int m, const Matrix& state,
                    const std::vector<Matrix>& obs, const std::vector<Matrix>& act, Matrix& out,
                    CriticCache* cache = nullptr);

// Backprop through member m. Parameter gradients accumulate into `grads`
// when non-null; per-agent action gradients (B x act_dim each) land in
// `dact` when non-null.
void critic_backward(const CriticStack& stack, int m, const CriticCache& cache, const Matrix& dout,
                     CriticGrads* grads, std::vector<Matrix>* dact);

// One Adam step on every parameter block of the stack from `grads`.
void critic_adam_step(CriticStack& stack, const CriticGrads& grads, CriticAdam& adam);

// target <- (1 - tau) * target + tau * online across every net in the stack.
void polyak_stack(CriticStack& target, const CriticStack& online, double tau);

}  // namespace b3c
