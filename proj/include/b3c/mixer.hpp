#pragma once

#include <span>
#include <vector>

#include "b3c/mlp.hpp"
#include "b3c/rng.hpp"

namespace b3c {

enum class MixerVariant { kVdn, kMono, kNonmono };

// Combines per-agent utilities into the joint value Q_jt = f(state, Q^1..N).
// vdn is a parameter-free sum. mono/nonmono use state-conditioned linear
// hypernetworks that generate a one-hidden-layer mixing net per sample
// (W1: N x H, b1: H, W2: H, b2: 1, ELU hidden activation); mono takes the
// absolute value of the generated W1/W2 so dQ_jt/dQ^i >= 0 everywhere,
// nonmono uses them unconstrained.
struct Mixer {
  MixerVariant variant = MixerVariant::kVdn;
  int n_agents = 0;
  int state_dim = 0;
  int hidden = 0;  // H; 0 for vdn
  Mlp hw1;         // state -> N*H
  Mlp hb1;         // state -> H
  Mlp hw2;         // state -> H
  Mlp hb2;         // state -> 1

  bool has_params() const { return variant != MixerVariant::kVdn; }
  bool operator==(const Mixer&) const = default;
};

Mixer make_mixer(MixerVariant variant, int n_agents, int state_dim, int hidden, Rng& rng);

struct MixerCache {
  MlpCache hw1, hb1, hw2, hb2;
  Matrix q;       // B x N, the utility inputs
  Matrix w1;      // B x N*H after the mono |.| (sample b, entry i*H+h)
  Matrix w2;      // B x H after the mono |.|
  Matrix mixed;   // B x H, post-ELU hidden layer
};

struct MixerGrads {
  MlpGrads w1, b1, w2, b2;
  void zero();
};

MixerGrads make_mixer_grads(const Mixer& mixer);

// Batched mixing. state is B x state_dim, qlocals is B x n_agents; out
// receives B x 1. Pass a cache to enable backward.
void mixer_forward(const Mixer& mixer, const Matrix& state, const Matrix& qlocals, Matrix& out,
                   MixerCache* cache = nullptr);

// Single-sample convenience.
double mixer_forward(const Mixer& mixer, std::span<const double> state_vec,
                     std::span<const double> q_locals);

// Backprops dout (B x 1). Hypernetwork parameter gradients accumulate into
// `grads` when non-null; the gradient with respect to the per-agent utilities
// lands in `dqlocals` (B x n_agents) when non-null.
void mixer_backward(const Mixer& mixer, const MixerCache& cache, const Matrix& dout,
                    MixerGrads* grads, Matrix* dqlocals);

}  // namespace b3c
