#include "b3c/critic.hpp"

#include <cstring>
#include <stdexcept>
#include <string>

#include "b3c/errors.hpp"

namespace b3c {
namespace {

std::vector<int> body_dims(int in, const CriticSizes& s) {
  std::vector<int> dims;
  dims.push_back(in);
  for (int l = 0; l < s.hidden_depth; ++l) dims.push_back(s.hidden_width);
  dims.push_back(1);
  return dims;
}

// out = [lead | parts[0] | parts[1] | ...] column-wise; lead may be null.
void concat_cols(const Matrix* lead, const std::vector<Matrix>& parts, Matrix& out) {
  const int rows = lead ? lead->rows() : parts.front().rows();
  int cols = lead ? lead->cols() : 0;
  for (const Matrix& p : parts) cols += p.cols();
  out.resize(rows, cols);
  for (int r = 0; r < rows; ++r) {
    double* dst = out.data() + static_cast<size_t>(r) * cols;
    if (lead) {
      std::memcpy(dst, lead->data() + static_cast<size_t>(r) * lead->cols(),
                  sizeof(double) * lead->cols());
      dst += lead->cols();
    }
    for (const Matrix& p : parts) {
      std::memcpy(dst, p.data() + static_cast<size_t>(r) * p.cols(), sizeof(double) * p.cols());
      dst += p.cols();
    }
  }
}

void slice_cols(const Matrix& src, int first, int count, Matrix& out) {
  out.resize(src.rows(), count);
  for (int r = 0; r < src.rows(); ++r)
    std::memcpy(out.data() + static_cast<size_t>(r) * count,
                src.data() + static_cast<size_t>(r) * src.cols() + first, sizeof(double) * count);
}

}  // namespace

CriticStack make_critic_stack(CriticKind kind, MixerVariant mixer, bool twin,
                              const CriticSizes& sizes, Rng& rng) {
  CriticStack stack;
  stack.kind = kind;
  const int copies = twin ? 2 : 1;
  for (int c = 0; c < copies; ++c) {
    if (kind == CriticKind::kFactored) {
      FactoredCritic critic;
      critic.obs_dim = sizes.obs_dim;
      critic.act_dim = sizes.act_dim;
      critic.locals.reserve(sizes.n_agents);
      for (int i = 0; i < sizes.n_agents; ++i)
        critic.locals.push_back(make_mlp(body_dims(sizes.obs_dim + sizes.act_dim, sizes),
                                         Act::kRelu, Act::kIdentity, rng));
      critic.mixer = make_mixer(mixer, sizes.n_agents, sizes.state_dim, sizes.mixer_hidden, rng);
      stack.factored.push_back(std::move(critic));
    } else {
      JointCritic critic;
      critic.state_dim = sizes.state_dim;
      critic.n_agents = sizes.n_agents;
      critic.act_dim = sizes.act_dim;
      critic.net = make_mlp(body_dims(sizes.state_dim + sizes.n_agents * sizes.act_dim, sizes),
                            Act::kRelu, Act::kIdentity, rng);
      stack.joint.push_back(std::move(critic));
    }
  }
  return stack;
}

void FactoredGrads::zero() {
  for (MlpGrads& g : locals) g.zero();
  mixer.zero();
}

void CriticGrads::zero() {
  for (FactoredGrads& g : factored) g.zero();
  for (MlpGrads& g : joint) g.zero();
}

CriticGrads make_critic_grads(const CriticStack& stack) {
  CriticGrads grads;
  for (const FactoredCritic& c : stack.factored) {
    FactoredGrads g;
    for (const Mlp& net : c.locals) g.locals.push_back(make_grads(net));
    g.mixer = make_mixer_grads(c.mixer);
    grads.factored.push_back(std::move(g));
  }
  for (const JointCritic& c : stack.joint) grads.joint.push_back(make_grads(c.net));
  return grads;
}

CriticAdam make_critic_adam(const CriticStack& stack, double lr) {
  CriticAdam adam;
  for (const FactoredCritic& c : stack.factored) {
    FactoredAdam a;
    for (const Mlp& net : c.locals) a.locals.push_back(make_adam(net, lr));
    if (c.mixer.has_params()) {
      a.mw1 = make_adam(c.mixer.hw1, lr);
      a.mb1 = make_adam(c.mixer.hb1, lr);
      a.mw2 = make_adam(c.mixer.hw2, lr);
      a.mb2 = make_adam(c.mixer.hb2, lr);
    }
    adam.factored.push_back(std::move(a));
  }
  for (const JointCritic& c : stack.joint) adam.joint.push_back(make_adam(c.net, lr));
  return adam;
}

void critic_forward(const CriticStack& stack, int m, const Matrix& state,
                    const std::vector<Matrix>& obs, const std::vector<Matrix>& act, Matrix& out,
                    CriticCache* cache) {
  if (m < 0 || m >= stack.members())
    throw std::invalid_argument("critic_forward: member index out of range");
  if (stack.kind == CriticKind::kFactored) {
    const FactoredCritic& critic = stack.factored[m];
    const int n = static_cast<int>(critic.locals.size());
    if (static_cast<int>(obs.size()) != n || static_cast<int>(act.size()) != n)
      throw DimensionError("critic_forward: per-agent inputs do not match agent count");
    if (cache && static_cast<int>(cache->factored.size()) != stack.members())
      cache->factored.resize(stack.members());
    FactoredCache* fc = cache ? &cache->factored[m] : nullptr;
    if (fc) fc->locals.resize(n);
    const int batch = obs.front().rows();
    Matrix qlocals(batch, n);
    Matrix in, qi;
    for (int i = 0; i < n; ++i) {
      concat_cols(&obs[i], {act[i]}, in);
      mlp_forward(critic.locals[i], in, qi, fc ? &fc->locals[i] : nullptr);
      for (int b = 0; b < batch; ++b) qlocals.at(b, i) = qi.at(b, 0);
    }
    if (fc) {
      fc->qlocals = qlocals;
      mixer_forward(critic.mixer, state, qlocals, out, &fc->mix);
    } else {
      mixer_forward(critic.mixer, state, qlocals, out, nullptr);
    }
  } else {
    const JointCritic& critic = stack.joint[m];
    if (cache && static_cast<int>(cache->joint.size()) != stack.members())
      cache->joint.resize(stack.members());
    Matrix in;
    concat_cols(&state, act, in);
    mlp_forward(critic.net, in, out, cache ? &cache->joint[m].net : nullptr);
  }
}

void critic_backward(const CriticStack& stack, int m, const CriticCache& cache, const Matrix& dout,
                     CriticGrads* grads, std::vector<Matrix>* dact) {
  if (m < 0 || m >= stack.members())
    throw std::invalid_argument("critic_backward: member index out of range");
  if (stack.kind == CriticKind::kFactored) {
    const FactoredCritic& critic = stack.factored[m];
    const FactoredCache& fc = cache.factored.at(m);
    const int n = static_cast<int>(critic.locals.size());
    Matrix dqlocals;
    mixer_backward(critic.mixer, fc.mix, dout, grads ? &grads->factored[m].mixer : nullptr,
                   &dqlocals);
    if (dact) dact->resize(n);
    Matrix dq_i(dqlocals.rows(), 1), din;
    for (int i = 0; i < n; ++i) {
      for (int b = 0; b < dqlocals.rows(); ++b) dq_i.at(b, 0) = dqlocals.at(b, i);
      mlp_backward(critic.locals[i], fc.locals[i], dq_i,
                   grads ? &grads->factored[m].locals[i] : nullptr, dact ? &din : nullptr);
      if (dact) slice_cols(din, critic.obs_dim, critic.act_dim, (*dact)[i]);
    }
  } else {
    const JointCritic& critic = stack.joint[m];
    const JointCache& jc = cache.joint.at(m);
    Matrix din;
    mlp_backward(critic.net, jc.net, dout, grads ? &grads->joint[m] : nullptr,
                 dact ? &din : nullptr);
    if (dact) {
      dact->resize(critic.n_agents);
      for (int i = 0; i < critic.n_agents; ++i)
        slice_cols(din, critic.state_dim + i * critic.act_dim, critic.act_dim, (*dact)[i]);
    }
  }
}

void critic_adam_step(CriticStack& stack, const CriticGrads& grads, CriticAdam& adam) {
  for (size_t m = 0; m < stack.factored.size(); ++m) {
    FactoredCritic& c = stack.factored[m];
    for (size_t i = 0; i < c.locals.size(); ++i)
      adam_step(c.locals[i], grads.factored[m].locals[i], adam.factored[m].locals[i],
                "critic " + std::to_string(m) + " local " + std::to_string(i));
    if (c.mixer.has_params()) {
      adam_step(c.mixer.hw1, grads.factored[m].mixer.w1, adam.factored[m].mw1, "mixer w1");
      adam_step(c.mixer.hb1, grads.factored[m].mixer.b1, adam.factored[m].mb1, "mixer b1");
      adam_step(c.mixer.hw2, grads.factored[m].mixer.w2, adam.factored[m].mw2, "mixer w2");
      adam_step(c.mixer.hb2, grads.factored[m].mixer.b2, adam.factored[m].mb2, "mixer b2");
    }
  }
  for (size_t m = 0; m < stack.joint.size(); ++m)
    adam_step(stack.joint[m].net, grads.joint[m], adam.joint[m],
              "joint critic " + std::to_string(m));
}

void polyak_stack(CriticStack& target, const CriticStack& online, double tau) {
  for (size_t m = 0; m < target.factored.size(); ++m) {
    for (size_t i = 0; i < target.factored[m].locals.size(); ++i)
      polyak_blend(target.factored[m].locals[i], online.factored[m].locals[i], tau);
    if (target.factored[m].mixer.has_params()) {
      polyak_blend(target.factored[m].mixer.hw1, online.factored[m].mixer.hw1, tau);
      polyak_blend(target.factored[m].mixer.hb1, online.factored[m].mixer.hb1, tau);
      polyak_blend(target.factored[m].mixer.hw2, online.factored[m].mixer.hw2, tau);
      polyak_blend(target.factored[m].mixer.hb2, online.factored[m].mixer.hb2, tau);
    }
  }
  for (size_t m = 0; m < target.joint.size(); ++m)
    polyak_blend(target.joint[m].net, online.joint[m].net, tau);
}

}  // namespace b3c
