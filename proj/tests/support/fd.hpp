#pragma once

// Central-difference gradient checking over whole parameter collections:
// pair every scalar parameter with its analytic-gradient slot, then compare
// (loss(p+h) - loss(p-h)) / 2h against the recorded analytic value.

#include <cmath>
#include <functional>
#include <vector>

#include "b3c/critic.hpp"
#include "b3c/mixer.hpp"
#include "b3c/mlp.hpp"

namespace b3c::fd {

struct ParamRef {
  double* param;
  const double* grad;
};

inline void collect(Mlp& net, MlpGrads& grads, std::vector<ParamRef>& out) {
  for (size_t l = 0; l < net.w.size(); ++l) {
    for (size_t k = 0; k < net.w[l].size(); ++k)
      out.push_back({net.w[l].data() + k, grads.w[l].data() + k});
    for (size_t k = 0; k < net.b[l].size(); ++k)
      out.push_back({net.b[l].data() + k, grads.b[l].data() + k});
  }
}

inline void collect(Mixer& mixer, MixerGrads& grads, std::vector<ParamRef>& out) {
  if (!mixer.has_params()) return;
  collect(mixer.hw1, grads.w1, out);
  collect(mixer.hb1, grads.b1, out);
  collect(mixer.hw2, grads.w2, out);
  collect(mixer.hb2, grads.b2, out);
}

inline void collect(CriticStack& stack, CriticGrads& grads, std::vector<ParamRef>& out) {
  if (stack.kind == CriticKind::kFactored) {
    for (size_t m = 0; m < stack.factored.size(); ++m) {
      for (size_t i = 0; i < stack.factored[m].locals.size(); ++i)
        collect(stack.factored[m].locals[i], grads.factored[m].locals[i], out);
      collect(stack.factored[m].mixer, grads.factored[m].mixer, out);
    }
  } else {
    for (size_t m = 0; m < stack.joint.size(); ++m)
      collect(stack.joint[m].net, grads.joint[m], out);
  }
}

inline void collect(std::vector<Mlp>& nets, std::vector<MlpGrads>& grads,
                    std::vector<ParamRef>& out) {
  for (size_t i = 0; i < nets.size(); ++i) collect(nets[i], grads[i], out);
}

// Worst relative error over all parameters; relative to
// max(1e-8, |analytic| + |numeric|) so tiny gradients do not blow up.
inline double max_rel_err(const std::vector<ParamRef>& params,
                          const std::function<double()>& loss, double h = 1e-5) {
  double worst = 0.0;
  for (const ParamRef& pr : params) {
    const double saved = *pr.param;
    *pr.param = saved + h;
    const double up = loss();
    *pr.param = saved - h;
    const double down = loss();
    *pr.param = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max(1e-8, std::fabs(numeric) + std::fabs(*pr.grad));
    worst = std::max(worst, std::fabs(numeric - *pr.grad) / denom);
  }
  return worst;
}

}  // namespace b3c::fd
