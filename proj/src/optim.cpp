#include "b3c/optim.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "b3c/errors.hpp"

namespace b3c {
namespace {

void adam_block(double* theta, const double* g, double* m, double* v, size_t n,
                const AdamState& s, double bc1, double bc2) {
  for (size_t i = 0; i < n; ++i) {
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
    v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    theta[i] -= s.lr * m_hat / (std::sqrt(v_hat) + s.epsilon);
  }
}

}  // namespace

AdamState make_adam(const Mlp& net, double lr) {
  AdamState s;
  s.m = make_grads(net);
  s.v = make_grads(net);
  s.m.zero();
  s.v.zero();
  s.lr = lr;
  return s;
}

void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state, const std::string& label) {
  const int layers = net.layer_count();
  if (static_cast<int>(grads.w.size()) != layers || static_cast<int>(state.m.w.size()) != layers)
    throw std::invalid_argument("adam_step: grads/state shape does not match net");
  if (!grads.all_finite())
    throw DivergenceError(state.step_count, "non-finite gradient in " + label);
  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  for (int l = 0; l < layers; ++l) {
    adam_block(net.w[l].data(), grads.w[l].data(), state.m.w[l].data(), state.v.w[l].data(),
               net.w[l].size(), state, bc1, bc2);
    adam_block(net.b[l].data(), grads.b[l].data(), state.m.b[l].data(), state.v.b[l].data(),
               net.b[l].size(), state, bc1, bc2);
  }
}

void polyak_blend(Mlp& target, const Mlp& online, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("polyak_blend: tau must lie in (0, 1]");
  if (target.dims != online.dims)
    throw ConfigError("polyak_blend: target and online topologies differ");
  for (int l = 0; l < target.layer_count(); ++l) {
    double* t = target.w[l].data();
    const double* o = online.w[l].data();
    for (size_t i = 0; i < target.w[l].size(); ++i) t[i] = (1.0 - tau) * t[i] + tau * o[i];
    for (size_t i = 0; i < target.b[l].size(); ++i)
      target.b[l][i] = (1.0 - tau) * target.b[l][i] + tau * online.b[l][i];
  }
}

}  // namespace b3c
