#include "b3c/mixer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace b3c {
namespace {

double elu(double x) { return x > 0.0 ? x : std::expm1(x); }
// ELU'(x) recovered from the post-activation value: 1 above zero, a+1 below.
double elu_grad_from_post(double a) { return a > 0.0 ? 1.0 : a + 1.0; }

void abs_inplace(Matrix& m) {
  double* p = m.data();
  for (size_t i = 0; i < m.size(); ++i) p[i] = std::fabs(p[i]);
}

void check_shapes(const Mixer& mixer, const Matrix& state, const Matrix& qlocals) {
  if (qlocals.cols() != mixer.n_agents)
    throw std::invalid_argument("mixer_forward: expected " + std::to_string(mixer.n_agents) +
                                " utilities per sample, got " + std::to_string(qlocals.cols()));
  if (mixer.has_params() &&
      (state.cols() != mixer.state_dim || state.rows() != qlocals.rows()))
    throw std::invalid_argument("mixer_forward: state shape does not match utilities");
}

}  // namespace

Mixer make_mixer(MixerVariant variant, int n_agents, int state_dim, int hidden, Rng& rng) {
  if (n_agents < 1) throw std::invalid_argument("make_mixer: need at least one agent");
  Mixer m;
  m.variant = variant;
  m.n_agents = n_agents;
  m.state_dim = state_dim;
  if (variant == MixerVariant::kVdn) return m;
  if (state_dim < 1 || hidden < 1)
    throw std::invalid_argument("make_mixer: hypernetworks need positive state_dim and hidden");
  m.hidden = hidden;
  m.hw1 = make_mlp({state_dim, n_agents * hidden}, Act::kIdentity, Act::kIdentity, rng);
  m.hb1 = make_mlp({state_dim, hidden}, Act::kIdentity, Act::kIdentity, rng);
  m.hw2 = make_mlp({state_dim, hidden}, Act::kIdentity, Act::kIdentity, rng);
  m.hb2 = make_mlp({state_dim, 1}, Act::kIdentity, Act::kIdentity, rng);
  return m;
}

void MixerGrads::zero() {
  w1.zero();
  b1.zero();
  w2.zero();
  b2.zero();
}

MixerGrads make_mixer_grads(const Mixer& mixer) {
  MixerGrads g;
  if (mixer.has_params()) {
    g.w1 = make_grads(mixer.hw1);
    g.b1 = make_grads(mixer.hb1);
    g.w2 = make_grads(mixer.hw2);
    g.b2 = make_grads(mixer.hb2);
  }
  return g;
}

void mixer_forward(const Mixer& mixer, const Matrix& state, const Matrix& qlocals, Matrix& out,
                   MixerCache* cache) {
  check_shapes(mixer, state, qlocals);
  const int batch = qlocals.rows();
  const int n = mixer.n_agents;
  out.resize(batch, 1);

  if (mixer.variant == MixerVariant::kVdn) {
    for (int b = 0; b < batch; ++b) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += qlocals.at(b, i);
      out.at(b, 0) = sum;
    }
    if (cache) cache->q = qlocals;
    return;
  }

  const int h = mixer.hidden;
  MixerCache local;
  MixerCache& c = cache ? *cache : local;
  c.q = qlocals;
  Matrix b1, b2;
  mlp_forward(mixer.hw1, state, c.w1, cache ? &c.hw1 : nullptr);
  mlp_forward(mixer.hb1, state, b1, cache ? &c.hb1 : nullptr);
  mlp_forward(mixer.hw2, state, c.w2, cache ? &c.hw2 : nullptr);
  mlp_forward(mixer.hb2, state, b2, cache ? &c.hb2 : nullptr);
  if (mixer.variant == MixerVariant::kMono) {
    abs_inplace(c.w1);
    abs_inplace(c.w2);
  }

  c.mixed.resize(batch, h);
  for (int b = 0; b < batch; ++b) {
    const double* w1 = c.w1.data() + static_cast<size_t>(b) * n * h;
    const double* q = c.q.data() + static_cast<size_t>(b) * n;
    double* mixed = c.mixed.data() + static_cast<size_t>(b) * h;
    for (int j = 0; j < h; ++j) mixed[j] = b1.at(b, j);
    for (int i = 0; i < n; ++i) {
      const double qi = q[i];
      const double* w1i = w1 + static_cast<size_t>(i) * h;
      for (int j = 0; j < h; ++j) mixed[j] += qi * w1i[j];
    }
    double y = b2.at(b, 0);
    const double* w2 = c.w2.data() + static_cast<size_t>(b) * h;
    for (int j = 0; j < h; ++j) {
      mixed[j] = elu(mixed[j]);
      y += mixed[j] * w2[j];
    }
    out.at(b, 0) = y;
  }
}

double mixer_forward(const Mixer& mixer, std::span<const double> state_vec,
                     std::span<const double> q_locals) {
  Matrix state(1, static_cast<int>(state_vec.size()));
  std::copy(state_vec.begin(), state_vec.end(), state.data());
  Matrix q(1, static_cast<int>(q_locals.size()));
  std::copy(q_locals.begin(), q_locals.end(), q.data());
  Matrix out;
  mixer_forward(mixer, state, q, out);
  return out.at(0, 0);
}

void mixer_backward(const Mixer& mixer, const MixerCache& cache, const Matrix& dout,
                    MixerGrads* grads, Matrix* dqlocals) {
  const int batch = cache.q.rows();
  const int n = mixer.n_agents;
  if (dout.rows() != batch || dout.cols() != 1)
    throw std::invalid_argument("mixer_backward: dout must be B x 1");

  if (mixer.variant == MixerVariant::kVdn) {
    if (dqlocals) {
      dqlocals->resize(batch, n);
      for (int b = 0; b < batch; ++b)
        for (int i = 0; i < n; ++i) dqlocals->at(b, i) = dout.at(b, 0);
    }
    return;
  }

  const int h = mixer.hidden;
  const Matrix& w1raw = cache.hw1.a.back();
  const Matrix& w2raw = cache.hw2.a.back();
  Matrix dw1(batch, n * h), db1(batch, h), dw2(batch, h), db2(batch, 1);
  if (dqlocals) dqlocals->resize(batch, n);

  for (int b = 0; b < batch; ++b) {
    const double g = dout.at(b, 0);
    const double* w1 = cache.w1.data() + static_cast<size_t>(b) * n * h;
    const double* w2 = cache.w2.data() + static_cast<size_t>(b) * h;
    const double* mixed = cache.mixed.data() + static_cast<size_t>(b) * h;
    const double* q = cache.q.data() + static_cast<size_t>(b) * n;
    double* dw1b = dw1.data() + static_cast<size_t>(b) * n * h;
    double* db1b = db1.data() + static_cast<size_t>(b) * h;
    double* dw2b = dw2.data() + static_cast<size_t>(b) * h;

    db2.at(b, 0) = g;
    for (int j = 0; j < h; ++j) {
      dw2b[j] = g * mixed[j];
      db1b[j] = g * w2[j] * elu_grad_from_post(mixed[j]);  // = d(pre_j)
    }
    for (int i = 0; i < n; ++i) {
      const double qi = q[i];
      const double* w1i = w1 + static_cast<size_t>(i) * h;
      double* dw1i = dw1b + static_cast<size_t>(i) * h;
      double acc = 0.0;
      for (int j = 0; j < h; ++j) {
        dw1i[j] = qi * db1b[j];
        acc += w1i[j] * db1b[j];
      }
      if (dqlocals) dqlocals->at(b, i) = acc;
    }
  }

  if (!grads) return;
  if (mixer.variant == MixerVariant::kMono) {
    // Route gradients through |.|: d|x|/dx = sign(x), 0 at x = 0.
    const double* raw1 = w1raw.data();
    double* d1 = dw1.data();
    for (size_t k = 0; k < dw1.size(); ++k)
      d1[k] = raw1[k] > 0.0 ? d1[k] : (raw1[k] < 0.0 ? -d1[k] : 0.0);
    const double* raw2 = w2raw.data();
    double* d2 = dw2.data();
    for (size_t k = 0; k < dw2.size(); ++k)
      d2[k] = raw2[k] > 0.0 ? d2[k] : (raw2[k] < 0.0 ? -d2[k] : 0.0);
  }
  mlp_backward(mixer.hw1, cache.hw1, dw1, &grads->w1);
  mlp_backward(mixer.hb1, cache.hb1, db1, &grads->b1);
  mlp_backward(mixer.hw2, cache.hw2, dw2, &grads->w2);
  mlp_backward(mixer.hb2, cache.hb2, db2, &grads->b2);
}

}  // namespace b3c
