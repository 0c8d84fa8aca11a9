#include <doctest.h>

#include <cmath>

#include "b3c/critic.hpp"
#include "b3c/errors.hpp"
#include "b3c/mixer.hpp"
#include "support/fd.hpp"

using namespace b3c;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (size_t k = 0; k < m.size(); ++k) m.data()[k] = rng.uniform(lo, hi);
  return m;
}

CriticSizes micro_sizes() {
  CriticSizes s;
  s.n_agents = 2;
  s.obs_dim = 4;
  s.act_dim = 2;
  s.state_dim = 6;
  s.hidden_width = 8;
  s.hidden_depth = 1;
  s.mixer_hidden = 4;
  return s;
}

}  // namespace

TEST_SUITE("critic") {

TEST_CASE("vdn mixing is exactly the utility sum") {
  Rng rng(21);
  const Mixer mixer = make_mixer(MixerVariant::kVdn, 3, 12, 4, rng);
  CHECK(!mixer.has_params());
  const int batch = 100;
  for (int rep = 0; rep < 100; ++rep) {
    const Matrix state = random_matrix(batch, 12, rng, -5.0, 5.0);
    const Matrix q = random_matrix(batch, 3, rng, -50.0, 50.0);
    Matrix out;
    mixer_forward(mixer, state, q, out);
    for (int b = 0; b < batch; ++b) {
      const double sum = q.at(b, 0) + q.at(b, 1) + q.at(b, 2);
      CHECK(std::fabs(out.at(b, 0) - sum) <= 1e-12 * std::max(1.0, std::fabs(sum)));
    }
  }
}

TEST_CASE("monotonic mixer sensitivities are non-negative") {
  Rng rng(22);
  const Mixer mixer = make_mixer(MixerVariant::kMono, 3, 12, 8, rng);
  const double h = 1e-6;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> state(12), q(3);
    for (double& v : state) v = rng.uniform(-2.0, 2.0);
    for (double& v : q) v = rng.uniform(-10.0, 10.0);
    for (int i = 0; i < 3; ++i) {
      std::vector<double> up = q, down = q;
      up[static_cast<size_t>(i)] += h;
      down[static_cast<size_t>(i)] -= h;
      const double sens =
          (mixer_forward(mixer, state, up) - mixer_forward(mixer, state, down)) / (2.0 * h);
      CHECK(sens >= -1e-9);
    }
  }
}

TEST_CASE("a constructed nonmonotonic instance has a negative sensitivity") {
  Rng rng(23);
  Mixer mixer = make_mixer(MixerVariant::kNonmono, 2, 4, 3, rng);
  // Hypernet weights zeroed: generated W1/W2 come only from the biases.
  for (Mlp* net : {&mixer.hw1, &mixer.hb1, &mixer.hw2, &mixer.hb2})
    for (Matrix& w : net->w) w.fill(0.0);
  std::fill(mixer.hw1.b[0].begin(), mixer.hw1.b[0].end(), -0.5);  // W1 all negative
  std::fill(mixer.hw2.b[0].begin(), mixer.hw2.b[0].end(), 0.7);   // W2 positive
  std::fill(mixer.hb1.b[0].begin(), mixer.hb1.b[0].end(), 0.0);
  std::fill(mixer.hb2.b[0].begin(), mixer.hb2.b[0].end(), 0.0);

  const std::vector<double> state = {0.3, -0.4, 0.1, 0.9};
  const std::vector<double> q = {0.0, 0.0};
  const double h = 1e-6;
  const std::vector<double> q_up = {h, 0.0};
  const std::vector<double> q_dn = {-h, 0.0};
  const double sens = (mixer_forward(mixer, state, q_up) - mixer_forward(mixer, state, q_dn)) /
                      (2.0 * h);
  CHECK(sens < -1e-3);

  // The analytic utility gradient agrees.
  Matrix sm(1, 4), qm(1, 2), out;
  for (int k = 0; k < 4; ++k) sm.at(0, k) = state[static_cast<size_t>(k)];
  qm.at(0, 0) = q[0];
  qm.at(0, 1) = q[1];
  MixerCache cache;
  mixer_forward(mixer, sm, qm, out, &cache);
  Matrix dout(1, 1);
  dout.fill(1.0);
  Matrix dq;
  mixer_backward(mixer, cache, dout, nullptr, &dq);
  CHECK(dq.at(0, 0) == doctest::Approx(sens).epsilon(1e-6));
  CHECK(dq.at(0, 0) < 0.0);
}

TEST_CASE("mixer hypernet gradients match finite differences") {
  for (MixerVariant variant : {MixerVariant::kMono, MixerVariant::kNonmono}) {
    CAPTURE(static_cast<int>(variant));
    Rng rng(24);
    Mixer mixer = make_mixer(variant, 2, 5, 4, rng);
    const Matrix state = random_matrix(3, 5, rng);
    const Matrix q = random_matrix(3, 2, rng, -2.0, 2.0);

    MixerCache cache;
    Matrix out;
    mixer_forward(mixer, state, q, out, &cache);
    Matrix dout(3, 1);
    dout.fill(1.0);
    MixerGrads grads = make_mixer_grads(mixer);
    mixer_backward(mixer, cache, dout, &grads, nullptr);

    std::vector<fd::ParamRef> params;
    fd::collect(mixer, grads, params);
    const auto loss = [&] {
      Matrix y;
      mixer_forward(mixer, state, q, y);
      double s = 0.0;
      for (size_t k = 0; k < y.size(); ++k) s += y.data()[k];
      return s;
    };
    CHECK(fd::max_rel_err(params, loss) < 1e-6);
  }
}

TEST_CASE("vdn pass-through utility gradient is one") {
  Rng rng(25);
  const Mixer mixer = make_mixer(MixerVariant::kVdn, 3, 6, 0, rng);
  const Matrix state = random_matrix(2, 6, rng);
  const Matrix q = random_matrix(2, 3, rng);
  MixerCache cache;
  Matrix out;
  mixer_forward(mixer, state, q, out, &cache);
  Matrix dout(2, 1);
  dout.at(0, 0) = 1.0;
  dout.at(1, 0) = -2.0;
  Matrix dq;
  mixer_backward(mixer, cache, dout, nullptr, &dq);
  for (int i = 0; i < 3; ++i) {
    CHECK(dq.at(0, i) == 1.0);
    CHECK(dq.at(1, i) == -2.0);
  }
}

TEST_CASE("factored critic composes locals and mixer") {
  Rng rng(26);
  const CriticSizes sizes = micro_sizes();
  const CriticStack stack =
      make_critic_stack(CriticKind::kFactored, MixerVariant::kNonmono, false, sizes, rng);
  CHECK(stack.members() == 1);
  const FactoredCritic& fc = stack.factored[0];
  REQUIRE(fc.locals.size() == 2);
  CHECK(fc.locals[0].in_dim() == sizes.obs_dim + sizes.act_dim);
  CHECK(fc.locals[0].out_dim() == 1);

  Rng data(27);
  const Matrix state = random_matrix(3, sizes.state_dim, data);
  std::vector<Matrix> obs = {random_matrix(3, sizes.obs_dim, data),
                             random_matrix(3, sizes.obs_dim, data)};
  std::vector<Matrix> act = {random_matrix(3, sizes.act_dim, data),
                             random_matrix(3, sizes.act_dim, data)};
  Matrix q;
  critic_forward(stack, 0, state, obs, act, q);
  REQUIRE(q.rows() == 3);

  // Manual composition: per-agent locals on obs++act, then the mixer.
  Matrix qlocals(3, 2);
  for (int i = 0; i < 2; ++i) {
    Matrix in(3, sizes.obs_dim + sizes.act_dim);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < sizes.obs_dim; ++c) in.at(r, c) = obs[static_cast<size_t>(i)].at(r, c);
      for (int c = 0; c < sizes.act_dim; ++c)
        in.at(r, sizes.obs_dim + c) = act[static_cast<size_t>(i)].at(r, c);
    }
    Matrix qi;
    mlp_forward(fc.locals[static_cast<size_t>(i)], in, qi);
    for (int r = 0; r < 3; ++r) qlocals.at(r, i) = qi.at(r, 0);
  }
  Matrix expect;
  mixer_forward(fc.mixer, state, qlocals, expect);
  for (int r = 0; r < 3; ++r) CHECK(q.at(r, 0) == expect.at(r, 0));
}

TEST_CASE("joint critic is an MLP on state plus all actions") {
  Rng rng(28);
  const CriticSizes sizes = micro_sizes();
  const CriticStack stack =
      make_critic_stack(CriticKind::kJoint, MixerVariant::kVdn, false, sizes, rng);
  CHECK(stack.members() == 1);
  const Mlp& net = stack.joint[0].net;
  CHECK(net.in_dim() == sizes.state_dim + sizes.n_agents * sizes.act_dim);

  Rng data(29);
  const Matrix state = random_matrix(2, sizes.state_dim, data);
  std::vector<Matrix> obs = {random_matrix(2, sizes.obs_dim, data),
                             random_matrix(2, sizes.obs_dim, data)};
  std::vector<Matrix> act = {random_matrix(2, sizes.act_dim, data),
                             random_matrix(2, sizes.act_dim, data)};
  Matrix q;
  critic_forward(stack, 0, state, obs, act, q);

  Matrix in(2, net.in_dim());
  for (int r = 0; r < 2; ++r) {
    int c = 0;
    for (int k = 0; k < sizes.state_dim; ++k) in.at(r, c++) = state.at(r, k);
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < sizes.act_dim; ++k) in.at(r, c++) = act[static_cast<size_t>(i)].at(r, k);
  }
  Matrix expect;
  mlp_forward(net, in, expect);
  for (int r = 0; r < 2; ++r) CHECK(q.at(r, 0) == expect.at(r, 0));
}

TEST_CASE("critic gradients match finite differences") {
  struct Case {
    CriticKind kind;
    MixerVariant mixer;
    bool twin;
  };
  for (const Case& c : {Case{CriticKind::kFactored, MixerVariant::kVdn, false},
                        Case{CriticKind::kFactored, MixerVariant::kMono, false},
                        Case{CriticKind::kFactored, MixerVariant::kNonmono, false},
                        Case{CriticKind::kJoint, MixerVariant::kVdn, true}}) {
    CAPTURE(static_cast<int>(c.kind));
    CAPTURE(static_cast<int>(c.mixer));
    Rng rng(30);
    const CriticSizes sizes = micro_sizes();
    CriticStack stack = make_critic_stack(c.kind, c.mixer, c.twin, sizes, rng);

    Rng data(31);
    const Matrix state = random_matrix(4, sizes.state_dim, data);
    const std::vector<Matrix> obs = {random_matrix(4, sizes.obs_dim, data),
                                     random_matrix(4, sizes.obs_dim, data)};
    std::vector<Matrix> act = {random_matrix(4, sizes.act_dim, data),
                               random_matrix(4, sizes.act_dim, data)};

    for (int m = 0; m < stack.members(); ++m) {
      CriticCache cache;
      Matrix q;
      critic_forward(stack, m, state, obs, act, q, &cache);
      Matrix dout(4, 1);
      dout.fill(1.0);
      CriticGrads grads = make_critic_grads(stack);
      std::vector<Matrix> dact;
      critic_backward(stack, m, cache, dout, &grads, &dact);

      std::vector<fd::ParamRef> params;
      fd::collect(stack, grads, params);
      const auto loss = [&] {
        Matrix y;
        double total = 0.0;
        critic_forward(stack, m, state, obs, act, y);
        for (size_t k = 0; k < y.size(); ++k) total += y.data()[k];
        return total;
      };
      // Twin members share the collection; the untouched member's grads are
      // zero and its numeric differences are zero, so they agree trivially.
      CHECK(fd::max_rel_err(params, loss) < 1e-6);

      // Action gradients against finite differences.
      const double h = 1e-6;
      for (int i = 0; i < 2; ++i) {
        for (size_t k = 0; k < act[static_cast<size_t>(i)].size(); ++k) {
          double& slot = act[static_cast<size_t>(i)].data()[k];
          const double saved = slot;
          slot = saved + h;
          const double up = loss();
          slot = saved - h;
          const double down = loss();
          slot = saved;
          const double numeric = (up - down) / (2.0 * h);
          const double analytic = dact[static_cast<size_t>(i)].data()[k];
          CHECK(std::fabs(analytic - numeric) <=
                1e-5 * std::max(1.0, std::fabs(analytic) + std::fabs(numeric)));
        }
      }
    }
  }
}

TEST_CASE("twin stacks hold two distinct members") {
  Rng rng(32);
  const CriticStack stack =
      make_critic_stack(CriticKind::kFactored, MixerVariant::kVdn, true, micro_sizes(), rng);
  CHECK(stack.members() == 2);
  CHECK(!(stack.factored[0] == stack.factored[1]));
}

TEST_CASE("polyak over a stack copies at tau one") {
  Rng rng(33);
  const CriticSizes sizes = micro_sizes();
  CriticStack online =
      make_critic_stack(CriticKind::kFactored, MixerVariant::kNonmono, true, sizes, rng);
  CriticStack target =
      make_critic_stack(CriticKind::kFactored, MixerVariant::kNonmono, true, sizes, rng);
  CHECK(!(target == online));
  polyak_stack(target, online, 1.0);
  CHECK(target == online);
}

TEST_CASE("critic adam applies updates to every member") {
  Rng rng(34);
  const CriticSizes sizes = micro_sizes();
  CriticStack stack =
      make_critic_stack(CriticKind::kFactored, MixerVariant::kNonmono, true, sizes, rng);
  const CriticStack before = stack;
  CriticGrads grads = make_critic_grads(stack);
  for (FactoredGrads& fg : grads.factored) {
    for (MlpGrads& g : fg.locals) g.w[0].fill(0.5);
    fg.mixer.w1.w[0].fill(0.25);
  }
  CriticAdam adam = make_critic_adam(stack, 1e-3);
  critic_adam_step(stack, grads, adam);
  CHECK(!(stack == before));
  CHECK(stack.factored[0].locals[0].w[0].at(0, 0) != before.factored[0].locals[0].w[0].at(0, 0));
  CHECK(stack.factored[1].mixer.hw1.w[0].at(0, 0) != before.factored[1].mixer.hw1.w[0].at(0, 0));
}

}  // TEST_SUITE
