#include <doctest.h>

#include <cmath>

#include "b3c/errors.hpp"
#include "b3c/matrix.hpp"
#include "b3c/mlp.hpp"
#include "b3c/optim.hpp"
#include "support/fd.hpp"

using namespace b3c;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (size_t k = 0; k < m.size(); ++k) m.data()[k] = rng.uniform(lo, hi);
  return m;
}

LossProbe sum_of_squares() {
  return {[](const Matrix& y) {
            double s = 0.0;
            for (size_t k = 0; k < y.size(); ++k) s += y.data()[k] * y.data()[k];
            return s;
          },
          [](const Matrix& y) {
            Matrix g(y.rows(), y.cols());
            for (size_t k = 0; k < y.size(); ++k) g.data()[k] = 2.0 * y.data()[k];
            return g;
          }};
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("matmul matches hand products") {
  Matrix a(2, 3), b(3, 2), out;
  const double av[] = {1, 2, 3, 4, 5, 6};
  const double bv[] = {7, 8, 9, 10, 11, 12};
  for (size_t k = 0; k < a.size(); ++k) a.data()[k] = av[k];
  for (size_t k = 0; k < b.size(); ++k) b.data()[k] = bv[k];
  matmul(a, b, out);
  CHECK(out.rows() == 2);
  CHECK(out.cols() == 2);
  CHECK(out.at(0, 0) == 58.0);
  CHECK(out.at(0, 1) == 64.0);
  CHECK(out.at(1, 0) == 139.0);
  CHECK(out.at(1, 1) == 154.0);

  Matrix acc(3, 2);
  acc.fill(1.0);
  matmul_tn_accum(a, out, acc);  // acc += a^T * out
  CHECK(acc.at(0, 0) == 1.0 + 1 * 58 + 4 * 139);
  CHECK(acc.at(2, 1) == 1.0 + 3 * 64 + 6 * 154);

  Matrix nt;
  matmul_nt(a, a, nt);  // a * a^T
  CHECK(nt.rows() == 2);
  CHECK(nt.cols() == 2);
  CHECK(nt.at(0, 1) == 1 * 4 + 2 * 5 + 3 * 6);
}

TEST_CASE("row broadcast and column sums") {
  Matrix m(2, 3);
  const double mv[] = {1, 2, 3, 4, 5, 6};
  for (size_t k = 0; k < m.size(); ++k) m.data()[k] = mv[k];
  std::vector<double> row = {10, 20, 30};
  add_row_inplace(m, row);
  CHECK(m.at(0, 0) == 11.0);
  CHECK(m.at(1, 2) == 36.0);

  std::vector<double> sums(3, 0.0);
  add_col_sums(m, sums);
  CHECK(sums[0] == 11.0 + 14.0);
  CHECK(sums[2] == 33.0 + 36.0);
}

TEST_CASE("two-layer tanh net matches a hand evaluation") {
  Rng rng(1);
  Mlp net = make_mlp({2, 2, 1}, Act::kTanh, Act::kIdentity, rng);
  net.w[0].at(0, 0) = 0.5;
  net.w[0].at(0, 1) = -0.2;
  net.w[0].at(1, 0) = 0.1;
  net.w[0].at(1, 1) = 0.4;
  net.b[0] = {0.05, -0.1};
  net.w[1].at(0, 0) = 0.7;
  net.w[1].at(1, 0) = -0.3;
  net.b[1] = {0.2};

  Matrix x(1, 2);
  x.at(0, 0) = 0.3;
  x.at(0, 1) = -0.7;
  Matrix y;
  mlp_forward(net, x, y);

  const double h0 = std::tanh(0.3 * 0.5 + (-0.7) * 0.1 + 0.05);
  const double h1 = std::tanh(0.3 * -0.2 + (-0.7) * 0.4 - 0.1);
  const double expect = 0.7 * h0 - 0.3 * h1 + 0.2;
  CHECK(y.at(0, 0) == doctest::Approx(expect).epsilon(1e-12));

  const std::vector<double> applied = mlp_apply(net, std::vector<double>{0.3, -0.7});
  CHECK(applied.size() == 1);
  CHECK(applied[0] == y.at(0, 0));
}

TEST_CASE("zero weights give bias outputs; identity layer is affine") {
  Rng rng(2);
  Mlp net = make_mlp({3, 4}, Act::kRelu, Act::kIdentity, rng);
  for (Matrix& w : net.w) w.fill(0.0);
  net.b[0] = {1.5, -2.0, 0.0, 3.25};
  Matrix x = random_matrix(5, 3, rng);
  Matrix y;
  mlp_forward(net, x, y);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 4; ++c) CHECK(y.at(r, c) == net.b[0][static_cast<size_t>(c)]);

  net.w[0].at(1, 2) = 2.0;
  mlp_forward(net, x, y);
  CHECK(y.at(3, 2) == x.at(3, 1) * 2.0 + 0.0);
}

TEST_CASE("parameter gradients match finite differences") {
  for (Act hidden : {Act::kRelu, Act::kTanh}) {
    for (Act output : {Act::kIdentity, Act::kTanh}) {
      CAPTURE(static_cast<int>(hidden));
      CAPTURE(static_cast<int>(output));
      Rng rng(42);
      const Mlp net = make_mlp({4, 8, 8, 2}, hidden, output, rng);
      const Matrix input = random_matrix(3, 4, rng);
      CHECK(grad_check(net, input, sum_of_squares()) < 1e-6);
    }
  }
}

TEST_CASE("input gradients match finite differences") {
  Rng rng(7);
  Mlp net = make_mlp({4, 8, 2}, Act::kTanh, Act::kIdentity, rng);
  Matrix input = random_matrix(3, 4, rng);

  MlpCache cache;
  Matrix out;
  mlp_forward(net, input, out, &cache);
  Matrix dout(3, 2);
  dout.fill(1.0);
  Matrix dinput;
  mlp_backward(net, cache, dout, nullptr, &dinput);

  const double h = 1e-6;
  for (size_t k = 0; k < input.size(); ++k) {
    const double saved = input.data()[k];
    auto total = [&] {
      Matrix y;
      mlp_forward(net, input, y);
      double s = 0.0;
      for (size_t j = 0; j < y.size(); ++j) s += y.data()[j];
      return s;
    };
    input.data()[k] = saved + h;
    const double up = total();
    input.data()[k] = saved - h;
    const double down = total();
    input.data()[k] = saved;
    const double numeric = (up - down) / (2.0 * h);
    CHECK(dinput.data()[k] == doctest::Approx(numeric).epsilon(1e-5));
  }
}

TEST_CASE("backward rejects a stale cache") {
  Rng rng(3);
  Mlp small = make_mlp({2, 3, 1}, Act::kRelu, Act::kIdentity, rng);
  Mlp big = make_mlp({2, 5, 1}, Act::kRelu, Act::kIdentity, rng);
  Matrix x = random_matrix(2, 2, rng), y;
  MlpCache cache;
  mlp_forward(small, x, y, &cache);
  Matrix dout(2, 1);
  dout.fill(1.0);
  MlpGrads grads = make_grads(big);
  CHECK_THROWS_AS(mlp_backward(big, cache, dout, &grads), std::invalid_argument);
}

TEST_CASE("adam first step has the closed form") {
  Rng rng(4);
  Mlp net = make_mlp({1, 1}, Act::kRelu, Act::kIdentity, rng);
  const double theta_w = net.w[0].at(0, 0);
  const double theta_b = net.b[0][0];

  MlpGrads grads = make_grads(net);
  grads.w[0].at(0, 0) = 0.37;
  grads.b[0][0] = -2.5;
  AdamState adam = make_adam(net, 1e-3);
  adam_step(net, grads, adam, "t");

  // m_hat = g and v_hat = g^2 after one step, so the update is
  // lr * g / (|g| + eps).
  CHECK(net.w[0].at(0, 0) ==
        doctest::Approx(theta_w - 1e-3 * 0.37 / (0.37 + 1e-8)).epsilon(1e-14));
  CHECK(net.b[0][0] == doctest::Approx(theta_b + 1e-3 * 2.5 / (2.5 + 1e-8)).epsilon(1e-14));
  CHECK(adam.step_count == 1);
}

TEST_CASE("adam two steps match a scalar reference trace") {
  Rng rng(5);
  Mlp net = make_mlp({1, 1}, Act::kRelu, Act::kIdentity, rng);
  const double lr = 3e-4, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double theta = net.w[0].at(0, 0);
  double m = 0.0, v = 0.0;
  const double gs[] = {0.8, -0.15};

  AdamState adam = make_adam(net, lr);
  MlpGrads grads = make_grads(net);
  for (int t = 0; t < 2; ++t) {
    grads.w[0].at(0, 0) = gs[t];
    adam_step(net, grads, adam, "t");

    m = b1 * m + (1 - b1) * gs[t];
    v = b2 * v + (1 - b2) * gs[t] * gs[t];
    const double mh = m / (1 - std::pow(b1, t + 1));
    const double vh = v / (1 - std::pow(b2, t + 1));
    theta -= lr * mh / (std::sqrt(vh) + eps);
  }
  CHECK(net.w[0].at(0, 0) == doctest::Approx(theta).epsilon(1e-12));
}

TEST_CASE("adam with zero gradients leaves parameters unchanged") {
  Rng rng(6);
  Mlp net = make_mlp({3, 5, 2}, Act::kTanh, Act::kIdentity, rng);
  const Mlp before = net;
  MlpGrads grads = make_grads(net);
  AdamState adam = make_adam(net, 1e-2);
  adam_step(net, grads, adam, "t");
  CHECK(net == before);
  CHECK(adam.step_count == 1);
}

TEST_CASE("adam rejects non-finite gradients with the label") {
  Rng rng(8);
  Mlp net = make_mlp({2, 2}, Act::kRelu, Act::kIdentity, rng);
  MlpGrads grads = make_grads(net);
  grads.w[0].at(0, 0) = std::numeric_limits<double>::quiet_NaN();
  AdamState adam = make_adam(net, 1e-3);
  CHECK_THROWS_WITH_AS(adam_step(net, grads, adam, "critic local 1"),
                       doctest::Contains("critic local 1"), DivergenceError);
}

TEST_CASE("polyak blends literally and compounds geometrically") {
  Rng rng(9);
  Mlp online = make_mlp({2, 3}, Act::kRelu, Act::kIdentity, rng);
  Mlp target = make_mlp({2, 3}, Act::kRelu, Act::kIdentity, rng);

  Mlp copy = target;
  polyak_blend(copy, online, 1.0);
  CHECK(copy == online);

  const double tau = 0.005;
  const double t0 = target.w[0].at(1, 2);
  const double o0 = online.w[0].at(1, 2);
  polyak_blend(target, online, tau);
  CHECK(target.w[0].at(1, 2) == (1.0 - tau) * t0 + tau * o0);

  // k more blends against a frozen online net approach it geometrically.
  double expect = target.w[0].at(1, 2);
  for (int k = 0; k < 50; ++k) {
    polyak_blend(target, online, tau);
    expect = (1.0 - tau) * expect + tau * o0;
  }
  CHECK(target.w[0].at(1, 2) == doctest::Approx(expect).epsilon(1e-14));

  CHECK_THROWS_AS(polyak_blend(target, online, 0.0), ConfigError);
  CHECK_THROWS_AS(polyak_blend(target, online, 1.5), ConfigError);
}

TEST_CASE("init bounds follow fan-in and biases start at zero") {
  Rng rng(10);
  Mlp net = make_mlp({16, 8, 4}, Act::kRelu, Act::kTanh, rng);
  const double bound0 = 1.0 / std::sqrt(16.0);
  for (size_t k = 0; k < net.w[0].size(); ++k) {
    CHECK(net.w[0].data()[k] >= -bound0);
    CHECK(net.w[0].data()[k] <= bound0);
  }
  for (double b : net.b[0]) CHECK(b == 0.0);
  for (double b : net.b[1]) CHECK(b == 0.0);
}

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(123), b(123), c(124);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  bool differs = false;
  Rng a2(123);
  for (int i = 0; i < 100; ++i) differs = differs || (a2.next_u64() != c.next_u64());
  CHECK(differs);

  CHECK(derive_seed(1, streams::kInit, 0) != derive_seed(1, streams::kBatch, 0));
  CHECK(derive_seed(1, streams::kBatch, 0) != derive_seed(1, streams::kBatch, 1));
  CHECK(derive_seed(1, streams::kBatch, 0) != derive_seed(2, streams::kBatch, 0));
  CHECK(derive_seed(3, streams::kEval, 7) == derive_seed(3, streams::kEval, 7));
}

TEST_CASE("uniform and below stay in range") {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const uint64_t k = rng.below(7);
    CHECK(k < 7);
  }
  const double v = rng.uniform(-3.0, 5.0);
  CHECK(v >= -3.0);
  CHECK(v < 5.0);
}

TEST_CASE("gaussian moments over a million draws") {
  Rng rng(12);
  const int n = 1'000'000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian(0.0, 1.0);
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::fabs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(var - 1.0) < 3.0 * std::sqrt(2.0 / n));

  Rng shifted(13);
  const double x = shifted.gaussian(2.0, 0.5);
  CHECK(std::isfinite(x));
}

TEST_CASE("below(16) is uniform within 3 sigma per bin") {
  Rng rng(14);
  const int n = 1'600'000;
  long counts[16] = {};
  for (int i = 0; i < n; ++i) counts[rng.below(16)] += 1;
  const double expected = n / 16.0;
  const double sigma = std::sqrt(n * (1.0 / 16.0) * (15.0 / 16.0));
  for (long c : counts) CHECK(std::fabs(c - expected) < 3.0 * sigma);
}

}  // TEST_SUITE
