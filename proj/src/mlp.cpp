#include "b3c/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace b3c {
namespace {

void activate_inplace(Act act, Matrix& m) {
  double* p = m.data();
  const size_t n = m.size();
  switch (act) {
    case Act::kRelu:
      for (size_t i = 0; i < n; ++i) p[i] = p[i] > 0.0 ? p[i] : 0.0;
      break;
    case Act::kTanh:
      for (size_t i = 0; i < n; ++i) p[i] = std::tanh(p[i]);
      break;
    case Act::kIdentity:
      break;
  }
}

// dz *= act'(z), expressed through the post-activation values.
void activate_grad_inplace(Act act, const Matrix& post, Matrix& dz) {
  const double* a = post.data();
  double* d = dz.data();
  const size_t n = dz.size();
  switch (act) {
    case Act::kRelu:
      for (size_t i = 0; i < n; ++i)
        if (a[i] <= 0.0) d[i] = 0.0;
      break;
    case Act::kTanh:
      for (size_t i = 0; i < n; ++i) d[i] *= 1.0 - a[i] * a[i];
      break;
    case Act::kIdentity:
      break;
  }
}

void check_cache(const Mlp& net, const MlpCache& cache) {
  bool ok = cache.a.size() == net.w.size() && cache.input.cols() == net.in_dim();
  if (ok) {
    const int rows = cache.input.rows();
    for (int l = 0; l < net.layer_count(); ++l)
      if (cache.a[l].rows() != rows || cache.a[l].cols() != net.dims[l + 1]) {
        ok = false;
        break;
      }
  }
  if (!ok) throw std::invalid_argument("mlp_backward: cache does not match net topology");
}

}  // namespace

long Mlp::param_count() const {
  long total = 0;
  for (const Matrix& m : w) total += static_cast<long>(m.size());
  for (const auto& v : b) total += static_cast<long>(v.size());
  return total;
}

Mlp make_mlp(std::vector<int> dims, Act hidden, Act output, Rng& rng) {
  if (dims.size() < 2) throw std::invalid_argument("make_mlp: need at least input and output dims");
  for (int d : dims)
    if (d <= 0) throw std::invalid_argument("make_mlp: layer dims must be positive");
  Mlp net;
  net.dims = std::move(dims);
  net.hidden_act = hidden;
  net.output_act = output;
  const int layers = static_cast<int>(net.dims.size()) - 1;
  net.w.reserve(layers);
  net.b.reserve(layers);
  for (int l = 0; l < layers; ++l) {
    const int fan_in = net.dims[l];
    const int fan_out = net.dims[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Matrix m(fan_in, fan_out);
    double* p = m.data();
    for (size_t i = 0; i < m.size(); ++i) p[i] = rng.uniform(-bound, bound);
    net.w.push_back(std::move(m));
    net.b.emplace_back(fan_out, 0.0);
  }
  return net;
}

void MlpGrads::zero() {
  for (Matrix& m : w) m.fill(0.0);
  for (auto& v : b) std::fill(v.begin(), v.end(), 0.0);
}

bool MlpGrads::all_finite() const {
  for (const Matrix& m : w)
    if (!m.all_finite()) return false;
  for (const auto& v : b)
    for (double x : v)
      if (!std::isfinite(x)) return false;
  return true;
}

MlpGrads make_grads(const Mlp& net) {
  MlpGrads g;
  g.w.reserve(net.w.size());
  g.b.reserve(net.b.size());
  for (const Matrix& m : net.w) g.w.emplace_back(m.rows(), m.cols());
  for (const auto& v : net.b) g.b.emplace_back(v.size(), 0.0);
  return g;
}

void mlp_forward(const Mlp& net, const Matrix& input, Matrix& out, MlpCache* cache) {
  if (input.cols() != net.in_dim())
    throw std::invalid_argument("mlp_forward: input has " + std::to_string(input.cols()) +
                                " columns, net expects " + std::to_string(net.in_dim()));
  const int layers = net.layer_count();
  if (cache) {
    cache->input = input;
    cache->a.resize(layers);
  }
  Matrix scratch[2];  // alternate buffers so layer l never reads and writes the same matrix
  const Matrix* cur = &input;
  for (int l = 0; l < layers; ++l) {
    const bool last = l + 1 == layers;
    Matrix& dst = cache ? cache->a[l] : (last ? out : scratch[l & 1]);
    matmul(*cur, net.w[l], dst);
    add_row_inplace(dst, net.b[l]);
    activate_inplace(last ? net.output_act : net.hidden_act, dst);
    cur = &dst;
  }
  if (cache) out = cache->a.back();
}

void mlp_backward(const Mlp& net, const MlpCache& cache, const Matrix& dout, MlpGrads* grads,
                  Matrix* dinput) {
  check_cache(net, cache);
  const int layers = net.layer_count();
  if (dout.rows() != cache.input.rows() || dout.cols() != net.out_dim())
    throw std::invalid_argument("mlp_backward: dout shape does not match the cached forward pass");
  if (grads) {
    bool ok = static_cast<int>(grads->w.size()) == layers;
    for (int l = 0; ok && l < layers; ++l)
      ok = grads->w[l].rows() == net.w[l].rows() && grads->w[l].cols() == net.w[l].cols() &&
           grads->b[l].size() == net.b[l].size();
    if (!ok) throw std::invalid_argument("mlp_backward: grads shape does not match net");
  }

  Matrix dz = dout;
  Matrix da_prev;
  for (int l = layers - 1; l >= 0; --l) {
    const bool last = l + 1 == layers;
    activate_grad_inplace(last ? net.output_act : net.hidden_act, cache.a[l], dz);
    if (grads) {
      const Matrix& a_prev = (l == 0) ? cache.input : cache.a[l - 1];
      matmul_tn_accum(a_prev, dz, grads->w[l]);
      add_col_sums(dz, grads->b[l]);
    }
    if (l > 0) {
      matmul_nt(dz, net.w[l], da_prev);
      std::swap(dz, da_prev);
    } else if (dinput) {
      matmul_nt(dz, net.w[0], *dinput);
    }
  }
}

std::vector<double> mlp_apply(const Mlp& net, std::span<const double> input) {
  Matrix in(1, static_cast<int>(input.size()));
  std::copy(input.begin(), input.end(), in.data());
  Matrix out;
  mlp_forward(net, in, out);
  return std::move(out.raw());
}

double grad_check(const Mlp& net, const Matrix& input, const LossProbe& loss, double h) {
  MlpCache cache;
  Matrix out;
  mlp_forward(net, input, out, &cache);
  MlpGrads grads = make_grads(net);
  grads.zero();
  Matrix dout = loss.output_grad(out);
  mlp_backward(net, cache, dout, &grads);

  Mlp probe = net;
  Matrix probe_out;
  auto eval = [&]() {
    mlp_forward(probe, input, probe_out);
    return loss.value(probe_out);
  };
  double max_err = 0.0;
  auto check_param = [&](double& p, double analytic) {
    const double orig = p;
    p = orig + h;
    const double up = eval();
    p = orig - h;
    const double down = eval();
    p = orig;
    const double numeric = (up - down) / (2.0 * h);
    const double err =
        std::fabs(analytic - numeric) / std::max(1e-8, std::fabs(analytic) + std::fabs(numeric));
    if (err > max_err) max_err = err;
  };
  for (int l = 0; l < probe.layer_count(); ++l) {
    for (size_t i = 0; i < probe.w[l].size(); ++i)
      check_param(probe.w[l].data()[i], grads.w[l].data()[i]);
    for (size_t i = 0; i < probe.b[l].size(); ++i) check_param(probe.b[l][i], grads.b[l][i]);
  }
  return max_err;
}

}  // namespace b3c
