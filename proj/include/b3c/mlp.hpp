#pragma once

#include <functional>
#include <span>
#include <vector>

#include "b3c/matrix.hpp"
#include "b3c/rng.hpp"

namespace b3c {

enum class Act { kRelu, kTanh, kIdentity };

// Fully-connected net with a fixed topology. Backprop is hand-derived for
// this shape; there is no autodiff graph anywhere in the project.
struct Mlp {
  std::vector<int> dims;                // layer widths, size = layers + 1
  std::vector<Matrix> w;                // w[l] is dims[l] x dims[l+1]
  std::vector<std::vector<double>> b;   // b[l] has dims[l+1] entries
  Act hidden_act = Act::kRelu;
  Act output_act = Act::kIdentity;

  int layer_count() const { return static_cast<int>(w.size()); }
  int in_dim() const { return dims.front(); }
  int out_dim() const { return dims.back(); }
  long param_count() const;

  bool operator==(const Mlp&) const = default;
};

// Weights uniform in +-1/sqrt(fan_in), biases zero; deterministic given rng.
Mlp make_mlp(std::vector<int> dims, Act hidden, Act output, Rng& rng);

// Activation trace from a forward pass. Post-activations are enough to
// backprop exactly through relu/tanh/identity.
struct MlpCache {
  Matrix input;            // B x dims[0]
  std::vector<Matrix> a;   // post-activations per layer; a.back() is the output
};

struct MlpGrads {
  std::vector<Matrix> w;
  std::vector<std::vector<double>> b;
  void zero();
  bool all_finite() const;
};

MlpGrads make_grads(const Mlp& net);

// Batched forward; rows of `input` are independent samples. `out` receives
// the B x out_dim result. Pass a cache to enable backward.
void mlp_forward(const Mlp& net, const Matrix& input, Matrix& out, MlpCache* cache = nullptr);

// Backprops `dout` (B x out_dim) through the trace. Parameter gradients are
// accumulated into `grads` when non-null; the gradient with respect to the
// input lands in `dinput` when non-null. Throws if the cache shape does not
// match the net (stale cache).
void mlp_backward(const Mlp& net, const MlpCache& cache, const Matrix& dout, MlpGrads* grads,
                  Matrix* dinput = nullptr);

// Single-sample convenience used by environment rollouts.
std::vector<double> mlp_apply(const Mlp& net, std::span<const double> input);

// Scalar loss on the network output, with its gradient. Used by grad_check.
struct LossProbe {
  std::function<double(const Matrix& output)> value;
  std::function<Matrix(const Matrix& output)> output_grad;
};

// Compares analytic parameter gradients against central finite differences
// of value(forward(input)). Returns the max over parameters of
// |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
double grad_check(const Mlp& net, const Matrix& input, const LossProbe& loss, double h = 1e-5);

}  // namespace b3c
