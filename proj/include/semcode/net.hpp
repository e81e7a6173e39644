#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "semcode/error.hpp"
#include "semcode/rng.hpp"

namespace semcode {

// Fully connected net: tanh on hidden layers, linear output. Weights are
// row-major [out * in].
struct Mlp {
  std::vector<int> dims;  // e.g. {15, 64, 64, 4}
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  int input_dim() const { return dims.front(); }
  int output_dim() const { return dims.back(); }
  std::size_t layer_count() const { return weights.size(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
      n += weights[l].size() + biases[l].size();
    return n;
  }
};

inline Mlp make_zero_mlp(std::vector<int> dims) {
  require(dims.size() >= 2, ErrorClass::contract, "mlp needs >= 2 dims");
  Mlp net;
  net.dims = std::move(dims);
  for (std::size_t l = 0; l + 1 < net.dims.size(); ++l) {
    net.weights.emplace_back(
        static_cast<std::size_t>(net.dims[l + 1]) * net.dims[l], 0.0);
    net.biases.emplace_back(net.dims[l + 1], 0.0);
  }
  return net;
}

// Uniform(-limit, limit) with limit = sqrt(6 / (fan_in + fan_out)); zero biases.
inline Mlp make_mlp(std::vector<int> dims, std::mt19937_64& rng) {
  Mlp net = make_zero_mlp(std::move(dims));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    double limit = std::sqrt(6.0 / (net.dims[l] + net.dims[l + 1]));
    for (double& w : net.weights[l]) w = uniform_real(rng, -limit, limit);
  }
  return net;
}

struct MlpCache {
  // acts[l] = output of layer l (post-tanh for hidden, raw for the last).
  std::vector<std::vector<double>> acts;
};

inline std::vector<double> mlp_forward(const Mlp& net, std::span<const double> x,
                                       MlpCache* cache = nullptr) {
  require(static_cast<int>(x.size()) == net.input_dim(), ErrorClass::contract,
          "mlp input size mismatch");
  if (cache) cache->acts.assign(net.layer_count(), {});
  std::vector<double> cur(x.begin(), x.end());
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    int in = net.dims[l], out = net.dims[l + 1];
    std::vector<double> next(out);
    const double* w = net.weights[l].data();
    for (int o = 0; o < out; ++o) {
      double acc = net.biases[l][o];
      const double* row = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) acc += row[i] * cur[i];
      next[o] = acc;
    }
    if (l + 1 < net.layer_count())
      for (double& v : next) v = std::tanh(v);
    if (cache) cache->acts[l] = next;
    cur = std::move(next);
  }
  return cur;
}

struct MlpGrad {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static MlpGrad zeros_like(const Mlp& net) {
    MlpGrad g;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      g.weights.emplace_back(net.weights[l].size(), 0.0);
      g.biases.emplace_back(net.biases[l].size(), 0.0);
    }
    return g;
  }

  void scale(double s) {
    for (auto& layer : weights)
      for (double& v : layer) v *= s;
    for (auto& layer : biases)
      for (double& v : layer) v *= s;
  }
};

// Accumulates dLoss/dparams into `grad` for one input, given the forward
// cache and dLoss/doutput.
inline void mlp_backward(const Mlp& net, std::span<const double> x,
                         const MlpCache& cache, std::span<const double> dout,
                         MlpGrad& grad) {
  require(cache.acts.size() == net.layer_count(), ErrorClass::contract,
          "mlp cache layer count mismatch");
  require(static_cast<int>(dout.size()) == net.output_dim(),
          ErrorClass::contract, "mlp dout size mismatch");

  std::vector<double> delta(dout.begin(), dout.end());
  for (std::size_t l = net.layer_count(); l-- > 0;) {
    int in = net.dims[l], out = net.dims[l + 1];
    // tanh derivative for hidden layers; the last layer is linear.
    if (l + 1 < net.layer_count()) {
      const auto& act = cache.acts[l];
      for (int o = 0; o < out; ++o) delta[o] *= 1.0 - act[o] * act[o];
    }
    const double* input =
        (l == 0) ? x.data() : cache.acts[l - 1].data();
    double* gw = grad.weights[l].data();
    for (int o = 0; o < out; ++o) {
      grad.biases[l][o] += delta[o];
      double d = delta[o];
      double* row = gw + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) row[i] += d * input[i];
    }
    if (l == 0) break;
    std::vector<double> prev(in, 0.0);
    const double* w = net.weights[l].data();
    for (int o = 0; o < out; ++o) {
      double d = delta[o];
      const double* row = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) prev[i] += d * row[i];
    }
    delta = std::move(prev);
  }
}

inline void sgd_step(Mlp& net, const MlpGrad& grad, double lr) {
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    for (std::size_t i = 0; i < net.weights[l].size(); ++i)
      net.weights[l][i] -= lr * grad.weights[l][i];
    for (std::size_t i = 0; i < net.biases[l].size(); ++i)
      net.biases[l][i] -= lr * grad.biases[l][i];
  }
}

inline double log_sum_exp(std::span<const double> v) {
  double m = v[0];
  for (double x : v) m = std::max(m, x);
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

inline std::vector<double> softmax(std::span<const double> logits) {
  double lse = log_sum_exp(logits);
  std::vector<double> p(logits.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(logits[i] - lse);
  return p;
}

inline double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

// Ties break toward the lower index.
inline int argmax_index(std::span<const double> v) {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = static_cast<int>(i);
  return best;
}

// CDF walk on u in [0,1).
inline int sample_categorical(std::span<const double> probs, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace semcode
