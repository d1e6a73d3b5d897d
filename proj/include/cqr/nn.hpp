#ifndef CQR_NN_HPP
#define CQR_NN_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cqr/distributions.hpp"
#include "cqr/random.hpp"

namespace cqr {

enum class Activation { ReLU, GeLU };

struct NetConfig {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden_sizes = {100, 100};
  Activation activation = Activation::ReLU;
  std::size_t n_outputs = 1;
  bool dropout_enabled = false;
  double dropout_rate = 0.5;

  void validate() const {
    if (input_dim == 0 || n_outputs == 0) throw std::invalid_argument("net: sizes must be positive");
    for (std::size_t h : hidden_sizes)
      if (h == 0) throw std::invalid_argument("net: sizes must be positive");
    if (dropout_rate < 0.0 || dropout_rate > 1.0) throw std::invalid_argument("net: dropout rate in [0,1]");
  }
};

// Dense layer, weights row-major: w[o * in + i].
struct DenseLayer {
  std::size_t in = 0, out = 0;
  std::vector<double> w;
  std::vector<double> b;
};

struct MlpModel {
  NetConfig config;
  std::vector<DenseLayer> layers;

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.b.size();
    return n;
  }

  std::vector<double> flat_params() const {
    std::vector<double> v;
    v.reserve(param_count());
    for (const auto& l : layers) {
      v.insert(v.end(), l.w.begin(), l.w.end());
      v.insert(v.end(), l.b.begin(), l.b.end());
    }
    return v;
  }

  void set_flat_params(const std::vector<double>& v) {
    if (v.size() != param_count()) throw std::invalid_argument("model: flat parameter size mismatch");
    std::size_t k = 0;
    for (auto& l : layers) {
      for (auto& x : l.w) x = v[k++];
      for (auto& x : l.b) x = v[k++];
    }
  }
};

// Gradients shaped like the model parameters.
struct ModelGrads {
  std::vector<DenseLayer> layers;
};

enum class ForwardMode { Train, Eval };

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
inline MlpModel init_model(const NetConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  MlpModel m;
  m.config = cfg;
  RandomStream rng(seed);
  std::vector<std::size_t> sizes;
  sizes.push_back(cfg.input_dim);
  sizes.insert(sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
  sizes.push_back(cfg.n_outputs);
  for (std::size_t li = 0; li + 1 < sizes.size(); ++li) {
    DenseLayer l;
    l.in = sizes[li];
    l.out = sizes[li + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.in));
    l.w.resize(l.in * l.out);
    for (auto& x : l.w) x = rng.uniform(-bound, bound);
    l.b.assign(l.out, 0.0);
    m.layers.push_back(std::move(l));
  }
  return m;
}

namespace detail {

inline double activate(Activation a, double z) {
  if (a == Activation::ReLU) return z > 0.0 ? z : 0.0;
  return z * std_normal_cdf(z);  // exact GeLU
}

inline double activate_grad(Activation a, double z) {
  if (a == Activation::ReLU) return z > 0.0 ? 1.0 : 0.0;
  return std_normal_cdf(z) + z * std_normal_pdf(z);
}

}  // namespace detail

// Intermediate state of one forward pass, consumed by backward().
struct ForwardCache {
  std::size_t batch = 0;
  std::vector<std::vector<double>> inputs;  // copy of X
  // Per hidden layer: pre-activations and post-activation (incl. dropout) values,
  // each batch-major flat [b * width + j].
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> act;
  std::vector<std::vector<double>> dropout_scale;  // empty when dropout off / eval
};

inline std::vector<std::vector<double>> forward(const MlpModel& model, const std::vector<std::vector<double>>& X,
                                                ForwardMode mode, RandomStream* dropout_stream, ForwardCache* cache) {
  const std::size_t batch = X.size();
  for (const auto& row : X)
    if (row.size() != model.config.input_dim) throw std::invalid_argument("forward: input width mismatch");

  const std::size_t n_hidden = model.layers.size() - 1;
  const bool use_dropout = mode == ForwardMode::Train && model.config.dropout_enabled;
  if (use_dropout && dropout_stream == nullptr) throw std::invalid_argument("forward: dropout needs a stream");

  if (cache) {
    cache->batch = batch;
    cache->inputs = X;
    cache->pre.assign(n_hidden, {});
    cache->act.assign(n_hidden, {});
    cache->dropout_scale.assign(use_dropout ? n_hidden : 0, {});
  }

  std::vector<double> cur;  // batch-major flat
  cur.reserve(batch * model.config.input_dim);
  for (const auto& row : X) cur.insert(cur.end(), row.begin(), row.end());
  std::size_t cur_w = model.config.input_dim;

  for (std::size_t li = 0; li < n_hidden; ++li) {
    const DenseLayer& l = model.layers[li];
    std::vector<double> z(batch * l.out);
    for (std::size_t b = 0; b < batch; ++b) {
      const double* in = cur.data() + b * cur_w;
      double* zb = z.data() + b * l.out;
      for (std::size_t o = 0; o < l.out; ++o) {
        const double* wr = l.w.data() + o * l.in;
        double acc = l.b[o];
        for (std::size_t i = 0; i < l.in; ++i) acc += wr[i] * in[i];
        zb[o] = acc;
      }
    }
    std::vector<double> a(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) a[k] = detail::activate(model.config.activation, z[k]);
    std::vector<double> scale;
    if (use_dropout) {
      scale.resize(a.size());
      const double rate = model.config.dropout_rate;
      for (std::size_t k = 0; k < a.size(); ++k) {
        scale[k] = dropout_stream->uniform01() >= rate ? 1.0 / (1.0 - rate) : 0.0;
        a[k] *= scale[k];
      }
    }
    if (cache) {
      cache->pre[li] = std::move(z);
      cache->act[li] = a;
      if (use_dropout) cache->dropout_scale[li] = std::move(scale);
    }
    cur = std::move(a);
    cur_w = l.out;
  }

  // Raw linear output heads.
  const DenseLayer& last = model.layers.back();
  std::vector<std::vector<double>> out(batch, std::vector<double>(last.out));
  for (std::size_t b = 0; b < batch; ++b) {
    const double* in = cur.data() + b * cur_w;
    for (std::size_t o = 0; o < last.out; ++o) {
      const double* wr = last.w.data() + o * last.in;
      double acc = last.b[o];
      for (std::size_t i = 0; i < last.in; ++i) acc += wr[i] * in[i];
      out[b][o] = acc;
    }
  }
  return out;
}

inline std::vector<std::vector<double>> forward(const MlpModel& model, const std::vector<std::vector<double>>& X,
                                                ForwardMode mode = ForwardMode::Eval,
                                                RandomStream* dropout_stream = nullptr) {
  return forward(model, X, mode, dropout_stream, nullptr);
}

// Gradients of sum_b sum_o grad_outputs[b][o] * output[b][o] w.r.t. parameters.
inline ModelGrads backward(const MlpModel& model, const ForwardCache& cache,
                           const std::vector<std::vector<double>>& grad_outputs) {
  if (cache.batch != grad_outputs.size()) throw std::invalid_argument("backward: batch mismatch with cache");
  const std::size_t n_hidden = model.layers.size() - 1;
  const std::size_t batch = cache.batch;

  ModelGrads g;
  g.layers.resize(model.layers.size());
  for (std::size_t li = 0; li < model.layers.size(); ++li) {
    g.layers[li].in = model.layers[li].in;
    g.layers[li].out = model.layers[li].out;
    g.layers[li].w.assign(model.layers[li].w.size(), 0.0);
    g.layers[li].b.assign(model.layers[li].b.size(), 0.0);
  }

  // delta: gradient w.r.t. the current layer's output, batch-major flat.
  const DenseLayer& last = model.layers.back();
  std::vector<double> delta(batch * last.out);
  for (std::size_t b = 0; b < batch; ++b) {
    if (grad_outputs[b].size() != last.out) throw std::invalid_argument("backward: grad_outputs width mismatch");
    for (std::size_t o = 0; o < last.out; ++o) delta[b * last.out + o] = grad_outputs[b][o];
  }

  for (std::size_t li = model.layers.size(); li-- > 0;) {
    const DenseLayer& l = model.layers[li];
    DenseLayer& gl = g.layers[li];
    const bool has_prev_hidden = li > 0;

    for (std::size_t b = 0; b < batch; ++b) {
      const double* in = has_prev_hidden ? cache.act[li - 1].data() + b * l.in : nullptr;
      const std::vector<double>& xin = cache.inputs[b];
      const double* db = delta.data() + b * l.out;
      for (std::size_t o = 0; o < l.out; ++o) {
        const double d = db[o];
        if (d == 0.0) continue;
        double* gw = gl.w.data() + o * l.in;
        if (has_prev_hidden) {
          for (std::size_t i = 0; i < l.in; ++i) gw[i] += d * in[i];
        } else {
          for (std::size_t i = 0; i < l.in; ++i) gw[i] += d * xin[i];
        }
        gl.b[o] += d;
      }
    }

    if (!has_prev_hidden) break;

    // Propagate to the previous hidden layer's activations, then through
    // dropout and the activation function.
    const std::size_t hi = li - 1;
    const std::size_t prev_w = l.in;
    std::vector<double> prev_delta(batch * prev_w, 0.0);
    for (std::size_t b = 0; b < batch; ++b) {
      const double* db = delta.data() + b * l.out;
      double* pd = prev_delta.data() + b * prev_w;
      for (std::size_t o = 0; o < l.out; ++o) {
        const double d = db[o];
        if (d == 0.0) continue;
        const double* wr = l.w.data() + o * l.in;
        for (std::size_t i = 0; i < prev_w; ++i) pd[i] += d * wr[i];
      }
    }
    const bool dropped = !cache.dropout_scale.empty();
    for (std::size_t k = 0; k < prev_delta.size(); ++k) {
      double d = prev_delta[k];
      if (dropped) d *= cache.dropout_scale[hi][k];
      prev_delta[k] = d * detail::activate_grad(model.config.activation, cache.pre[hi][k]);
    }
    delta = std::move(prev_delta);
  }
  return g;
}

// Adam with decoupled weight decay and step-wise learning-rate drops.
struct AdamState {
  double alpha = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
  std::vector<double> lr_drop_points = {0.7, 0.9};
  double drop_factor = 0.1;
  std::size_t step = 0;
  std::vector<double> m;  // first moments, flat
  std::vector<double> v;  // second moments, flat

  double effective_lr(std::size_t total_steps) const {
    double lr = alpha;
    for (double p : lr_drop_points)
      if (static_cast<double>(step) >= std::ceil(p * static_cast<double>(total_steps))) lr *= drop_factor;
    return lr;
  }
};

inline void adam_step(MlpModel& model, AdamState& state, const ModelGrads& grads, std::size_t total_steps) {
  std::vector<double> g;
  g.reserve(model.param_count());
  for (const auto& l : grads.layers) {
    g.insert(g.end(), l.w.begin(), l.w.end());
    g.insert(g.end(), l.b.begin(), l.b.end());
  }
  for (double x : g)
    if (!std::isfinite(x)) throw std::runtime_error("adam: non-finite gradient");

  if (state.m.empty()) {
    state.m.assign(g.size(), 0.0);
    state.v.assign(g.size(), 0.0);
  }
  if (state.m.size() != g.size()) throw std::invalid_argument("adam: state shape mismatch");

  state.step += 1;
  const double lr = state.effective_lr(total_steps);
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

  std::vector<double> p = model.flat_params();
  for (std::size_t k = 0; k < p.size(); ++k) {
    state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * g[k];
    state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * g[k] * g[k];
    const double mhat = state.m[k] / bc1;
    const double vhat = state.v[k] / bc2;
    p[k] -= lr * (mhat / (std::sqrt(vhat) + state.eps) + state.weight_decay * p[k]);
  }
  model.set_flat_params(p);
}

}  // namespace cqr

#endif  // CQR_NN_HPP
