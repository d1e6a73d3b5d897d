#ifndef CQR_ALGO_HPP
#define CQR_ALGO_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cqr/dataset.hpp"
#include "cqr/loss.hpp"
#include "cqr/nn.hpp"

namespace cqr {

enum class Method { Cqrnn, SeqGrid, ExclCensor, LognormMle };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::Cqrnn: return "cqrnn";
    case Method::SeqGrid: return "seqgrid";
    case Method::ExclCensor: return "excl";
    case Method::LognormMle: return "lognorm";
  }
  throw std::logic_error("unreachable");
}

inline Method method_from_name(const std::string& s) {
  if (s == "cqrnn") return Method::Cqrnn;
  if (s == "seqgrid") return Method::SeqGrid;
  if (s == "excl") return Method::ExclCensor;
  if (s == "lognorm") return Method::LognormMle;
  throw std::invalid_argument("unknown method: " + s);
}

// How the sequential grid algorithm decides that a censored point has been
// crossed by the newest fitted quantile. AsPrinted follows the published
// pseudocode's inequality directions; Conventional flips them to the
// direction described in prose (fitted quantile passed above the point).
enum class CrossingRule { AsPrinted, Conventional };

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 128;
  QuantileGrid grid = make_grid(9);
  PseudoValue pseudo;
  std::uint64_t seed = 0;
  bool dropout = false;
  double crossing_penalty_weight = 0.0;
  double crossing_margin = 0.0;
  std::vector<std::size_t> hidden_sizes = {100, 100};
  Activation activation = Activation::ReLU;
  bool standardize_features = true;
  CrossingRule crossing_rule = CrossingRule::Conventional;
  AdamState optimizer;  // template: moments start empty

  void validate() const {
    if (epochs < 1) throw std::invalid_argument("train config: epochs >= 1");
    if (batch_size < 1) throw std::invalid_argument("train config: batch_size >= 1");
    grid.validate();
  }
};

struct EpochLogRow {
  std::size_t epoch;
  double loss;
  double lr;
};

struct TrainedQuantileModel {
  Method method = Method::Cqrnn;
  QuantileGrid grid;
  std::vector<MlpModel> models;  // one M-head net, or one per level (seqgrid), or one 2-head net
  bool standardized = false;
  Standardizer scaler;
  std::vector<EpochLogRow> loss_log;
};

// Nearest grid level to each censored label under the given predictions;
// ties break toward the lower level.
inline std::size_t hard_e_assign(const std::vector<double>& preds, double y) {
  std::size_t best = 0;
  double best_dist = std::abs(preds[0] - y);
  for (std::size_t k = 1; k < preds.size(); ++k) {
    const double d = std::abs(preds[k] - y);
    if (d < best_dist) {
      best_dist = d;
      best = k;
    }
  }
  return best;
}

inline std::vector<double> estimate_censored_quantiles(const std::vector<std::vector<double>>& censored_preds,
                                                       const std::vector<double>& censored_labels,
                                                       const QuantileGrid& grid) {
  std::vector<double> q(censored_labels.size());
  for (std::size_t j = 0; j < censored_labels.size(); ++j)
    q[j] = grid.levels[hard_e_assign(censored_preds[j], censored_labels[j])];
  return q;
}

namespace detail {

inline std::vector<std::vector<double>> maybe_standardize(const TrainedQuantileModel& tm,
                                                          const std::vector<std::vector<double>>& X) {
  if (!tm.standardized) return X;
  std::vector<std::vector<double>> out = X;
  for (auto& row : out)
    for (std::size_t j = 0; j < row.size(); ++j)
      row[j] = tm.scaler.std[j] > 0.0 ? (row[j] - tm.scaler.mean[j]) / tm.scaler.std[j] : 0.0;
  return out;
}

struct PreparedData {
  CensoredDataset train;  // features standardized when enabled
  Standardizer scaler;
  bool standardized = false;
};

inline PreparedData prepare(const CensoredDataset& ds, const TrainConfig& cfg) {
  PreparedData p;
  if (cfg.standardize_features) {
    p.scaler = standardize_fit(ds);
    p.train = standardize_apply(p.scaler, ds);
    p.standardized = true;
  } else {
    p.train = ds;
  }
  return p;
}

inline NetConfig net_config(const TrainConfig& cfg, std::size_t input_dim, std::size_t n_outputs) {
  NetConfig nc;
  nc.input_dim = input_dim;
  nc.hidden_sizes = cfg.hidden_sizes;
  nc.activation = cfg.activation;
  nc.n_outputs = n_outputs;
  nc.dropout_enabled = cfg.dropout;
  return nc;
}

inline std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, std::size_t batch_size, RandomStream& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  shuffle_in_place(idx, rng);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t s = 0; s < n; s += batch_size) {
    const std::size_t e = std::min(n, s + batch_size);
    batches.emplace_back(idx.begin() + s, idx.begin() + e);
  }
  return batches;
}

// Shared training loop for all Portnoy-style objectives. Each grid level maps
// to one output head of `model`. Censored weights are refreshed per minibatch
// from the batch's own forward outputs (the hard expectation step) unless a
// fixed q_hat vector is supplied (sequential grid levels).
//
// fixed_q_hat, when non-null, holds one entry per censored point in dataset
// row order.
inline void run_portnoy_training(MlpModel& model, const CensoredDataset& ds, const TrainConfig& cfg,
                                 const QuantileGrid& grid, double y_star, const std::vector<double>* fixed_q_hat,
                                 RandomStream& shuffle_rng, RandomStream& dropout_rng,
                                 std::vector<EpochLogRow>* loss_log) {
  const std::size_t n = ds.size();
  const std::size_t n_batches = (n + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t total_steps = cfg.epochs * n_batches;

  // Dataset-row -> censored-subset index (for fixed q_hat lookup).
  std::vector<std::size_t> censored_pos(n, 0);
  {
    std::size_t cj = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (ds.indicators[i] == 0) censored_pos[i] = cj++;
  }

  AdamState adam = cfg.optimizer;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (const auto& batch : epoch_batches(n, cfg.batch_size, shuffle_rng)) {
      ++step;
      CensoredDataset bd = take_rows(ds, batch);
      ForwardCache cache;
      auto preds = forward(model, bd.features, ForwardMode::Train, &dropout_rng, &cache);

      // Hard expectation step on this batch, or fixed weights per level.
      std::vector<double> q;
      for (std::size_t bi = 0; bi < batch.size(); ++bi) {
        if (bd.indicators[bi] == 0) {
          if (fixed_q_hat)
            q.push_back((*fixed_q_hat)[censored_pos[batch[bi]]]);
          else
            q.push_back(grid.levels[hard_e_assign(preds[bi], bd.labels[bi])]);
        }
      }
      const CensoredWeights cw = CensoredWeights::from_q(q, grid);

      double batch_loss = portnoy_loss(preds, bd, grid, cw, y_star);
      auto out_grads = portnoy_grad(preds, bd, grid, cw, y_star);
      if (cfg.crossing_penalty_weight > 0.0) {
        const auto cp = crossing_penalty(preds, cfg.crossing_margin);
        batch_loss += cfg.crossing_penalty_weight * cp.loss;
        for (std::size_t bi = 0; bi < batch.size(); ++bi)
          for (std::size_t k = 0; k < grid.size(); ++k)
            out_grads[bi][k] += cfg.crossing_penalty_weight * cp.grad[bi][k];
      }
      if (!std::isfinite(batch_loss))
        throw std::runtime_error("training diverged (non-finite loss) at step " + std::to_string(step));

      // The loss is a sum; average over the batch for learning-rate stability.
      const double inv_b = 1.0 / static_cast<double>(batch.size());
      for (auto& row : out_grads)
        for (auto& v : row) v *= inv_b;
      auto grads = backward(model, cache, out_grads);
      adam_step(model, adam, grads, total_steps);
      epoch_loss += batch_loss;
    }
    if (loss_log)
      loss_log->push_back({epoch + 1, epoch_loss / static_cast<double>(n), adam.effective_lr(total_steps)});
  }
}

}  // namespace detail

// CQRNN: one multi-head network, censored weights bootstrapped from the model
// itself at every minibatch.
inline TrainedQuantileModel train_cqrnn(const CensoredDataset& dataset, const TrainConfig& cfg) {
  cfg.validate();
  dataset.validate();
  auto prep = detail::prepare(dataset, cfg);
  const double y_star = cfg.pseudo.resolve(prep.train.labels);

  TrainedQuantileModel tm;
  tm.method = Method::Cqrnn;
  tm.grid = cfg.grid;
  tm.standardized = prep.standardized;
  tm.scaler = prep.scaler;

  RandomStream root(cfg.seed);
  MlpModel model = init_model(detail::net_config(cfg, prep.train.dim(), cfg.grid.size()), root.raw());
  RandomStream shuffle_rng = root.fork();
  RandomStream dropout_rng = root.fork();
  detail::run_portnoy_training(model, prep.train, cfg, cfg.grid, y_star, nullptr, shuffle_rng, dropout_rng,
                               &tm.loss_log);
  tm.models.push_back(std::move(model));
  return tm;
}

// Excludes censored rows, then runs the identical multi-head checkmark loop.
inline TrainedQuantileModel train_excl_censor(const CensoredDataset& dataset, const TrainConfig& cfg) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    if (dataset.indicators[i] == 1) keep.push_back(i);
  if (keep.empty()) throw std::invalid_argument("excl censor: all datapoints censored");
  TrainedQuantileModel tm = train_cqrnn(take_rows(dataset, keep), cfg);
  tm.method = Method::ExclCensor;
  return tm;
}

// Sequential grid: one single-output network per level, trained in grid
// order; censored weights update through crossing events between levels.
inline TrainedQuantileModel train_sequential_grid(const CensoredDataset& dataset, const TrainConfig& cfg) {
  cfg.validate();
  dataset.validate();
  auto prep = detail::prepare(dataset, cfg);
  const CensoredDataset& tr = prep.train;
  const double y_star = cfg.pseudo.resolve(tr.labels);
  const std::size_t m = cfg.grid.size();

  std::vector<std::size_t> censored_rows, observed_rows;
  for (std::size_t i = 0; i < tr.size(); ++i)
    (tr.indicators[i] == 0 ? censored_rows : observed_rows).push_back(i);
  const std::size_t n_c = censored_rows.size();

  TrainedQuantileModel tm;
  tm.method = Method::SeqGrid;
  tm.grid = cfg.grid;
  tm.standardized = prep.standardized;
  tm.scaler = prep.scaler;

  RandomStream root(cfg.seed);
  QuantileGrid level_grid;
  level_grid.levels.resize(1);

  std::vector<double> q_hat(n_c, 0.0);
  std::vector<bool> crossed(n_c, false);
  // Predictions of the two most recently trained levels at the censored points.
  std::vector<double> pred_prev, pred_prev2;

  auto predict_rows = [&](const MlpModel& model, const std::vector<std::size_t>& rows) {
    std::vector<std::vector<double>> X;
    X.reserve(rows.size());
    for (std::size_t r : rows) X.push_back(tr.features[r]);
    auto out = forward(model, X);
    std::vector<double> p(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) p[i] = out[i][0];
    return p;
  };

  for (std::size_t k = 0; k < m; ++k) {
    if (k > 0) {
      // Terminate early if only censored datapoints lie above the previous level.
      const auto obs_pred = predict_rows(tm.models.back(), observed_rows);
      bool any_observed_above = false;
      for (std::size_t i = 0; i < observed_rows.size(); ++i)
        if (tr.labels[observed_rows[i]] > obs_pred[i]) {
          any_observed_above = true;
          break;
        }
      if (!any_observed_above) break;

      // Crossing detection between the two latest trained levels.
      for (std::size_t j = 0; j < n_c; ++j) {
        const double y = tr.labels[censored_rows[j]];
        bool newly_crossed;
        if (cfg.crossing_rule == CrossingRule::AsPrinted) {
          const double prev2 = k >= 2 ? pred_prev2[j] : std::numeric_limits<double>::infinity();
          newly_crossed = pred_prev[j] <= y && prev2 > y;
        } else {
          newly_crossed = !crossed[j] && pred_prev[j] >= y;
        }
        if (newly_crossed && !crossed[j]) {
          crossed[j] = true;
          q_hat[j] = cfg.grid.levels[k - 1];
        }
        if (!crossed[j]) q_hat[j] = cfg.grid.levels[k];  // forces w = 0
      }
    }

    level_grid.levels[0] = cfg.grid.levels[k];
    TrainConfig level_cfg = cfg;
    level_cfg.standardize_features = false;  // already applied
    MlpModel model = init_model(detail::net_config(cfg, tr.dim(), 1), root.raw());
    RandomStream shuffle_rng = root.fork();
    RandomStream dropout_rng = root.fork();
    detail::run_portnoy_training(model, tr, level_cfg, level_grid, y_star, &q_hat, shuffle_rng, dropout_rng,
                                 k == 0 ? &tm.loss_log : nullptr);

    pred_prev2 = std::move(pred_prev);
    pred_prev = predict_rows(model, censored_rows);
    tm.models.push_back(std::move(model));
  }

  // Early-stopped levels predict the last trained level.
  while (tm.models.size() < m) tm.models.push_back(tm.models.back());
  return tm;
}

// Log-normal MLE baseline: a 2-head network (mu, pre-softplus sigma) trained
// on the censored negative log likelihood.
inline TrainedQuantileModel train_lognorm_mle(const CensoredDataset& dataset, const TrainConfig& cfg) {
  cfg.validate();
  dataset.validate();
  for (double y : dataset.labels)
    if (!(y > 0.0)) throw std::invalid_argument("lognorm mle: labels must be positive");
  auto prep = detail::prepare(dataset, cfg);
  const CensoredDataset& tr = prep.train;

  TrainedQuantileModel tm;
  tm.method = Method::LognormMle;
  tm.grid = cfg.grid;
  tm.standardized = prep.standardized;
  tm.scaler = prep.scaler;

  RandomStream root(cfg.seed);
  MlpModel model = init_model(detail::net_config(cfg, tr.dim(), 2), root.raw());
  RandomStream shuffle_rng = root.fork();
  RandomStream dropout_rng = root.fork();

  const std::size_t n = tr.size();
  const std::size_t n_batches = (n + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t total_steps = cfg.epochs * n_batches;
  AdamState adam = cfg.optimizer;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (const auto& batch : detail::epoch_batches(n, cfg.batch_size, shuffle_rng)) {
      ++step;
      CensoredDataset bd = take_rows(tr, batch);
      ForwardCache cache;
      auto out = forward(model, bd.features, ForwardMode::Train, &dropout_rng, &cache);
      std::vector<double> mu(batch.size()), s_raw(batch.size());
      for (std::size_t bi = 0; bi < batch.size(); ++bi) {
        mu[bi] = out[bi][0];
        s_raw[bi] = out[bi][1];
      }
      const auto nll = lognorm_censored_nll(mu, s_raw, bd.labels, bd.indicators);
      if (!std::isfinite(nll.loss))
        throw std::runtime_error("training diverged (non-finite loss) at step " + std::to_string(step));
      const double inv_b = 1.0 / static_cast<double>(batch.size());
      std::vector<std::vector<double>> out_grads(batch.size(), std::vector<double>(2));
      for (std::size_t bi = 0; bi < batch.size(); ++bi) {
        out_grads[bi][0] = nll.grad_mu[bi] * inv_b;
        out_grads[bi][1] = nll.grad_sraw[bi] * inv_b;
      }
      auto grads = backward(model, cache, out_grads);
      adam_step(model, adam, grads, total_steps);
      epoch_loss += nll.loss;
    }
    tm.loss_log.push_back({epoch + 1, epoch_loss / static_cast<double>(n), adam.effective_lr(total_steps)});
  }
  tm.models.push_back(std::move(model));
  return tm;
}

inline TrainedQuantileModel train(Method method, const CensoredDataset& dataset, const TrainConfig& cfg) {
  switch (method) {
    case Method::Cqrnn: return train_cqrnn(dataset, cfg);
    case Method::SeqGrid: return train_sequential_grid(dataset, cfg);
    case Method::ExclCensor: return train_excl_censor(dataset, cfg);
    case Method::LognormMle: return train_lognorm_mle(dataset, cfg);
  }
  throw std::logic_error("unreachable");
}

// Quantile matrix (rows ordered as X, columns by grid level) from any trained
// model, in label units.
inline std::vector<std::vector<double>> predict(const TrainedQuantileModel& tm,
                                                const std::vector<std::vector<double>>& X) {
  const auto Xs = detail::maybe_standardize(tm, X);
  const std::size_t m = tm.grid.size();
  std::vector<std::vector<double>> out(X.size(), std::vector<double>(m));

  if (tm.method == Method::SeqGrid) {
    for (std::size_t k = 0; k < m; ++k) {
      auto col = forward(tm.models[k], Xs);
      for (std::size_t i = 0; i < Xs.size(); ++i) out[i][k] = col[i][0];
    }
  } else if (tm.method == Method::LognormMle) {
    auto heads = forward(tm.models[0], Xs);
    for (std::size_t i = 0; i < Xs.size(); ++i) {
      const double mu = heads[i][0];
      const double sigma = softplus(heads[i][1]);
      for (std::size_t k = 0; k < m; ++k) out[i][k] = std::exp(mu + sigma * std_normal_quantile(tm.grid.levels[k]));
    }
  } else {
    out = forward(tm.models[0], Xs);
  }
  return out;
}

}  // namespace cqr

#endif  // CQR_ALGO_HPP
