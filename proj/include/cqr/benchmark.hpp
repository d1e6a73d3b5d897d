#ifndef CQR_BENCHMARK_HPP
#define CQR_BENCHMARK_HPP

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cqr/algo.hpp"
#include "cqr/metrics.hpp"
#include "cqr/synthgen.hpp"

namespace cqr {

enum class DatasetType { Type1, Type2, Type3 };

// Per-dataset defaults: epoch buckets and grid sizes by dataset scale.
inline TrainConfig default_config_for(const std::string& type1_name) {
  TrainConfig cfg;
  const Type1Spec spec = type1_spec(type1_name);
  if (spec.dim == 1) {
    cfg.epochs = 100;
    cfg.grid = make_grid(9);
  } else if (spec.dim == 4) {
    cfg.epochs = 20;
    cfg.grid = make_grid(19);
  } else {
    cfg.epochs = 10;
    cfg.grid = make_grid(19);
  }
  return cfg;
}

// Metric availability by dataset type:
//   type 1: TQMSE, UQL, UnDCal, CensDCal, C-index
//   type 2: UQL, UnDCal, CensDCal, C-index
//   type 3: CensDCal, C-index
inline MetricReport evaluate_model(const TrainedQuantileModel& tm, const CensoredDataset& test, DatasetType type) {
  MetricReport r;
  r.grid_levels = tm.grid.levels;
  const auto preds = predict(tm, test.features);

  // CensDCal / C-index operate on the censored test labels.
  std::vector<double> q_hat;
  for (std::size_t i = 0; i < test.size(); ++i)
    if (test.indicators[i] == 0) q_hat.push_back(tm.grid.levels[hard_e_assign(preds[i], test.labels[i])]);
  r.censdcal = censdcal(preds, test.labels, test.indicators, q_hat, tm.grid);

  const int i_med = tm.grid.index_of(0.5);
  if (i_med >= 0) {
    std::vector<double> med(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) med[i] = preds[i][i_med];
    r.c_index = c_index(med, test.labels, test.indicators);
  }

  if (type == DatasetType::Type3) return r;

  // Uncensored targets are available for type 1 and 2.
  if (test.true_targets.empty()) throw std::invalid_argument("evaluate: uncensored targets missing");
  r.undcal = undcal(preds, test.true_targets, tm.grid);

  const int i01 = tm.grid.index_of(0.1), i05 = tm.grid.index_of(0.5), i09 = tm.grid.index_of(0.9);
  if (i01 >= 0 && i05 >= 0 && i09 >= 0) {
    std::vector<std::vector<double>> pred3(test.size(), std::vector<double>(3));
    for (std::size_t i = 0; i < test.size(); ++i) {
      pred3[i][0] = preds[i][i01];
      pred3[i][1] = preds[i][i05];
      pred3[i][2] = preds[i][i09];
    }
    r.uql = uql(pred3, test.true_targets);

    if (type == DatasetType::Type1) {
      if (!test.true_quantile_fn) throw std::invalid_argument("evaluate: type-1 quantile function missing");
      std::vector<std::vector<double>> truth(test.size(), std::vector<double>(3));
      for (std::size_t i = 0; i < test.size(); ++i) {
        truth[i][0] = test.true_quantile_fn(test.features[i], 0.1);
        truth[i][1] = test.true_quantile_fn(test.features[i], 0.5);
        truth[i][2] = test.true_quantile_fn(test.features[i], 0.9);
      }
      r.tqmse = tqmse(pred3, truth);
    }
  }
  return r;
}

// Trains one (method, seed) cell and evaluates it. Training failures are
// recorded on the report rather than propagated.
inline MetricReport run_cell(Method method, const CensoredDataset& train, const CensoredDataset& test,
                             DatasetType type, const TrainConfig& cfg, const std::string& dataset_id) {
  MetricReport r;
  r.dataset_id = dataset_id;
  r.method_id = method_name(method);
  r.seed = cfg.seed;
  r.grid_levels = cfg.grid.levels;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    TrainedQuantileModel tm = cqr::train(method, train, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    r = evaluate_model(tm, test, type);
    r.dataset_id = dataset_id;
    r.method_id = method_name(method);
    r.seed = cfg.seed;
    r.wall_clock_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  } catch (const std::exception&) {
    r.diverged = true;
    r.wall_clock_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  return r;
}

// Mean and standard error (sample std / sqrt(n)) over non-diverged runs.
struct MetricSummary {
  std::string dataset_id;
  std::string method_id;
  std::size_t n_runs = 0;
  std::size_t n_diverged = 0;
  std::optional<double> tqmse_mean, tqmse_se;
  std::optional<double> uql_mean, uql_se;
  std::optional<double> undcal_mean, undcal_se;
  std::optional<double> censdcal_mean, censdcal_se;
  std::optional<double> c_index_mean, c_index_se;
  double wall_clock_ms_mean = 0.0;
};

namespace detail {

inline void mean_se(const std::vector<double>& v, std::optional<double>& mean, std::optional<double>& se) {
  if (v.empty()) return;
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s2 = 0.0;
  for (double x : v) s2 += (x - m) * (x - m);
  const double sd = v.size() > 1 ? std::sqrt(s2 / static_cast<double>(v.size() - 1)) : 0.0;
  mean = m;
  se = sd / std::sqrt(static_cast<double>(v.size()));
}

}  // namespace detail

inline MetricSummary summarize(const std::vector<MetricReport>& reports) {
  MetricSummary s;
  if (reports.empty()) return s;
  s.dataset_id = reports.front().dataset_id;
  s.method_id = reports.front().method_id;
  std::vector<double> tq, uq, un, ce, ci;
  double wall = 0.0;
  std::size_t n_ok = 0;
  for (const auto& r : reports) {
    if (r.diverged) {
      ++s.n_diverged;
      continue;
    }
    ++n_ok;
    wall += r.wall_clock_ms;
    if (r.tqmse) tq.push_back(*r.tqmse);
    if (r.uql) uq.push_back(*r.uql);
    if (r.undcal) un.push_back(*r.undcal);
    if (r.censdcal) ce.push_back(*r.censdcal);
    if (r.c_index) ci.push_back(*r.c_index);
  }
  s.n_runs = reports.size();
  if (n_ok > 0) s.wall_clock_ms_mean = wall / static_cast<double>(n_ok);
  detail::mean_se(tq, s.tqmse_mean, s.tqmse_se);
  detail::mean_se(uq, s.uql_mean, s.uql_se);
  detail::mean_se(un, s.undcal_mean, s.undcal_se);
  detail::mean_se(ce, s.censdcal_mean, s.censdcal_se);
  detail::mean_se(ci, s.c_index_mean, s.c_index_se);
  return s;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each task owns its
// state; only the index counter is shared.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t n_threads = std::min(workers, n);
  std::vector<std::exception_ptr> errors(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::size_t default_worker_count() {
  if (const char* env = std::getenv("CQR_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? hc : 1;
}

}  // namespace cqr

#endif  // CQR_BENCHMARK_HPP
