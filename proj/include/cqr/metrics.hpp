#ifndef CQR_METRICS_HPP
#define CQR_METRICS_HPP

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cqr/loss.hpp"

namespace cqr {

// Mean squared error to the analytic true quantiles at tau in {0.1, 0.5, 0.9}.
// Sums over the three quantiles, divides by N only.
inline double tqmse(const std::vector<std::vector<double>>& pred, const std::vector<std::vector<double>>& truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("tqmse: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].size() != truth[i].size()) throw std::invalid_argument("tqmse: shape mismatch");
    for (std::size_t k = 0; k < pred[i].size(); ++k) {
      const double d = pred[i][k] - truth[i][k];
      s += d * d;
    }
  }
  return s / static_cast<double>(pred.size());
}

// Checkmark loss against uncensored targets at the three fixed levels,
// divided by N only.
inline double uql(const std::vector<std::vector<double>>& pred, const std::vector<double>& uncensored_y,
                  const std::vector<double>& taus = {0.1, 0.5, 0.9}) {
  if (pred.size() != uncensored_y.size()) throw std::invalid_argument("uql: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].size() != taus.size()) throw std::invalid_argument("uql: shape mismatch");
    for (std::size_t k = 0; k < taus.size(); ++k) s += checkmark(uncensored_y[i], pred[i][k], taus[k]);
  }
  return s / static_cast<double>(pred.size());
}

// Uncensored D-calibration over the full grid: squared deviation between
// nominal and empirical adjacent-bin masses, scaled by 100. Bins are
// half-open (y_hat_{tau_j}, y_hat_{tau_{j+1}}]; rows are binned as-is, with
// no re-sorting of non-monotone predictions.
inline double undcal(const std::vector<std::vector<double>>& pred, const std::vector<double>& uncensored_y,
                     const QuantileGrid& grid) {
  if (pred.size() != uncensored_y.size()) throw std::invalid_argument("undcal: shape mismatch");
  const std::size_t m = grid.size();
  const double n = static_cast<double>(pred.size());
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < m; ++j) {
    double mass = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (pred[i][j] < uncensored_y[i] && uncensored_y[i] <= pred[i][j + 1]) mass += 1.0;
    const double dev = (grid.levels[j + 1] - grid.levels[j]) - mass / n;
    s += dev * dev;
  }
  return 100.0 * s;
}

// Censored D-calibration: observed rows contribute an indicator, censored
// rows redistribute their mass by the censoring quantile q_i. q_hat_censored
// holds one entry per censored row, in dataset row order.
inline double censdcal(const std::vector<std::vector<double>>& pred, const std::vector<double>& y,
                       const std::vector<int>& delta, const std::vector<double>& q_hat_censored,
                       const QuantileGrid& grid) {
  if (pred.size() != y.size() || y.size() != delta.size()) throw std::invalid_argument("censdcal: shape mismatch");
  for (double q : q_hat_censored)
    if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("censdcal: q_hat must be in [0,1)");
  const std::size_t m = grid.size();
  const double n = static_cast<double>(pred.size());
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double nominal = grid.levels[j + 1] - grid.levels[j];
    double xi = 0.0;
    std::size_t cj = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const bool in_bin = pred[i][j] < y[i] && y[i] <= pred[i][j + 1];
      if (delta[i] == 1) {
        xi += in_bin ? 1.0 : 0.0;
      } else {
        const double q = q_hat_censored[cj++];
        if (in_bin) xi += (grid.levels[j + 1] - q) / (1.0 - q);
        if (q < grid.levels[j]) xi += nominal / (1.0 - q);
      }
    }
    const double dev = nominal - xi / n;
    s += dev * dev;
  }
  return 100.0 * s;
}

// Harrell's concordance index over median predictions. Comparable pairs are
// (i, j) with y_i < y_j and delta_i = 1; tied predictions count one half.
// Returns nullopt when no pair is comparable.
inline std::optional<double> c_index(const std::vector<double>& pred_median, const std::vector<double>& y,
                                     const std::vector<int>& delta) {
  if (pred_median.size() != y.size() || y.size() != delta.size())
    throw std::invalid_argument("c_index: shape mismatch");
  if (y.size() < 2) throw std::invalid_argument("c_index: need at least 2 rows");
  double concordant = 0.0;
  std::size_t comparable = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (delta[i] != 1) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (i == j || !(y[i] < y[j])) continue;
      ++comparable;
      if (pred_median[i] < pred_median[j])
        concordant += 1.0;
      else if (pred_median[i] == pred_median[j])
        concordant += 0.5;
    }
  }
  if (comparable == 0) return std::nullopt;
  return concordant / static_cast<double>(comparable);
}

// One evaluated (dataset, method, seed) cell. Absent metrics are unavailable
// for that dataset type (or undefined, for the C-index).
struct MetricReport {
  std::string dataset_id;
  std::string method_id;
  std::uint64_t seed = 0;
  std::vector<double> grid_levels;
  std::optional<double> tqmse;
  std::optional<double> uql;
  std::optional<double> undcal;
  std::optional<double> censdcal;
  std::optional<double> c_index;
  double wall_clock_ms = 0.0;
  bool diverged = false;

  static std::string csv_header() {
    return "dataset,method,seed,tqmse,uql,undcal,censdcal,c_index,wall_clock_ms,diverged";
  }

  std::string csv_row() const {
    auto cell = [](const std::optional<double>& v) {
      if (!v) return std::string();
      std::ostringstream os;
      os.precision(10);
      os << *v;
      return os.str();
    };
    std::ostringstream os;
    os.precision(10);
    os << dataset_id << ',' << method_id << ',' << seed << ',' << cell(tqmse) << ',' << cell(uql) << ','
       << cell(undcal) << ',' << cell(censdcal) << ',' << cell(c_index) << ',' << wall_clock_ms << ','
       << (diverged ? 1 : 0);
    return os.str();
  }
};

}  // namespace cqr

#endif  // CQR_METRICS_HPP
