#ifndef CQR_LOSS_HPP
#define CQR_LOSS_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cqr/dataset.hpp"
#include "cqr/distributions.hpp"

namespace cqr {

// Strictly increasing quantile levels in (0,1).
struct QuantileGrid {
  std::vector<double> levels;

  std::size_t size() const { return levels.size(); }

  void validate() const {
    if (levels.empty()) throw std::invalid_argument("grid: empty");
    double prev = 0.0;
    for (double t : levels) {
      if (!(t > prev && t < 1.0)) throw std::invalid_argument("grid: levels must be strictly increasing in (0,1)");
      prev = t;
    }
  }

  // Index of an exact level, or -1.
  int index_of(double tau, double tol = 1e-9) const {
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (std::abs(levels[i] - tau) <= tol) return static_cast<int>(i);
    return -1;
  }

  bool contains_benchmark_levels() const {
    return index_of(0.1) >= 0 && index_of(0.5) >= 0 && index_of(0.9) >= 0;
  }
};

// Evenly spaced levels {k/(M+1)}. M = 9 or 19 includes {0.1, 0.5, 0.9}.
inline QuantileGrid make_grid(std::size_t m) {
  QuantileGrid g;
  for (std::size_t k = 1; k <= m; ++k) g.levels.push_back(static_cast<double>(k) / static_cast<double>(m + 1));
  return g;
}

// y* = c * max_i y_i with c >= 1 (c = 1 places the pseudo point at the max
// observed label, the lowest admissible choice).
struct PseudoValue {
  double c_rule = 1.2;

  double resolve(const std::vector<double>& labels) const {
    if (!(c_rule >= 1.0)) throw std::invalid_argument("pseudo value: c must be >= 1");
    return c_rule * *std::max_element(labels.begin(), labels.end());
  }
};

// Checkmark (pinball) loss rho_tau(y, y_hat) and its subgradient in y_hat.
inline double checkmark(double y, double y_hat, double tau) {
  return (y - y_hat) * (tau - (y_hat > y ? 1.0 : 0.0));
}

inline double checkmark_grad(double y, double y_hat, double tau) {
  return (y_hat > y ? 1.0 : 0.0) - tau;
}

// Portnoy weight w = (tau - q) / (1 - q), unclamped.
inline double portnoy_weight_raw(double tau, double q_hat) {
  if (!(q_hat >= 0.0 && q_hat < 1.0)) throw std::domain_error("portnoy weight: q_hat must be in [0,1)");
  return (tau - q_hat) / (1.0 - q_hat);
}

// Clamped at zero: grid levels below q_hat put all mass on the pseudo point.
inline double portnoy_weight(double tau, double q_hat) {
  return std::max(0.0, portnoy_weight_raw(tau, q_hat));
}

// Per-censored-point quantile estimates and per-(point, level) weights.
struct CensoredWeights {
  std::vector<double> q_hat;             // one per censored point
  std::vector<std::vector<double>> w;    // [censored point][grid level]

  static CensoredWeights from_q(const std::vector<double>& q, const QuantileGrid& grid) {
    CensoredWeights cw;
    cw.q_hat = q;
    cw.w.resize(q.size());
    for (std::size_t j = 0; j < q.size(); ++j) {
      cw.w[j].resize(grid.size());
      for (std::size_t k = 0; k < grid.size(); ++k) cw.w[j][k] = portnoy_weight(grid.levels[k], q[j]);
    }
    return cw;
  }
};

// Censored-point gradient of Portnoy's loss w.r.t. the prediction.
inline double portnoy_grad_censored(double y, double y_star, double y_hat, double tau, double w) {
  if (y_hat < y) return -tau;
  if (y_hat < y_star) return w - tau;
  return 1.0 - tau;
}

// Portnoy's re-weighted loss, summed over grid levels and datapoints.
// predictions: N x M (grid order); weights cover censored points in dataset
// row order.
inline double portnoy_loss(const std::vector<std::vector<double>>& predictions, const CensoredDataset& ds,
                           const QuantileGrid& grid, const CensoredWeights& weights, double y_star) {
  grid.validate();
  const double y_max = *std::max_element(ds.labels.begin(), ds.labels.end());
  if (!(y_star >= y_max)) throw std::invalid_argument("portnoy loss: y* must not fall below max label");

  double loss = 0.0;
  std::size_t cj = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.indicators[i] == 1) {
      for (std::size_t k = 0; k < grid.size(); ++k)
        loss += checkmark(ds.labels[i], predictions[i][k], grid.levels[k]);
    } else {
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = weights.w[cj][k];
        loss += w * checkmark(ds.labels[i], predictions[i][k], grid.levels[k]) +
                (1.0 - w) * checkmark(y_star, predictions[i][k], grid.levels[k]);
      }
      ++cj;
    }
  }
  return loss;
}

// Output-space gradient of portnoy_loss, same shape as predictions.
inline std::vector<std::vector<double>> portnoy_grad(const std::vector<std::vector<double>>& predictions,
                                                     const CensoredDataset& ds, const QuantileGrid& grid,
                                                     const CensoredWeights& weights, double y_star) {
  std::vector<std::vector<double>> g(ds.size(), std::vector<double>(grid.size()));
  std::size_t cj = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.indicators[i] == 1) {
      for (std::size_t k = 0; k < grid.size(); ++k)
        g[i][k] = checkmark_grad(ds.labels[i], predictions[i][k], grid.levels[k]);
    } else {
      for (std::size_t k = 0; k < grid.size(); ++k)
        g[i][k] = portnoy_grad_censored(ds.labels[i], y_star, predictions[i][k], grid.levels[k], weights.w[cj][k]);
      ++cj;
    }
  }
  return g;
}

// Censored log-normal negative log likelihood for a batch.
// Observed rows contribute -log p(y), censored rows -log(1 - CDF(y)), under
// log y ~ Normal(mu, sigma^2) with sigma = softplus(s_raw).
inline double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
inline double softplus_grad(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct LognormNllResult {
  double loss = 0.0;
  std::vector<double> grad_mu;     // d loss / d mu_i
  std::vector<double> grad_sraw;   // d loss / d s_raw_i (pre-softplus)
};

inline LognormNllResult lognorm_censored_nll(const std::vector<double>& mu, const std::vector<double>& s_raw,
                                             const std::vector<double>& y, const std::vector<int>& delta) {
  LognormNllResult r;
  const std::size_t n = y.size();
  r.grad_mu.assign(n, 0.0);
  r.grad_sraw.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(y[i] > 0.0)) throw std::invalid_argument("lognorm nll: labels must be positive");
    const double sigma = softplus(s_raw[i]);
    const double ly = std::log(y[i]);
    const double z = (ly - mu[i]) / sigma;
    double dl_dmu, dl_dsigma;
    if (delta[i] == 1) {
      // -log lognormal pdf = 0.5 ln 2pi + ln sigma + ln y + z^2/2
      r.loss += 0.5 * kLog2Pi + std::log(sigma) + ly + 0.5 * z * z;
      dl_dmu = -z / sigma;
      dl_dsigma = 1.0 / sigma - z * z / sigma;
    } else {
      // -log survival = -log(0.5 erfc(z / sqrt 2))
      const double surv = 0.5 * std::erfc(z * M_SQRT1_2);
      const double log_surv = surv > 1e-300 ? std::log(surv) : -0.5 * z * z - std::log(z) - 0.5 * kLog2Pi;
      r.loss += -log_surv;
      // hazard = pdf(z) / surv(z) in standardized coordinates
      const double hazard = surv > 1e-300 ? std_normal_pdf(z) / surv : z;
      dl_dmu = -hazard / sigma;
      dl_dsigma = -hazard * z / sigma;
    }
    r.grad_mu[i] = dl_dmu;
    r.grad_sraw[i] = dl_dsigma * softplus_grad(s_raw[i]);
  }
  return r;
}

// Hinge penalty on adjacent-quantile inversions: sum max(0, c - (next - cur)).
struct CrossingPenaltyResult {
  double loss = 0.0;
  std::vector<std::vector<double>> grad;  // same shape as predictions
};

inline CrossingPenaltyResult crossing_penalty(const std::vector<std::vector<double>>& predictions, double margin) {
  CrossingPenaltyResult r;
  r.grad.assign(predictions.size(), {});
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    r.grad[i].assign(predictions[i].size(), 0.0);
    for (std::size_t j = 0; j + 1 < predictions[i].size(); ++j) {
      const double gap = predictions[i][j + 1] - predictions[i][j];
      if (margin - gap > 0.0) {
        r.loss += margin - gap;
        r.grad[i][j] += 1.0;
        r.grad[i][j + 1] -= 1.0;
      }
    }
  }
  return r;
}

// Log-density of the asymmetric Laplace with location y_hat, scale
// sqrt(tau - tau^2), asymmetry tau / sqrt(tau - tau^2):
// log f = ln(tau - tau^2) - rho_tau(y, y_hat).
inline double asymmetric_laplace_loglik(double y, double y_hat, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::domain_error("asymmetric laplace: tau must be in (0,1)");
  return std::log(tau - tau * tau) - checkmark(y, y_hat, tau);
}

}  // namespace cqr

#endif  // CQR_LOSS_HPP
