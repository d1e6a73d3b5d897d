#include "doctest.h"

#include <cmath>
#include <vector>

#include "cqr/loss.hpp"

using namespace cqr;

namespace {

CensoredDataset one_point(double y, int delta) {
  CensoredDataset ds;
  ds.features = {{0.0}};
  ds.labels = {y};
  ds.indicators = {delta};
  return ds;
}

}  // namespace

TEST_CASE("grid construction and validation") {
  const QuantileGrid g9 = make_grid(9);
  REQUIRE(g9.size() == 9);
  CHECK(g9.levels.front() == doctest::Approx(0.1));
  CHECK(g9.levels.back() == doctest::Approx(0.9));
  CHECK(g9.contains_benchmark_levels());
  CHECK(make_grid(19).contains_benchmark_levels());
  CHECK_NOTHROW(g9.validate());
  QuantileGrid bad;
  bad.levels = {0.5, 0.5};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  QuantileGrid empty;
  CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
}

TEST_CASE("pseudo value rule") {
  PseudoValue pv;
  CHECK(pv.resolve({1.0, 5.0, 3.0}) == doctest::Approx(6.0));
  pv.c_rule = 1.0;
  CHECK(pv.resolve({1.0, 5.0}) == doctest::Approx(5.0));
  pv.c_rule = 0.9;
  CHECK_THROWS_AS(pv.resolve({1.0}), std::invalid_argument);
}

TEST_CASE("checkmark loss and gradient") {
  CHECK(checkmark(1.0, 0.0, 0.9) == doctest::Approx(0.9));
  CHECK(checkmark(0.0, 2.0, 0.5) == doctest::Approx(1.0));
  for (double tau : {0.1, 0.5, 0.9}) CHECK(checkmark(3.0, 3.0, tau) == 0.0);
  CHECK(checkmark_grad(1.0, 0.0, 0.9) == doctest::Approx(-0.9));
  CHECK(checkmark_grad(0.0, 2.0, 0.5) == doctest::Approx(0.5));
  // At a tie the left-branch (not-above) gradient is taken: -tau.
  CHECK(checkmark_grad(3.0, 3.0, 0.7) == doctest::Approx(-0.7));
}

TEST_CASE("portnoy weight: formula, clamp, and domain") {
  CHECK(portnoy_weight(0.5, 0.0) == doctest::Approx(0.5));
  CHECK(portnoy_weight(0.9, 0.5) == doctest::Approx(0.8));
  CHECK(portnoy_weight_raw(0.3, 0.5) == doctest::Approx(-0.4));
  CHECK(portnoy_weight(0.3, 0.5) == 0.0);
  CHECK_THROWS_AS(portnoy_weight(0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(portnoy_weight(0.5, -0.1), std::domain_error);
}

TEST_CASE("portnoy loss: single censored point, hand-computed") {
  // y = 1, y* = 10, tau = 0.5, w = 0.5, y_hat = 1:
  // w * rho(1,1) + (1-w) * rho(10,1) = 0 + 0.5 * 9 * 0.5 = 2.25
  const CensoredDataset ds = one_point(1.0, 0);
  QuantileGrid grid;
  grid.levels = {0.5};
  CensoredWeights cw;
  cw.q_hat = {0.0};
  cw.w = {{0.5}};
  CHECK(portnoy_loss({{1.0}}, ds, grid, cw, 10.0) == doctest::Approx(2.25));
  CHECK_THROWS_AS(portnoy_loss({{1.0}}, ds, grid, cw, 0.5), std::invalid_argument);  // y* below max y
}

TEST_CASE("censored gradient case table") {
  const double tau = 0.7, w = 0.3, y = 2.0, y_star = 11.0;
  CHECK(portnoy_grad_censored(y, y_star, 1.0, tau, w) == doctest::Approx(-0.7));
  CHECK(portnoy_grad_censored(y, y_star, 5.0, tau, w) == doctest::Approx(-0.4));
  CHECK(portnoy_grad_censored(y, y_star, 12.0, tau, w) == doctest::Approx(0.3));
  // Boundaries: y_hat == y takes the middle case; y_hat == y* the last.
  CHECK(portnoy_grad_censored(y, y_star, y, tau, w) == doctest::Approx(w - tau));
  CHECK(portnoy_grad_censored(y, y_star, y_star, tau, w) == doctest::Approx(1.0 - tau));
}

TEST_CASE("portnoy loss with no censoring reduces to summed checkmark") {
  CensoredDataset ds;
  ds.features = {{0.0}, {0.0}, {0.0}};
  ds.labels = {1.0, 2.0, 3.0};
  ds.indicators = {1, 1, 1};
  const QuantileGrid grid = make_grid(3);
  const std::vector<std::vector<double>> preds = {{0.5, 1.0, 2.2}, {1.0, 2.5, 3.0}, {2.0, 2.0, 4.0}};
  const CensoredWeights cw = CensoredWeights::from_q({}, grid);
  double expect = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k) expect += checkmark(ds.labels[i], preds[i][k], grid.levels[k]);
  CHECK(portnoy_loss(preds, ds, grid, cw, 100.0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("portnoy gradient matches finite differences away from kinks") {
  CensoredDataset ds;
  RandomStream rng(13);
  const QuantileGrid grid = make_grid(5);
  const std::size_t n = 12;
  std::vector<std::vector<double>> preds(n, std::vector<double>(grid.size()));
  for (std::size_t i = 0; i < n; ++i) {
    ds.features.push_back({0.0});
    ds.labels.push_back(rng.uniform(0.0, 5.0));
    ds.indicators.push_back(i % 3 == 0 ? 0 : 1);
  }
  const double y_star = 9.0;
  std::vector<double> q;
  for (std::size_t i = 0; i < n; ++i)
    if (ds.indicators[i] == 0) q.push_back(rng.uniform(0.0, 0.5));
  const CensoredWeights cw = CensoredWeights::from_q(q, grid);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < grid.size(); ++k) {
      double v;
      do {
        v = rng.uniform(-1.0, 10.0);
      } while (std::abs(v - ds.labels[i]) < 1e-3 || std::abs(v - y_star) < 1e-3);
      preds[i][k] = v;
    }
  const auto g = portnoy_grad(preds, ds, grid, cw, y_star);
  const double h = 1e-5;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < grid.size(); ++k) {
      auto up = preds, dn = preds;
      up[i][k] += h;
      dn[i][k] -= h;
      const double fd =
          (portnoy_loss(up, ds, grid, cw, y_star) - portnoy_loss(dn, ds, grid, cw, y_star)) / (2.0 * h);
      CHECK(std::abs(fd - g[i][k]) / std::max({std::abs(fd), std::abs(g[i][k]), 1e-3}) < 1e-4);
    }
}

TEST_CASE("lognormal censored NLL values") {
  const double s_raw_for_unit_sigma = std::log(std::exp(1.0) - 1.0);  // softplus(s) = 1
  {
    const auto r = lognorm_censored_nll({0.0}, {s_raw_for_unit_sigma}, {1.0}, {1});
    CHECK(r.loss == doctest::Approx(0.9189385332046727).epsilon(1e-10));
  }
  {
    // Censored at the predicted median: -log(1 - 0.5) = ln 2.
    const auto r = lognorm_censored_nll({0.0}, {s_raw_for_unit_sigma}, {1.0}, {0});
    CHECK(r.loss == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(lognorm_censored_nll({0.0}, {0.0}, {-1.0}, {1}), std::invalid_argument);
}

TEST_CASE("lognormal NLL gradients match finite differences") {
  RandomStream rng(31);
  const std::size_t n = 20;
  std::vector<double> mu(n), s_raw(n), y(n);
  std::vector<int> delta(n);
  for (std::size_t i = 0; i < n; ++i) {
    mu[i] = rng.uniform(-1.0, 1.0);
    s_raw[i] = rng.uniform(-1.0, 1.5);
    y[i] = rng.uniform(0.2, 6.0);
    delta[i] = static_cast<int>(rng.below(2));
  }
  const auto r = lognorm_censored_nll(mu, s_raw, y, delta);
  const double h = 1e-5;
  for (std::size_t i = 0; i < n; ++i) {
    auto mu_up = mu, mu_dn = mu;
    mu_up[i] += h;
    mu_dn[i] -= h;
    const double fd_mu =
        (lognorm_censored_nll(mu_up, s_raw, y, delta).loss - lognorm_censored_nll(mu_dn, s_raw, y, delta).loss) /
        (2.0 * h);
    CHECK(std::abs(fd_mu - r.grad_mu[i]) / std::max({std::abs(fd_mu), std::abs(r.grad_mu[i]), 1e-3}) < 1e-4);

    auto s_up = s_raw, s_dn = s_raw;
    s_up[i] += h;
    s_dn[i] -= h;
    const double fd_s =
        (lognorm_censored_nll(mu, s_up, y, delta).loss - lognorm_censored_nll(mu, s_dn, y, delta).loss) / (2.0 * h);
    CHECK(std::abs(fd_s - r.grad_sraw[i]) / std::max({std::abs(fd_s), std::abs(r.grad_sraw[i]), 1e-3}) < 1e-4);
  }
}

TEST_CASE("crossing penalty") {
  // Monotone rows with gaps above the margin incur nothing.
  CHECK(crossing_penalty({{1.0, 2.0, 3.0}}, 0.5).loss == 0.0);
  // One inversion of size 1 with zero margin costs 1.
  CHECK(crossing_penalty({{2.0, 1.0}}, 0.0).loss == doctest::Approx(1.0));
  // Non-increasing as the higher quantile rises.
  double prev = 1e300;
  for (double v : {0.0, 0.5, 1.0, 1.5, 2.5}) {
    const double cur = crossing_penalty({{2.0, v}}, 0.0).loss;
    CHECK(cur <= prev);
    prev = cur;
  }
  // Gradient check.
  const auto r = crossing_penalty({{2.0, 1.0, 5.0}}, 0.0);
  CHECK(r.grad[0][0] == doctest::Approx(1.0));
  CHECK(r.grad[0][1] == doctest::Approx(-1.0));
  CHECK(r.grad[0][2] == doctest::Approx(0.0));
}

TEST_CASE("asymmetric Laplace log-likelihood identities") {
  for (double tau : {0.1, 0.37, 0.5, 0.9}) {
    CHECK(asymmetric_laplace_loglik(2.0, 2.0, tau) == doctest::Approx(std::log(tau - tau * tau)).epsilon(1e-12));
    // Difference identity from the likelihood equivalence.
    const double y = 1.3, y1 = 0.4, y2 = 3.1;
    CHECK(asymmetric_laplace_loglik(y, y1, tau) - asymmetric_laplace_loglik(y, y2, tau) ==
          doctest::Approx(checkmark(y, y2, tau) - checkmark(y, y1, tau)).epsilon(1e-12));
  }
  // tau = 0.5 gives a symmetric Laplace.
  CHECK(asymmetric_laplace_loglik(1.0, 1.0 + 0.7, 0.5) ==
        doctest::Approx(asymmetric_laplace_loglik(1.0, 1.0 - 0.7, 0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(asymmetric_laplace_loglik(0.0, 0.0, 0.0), std::domain_error);
}
