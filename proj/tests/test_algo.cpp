#include "doctest.h"

#include <cmath>
#include <vector>

#include "cqr/algo.hpp"
#include "cqr/synthgen.hpp"

using namespace cqr;

namespace {

TrainConfig quick_config(std::size_t epochs = 5, std::size_t m = 5) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.grid = make_grid(m);
  cfg.hidden_sizes = {16, 16};
  return cfg;
}

CensoredDataset uncensored_toy(std::size_t n, std::uint64_t seed) {
  CensoredDataset ds;
  RandomStream rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform(0.0, 2.0);
    ds.features.push_back({x});
    ds.labels.push_back(2.0 * x + 1.0 + rng.uniform(-0.5, 0.5));
    ds.indicators.push_back(1);
  }
  return ds;
}

}  // namespace

TEST_CASE("method names round trip") {
  for (Method m : {Method::Cqrnn, Method::SeqGrid, Method::ExclCensor, Method::LognormMle})
    CHECK(method_from_name(method_name(m)) == m);
  CHECK_THROWS_AS(method_from_name("nope"), std::invalid_argument);
}

TEST_CASE("hard expectation step") {
  QuantileGrid grid;
  grid.levels = {0.1, 0.5, 0.9};
  CHECK(grid.levels[hard_e_assign({1.0, 2.0, 3.0}, 2.1)] == doctest::Approx(0.5));
  // Equidistant: the lower level wins.
  CHECK(hard_e_assign({2.0, 3.0, 10.0}, 2.5) == 0);
  // All predictions above the label: lowest level.
  CHECK(hard_e_assign({5.0, 6.0, 7.0}, 1.0) == 0);
  // All below: highest level.
  CHECK(hard_e_assign({1.0, 2.0, 3.0}, 9.0) == 2);
  const auto q = estimate_censored_quantiles({{1.0, 2.0, 3.0}, {5.0, 6.0, 7.0}}, {2.9, 0.0}, grid);
  CHECK(q[0] == doctest::Approx(0.9));
  CHECK(q[1] == doctest::Approx(0.1));
}

TEST_CASE("no-censoring: CQRNN and exclude-censored are bit-identical") {
  const CensoredDataset ds = uncensored_toy(64, 7);
  TrainConfig cfg = quick_config();
  cfg.seed = 12;
  const auto a = train_cqrnn(ds, cfg);
  const auto b = train_excl_censor(ds, cfg);
  REQUIRE(a.models.size() == b.models.size());
  CHECK(a.models[0].flat_params() == b.models[0].flat_params());
  REQUIRE(a.loss_log.size() == b.loss_log.size());
  for (std::size_t i = 0; i < a.loss_log.size(); ++i) CHECK(a.loss_log[i].loss == b.loss_log[i].loss);
}

TEST_CASE("training is deterministic per seed") {
  Type1Spec spec = type1_spec("norm_linear");
  spec.n_train = 120;
  const auto ds = generate_type1(spec, 3);
  TrainConfig cfg = quick_config();
  cfg.seed = 5;
  const auto a = train_cqrnn(ds, cfg);
  const auto b = train_cqrnn(ds, cfg);
  CHECK(a.models[0].flat_params() == b.models[0].flat_params());
  cfg.seed = 6;
  const auto c = train_cqrnn(ds, cfg);
  CHECK(a.models[0].flat_params() != c.models[0].flat_params());
}

TEST_CASE("exclude-censored requires at least one observed row") {
  CensoredDataset ds;
  ds.features = {{0.0}, {1.0}};
  ds.labels = {1.0, 2.0};
  ds.indicators = {0, 0};
  CHECK_THROWS_AS(train_excl_censor(ds, quick_config()), std::invalid_argument);
}

TEST_CASE("predict shape, determinism, and loss log") {
  Type1Spec spec = type1_spec("norm_linear");
  spec.n_train = 150;
  const auto ds = generate_type1(spec, 1);
  TrainConfig cfg = quick_config(4, 5);
  const auto tm = train_cqrnn(ds, cfg);
  CHECK(tm.loss_log.size() == 4);
  for (const auto& row : tm.loss_log) CHECK(row.lr > 0.0);
  CHECK(tm.loss_log.back().lr < tm.loss_log.front().lr);  // schedule dropped by the end
  const std::vector<std::vector<double>> X = {{0.3}, {1.7}};
  const auto p = predict(tm, X);
  REQUIRE(p.size() == 2);
  CHECK(p[0].size() == 5);
  CHECK(predict(tm, X) == p);
}

TEST_CASE("sequential grid trains one model per level and predicts all levels") {
  Type1Spec spec = type1_spec("norm_linear");
  spec.n_train = 150;
  const auto ds = generate_type1(spec, 2);
  TrainConfig cfg = quick_config(3, 5);
  for (CrossingRule rule : {CrossingRule::Conventional, CrossingRule::AsPrinted}) {
    cfg.crossing_rule = rule;
    const auto tm = train_sequential_grid(ds, cfg);
    CHECK(tm.models.size() == 5);
    const auto p = predict(tm, {{1.0}});
    CHECK(p[0].size() == 5);
  }
}

TEST_CASE("sequential grid without censoring trains plain checkmark levels") {
  const CensoredDataset ds = uncensored_toy(80, 4);
  TrainConfig cfg = quick_config(150, 3);
  cfg.batch_size = 16;
  const auto tm = train_sequential_grid(ds, cfg);
  const auto p = predict(tm, {{1.0}});
  // Rough sanity: the median head sits near 2x+1 = 3 and levels are ordered.
  CHECK(std::abs(p[0][1] - 3.0) < 0.8);
  CHECK(p[0][0] <= p[0][1] + 0.3);
  CHECK(p[0][1] <= p[0][2] + 0.3);
}

TEST_CASE("lognormal MLE baseline") {
  SUBCASE("rejects non-positive labels") {
    CensoredDataset ds;
    ds.features = {{0.0}, {1.0}};
    ds.labels = {1.0, -2.0};
    ds.indicators = {1, 1};
    CHECK_THROWS_AS(train_lognorm_mle(ds, quick_config()), std::invalid_argument);
  }
  SUBCASE("near-constant log-targets recover the median, quantiles increase in tau") {
    CensoredDataset ds;
    RandomStream rng(9);
    for (int i = 0; i < 200; ++i) {
      ds.features.push_back({rng.uniform(0.0, 2.0)});
      ds.labels.push_back(std::exp(3.0 + rng.uniform(-0.01, 0.01)));
      ds.indicators.push_back(1);
    }
    TrainConfig cfg = quick_config(200, 5);
    cfg.batch_size = 32;
    const auto tm = train_lognorm_mle(ds, cfg);
    const auto p = predict(tm, {{1.0}});
    CHECK(std::abs(p[0][2] - std::exp(3.0)) / std::exp(3.0) < 0.05);
    for (std::size_t k = 1; k < p[0].size(); ++k) CHECK(p[0][k] > p[0][k - 1]);
    // Median head equals exp(mu) by the inverse-CDF construction.
    const auto heads = forward(tm.models[0], detail::maybe_standardize(tm, {{1.0}}));
    CHECK(p[0][2] == doctest::Approx(std::exp(heads[0][0])).epsilon(1e-9));
  }
}

TEST_CASE("CQRNN learns the linear median at scale") {
  Type1Spec spec = type1_spec("norm_linear");
  spec.n_train = 3000;
  const auto ds = generate_type1(spec, 11);
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.grid = make_grid(9);
  cfg.seed = 0;
  const auto tm = train_cqrnn(ds, cfg);
  for (double x : {0.5, 1.0, 1.5}) {
    const auto p = predict(tm, {{x}});
    CHECK(std::abs(p[0][4] - (2.0 * x + 10.0)) < 0.5);
  }
}
