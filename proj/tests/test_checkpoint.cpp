#include "doctest.h"

#include <cstdio>

#include "cqr/checkpoint.hpp"
#include "cqr/synthgen.hpp"

using namespace cqr;

TEST_CASE("checkpoint round trip preserves predictions exactly") {
  Type1Spec spec = type1_spec("norm_linear");
  spec.n_train = 100;
  const auto ds = generate_type1(spec, 1);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.grid = make_grid(5);
  cfg.hidden_sizes = {10};
  for (Method m : {Method::Cqrnn, Method::SeqGrid, Method::LognormMle}) {
    const auto tm = train(m, ds, cfg);
    const std::string path = "tmp_ckpt.json";
    save_checkpoint(tm, path);
    const auto back = load_checkpoint(path);
    std::remove(path.c_str());
    CHECK(back.method == tm.method);
    CHECK(back.grid.levels == tm.grid.levels);
    CHECK(back.standardized == tm.standardized);
    CHECK(back.scaler.mean == tm.scaler.mean);
    CHECK(back.scaler.std == tm.scaler.std);
    REQUIRE(back.models.size() == tm.models.size());
    for (std::size_t i = 0; i < tm.models.size(); ++i)
      CHECK(back.models[i].flat_params() == tm.models[i].flat_params());
    const std::vector<std::vector<double>> X = {{0.4}, {1.6}};
    CHECK(predict(back, X) == predict(tm, X));
  }
}

TEST_CASE("checkpoint errors") {
  CHECK_THROWS_AS(load_checkpoint("does_not_exist.json"), std::runtime_error);
  {
    std::ofstream out("tmp_bad.json");
    out << "{not json";
  }
  CHECK_THROWS_AS(load_checkpoint("tmp_bad.json"), std::runtime_error);
  std::remove("tmp_bad.json");
  {
    nlohmann::json j = {{"format_version", 99}};
    std::ofstream out("tmp_ver.json");
    out << j.dump();
  }
  CHECK_THROWS_AS(load_checkpoint("tmp_ver.json"), std::invalid_argument);
  std::remove("tmp_ver.json");
}
