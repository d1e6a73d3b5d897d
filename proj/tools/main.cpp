// Command-line harness: dataset generation, training, multi-seed
// benchmarking, ablation sweeps, and report emission.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric/training error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cqr/benchmark.hpp"
#include "cqr/checkpoint.hpp"
#include "cqr/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_tau(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", tau);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// Optional overrides layered onto a base TrainConfig.
// Precedence: CLI flags > manifest JSON > built-in defaults.
struct ConfigOverride {
  std::optional<std::size_t> epochs, batch_size, grid_size;
  std::optional<double> c_ystar, crossing_penalty_weight, crossing_margin;
  std::optional<bool> dropout;
  std::optional<std::string> activation, crossing_rule;
  std::optional<std::vector<std::size_t>> hidden;

  void apply(cqr::TrainConfig& cfg) const {
    if (epochs) cfg.epochs = *epochs;
    if (batch_size) cfg.batch_size = *batch_size;
    if (grid_size) cfg.grid = cqr::make_grid(*grid_size);
    if (c_ystar) cfg.pseudo.c_rule = *c_ystar;
    if (crossing_penalty_weight) cfg.crossing_penalty_weight = *crossing_penalty_weight;
    if (crossing_margin) cfg.crossing_margin = *crossing_margin;
    if (dropout) cfg.dropout = *dropout;
    if (hidden) cfg.hidden_sizes = *hidden;
    if (activation) {
      if (*activation == "relu")
        cfg.activation = cqr::Activation::ReLU;
      else if (*activation == "gelu")
        cfg.activation = cqr::Activation::GeLU;
      else
        throw std::invalid_argument("unknown activation: " + *activation);
    }
    if (crossing_rule) {
      if (*crossing_rule == "as-printed")
        cfg.crossing_rule = cqr::CrossingRule::AsPrinted;
      else if (*crossing_rule == "conventional")
        cfg.crossing_rule = cqr::CrossingRule::Conventional;
      else
        throw std::invalid_argument("unknown crossing rule: " + *crossing_rule);
    }
  }

  static ConfigOverride from_json(const json& j) {
    ConfigOverride o;
    if (j.contains("epochs")) o.epochs = j.at("epochs").get<std::size_t>();
    if (j.contains("batch_size")) o.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("grid_size")) o.grid_size = j.at("grid_size").get<std::size_t>();
    if (j.contains("c_ystar")) o.c_ystar = j.at("c_ystar").get<double>();
    if (j.contains("crossing_penalty_weight")) o.crossing_penalty_weight = j.at("crossing_penalty_weight").get<double>();
    if (j.contains("crossing_margin")) o.crossing_margin = j.at("crossing_margin").get<double>();
    if (j.contains("dropout")) o.dropout = j.at("dropout").get<bool>();
    if (j.contains("activation")) o.activation = j.at("activation").get<std::string>();
    if (j.contains("crossing_rule")) o.crossing_rule = j.at("crossing_rule").get<std::string>();
    if (j.contains("hidden")) o.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    return o;
  }
};

void add_config_flags(CLI::App* app, ConfigOverride& o) {
  app->add_option("--epochs", o.epochs, "Training epochs");
  app->add_option("--batch-size", o.batch_size, "Minibatch size");
  app->add_option("--grid-size", o.grid_size, "Number of quantile levels M; grid is {k/(M+1)}");
  app->add_option("--c-ystar", o.c_ystar, "Pseudo value multiplier: y* = c * max(y)");
  app->add_option("--crossing-penalty", o.crossing_penalty_weight, "Crossing penalty weight (0 disables)");
  app->add_option("--crossing-margin", o.crossing_margin, "Crossing penalty margin");
  app->add_option("--dropout", o.dropout, "Enable dropout (rate 0.5) on hidden layers");
  app->add_option("--activation", o.activation, "Hidden activation: relu | gelu");
  app->add_option("--crossing-rule", o.crossing_rule,
                  "Sequential-grid crossing detection: conventional | as-printed");
  app->add_option("--hidden", o.hidden, "Hidden layer widths");
}

double censored_fraction(const cqr::CensoredDataset& ds) {
  return static_cast<double>(ds.num_censored()) / static_cast<double>(ds.size());
}

std::string summary_csv_header() {
  return "dataset,method,n_runs,n_diverged,tqmse_mean,tqmse_se,uql_mean,uql_se,undcal_mean,undcal_se,"
         "censdcal_mean,censdcal_se,c_index_mean,c_index_se,wall_clock_ms_mean";
}

std::string summary_csv_row(const cqr::MetricSummary& s) {
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string();
    std::ostringstream os;
    os.precision(10);
    os << *v;
    return os.str();
  };
  std::ostringstream os;
  os.precision(10);
  os << s.dataset_id << ',' << s.method_id << ',' << s.n_runs << ',' << s.n_diverged << ',' << cell(s.tqmse_mean)
     << ',' << cell(s.tqmse_se) << ',' << cell(s.uql_mean) << ',' << cell(s.uql_se) << ',' << cell(s.undcal_mean)
     << ',' << cell(s.undcal_se) << ',' << cell(s.censdcal_mean) << ',' << cell(s.censdcal_se) << ','
     << cell(s.c_index_mean) << ',' << cell(s.c_index_se) << ',' << s.wall_clock_ms_mean;
  return os.str();
}

// ---------------------------------------------------------------- gen-data

struct GenDataArgs {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t n_train = 0;  // 0 = dataset default
  std::size_t n_test = 0;
  std::size_t grid_size = 0;
  std::string out_dir = ".";
};

int cmd_gen_data(const GenDataArgs& a) {
  cqr::Type1Spec spec = cqr::type1_spec(a.name);
  if (a.n_train > 0) spec.n_train = a.n_train;
  if (a.n_test > 0) spec.n_test = a.n_test;
  const cqr::QuantileGrid grid =
      a.grid_size > 0 ? cqr::make_grid(a.grid_size) : cqr::default_config_for(a.name).grid;

  auto [train, test] = cqr::generate_type1_train_test(spec, a.seed);

  fs::create_directories(a.out_dir);
  const fs::path out(a.out_dir);
  cqr::save_csv(train, (out / "train.csv").string());
  cqr::save_csv(test, (out / "test.csv").string());

  // Truth CSV: analytic target quantiles at every grid level, for test inputs.
  {
    std::ostringstream os;
    for (std::size_t j = 0; j < spec.dim; ++j) os << 'x' << (j + 1) << ',';
    for (std::size_t k = 0; k < grid.size(); ++k)
      os << "y_tau_" << fmt_tau(grid.levels[k]) << (k + 1 < grid.size() ? "," : "\n");
    for (std::size_t i = 0; i < test.size(); ++i) {
      for (double v : test.features[i]) os << fmt_g(v) << ',';
      for (std::size_t k = 0; k < grid.size(); ++k)
        os << fmt_g(cqr::true_quantile(spec, test.features[i], grid.levels[k]))
           << (k + 1 < grid.size() ? "," : "\n");
    }
    write_text(out / "truth.csv", os.str());
  }

  json manifest = {{"dataset", a.name},
                   {"seed", a.seed},
                   {"n_train", spec.n_train},
                   {"n_test", spec.n_test},
                   {"dim", spec.dim},
                   {"grid", grid.levels},
                   {"censored_fraction_train", censored_fraction(train)},
                   {"censored_fraction_test", censored_fraction(test)},
                   {"files", {{"train", "train.csv"}, {"test", "test.csv"}, {"truth", "truth.csv"}}}};
  write_text(out / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << (out / "train.csv").string() << " (" << train.size() << " rows), "
            << (out / "test.csv").string() << " (" << test.size() << " rows), truth.csv, manifest.json\n";
  return 0;
}

// ------------------------------------------------------------------- train

struct TrainArgs {
  std::string data_path;  // CSV; mutually exclusive with name
  std::string name;       // synthetic dataset name
  std::string method = "cqrnn";
  std::uint64_t seed = 0;
  std::string manifest_path;
  std::string out_dir = ".";
  ConfigOverride flags;
};

cqr::TrainConfig resolve_config(const std::string& dataset_name, const std::string& manifest_path,
                                const ConfigOverride& flags) {
  cqr::TrainConfig cfg;
  if (!dataset_name.empty()) cfg = cqr::default_config_for(dataset_name);
  if (!manifest_path.empty()) {
    std::ifstream in(manifest_path);
    if (!in) throw std::invalid_argument("cannot open manifest " + manifest_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw std::invalid_argument("invalid manifest JSON: " + std::string(e.what()));
    }
    if (j.contains("config")) ConfigOverride::from_json(j.at("config")).apply(cfg);
  }
  flags.apply(cfg);
  return cfg;
}

int cmd_train(const TrainArgs& a) {
  if (a.data_path.empty() == a.name.empty())
    throw CLI::ValidationError("train", "exactly one of --data or --name is required");

  cqr::CensoredDataset train;
  if (!a.data_path.empty()) {
    train = cqr::load_csv(a.data_path);
  } else {
    train = cqr::generate_type1(cqr::type1_spec(a.name), a.seed);
  }

  cqr::TrainConfig cfg = resolve_config(a.name, a.manifest_path, a.flags);
  cfg.seed = a.seed;
  const cqr::Method method = cqr::method_from_name(a.method);

  const cqr::TrainedQuantileModel tm = cqr::train(method, train, cfg);

  fs::create_directories(a.out_dir);
  const fs::path out(a.out_dir);
  cqr::save_checkpoint(tm, (out / "checkpoint.json").string());
  {
    std::ostringstream os;
    os << "epoch,loss,lr\n";
    os.precision(10);
    for (const auto& row : tm.loss_log) os << row.epoch << ',' << row.loss << ',' << row.lr << '\n';
    write_text(out / "loss.csv", os.str());
  }
  std::cout << "wrote " << (out / "checkpoint.json").string() << " and loss.csv (" << tm.loss_log.size()
            << " epochs logged)\n";
  return 0;
}

// --------------------------------------------------------------- benchmark

struct BenchmarkArgs {
  std::vector<std::string> names;
  std::vector<std::string> methods;
  std::size_t n_seeds = 10;
  std::string manifest_path;
  std::string data_path;  // external CSV instead of synthetic names
  int data_type = 3;      // 2 = overlay censoring on observed data, 3 = censored as-is
  std::string out_dir = ".";
  ConfigOverride flags;
};

int cmd_benchmark(const BenchmarkArgs& args_in) {
  BenchmarkArgs a = args_in;
  std::vector<std::uint64_t> seeds;
  if (!a.manifest_path.empty()) {
    std::ifstream in(a.manifest_path);
    if (!in) throw std::invalid_argument("cannot open manifest " + a.manifest_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw std::invalid_argument("invalid manifest JSON: " + std::string(e.what()));
    }
    if (a.names.empty() && j.contains("datasets")) a.names = j.at("datasets").get<std::vector<std::string>>();
    if (a.methods.empty() && j.contains("methods")) a.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("seeds")) seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("n_seeds") && seeds.empty()) a.n_seeds = j.at("n_seeds").get<std::size_t>();
  }
  if (seeds.empty())
    for (std::uint64_t s = 0; s < a.n_seeds; ++s) seeds.push_back(s);
  {
    auto sorted = seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("seeds must be distinct");
  }
  if (a.methods.empty()) a.methods = {"cqrnn"};
  if (a.names.empty() && a.data_path.empty())
    throw CLI::ValidationError("benchmark", "need --name (repeatable), --data, or a manifest with datasets");

  struct Cell {
    std::string dataset;
    cqr::Method method;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  std::vector<std::string> dataset_ids = a.names;
  if (!a.data_path.empty()) dataset_ids.push_back(fs::path(a.data_path).stem().string());
  for (const auto& ds : dataset_ids)
    for (const auto& ms : a.methods)
      for (std::uint64_t s : seeds) cells.push_back({ds, cqr::method_from_name(ms), s});

  // External CSV, loaded once; per-seed splits below.
  cqr::CensoredDataset external;
  const std::string external_id = a.data_path.empty() ? "" : fs::path(a.data_path).stem().string();
  if (!a.data_path.empty()) {
    external = cqr::load_csv(a.data_path);
    if (a.data_type == 2) external = cqr::overlay_censoring(external, {}, /*seed=*/0);
    else if (a.data_type != 3)
      throw std::invalid_argument("--type must be 2 or 3");
  }

  std::vector<cqr::MetricReport> detail(cells.size());
  cqr::parallel_for(cells.size(), cqr::default_worker_count(), [&](std::size_t i) {
    const Cell& c = cells[i];
    cqr::CensoredDataset train, test;
    cqr::DatasetType type;
    cqr::TrainConfig cfg;
    if (c.dataset == external_id && !external_id.empty()) {
      std::tie(train, test) = cqr::split(external, {0.2, c.seed});
      type = a.data_type == 2 ? cqr::DatasetType::Type2 : cqr::DatasetType::Type3;
      cfg.epochs = 100;
    } else {
      const cqr::Type1Spec spec = cqr::type1_spec(c.dataset);
      std::tie(train, test) = cqr::generate_type1_train_test(spec, c.seed);
      type = cqr::DatasetType::Type1;
      cfg = cqr::default_config_for(c.dataset);
    }
    a.flags.apply(cfg);
    cfg.seed = c.seed;
    detail[i] = cqr::run_cell(c.method, train, test, type, cfg, c.dataset);
  });

  fs::create_directories(a.out_dir);
  const fs::path out(a.out_dir);
  {
    std::ostringstream os;
    os << cqr::MetricReport::csv_header() << '\n';
    for (const auto& r : detail) os << r.csv_row() << '\n';
    write_text(out / "detail.csv", os.str());
  }
  {
    std::ostringstream os;
    os << summary_csv_header() << '\n';
    for (const auto& ds : dataset_ids)
      for (const auto& ms : a.methods) {
        std::vector<cqr::MetricReport> group;
        for (const auto& r : detail)
          if (r.dataset_id == ds && r.method_id == ms) group.push_back(r);
        os << summary_csv_row(cqr::summarize(group)) << '\n';
      }
    write_text(out / "summary.csv", os.str());
  }
  std::cout << "wrote " << (out / "detail.csv").string() << " (" << detail.size() << " rows) and summary.csv ("
            << dataset_ids.size() * a.methods.size() << " rows)\n";
  return 0;
}

// ------------------------------------------------------------------ ablate

struct AblateArgs {
  std::string kind;  // grid | ystar | crossing
  std::string name = "norm_linear";
  std::string method = "cqrnn";
  std::size_t n_seeds = 3;
  std::string out_dir = ".";
  ConfigOverride flags;
};

int cmd_ablate(const AblateArgs& a) {
  const cqr::Method method = cqr::method_from_name(a.method);
  const cqr::Type1Spec base_spec = cqr::type1_spec(a.name);

  struct Sweep {
    std::size_t grid_m = 0;   // 0 = dataset default
    std::size_t n_train = 0;  // 0 = dataset default
    double c_ystar = 1.2;
    double penalty = 0.0;
  };
  std::vector<Sweep> sweeps;
  if (a.kind == "grid") {
    for (std::size_t m : {std::size_t{9}, std::size_t{19}, std::size_t{39}})
      for (std::size_t n : {100, 200, 400, 800, 1600, 3200, 6400, 12800}) sweeps.push_back({m, n, 1.2, 0.0});
  } else if (a.kind == "ystar") {
    for (double c : {1.0, 1.2, 1.5, 2.0, 10.0, 100.0}) sweeps.push_back({0, 0, c, 0.0});
  } else if (a.kind == "crossing") {
    for (double p : {0.0, 1.0}) sweeps.push_back({0, 0, 1.2, p});
  } else {
    throw CLI::ValidationError("ablate", "--kind must be grid, ystar, or crossing");
  }

  struct Cell {
    Sweep sweep;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& sw : sweeps)
    for (std::uint64_t s = 0; s < a.n_seeds; ++s) cells.push_back({sw, s});

  std::vector<cqr::MetricReport> detail(cells.size());
  cqr::parallel_for(cells.size(), cqr::default_worker_count(), [&](std::size_t i) {
    const Cell& c = cells[i];
    cqr::Type1Spec spec = base_spec;
    if (c.sweep.n_train > 0) spec.n_train = c.sweep.n_train;
    auto [train, test] = cqr::generate_type1_train_test(spec, c.seed);
    cqr::TrainConfig cfg = cqr::default_config_for(a.name);
    if (c.sweep.grid_m > 0) cfg.grid = cqr::make_grid(c.sweep.grid_m);
    // Constant gradient-step budget across dataset sizes for the grid and
    // ystar sweeps: epochs = 500 * 200 / N.
    if (c.sweep.n_train > 0 || a.kind == "ystar")
      cfg.epochs = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(500.0 * 200.0 / spec.n_train)));
    cfg.pseudo.c_rule = c.sweep.c_ystar;
    cfg.crossing_penalty_weight = c.sweep.penalty;
    a.flags.apply(cfg);
    cfg.seed = c.seed;
    detail[i] = cqr::run_cell(method, train, test, cqr::DatasetType::Type1, cfg, a.name);
  });

  fs::create_directories(a.out_dir);
  const fs::path out(a.out_dir);
  std::ostringstream os;
  os << "dataset,method,kind,grid_m,n_train,c_ystar,crossing_penalty,seed,tqmse,uql,undcal,censdcal,c_index,"
        "wall_clock_ms,diverged\n";
  os.precision(10);
  auto cell_str = [](const std::optional<double>& v) {
    if (!v) return std::string();
    std::ostringstream o;
    o.precision(10);
    o << *v;
    return o.str();
  };
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    const cqr::MetricReport& r = detail[i];
    const std::size_t m = c.sweep.grid_m > 0 ? c.sweep.grid_m : cqr::default_config_for(a.name).grid.size();
    const std::size_t n = c.sweep.n_train > 0 ? c.sweep.n_train : base_spec.n_train;
    os << a.name << ',' << a.method << ',' << a.kind << ',' << m << ',' << n << ',' << c.sweep.c_ystar << ','
       << c.sweep.penalty << ',' << c.seed << ',' << cell_str(r.tqmse) << ',' << cell_str(r.uql) << ','
       << cell_str(r.undcal) << ',' << cell_str(r.censdcal) << ',' << cell_str(r.c_index) << ',' << r.wall_clock_ms
       << ',' << (r.diverged ? 1 : 0) << '\n';
  }
  write_text(out / ("ablate_" + a.kind + ".csv"), os.str());
  std::cout << "wrote " << (out / ("ablate_" + a.kind + ".csv")).string() << " (" << cells.size() << " rows)\n";
  return 0;
}

// ------------------------------------------------------------------ report

struct ReportArgs {
  std::string runs_dir;
  std::vector<std::string> expect;  // expected "<dataset>_<method>" checkpoint stems
  bool strict = false;
  std::string out_dir = ".";
};

// Checkpoints are looked up as <runs>/<dataset>_<method>.checkpoint.json.
// For 1-D synthetic datasets a quantile-fan CSV is emitted: x, one predicted
// column per grid level, one analytic-truth column per grid level.
int cmd_report(const ReportArgs& a) {
  if (!fs::is_directory(a.runs_dir)) throw std::invalid_argument("runs dir not found: " + a.runs_dir);
  fs::create_directories(a.out_dir);
  const fs::path out(a.out_dir);

  std::vector<std::string> stems;
  for (const auto& e : fs::directory_iterator(a.runs_dir)) {
    const std::string fn = e.path().filename().string();
    const std::string suffix = ".checkpoint.json";
    if (fn.size() > suffix.size() && fn.substr(fn.size() - suffix.size()) == suffix)
      stems.push_back(fn.substr(0, fn.size() - suffix.size()));
  }
  std::sort(stems.begin(), stems.end());

  std::vector<std::string> absent;
  for (const auto& want : a.expect)
    if (std::find(stems.begin(), stems.end(), want) == stems.end()) absent.push_back(want);

  std::ostringstream md;
  md << "# Run report\n\n## Checkpoints\n\n| run | status | fan CSV |\n|---|---|---|\n";
  for (const auto& stem : stems) {
    // stem = <dataset>_<method>; method names contain no underscore.
    const std::size_t us = stem.rfind('_');
    const std::string dataset = us == std::string::npos ? stem : stem.substr(0, us);
    std::string fan = "";
    bool is_1d_type1 = false;
    cqr::Type1Spec spec;
    try {
      spec = cqr::type1_spec(dataset);
      is_1d_type1 = spec.dim == 1;
    } catch (const std::invalid_argument&) {
      is_1d_type1 = false;
    }
    if (is_1d_type1) {
      const cqr::TrainedQuantileModel tm =
          cqr::load_checkpoint((fs::path(a.runs_dir) / (stem + ".checkpoint.json")).string());
      const std::size_t n_pts = 201;
      std::vector<std::vector<double>> X(n_pts, std::vector<double>(1));
      for (std::size_t i = 0; i < n_pts; ++i) X[i][0] = 2.0 * static_cast<double>(i) / (n_pts - 1);
      const auto preds = cqr::predict(tm, X);
      std::ostringstream os;
      os << 'x';
      for (double t : tm.grid.levels) os << ",yhat_tau_" << fmt_tau(t);
      for (double t : tm.grid.levels) os << ",ytrue_tau_" << fmt_tau(t);
      os << '\n';
      for (std::size_t i = 0; i < n_pts; ++i) {
        os << fmt_g(X[i][0]);
        for (std::size_t k = 0; k < tm.grid.size(); ++k) os << ',' << fmt_g(preds[i][k]);
        for (double t : tm.grid.levels) os << ',' << fmt_g(cqr::true_quantile(spec, X[i], t));
        os << '\n';
      }
      fan = "fan_" + stem + ".csv";
      write_text(out / fan, os.str());
    } else {
      std::cerr << "notice: " << stem << " is not a 1-D synthetic dataset; fan CSV skipped\n";
    }
    md << "| " << stem << " | present | " << (fan.empty() ? "-" : fan) << " |\n";
  }
  for (const auto& stem : absent) md << "| " << stem << " | absent | - |\n";

  // Metrics table, mirroring the benchmark summary layout.
  const fs::path summary = fs::path(a.runs_dir) / "summary.csv";
  if (fs::exists(summary)) {
    std::ifstream in(summary);
    std::string line;
    md << "\n## Metrics\n\n";
    bool first = true;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::string row = "| ";
      for (char ch : line) row += ch == ',' ? std::string(" | ") : std::string(1, ch);
      md << row << " |\n";
      if (first) {
        std::size_t n_cols = 1 + std::count(line.begin(), line.end(), ',');
        md << "|";
        for (std::size_t i = 0; i < n_cols; ++i) md << "---|";
        md << '\n';
        first = false;
      }
    }
  }
  write_text(out / "report.md", md.str());
  std::cout << "wrote " << (out / "report.md").string() << " (" << stems.size() << " present, " << absent.size()
            << " absent)\n";
  if (!absent.empty() && a.strict) throw std::invalid_argument("missing checkpoints under --strict");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Censored quantile regression neural networks: data generation, training, and benchmarks"};
  app.require_subcommand(1);

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic dataset (train/test/truth CSVs + manifest)");
  gen_cmd->add_option("--name", gen.name, "Dataset name")->required();
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--n-train", gen.n_train, "Training rows (0 = dataset default)");
  gen_cmd->add_option("--n-test", gen.n_test, "Test rows (0 = dataset default)");
  gen_cmd->add_option("--grid-size", gen.grid_size, "Grid size for the truth CSV (0 = dataset default)");
  gen_cmd->add_option("--out", gen.out_dir, "Output directory");

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Train one model; writes checkpoint.json and loss.csv");
  tr_cmd->add_option("--data", tr.data_path, "Training CSV (x1..xD,y,delta)");
  tr_cmd->add_option("--name", tr.name, "Synthetic dataset name (generates training data)");
  tr_cmd->add_option("--method", tr.method, "cqrnn | seqgrid | excl | lognorm");
  tr_cmd->add_option("--seed", tr.seed, "Random seed (data generation and training)");
  tr_cmd->add_option("--manifest", tr.manifest_path, "JSON manifest with a \"config\" object");
  tr_cmd->add_option("--out", tr.out_dir, "Output directory");
  add_config_flags(tr_cmd, tr.flags);

  BenchmarkArgs bm;
  auto* bm_cmd = app.add_subcommand("benchmark", "Multi-seed benchmark; writes detail.csv and summary.csv");
  bm_cmd->add_option("--name", bm.names, "Synthetic dataset name (repeatable)");
  bm_cmd->add_option("--method", bm.methods, "Method (repeatable; default cqrnn)");
  bm_cmd->add_option("--seeds", bm.n_seeds, "Number of seeds (0..N-1)");
  bm_cmd->add_option("--manifest", bm.manifest_path, "JSON manifest (datasets, methods, seeds, config)");
  bm_cmd->add_option("--data", bm.data_path, "External censored CSV benchmarked with per-seed splits");
  bm_cmd->add_option("--type", bm.data_type, "External data type: 2 (overlay censoring) or 3 (as-is)");
  bm_cmd->add_option("--out", bm.out_dir, "Output directory");
  add_config_flags(bm_cmd, bm.flags);

  AblateArgs ab;
  auto* ab_cmd = app.add_subcommand("ablate", "Hyperparameter sweep; writes one CSV row per cell per seed");
  ab_cmd->add_option("--kind", ab.kind, "grid | ystar | crossing")->required();
  ab_cmd->add_option("--name", ab.name, "Synthetic dataset name");
  ab_cmd->add_option("--method", ab.method, "Method");
  ab_cmd->add_option("--seeds", ab.n_seeds, "Number of seeds (0..N-1)");
  ab_cmd->add_option("--out", ab.out_dir, "Output directory");
  add_config_flags(ab_cmd, ab.flags);

  ReportArgs rp;
  auto* rp_cmd = app.add_subcommand("report", "Quantile-fan CSVs and a markdown table from a runs directory");
  rp_cmd->add_option("--runs", rp.runs_dir, "Directory with *.checkpoint.json (and optional summary.csv)")
      ->required();
  rp_cmd->add_option("--expect", rp.expect, "Expected checkpoint stem <dataset>_<method> (repeatable)");
  rp_cmd->add_flag("--strict", rp.strict, "Exit nonzero when an expected checkpoint is absent");
  rp_cmd->add_option("--out", rp.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
    if (gen_cmd->parsed()) return cmd_gen_data(gen);
    if (tr_cmd->parsed()) return cmd_train(tr);
    if (bm_cmd->parsed()) return cmd_benchmark(bm);
    if (ab_cmd->parsed()) return cmd_ablate(ab);
    if (rp_cmd->parsed()) return cmd_report(rp);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // help/version exit cleanly; parse errors are usage errors
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
