#ifndef CQR_DATASET_HPP
#define CQR_DATASET_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cqr/random.hpp"

namespace cqr {

// Maps an input x to its tau-quantile under the generating target distribution.
// Only attached to synthetic datasets where the generator is known analytically.
using TrueQuantileFn = std::function<double(const std::vector<double>&, double)>;

// Right-censored regression dataset: features x_i, labels y_i = min(t_i, c_i),
// indicators delta_i (0 = censored). Synthetic data additionally carries the
// uncensored targets t_i and, for fully synthetic generators, the analytic
// quantile function.
struct CensoredDataset {
  std::vector<std::vector<double>> features;  // N rows of D
  std::vector<double> labels;
  std::vector<int> indicators;  // each 0 or 1
  std::vector<double> true_targets;  // empty unless synthetic
  TrueQuantileFn true_quantile_fn;  // null unless type-1 synthetic

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.empty() ? 0 : features.front().size(); }

  std::size_t num_censored() const {
    std::size_t n = 0;
    for (int d : indicators) n += (d == 0);
    return n;
  }
  std::size_t num_observed() const { return size() - num_censored(); }

  void validate() const {
    if (features.size() != labels.size() || labels.size() != indicators.size())
      throw std::invalid_argument("dataset: row counts disagree");
    if (!true_targets.empty() && true_targets.size() != labels.size())
      throw std::invalid_argument("dataset: true_targets length mismatch");
    for (std::size_t i = 0; i < size(); ++i) {
      if (features[i].size() != dim()) throw std::invalid_argument("dataset: ragged feature rows");
      if (indicators[i] != 0 && indicators[i] != 1)
        throw std::invalid_argument("dataset: indicator not in {0,1} at row " + std::to_string(i));
      if (!true_targets.empty()) {
        if (indicators[i] == 1 && labels[i] != true_targets[i])
          throw std::invalid_argument("dataset: observed label differs from true target at row " + std::to_string(i));
        if (indicators[i] == 0 && !(labels[i] < true_targets[i]))
          throw std::invalid_argument("dataset: censored label not below true target at row " + std::to_string(i));
      }
    }
  }
};

struct SplitConfig {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct CsvSchema {
  std::vector<std::string> feature_columns;
  std::string label_column = "y";
  std::string indicator_column = "delta";
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

inline double parse_real(const std::string& cell, std::size_t row) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("csv: non-numeric cell '" + cell + "' at data row " + std::to_string(row));
  }
  if (pos != cell.size())
    throw std::invalid_argument("csv: non-numeric cell '" + cell + "' at data row " + std::to_string(row));
  return v;
}

}  // namespace detail

// Loads a dataset from CSV. Header row required; one row per datapoint.
inline CensoredDataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("csv: cannot open " + path);

  std::string header_line;
  if (!std::getline(in, header_line)) throw std::invalid_argument("csv: no rows in " + path);
  const auto header = detail::split_csv_line(detail::strip_cr(header_line));

  auto col_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::invalid_argument("csv: missing column '" + name + "' in " + path);
  };

  std::vector<std::size_t> feat_idx;
  feat_idx.reserve(schema.feature_columns.size());
  for (const auto& c : schema.feature_columns) feat_idx.push_back(col_index(c));
  const std::size_t y_idx = col_index(schema.label_column);
  const std::size_t d_idx = col_index(schema.indicator_column);

  CensoredDataset ds;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    ++row;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw std::invalid_argument("csv: wrong cell count at data row " + std::to_string(row));
    std::vector<double> x;
    x.reserve(feat_idx.size());
    for (std::size_t fi : feat_idx) x.push_back(detail::parse_real(cells[fi], row));
    const double y = detail::parse_real(cells[y_idx], row);
    const double dv = detail::parse_real(cells[d_idx], row);
    if (dv != 0.0 && dv != 1.0)
      throw std::invalid_argument("csv: indicator not in {0,1} at data row " + std::to_string(row));
    ds.features.push_back(std::move(x));
    ds.labels.push_back(y);
    ds.indicators.push_back(static_cast<int>(dv));
  }
  if (ds.size() == 0) throw std::invalid_argument("csv: no rows in " + path);
  ds.validate();
  return ds;
}

// Default schema for a D-feature file: columns x1..xD,y,delta.
inline CsvSchema default_schema(std::size_t dim) {
  CsvSchema s;
  for (std::size_t i = 1; i <= dim; ++i) s.feature_columns.push_back("x" + std::to_string(i));
  return s;
}

// Infers x1..xD from the header, then loads.
inline CensoredDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("csv: cannot open " + path);
  std::string header_line;
  if (!std::getline(in, header_line)) throw std::invalid_argument("csv: no rows in " + path);
  const auto header = detail::split_csv_line(detail::strip_cr(header_line));
  std::size_t dim = 0;
  for (const auto& c : header)
    if (c.size() > 1 && c[0] == 'x') ++dim;
  return load_csv(path, default_schema(dim));
}

inline void save_csv(const CensoredDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write " + path);
  for (std::size_t j = 0; j < ds.dim(); ++j) out << 'x' << (j + 1) << ',';
  out << "y,delta\n";
  char buf[64];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.features[i]) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << ',';
    }
    std::snprintf(buf, sizeof(buf), "%.17g", ds.labels[i]);
    out << buf << ',' << ds.indicators[i] << '\n';
  }
}

inline CensoredDataset take_rows(const CensoredDataset& ds, const std::vector<std::size_t>& idx) {
  CensoredDataset out;
  out.true_quantile_fn = ds.true_quantile_fn;
  for (std::size_t i : idx) {
    out.features.push_back(ds.features[i]);
    out.labels.push_back(ds.labels[i]);
    out.indicators.push_back(ds.indicators[i]);
    if (!ds.true_targets.empty()) out.true_targets.push_back(ds.true_targets[i]);
  }
  return out;
}

// Deterministic random partition; train gets floor(N*(1-f)) rows, test the rest.
inline std::pair<CensoredDataset, CensoredDataset> split(const CensoredDataset& ds, const SplitConfig& cfg) {
  if (ds.size() < 2) throw std::invalid_argument("split: need at least 2 rows");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
    throw std::invalid_argument("split: test_fraction must be in (0,1)");
  std::vector<std::size_t> idx(ds.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  RandomStream rng(cfg.seed);
  shuffle_in_place(idx, rng);
  const std::size_t n_train = static_cast<std::size_t>(std::floor(ds.size() * (1.0 - cfg.test_fraction)));
  std::vector<std::size_t> tr(idx.begin(), idx.begin() + n_train);
  std::vector<std::size_t> te(idx.begin() + n_train, idx.end());
  return {take_rows(ds, tr), take_rows(ds, te)};
}

// Per-feature affine map fitted on the training split. Population (1/N) std;
// constant features map to 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> std;
};

inline Standardizer standardize_fit(const CensoredDataset& train) {
  Standardizer s;
  const std::size_t d = train.dim();
  const double n = static_cast<double>(train.size());
  s.mean.assign(d, 0.0);
  s.std.assign(d, 0.0);
  for (const auto& row : train.features)
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += row[j];
  for (std::size_t j = 0; j < d; ++j) s.mean[j] /= n;
  for (const auto& row : train.features)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = row[j] - s.mean[j];
      s.std[j] += c * c;
    }
  for (std::size_t j = 0; j < d; ++j) s.std[j] = std::sqrt(s.std[j] / n);
  return s;
}

inline CensoredDataset standardize_apply(const Standardizer& s, const CensoredDataset& ds) {
  CensoredDataset out = ds;
  for (auto& row : out.features)
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = s.std[j] > 0.0 ? (row[j] - s.mean[j]) / s.std[j] : 0.0;
  return out;
}

}  // namespace cqr

#endif  // CQR_DATASET_HPP
