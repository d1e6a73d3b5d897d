#ifndef CQR_SYNTHGEN_HPP
#define CQR_SYNTHGEN_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cqr/dataset.hpp"
#include "cqr/distributions.hpp"

namespace cqr {

// Fully synthetic dataset family: inputs x ~ U(0,2)^D, target t ~ target_fn(x),
// censoring c ~ censor_fn(x), y = min(t, c).
struct Type1Spec {
  std::string name;
  std::size_t n_train = 500;
  std::size_t n_test = 1000;
  std::size_t dim = 1;
  std::function<DistSpec(const std::vector<double>&)> target_fn;
  std::function<DistSpec(const std::vector<double>&)> censor_fn;  // null => same as target
  // Lognormal generators draw the value and divide it by this factor.
  double target_scale_div = 1.0;
  double censor_scale_div = 1.0;
};

namespace detail {

// Coefficients for the 8-dim lognormal mean Sum(beta_i * x_i); fixed here since
// no canonical values exist for this family.
inline const std::vector<double>& lognorm8_beta() {
  static const std::vector<double> beta = {0.2, 0.3, -0.1, 0.4, -0.2, 0.1, 0.3, -0.3};
  return beta;
}

inline DistSpec norm4_target(const std::vector<double>& x) {
  const double mean = 3.0 * x[0] + x[1] * x[1] - x[2] * x[2] + 2.0 * std::sin(x[2] * x[3]) + 6.0;
  const double std = x[0] * x[0] + 0.5;  // variance term reads x as the first coordinate
  return DistSpec::normal(mean, std);
}

inline DistSpec lognorm8_target(const std::vector<double>& x) {
  double mu = 0.0;
  for (std::size_t i = 0; i < 8; ++i) mu += lognorm8_beta()[i] * x[i];
  return DistSpec::lognormal(mu, 1.0);
}

}  // namespace detail

// The 14 fully synthetic dataset definitions.
inline Type1Spec type1_spec(const std::string& name) {
  Type1Spec s;
  s.name = name;
  auto uniform_censor = [](double hi) {
    return [hi](const std::vector<double>&) { return DistSpec::uniform(0.0, hi); };
  };

  if (name == "norm_linear") {
    s.target_fn = [](const std::vector<double>& x) { return DistSpec::normal(2.0 * x[0] + 10.0, x[0] + 1.0); };
    s.censor_fn = [](const std::vector<double>& x) { return DistSpec::normal(4.0 * x[0] + 10.0, 0.8 * x[0] + 0.4); };
  } else if (name == "norm_nonlinear") {
    s.target_fn = [](const std::vector<double>& x) {
      return DistSpec::normal(x[0] * std::sin(2.0 * x[0]) + 10.0, 0.5 * x[0] + 0.5);
    };
    s.censor_fn = [](const std::vector<double>& x) { return DistSpec::normal(2.0 * x[0] + 10.0, 2.0); };
  } else if (name == "exponential") {
    s.target_fn = [](const std::vector<double>& x) { return DistSpec::exponential(2.0 * x[0] + 4.0); };
    s.censor_fn = [](const std::vector<double>& x) { return DistSpec::exponential(-3.0 * x[0] + 15.0); };
  } else if (name == "weibull") {
    s.target_fn = [](const std::vector<double>& x) {
      return DistSpec::weibull(4.0 * x[0] * std::sin(2.0 * (x[0] - 1.0)) + 10.0, 5.0);
    };
    s.censor_fn = [](const std::vector<double>& x) { return DistSpec::weibull(-3.0 * x[0] + 20.0, 5.0); };
  } else if (name == "lognorm") {
    s.target_fn = [](const std::vector<double>& x) {
      const double sigma = std::max(x[0] * x[0], 1e-6);
      return DistSpec::lognormal((x[0] - 1.0) * (x[0] - 1.0), sigma);
    };
    s.censor_fn = uniform_censor(10.0);
  } else if (name == "norm_uniform") {
    s.target_fn = [](const std::vector<double>& x) {
      return DistSpec::normal(2.0 * x[0] * std::cos(2.0 * x[0]) + 13.0, x[0] * x[0] + 0.5);
    };
    s.censor_fn = uniform_censor(18.0);
  } else if (name == "norm_heavy" || name == "norm_med" || name == "norm_light" || name == "norm_same") {
    s.dim = 4;
    s.n_train = 2000;
    s.target_fn = detail::norm4_target;
    if (name == "norm_heavy") s.censor_fn = uniform_censor(12.0);
    else if (name == "norm_med") s.censor_fn = uniform_censor(20.0);
    else if (name == "norm_light") s.censor_fn = uniform_censor(40.0);
    // norm_same: censor_fn left null => same as target
  } else if (name == "lognorm_heavy" || name == "lognorm_med" || name == "lognorm_light" || name == "lognorm_same") {
    s.dim = 8;
    s.n_train = 4000;
    s.target_fn = detail::lognorm8_target;
    s.target_scale_div = 10.0;
    s.censor_scale_div = 1.0;
    if (name == "lognorm_heavy") s.censor_fn = uniform_censor(0.4);
    else if (name == "lognorm_med") s.censor_fn = uniform_censor(1.0);
    else if (name == "lognorm_light") s.censor_fn = uniform_censor(3.5);
    else s.censor_scale_div = 10.0;  // same as target, including the /10
  } else {
    throw std::invalid_argument("unknown type-1 dataset name: " + name);
  }
  return s;
}

inline const std::vector<std::string>& type1_names() {
  static const std::vector<std::string> names = {
      "norm_linear", "norm_nonlinear", "exponential",   "weibull",      "lognorm",       "norm_uniform", "norm_heavy",
      "norm_med",    "norm_light",     "norm_same",     "lognorm_heavy", "lognorm_med",  "lognorm_light", "lognorm_same"};
  return names;
}

// Analytic tau-quantile of the target distribution at input x.
inline double true_quantile(const Type1Spec& spec, const std::vector<double>& x, double tau) {
  return quantile(spec.target_fn(x), tau) / spec.target_scale_div;
}

inline CensoredDataset generate_type1_rows(const Type1Spec& spec, std::size_t n, RandomStream& rng) {
  CensoredDataset ds;
  ds.features.reserve(n);
  ds.labels.reserve(n);
  ds.indicators.reserve(n);
  ds.true_targets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(spec.dim);
    for (auto& xi : x) xi = rng.uniform(0.0, 2.0);
    const double t = sample(spec.target_fn(x), rng) / spec.target_scale_div;
    const DistSpec cd = spec.censor_fn ? spec.censor_fn(x) : spec.target_fn(x);
    const double c = sample(cd, rng) / spec.censor_scale_div;
    ds.features.push_back(std::move(x));
    // Tie t == c counts as observed (censoring is strictly c < t).
    if (c < t) {
      ds.labels.push_back(c);
      ds.indicators.push_back(0);
    } else {
      ds.labels.push_back(t);
      ds.indicators.push_back(1);
    }
    ds.true_targets.push_back(t);
  }
  ds.true_quantile_fn = [spec](const std::vector<double>& x, double tau) { return true_quantile(spec, x, tau); };
  return ds;
}

inline CensoredDataset generate_type1(const Type1Spec& spec, std::uint64_t seed) {
  RandomStream rng(seed);
  return generate_type1_rows(spec, spec.n_train, rng);
}

// Train and test drawn from one stream so test rows differ from train rows.
inline std::pair<CensoredDataset, CensoredDataset> generate_type1_train_test(const Type1Spec& spec,
                                                                             std::uint64_t seed) {
  RandomStream rng(seed);
  auto train = generate_type1_rows(spec, spec.n_train, rng);
  auto test = generate_type1_rows(spec, spec.n_test, rng);
  return {std::move(train), std::move(test)};
}

// Synthetic censoring overlaid on uncensored data (type-2 construction):
// c_i ~ U(0, c) with c fixed or a multiple of the max label.
struct CensorOverlay {
  enum class Rule { Fixed, MultipleOfMax };
  Rule rule = Rule::MultipleOfMax;
  double value = 1.5;

  double resolve(const CensoredDataset& ds) const {
    if (rule == Rule::Fixed) return value;
    return value * *std::max_element(ds.labels.begin(), ds.labels.end());
  }
};

inline CensoredDataset overlay_censoring(const CensoredDataset& uncensored, const CensorOverlay& ov,
                                         std::uint64_t seed) {
  for (int d : uncensored.indicators)
    if (d != 1) throw std::invalid_argument("overlay_censoring: input must be fully observed");
  const double c_max = ov.resolve(uncensored);
  if (!(c_max > 0.0)) throw std::invalid_argument("overlay_censoring: censoring bound must be > 0");

  CensoredDataset out = uncensored;
  out.true_targets = uncensored.labels;  // retain originals for UQL/UnDCal
  RandomStream rng(seed);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double c = rng.uniform(0.0, c_max);
    if (c < out.labels[i]) {
      out.labels[i] = c;
      out.indicators[i] = 0;
    }
  }
  return out;
}

}  // namespace cqr

#endif  // CQR_SYNTHGEN_HPP
