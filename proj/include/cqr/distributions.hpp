#ifndef CQR_DISTRIBUTIONS_HPP
#define CQR_DISTRIBUTIONS_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cqr/random.hpp"

namespace cqr {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2*pi)

enum class DistFamily { Normal, LogNormal, Exponential, Weibull, Uniform };

// One of five scalar distribution families.
//   Normal(mean, std), LogNormal(log-mean, log-std), Exponential(scale),
//   Weibull(scale, shape), Uniform(lower, upper).
struct DistSpec {
  DistFamily family;
  double p0 = 0.0;
  double p1 = 1.0;

  static DistSpec normal(double mean, double std) { return checked({DistFamily::Normal, mean, std}); }
  static DistSpec lognormal(double mu, double sigma) { return checked({DistFamily::LogNormal, mu, sigma}); }
  static DistSpec exponential(double scale) { return checked({DistFamily::Exponential, scale, 0.0}); }
  static DistSpec weibull(double scale, double shape) { return checked({DistFamily::Weibull, scale, shape}); }
  static DistSpec uniform(double lo, double hi) { return checked({DistFamily::Uniform, lo, hi}); }

  static DistSpec checked(DistSpec s) {
    s.validate();
    return s;
  }

  void validate() const {
    switch (family) {
      case DistFamily::Normal:
        if (!(p1 > 0.0)) throw std::invalid_argument("Normal: std must be > 0");
        break;
      case DistFamily::LogNormal:
        if (!(p1 > 0.0)) throw std::invalid_argument("LogNormal: log-std must be > 0");
        break;
      case DistFamily::Exponential:
        if (!(p0 > 0.0)) throw std::invalid_argument("Exponential: scale must be > 0");
        break;
      case DistFamily::Weibull:
        if (!(p0 > 0.0) || !(p1 > 0.0)) throw std::invalid_argument("Weibull: scale and shape must be > 0");
        break;
      case DistFamily::Uniform:
        if (!(p0 < p1)) throw std::invalid_argument("Uniform: requires lower < upper");
        break;
    }
  }
};

// Standard normal CDF via erfc (stable in both tails).
inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

inline double std_normal_pdf(double z) { return std::exp(-0.5 * z * z - 0.5 * kLog2Pi); }

// Inverse standard normal CDF. Acklam's rational approximation followed by a
// Newton refinement step against the erfc-based CDF; |error| <= 1e-9.
inline double std_normal_quantile(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::domain_error("std_normal_quantile: tau must be in (0,1)");

  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,  -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double p_low = 0.02425;

  double x;
  if (tau < p_low) {
    const double q = std::sqrt(-2.0 * std::log(tau));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (tau <= 1.0 - p_low) {
    const double q = tau - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - tau));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Newton step: x -= (Phi(x) - tau) / phi(x).
  const double err = std_normal_cdf(x) - tau;
  x -= err / std_normal_pdf(x);
  return x;
}

inline double quantile(const DistSpec& s, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::domain_error("quantile: tau must be in (0,1)");
  switch (s.family) {
    case DistFamily::Normal:
      return s.p0 + s.p1 * std_normal_quantile(tau);
    case DistFamily::LogNormal:
      return std::exp(s.p0 + s.p1 * std_normal_quantile(tau));
    case DistFamily::Exponential:
      return -s.p0 * std::log1p(-tau);
    case DistFamily::Weibull:
      return s.p0 * std::pow(-std::log1p(-tau), 1.0 / s.p1);
    case DistFamily::Uniform:
      return s.p0 + tau * (s.p1 - s.p0);
  }
  throw std::logic_error("unreachable");
}

inline double cdf(const DistSpec& s, double y) {
  switch (s.family) {
    case DistFamily::Normal:
      return std_normal_cdf((y - s.p0) / s.p1);
    case DistFamily::LogNormal:
      if (y <= 0.0) return 0.0;
      return std_normal_cdf((std::log(y) - s.p0) / s.p1);
    case DistFamily::Exponential:
      if (y <= 0.0) return 0.0;
      return -std::expm1(-y / s.p0);
    case DistFamily::Weibull:
      if (y <= 0.0) return 0.0;
      return -std::expm1(-std::pow(y / s.p0, s.p1));
    case DistFamily::Uniform:
      if (y <= s.p0) return 0.0;
      if (y >= s.p1) return 1.0;
      return (y - s.p0) / (s.p1 - s.p0);
  }
  throw std::logic_error("unreachable");
}

// Natural-log density; -inf outside the support.
inline double log_pdf(const DistSpec& s, double y) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  switch (s.family) {
    case DistFamily::Normal: {
      const double z = (y - s.p0) / s.p1;
      return -0.5 * z * z - std::log(s.p1) - 0.5 * kLog2Pi;
    }
    case DistFamily::LogNormal: {
      if (y <= 0.0) return neg_inf;
      const double z = (std::log(y) - s.p0) / s.p1;
      return -0.5 * z * z - std::log(y * s.p1) - 0.5 * kLog2Pi;
    }
    case DistFamily::Exponential:
      if (y < 0.0) return neg_inf;
      return -y / s.p0 - std::log(s.p0);
    case DistFamily::Weibull: {
      if (y < 0.0) return neg_inf;
      if (y == 0.0) return s.p1 < 1.0 ? std::numeric_limits<double>::infinity() : (s.p1 == 1.0 ? -std::log(s.p0) : neg_inf);
      const double r = y / s.p0;
      return std::log(s.p1 / s.p0) + (s.p1 - 1.0) * std::log(r) - std::pow(r, s.p1);
    }
    case DistFamily::Uniform:
      if (y < s.p0 || y > s.p1) return neg_inf;
      return -std::log(s.p1 - s.p0);
  }
  throw std::logic_error("unreachable");
}

// Inverse-CDF sampling; reproducible given the stream state.
inline double sample(const DistSpec& s, RandomStream& rng) {
  s.validate();
  return quantile(s, rng.uniform01());
}

}  // namespace cqr

#endif  // CQR_DISTRIBUTIONS_HPP
