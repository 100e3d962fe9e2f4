#pragma once

#include <cmath>
#include <numbers>
#include <string_view>

#include "causalframe/error.hpp"

namespace causalframe::normal {

// Recorded in output metadata so reports state how Phi was evaluated.
inline constexpr std::string_view kMethod =
    "Phi(x) = erfc(-x/sqrt(2))/2 via std::erfc; two-sided p = erfc(|z|/sqrt(2)); "
    "quantile = Acklam rational approximation refined by one Halley step";

inline double cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// 2 * (1 - Phi(|z|)), evaluated without cancellation in the tail.
inline double two_sided_p(double z) noexcept {
  return std::erfc(std::fabs(z) / std::numbers::sqrt2);
}

// Inverse of cdf on (0, 1).
inline double quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("normal quantile needs p in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  constexpr double high = 1.0 - low;

  double x;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= high) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley step; the residual is taken on the smaller tail for accuracy.
  const double residual = p > 0.5 ? (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2)
                                   : 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = residual * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

// z_{1 - alpha/2} for a two-sided interval at `confidence` = 1 - alpha.
inline double two_sided_critical(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0))
    throw ConfigError("confidence level must lie in (0, 1)");
  return quantile(0.5 + 0.5 * confidence);
}

}  // namespace causalframe::normal
