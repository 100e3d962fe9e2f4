#pragma once

// 50-digit evaluation of the smoothed-table closed forms (odds, log odds
// ratio, Wald SE, interval, two-sided p) using Boost.Multiprecision and
// Boost.Math special functions. Independent of causalframe::normal.

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using hp = boost::multiprecision::cpp_bin_float_50;

struct HighPrecWald {
  hp delta, se, z, ci_lower, ci_upper, p_value, odds_ratio;
};

// z_{1 - alpha/2} = sqrt(2) * erf_inv(confidence)
inline hp critical_value(const hp& confidence) {
  return boost::multiprecision::sqrt(hp(2)) * boost::math::erf_inv(confidence);
}

inline HighPrecWald highprec_wald(const hp& a, const hp& b, const hp& c, const hp& d,
                                  const hp& crit) {
  using boost::multiprecision::log;
  using boost::multiprecision::sqrt;
  HighPrecWald w;
  w.odds_ratio = (a / b) / (c / d);
  w.delta = log(w.odds_ratio);
  w.se = sqrt(1 / a + 1 / b + 1 / c + 1 / d);
  w.z = w.delta / w.se;
  w.ci_lower = w.delta - crit * w.se;
  w.ci_upper = w.delta + crit * w.se;
  w.p_value = boost::math::erfc(abs(w.z) / sqrt(hp(2)));
  return w;
}

}  // namespace oracle
