#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace causalframe::detail {

// Neumaier compensated summation. Results depend only on the order values
// are added, so a fixed input order gives run-to-run identical totals.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline constexpr int kMachineDigits = 12;

// Machine-output rendering: 12 significant digits, "%g" style.
inline std::string format_number(double x, int digits = kMachineDigits) {
  if (x == 0.0) return "0";  // folds -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// Rounds to the value that format_number would print, so JSON serializers
// that emit shortest round-trip text produce the same digits.
inline double round_significant(double x, int digits = kMachineDigits) {
  return std::strtod(format_number(x, digits).c_str(), nullptr);
}

}  // namespace causalframe::detail
