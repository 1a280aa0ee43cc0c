#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace aobc {

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Compensated sum of `terms` taken in descending magnitude.
inline double sum_descending_magnitude(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end(),
            [](double a, double b) { return std::abs(a) > std::abs(b); });
  CompensatedSum total;
  for (double t : terms) total.add(t);
  return total.value();
}

}  // namespace aobc
