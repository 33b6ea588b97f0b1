#pragma once

#include <cmath>

namespace wopt {

// Neumaier compensated accumulator.  Cell sums over a million doubles stay
// within a few ulps of the exact value, which keeps the 1e-12 relative
// integral comparisons meaningful.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }

  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace wopt
