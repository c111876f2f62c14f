#pragma once

#include <cmath>

namespace bankembed::detail {

// Relative loss change below tolerance, five iterations in a row.
class EarlyStop {
 public:
  explicit EarlyStop(double tolerance) : tolerance_(tolerance) {}

  bool update(double loss) {
    if (have_previous_) {
      const double denom = std::max(std::abs(previous_), 1e-12);
      if (std::abs(loss - previous_) / denom < tolerance_) {
        ++streak_;
      } else {
        streak_ = 0;
      }
    }
    previous_ = loss;
    have_previous_ = true;
    return streak_ >= 5;
  }

 private:
  double tolerance_;
  double previous_ = 0.0;
  bool have_previous_ = false;
  int streak_ = 0;
};

}  // namespace bankembed::detail
