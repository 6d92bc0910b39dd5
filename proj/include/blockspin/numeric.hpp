// Floating-point accumulation helpers shared across the library.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace blockspin {

// Neumaier-compensated accumulator.  The final error is a few ulp of the
// result regardless of how many terms were added, which matters when
// normalizing grids with ~1e8 cells.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Table of log(k!) for k = 0..max_n, built once by cumulative summation.
class LogFactorialTable {
 public:
  explicit LogFactorialTable(int max_n) {
    if (max_n < 0) throw std::invalid_argument("log-factorial table needs max_n >= 0");
    table_.resize(static_cast<std::size_t>(max_n) + 1);
    table_[0] = 0.0;
    for (int k = 1; k <= max_n; ++k) {
      table_[k] = table_[k - 1] + std::log(static_cast<double>(k));
    }
  }

  double log_factorial(int k) const { return table_.at(k); }

  // log of the binomial coefficient C(m, k).  The grouping below is exactly
  // symmetric under k <-> m - k because addition commutes.
  double log_choose(int m, int k) const {
    if (k < 0 || k > m) throw std::out_of_range("binomial index outside [0, m]");
    return table_.at(m) - (table_.at(k) + table_.at(m - k));
  }

 private:
  std::vector<double> table_;
};

}  // namespace blockspin
