#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace regtv::stats {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;      // sample standard deviation (n - 1 denominator)
  double stderr_ = 0.0; // sd / sqrt(n)
};

// Two-pass mean and variance, summed in index order.
inline Moments moments(std::span<const double> xs) {
  Moments m;
  m.n = xs.size();
  if (m.n == 0) return m;
  CompensatedSum sum;
  for (double x : xs) sum.add(x);
  m.mean = sum.value() / static_cast<double>(m.n);
  if (m.n < 2) return m;
  CompensatedSum sq;
  for (double x : xs) sq.add((x - m.mean) * (x - m.mean));
  m.sd = std::sqrt(sq.value() / static_cast<double>(m.n - 1));
  m.stderr_ = m.sd / std::sqrt(static_cast<double>(m.n));
  return m;
}

// Two-sample Kolmogorov-Smirnov statistic sup |F_x - F_y|.
inline double ks_statistic(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

// Asymptotic critical value of the two-sample statistic at level alpha:
// sqrt(-ln(alpha/2)/2) * sqrt((n+m)/(n m)).
inline double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2));
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

}  // namespace regtv::stats
