#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "regtv/error.hpp"

namespace regtv {

// A sampled signal on [a, b]. The signal is the piecewise-linear interpolant of
// (times, values). Instances are immutable once constructed.
class SampledPath {
 public:
  static SampledPath validate(std::vector<double> times, std::vector<double> values) {
    if (times.size() != values.size()) {
      throw Error(ErrorCode::LengthMismatch, "times has " + std::to_string(times.size()) +
                                                 " entries, values has " +
                                                 std::to_string(values.size()));
    }
    if (times.size() < 2) {
      throw Error(ErrorCode::TooShort, "a path needs at least two knots");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (!std::isfinite(times[i]) || !std::isfinite(values[i])) {
        throw Error(ErrorCode::NonFiniteValue, "knot " + std::to_string(i) + " is not finite");
      }
      if (i > 0 && !(times[i] > times[i - 1])) {
        throw Error(ErrorCode::NonMonotoneTimes,
                    "time at knot " + std::to_string(i) + " does not exceed its predecessor");
      }
    }
    return SampledPath(std::move(times), std::move(values));
  }

  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return times_.size(); }

  double start() const noexcept { return times_.front(); }
  double end() const noexcept { return times_.back(); }
  double front_value() const noexcept { return values_.front(); }
  double back_value() const noexcept { return values_.back(); }

  // Evaluates the interpolant. Knot times return the stored value exactly.
  double value_at(double t) const {
    if (t < start() || t > end()) {
      throw Error(ErrorCode::OutOfRange, "time " + std::to_string(t) + " outside the path");
    }
    return interpolate(times_, values_, t);
  }

  // Index of the knot whose time equals t exactly, or size() if none.
  std::size_t knot_index(double t) const noexcept {
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it != times_.end() && *it == t) return static_cast<std::size_t>(it - times_.begin());
    return size();
  }

  friend bool operator==(const SampledPath& lhs, const SampledPath& rhs) {
    return lhs.times_ == rhs.times_ && lhs.values_ == rhs.values_;
  }

 private:
  struct Knots {
    std::vector<double> times;
    std::vector<double> values;
  };

  SampledPath(std::vector<double> times, std::vector<double> values)
      : times_(std::move(times)), values_(std::move(values)) {}

  static double interpolate(std::span<const double> times, std::span<const double> values,
                            double t) {
    auto it = std::lower_bound(times.begin(), times.end(), t);
    auto i = static_cast<std::size_t>(it - times.begin());
    if (times[i] == t) return values[i];
    const double t0 = times[i - 1];
    const double t1 = times[i];
    const double w = (t - t0) / (t1 - t0);
    return values[i - 1] + w * (values[i] - values[i - 1]);
  }

  // Sub-paths keep a handle on the knots they were cut from so that nested
  // restrictions interpolate from the same segment as a direct restriction.
  std::shared_ptr<const Knots> origin() const {
    if (origin_) return origin_;
    return std::make_shared<const Knots>(Knots{times_, values_});
  }

  friend SampledPath restrict_path(const SampledPath& path, double a, double b);

  std::vector<double> times_;
  std::vector<double> values_;
  std::shared_ptr<const Knots> origin_;
};

inline SampledPath validate_path(std::vector<double> times, std::vector<double> values) {
  return SampledPath::validate(std::move(times), std::move(values));
}

// Sub-path on [a, b]. Endpoints inside a segment become interpolated knots.
inline SampledPath restrict_path(const SampledPath& path, double a, double b) {
  if (!(a < b) || a < path.start() || b > path.end()) {
    throw Error(ErrorCode::OutOfRange, "restriction [" + std::to_string(a) + ", " +
                                           std::to_string(b) + "] not inside the path");
  }
  auto origin = path.origin();
  const auto& t = origin->times;
  const auto& v = origin->values;

  std::vector<double> times;
  std::vector<double> values;
  times.push_back(a);
  values.push_back(SampledPath::interpolate(t, v, a));
  auto first = std::upper_bound(t.begin(), t.end(), a);
  auto last = std::lower_bound(t.begin(), t.end(), b);
  for (auto it = first; it < last; ++it) {
    auto i = static_cast<std::size_t>(it - t.begin());
    times.push_back(t[i]);
    values.push_back(v[i]);
  }
  times.push_back(b);
  values.push_back(SampledPath::interpolate(t, v, b));

  SampledPath out(std::move(times), std::move(values));
  out.origin_ = std::move(origin);
  return out;
}

struct Negate {};
struct AddConstant {
  double c;
};
struct ScaleValues {
  double c;
};
// Brownian rescaling: t -> t / mu, v -> v / sqrt(mu).
struct TimeScale {
  double mu;
};
using PathTransform = std::variant<Negate, AddConstant, ScaleValues, TimeScale>;

inline SampledPath transform_path(const SampledPath& path, const PathTransform& op) {
  std::vector<double> times(path.times().begin(), path.times().end());
  std::vector<double> values(path.values().begin(), path.values().end());
  struct Visitor {
    std::vector<double>& times;
    std::vector<double>& values;
    void operator()(Negate) const {
      for (double& v : values) v = -v;
    }
    void operator()(AddConstant op) const {
      if (!std::isfinite(op.c)) throw Error(ErrorCode::InvalidParameter, "constant not finite");
      for (double& v : values) v += op.c;
    }
    void operator()(ScaleValues op) const {
      if (!std::isfinite(op.c) || !(op.c > 0)) {
        throw Error(ErrorCode::InvalidParameter, "value scale must be positive and finite");
      }
      for (double& v : values) v *= op.c;
    }
    void operator()(TimeScale op) const {
      if (!std::isfinite(op.mu) || !(op.mu > 0)) {
        throw Error(ErrorCode::InvalidParameter, "time scale must be positive and finite");
      }
      const double root = std::sqrt(op.mu);
      for (double& t : times) t /= op.mu;
      for (double& v : values) v /= root;
    }
  };
  std::visit(Visitor{times, values}, op);
  return SampledPath::validate(std::move(times), std::move(values));
}

// Interior points of a partition a = t_0 < t_1 < ... < t_k < t_{k+1} = b.
struct Partition {
  std::vector<double> interior;

  std::size_t k() const noexcept { return interior.size(); }

  friend bool operator==(const Partition&, const Partition&) = default;
};

inline void check_partition(const SampledPath& path, const Partition& partition) {
  double prev = path.start();
  for (double t : partition.interior) {
    if (!(t > prev) || !(t < path.end())) {
      throw Error(ErrorCode::OutOfRange,
                  "partition point " + std::to_string(t) + " out of order or outside (a, b)");
    }
    prev = t;
  }
}

// Sum of |increments| over the partition minus lambda times its size.
inline double partition_objective(const SampledPath& path, double lambda,
                                  const Partition& partition) {
  check_partition(path, partition);
  double sum = 0.0;
  double prev = path.front_value();
  for (double t : partition.interior) {
    const double cur = path.value_at(t);
    sum += std::abs(cur - prev);
    prev = cur;
  }
  sum += std::abs(path.back_value() - prev);
  return sum - lambda * static_cast<double>(partition.k());
}

struct PhiResult {
  double value = 0.0;
  Partition partition;
  double lambda = 0.0;
};

inline void check_lambda(double lambda) {
  if (!std::isfinite(lambda) || !(lambda > 0)) {
    throw Error(ErrorCode::InvalidParameter, "lambda must be positive and finite");
  }
}

}  // namespace regtv
