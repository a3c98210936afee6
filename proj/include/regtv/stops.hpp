#pragma once

// Linear-time computation of the regularized total variation via alternating
// drawup/drawdown stopping times.
//
// tau_0 is the first time |f - f(a)| reaches lambda/2. After an upstop the next
// stop is the first time the drawdown from the running max reaches lambda (a
// downstop), and symmetrically after a downstop. m_j is the running extremum
// between consecutive stops; the optimal partition visits exactly these levels.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "regtv/error.hpp"
#include "regtv/path.hpp"

namespace regtv {

enum class StopKind { Upstop, Downstop };

constexpr StopKind opposite(StopKind kind) {
  return kind == StopKind::Upstop ? StopKind::Downstop : StopKind::Upstop;
}

struct Stop {
  double time = 0.0;          // clamped to b when beyond_end
  StopKind kind = StopKind::Upstop;
  bool beyond_end = false;    // the stop would occur after b
  double value = 0.0;         // f(tau ^ b)
};

struct StopTimeTrace {
  double lambda = 0.0;
  double start = 0.0;
  double end = 0.0;
  double start_value = 0.0;
  double end_value = 0.0;
  std::size_t knot_count = 0;

  // tau_0, tau_1, ...; the last entry is the first stop at or beyond b.
  std::vector<Stop> stops;
  // m_0 = f(a), m_1, ..., m_{k'+1}.
  std::vector<double> m_levels;
  int alpha = 0;              // 1 iff tau_0 is an upstop
  std::size_t k_prime = 0;    // max{j : tau_j < b}, or 0
};

// Single forward pass over knots. Feed knots in time order with push(), then
// call finish(). Usable on paths that are never materialized.
class StopScanner {
 public:
  explicit StopScanner(double lambda) : lambda_(lambda) { check_lambda(lambda); }

  void push(double t, double v) {
    if (count_ == 0) {
      start_ = t;
      start_value_ = v;
      run_max_ = run_min_ = v;
    } else {
      advance(t, v);
    }
    prev_t_ = t;
    prev_v_ = v;
    ++count_;
  }

  std::size_t knot_count() const noexcept { return count_; }

  StopTimeTrace finish() const {
    if (count_ < 2) throw Error(ErrorCode::TooShort, "a path needs at least two knots");
    StopTimeTrace trace;
    trace.lambda = lambda_;
    trace.start = start_;
    trace.end = prev_t_;
    trace.start_value = start_value_;
    trace.end_value = prev_v_;
    trace.knot_count = count_;
    trace.stops = stops_;
    trace.m_levels.push_back(start_value_);
    trace.m_levels.insert(trace.m_levels.end(), levels_.begin(), levels_.end());

    const double b = prev_t_;
    const double fb = prev_v_;
    if (stops_.empty()) {
      // The path never leaves the lambda/2 band. The direction of the net move
      // fixes which extremum plays the role of m_1.
      const StopKind kind = fb >= start_value_ ? StopKind::Upstop : StopKind::Downstop;
      trace.stops.push_back({b, kind, true, fb});
      trace.m_levels.push_back(kind == StopKind::Upstop ? run_max_ : run_min_);
      trace.k_prime = 0;
    } else if (stops_.back().time >= b) {
      // Last stop landed exactly on b.
      trace.k_prime = stops_.size() >= 2 ? stops_.size() - 2 : 0;
      if (stops_.size() == 1) trace.m_levels.push_back(extreme_);
    } else {
      trace.stops.push_back({b, opposite(stops_.back().kind), true, fb});
      trace.m_levels.push_back(extreme_);
      trace.k_prime = stops_.size() - 1;
    }
    trace.alpha = trace.stops.front().kind == StopKind::Upstop ? 1 : 0;
    return trace;
  }

 private:
  void record(double tau, StopKind kind, double level, double v) {
    if (!stops_.empty()) levels_.push_back(extreme_);
    stops_.push_back({tau, kind, false, level});
    // The segment ending at v is monotone in the direction of the stop, so v
    // is the extremum of f on [tau, t].
    extreme_ = v;
  }

  // Processes the segment from the previous knot to (t, v).
  void advance(double t, double v) {
    const double tp = prev_t_;
    const double vp = prev_v_;
    if (stops_.empty()) {
      const double up = start_value_ + lambda_ / 2;
      const double down = start_value_ - lambda_ / 2;
      if (v >= up) {
        record(tp + (up - vp) / (v - vp) * (t - tp), StopKind::Upstop, up, v);
      } else if (v <= down) {
        record(tp + (vp - down) / (vp - v) * (t - tp), StopKind::Downstop, down, v);
      } else {
        run_max_ = std::max(run_max_, v);
        run_min_ = std::min(run_min_, v);
      }
      return;
    }
    if (stops_.back().kind == StopKind::Upstop) {
      const double level = extreme_ - lambda_;
      if (v <= level) {
        record(tp + (vp - level) / (vp - v) * (t - tp), StopKind::Downstop, level, v);
      } else if (v >= extreme_) {
        extreme_ = v;
      }
    } else {
      const double level = extreme_ + lambda_;
      if (v >= level) {
        record(tp + (level - vp) / (v - vp) * (t - tp), StopKind::Upstop, level, v);
      } else if (v <= extreme_) {
        extreme_ = v;
      }
    }
  }

  double lambda_;
  std::size_t count_ = 0;
  double start_ = 0.0;
  double start_value_ = 0.0;
  double prev_t_ = 0.0;
  double prev_v_ = 0.0;
  double run_max_ = 0.0;
  double run_min_ = 0.0;
  double extreme_ = 0.0;  // running max after an upstop, running min after a downstop
  std::vector<Stop> stops_;
  std::vector<double> levels_;  // m_1, m_2, ... as each stop closes its interval
};

inline StopTimeTrace scan_stops(const SampledPath& path, double lambda) {
  StopScanner scanner(lambda);
  for (std::size_t i = 0; i < path.size(); ++i) scanner.push(path.times()[i], path.values()[i]);
  return scanner.finish();
}

namespace detail {

inline void check_trace(const StopTimeTrace& trace, const SampledPath& path, double lambda) {
  if (trace.lambda != lambda || trace.knot_count != path.size() || trace.start != path.start() ||
      trace.end != path.end() || trace.start_value != path.front_value() ||
      trace.end_value != path.back_value() || trace.stops.empty() ||
      trace.m_levels.size() != trace.k_prime + 2) {
    throw Error(ErrorCode::TraceMismatch, "trace was not generated from this path and lambda");
  }
}

// Earliest knot in [lo, hi) (or [lo, hi] when closed) whose value is exactly level.
inline std::optional<std::size_t> find_level(const SampledPath& path, double lo, double hi,
                                             bool closed, double level) {
  const auto t = path.times();
  const auto v = path.values();
  auto first = std::lower_bound(t.begin(), t.end(), lo);
  for (auto it = first; it != t.end() && (*it < hi || (closed && *it == hi)); ++it) {
    const auto i = static_cast<std::size_t>(it - t.begin());
    if (v[i] == level) return i;
  }
  return std::nullopt;
}

}  // namespace detail

// Builds the optimal partition of maximal size from the trace: one point per
// completed stop interval, plus one more when the final excursion is worth it.
inline Partition trace_partition(const StopTimeTrace& trace, const SampledPath& path,
                                 double lambda) {
  detail::check_trace(trace, path, lambda);
  Partition partition;
  auto place = [&](double lo, double hi, bool closed, double level) {
    auto idx = detail::find_level(path, lo, hi, closed, level);
    if (!idx) {
      throw Error(ErrorCode::TraceMismatch, "no knot attains level " + std::to_string(level));
    }
    partition.interior.push_back(path.times()[*idx]);
  };

  const std::size_t kp = trace.k_prime;
  const bool any_stop_before_b = !trace.stops.front().beyond_end && trace.stops.front().time < trace.end;
  for (std::size_t j = 1; j <= kp; ++j) {
    place(trace.stops[j - 1].time, trace.stops[j].time, true, trace.m_levels[j]);
  }
  const double last_level = trace.m_levels[kp + 1];
  if (any_stop_before_b && std::abs(last_level - trace.end_value) >= lambda / 2) {
    place(trace.stops[kp].time, trace.end, false, last_level);
  }
  return partition;
}

// Closed-form value of the regularized total variation from the trace alone.
inline double phi_explicit(const StopTimeTrace& trace) {
  const double lambda = trace.lambda;
  const auto& s = trace.stops;
  double value = lambda * static_cast<double>(trace.k_prime);
  value += std::abs(s.front().value - trace.start_value);
  for (std::size_t j = 1; j < s.size(); ++j) {
    const double step = s[j].value - s[j - 1].value;
    value += (j + static_cast<std::size_t>(trace.alpha)) % 2 == 0 ? step : -step;
  }
  const double overshoot = 2 * std::abs(trace.m_levels[trace.k_prime + 1] - trace.end_value) - lambda;
  return value + std::max(0.0, overshoot);
}

inline double phi_explicit(const StopTimeTrace& trace, const SampledPath& path, double lambda) {
  detail::check_trace(trace, path, lambda);
  return phi_explicit(trace);
}

// Signed stop-to-stop increments sum_{j>=1} (-1)^{j+alpha} (f(tau_j ^ b) - f(tau_{j-1} ^ b)).
inline double signed_increment_sum(const StopTimeTrace& trace) {
  const auto& s = trace.stops;
  double sum = 0.0;
  for (std::size_t j = 1; j < s.size(); ++j) {
    const double step = s[j].value - s[j - 1].value;
    sum += (j + static_cast<std::size_t>(trace.alpha)) % 2 == 0 ? step : -step;
  }
  return sum;
}

inline PhiResult phi_fast(const SampledPath& path, double lambda) {
  const StopTimeTrace trace = scan_stops(path, lambda);
  return {phi_explicit(trace, path, lambda), trace_partition(trace, path, lambda), lambda};
}

}  // namespace regtv
