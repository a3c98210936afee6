#pragma once

// Reference solvers over the sample grid. These are deliberately plain O(n^2)
// and brute-force searches; they exist to check the linear-time construction in
// stops.hpp.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "regtv/error.hpp"
#include "regtv/path.hpp"

namespace regtv {

// Absolute slack used when testing the structural inequalities.
inline constexpr double kStructureTolerance = 1e-9;

// Largest TV sum over partitions with exactly k interior knots.
inline double tv_fixed_k(const SampledPath& path, std::size_t k) {
  const std::size_t n = path.size();
  if (k > n - 2) {
    throw Error(ErrorCode::KTooLarge,
                "k = " + std::to_string(k) + " exceeds " + std::to_string(n - 2) + " interior knots");
  }
  constexpr double kNone = -std::numeric_limits<double>::infinity();
  const auto v = path.values();
  // best[i]: largest sum over chains from knot 0 to knot i using `used` interior knots.
  std::vector<double> best(n);
  for (std::size_t i = 0; i < n; ++i) best[i] = std::abs(v[i] - v[0]);
  best[0] = kNone;
  for (std::size_t used = 1; used <= k; ++used) {
    std::vector<double> next(n, kNone);
    for (std::size_t i = used + 1; i < n; ++i) {
      for (std::size_t j = used; j < i; ++j) {
        if (best[j] == kNone) continue;
        next[i] = std::max(next[i], best[j] + std::abs(v[i] - v[j]));
      }
    }
    best = std::move(next);
  }
  return best[n - 1];
}

namespace detail {

// (value, k) ordered lexicographically: ties in value go to the larger partition.
inline bool better(double value, std::size_t k, double best_value, std::size_t best_k) {
  return value > best_value || (value == best_value && k > best_k);
}

inline Partition partition_from_indices(const SampledPath& path,
                                        const std::vector<std::size_t>& indices) {
  Partition p;
  p.interior.reserve(indices.size());
  for (std::size_t i : indices) p.interior.push_back(path.times()[i]);
  return p;
}

}  // namespace detail

// Exact maximizer of sum|df| - lambda*k over subsequences of knots containing
// both endpoints. Among maximizers the largest k wins.
inline PhiResult dp_optimal(const SampledPath& path, double lambda) {
  check_lambda(lambda);
  const std::size_t n = path.size();
  const auto v = path.values();

  struct Cell {
    double value;
    std::size_t k;
    std::size_t prev;
  };
  std::vector<Cell> cell(n);
  cell[0] = {0.0, 0, 0};
  for (std::size_t i = 1; i < n; ++i) {
    Cell best{-std::numeric_limits<double>::infinity(), 0, 0};
    for (std::size_t j = 0; j < i; ++j) {
      const bool interior = j != 0;
      const double value = (interior ? cell[j].value - lambda : cell[j].value) + std::abs(v[i] - v[j]);
      const std::size_t k = cell[j].k + (interior ? 1 : 0);
      if (detail::better(value, k, best.value, best.k)) best = {value, k, j};
    }
    cell[i] = best;
  }

  std::vector<std::size_t> chain;
  for (std::size_t i = cell[n - 1].prev; i != 0; i = cell[i].prev) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());
  return {cell[n - 1].value, detail::partition_from_indices(path, chain), lambda};
}

inline constexpr std::size_t kExhaustiveMaxInterior = 20;

// Brute force over all 2^(n-2) interior subsets. Accumulates the objective in
// the same order as dp_optimal so equal partitions give identical values.
inline PhiResult exhaustive_optimal(const SampledPath& path, double lambda) {
  check_lambda(lambda);
  const std::size_t n = path.size();
  if (n - 2 > kExhaustiveMaxInterior) {
    throw Error(ErrorCode::TooManyPoints,
                std::to_string(n - 2) + " interior knots exceeds " +
                    std::to_string(kExhaustiveMaxInterior));
  }
  const auto v = path.values();

  double best_value = -std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  std::vector<std::size_t> best_chain;
  std::vector<std::size_t> chain;

  // Depth-first over include/exclude decisions for knots 1..n-2.
  auto visit = [&](auto&& self, std::size_t idx, std::size_t last, double value) -> void {
    if (idx == n - 1) {
      const double total =
          (last != 0 ? value - lambda : value) + std::abs(v[n - 1] - v[last]);
      if (detail::better(total, chain.size(), best_value, best_k)) {
        best_value = total;
        best_k = chain.size();
        best_chain = chain;
      }
      return;
    }
    self(self, idx + 1, last, value);
    chain.push_back(idx);
    self(self, idx + 1, idx, (last != 0 ? value - lambda : value) + std::abs(v[idx] - v[last]));
    chain.pop_back();
  };
  visit(visit, 1, 0, 0.0);

  return {best_value, detail::partition_from_indices(path, best_chain), lambda};
}

enum class StructureCondition {
  Alternation,          // consecutive segments are an uptick and a downtick
  InteriorMagnitude,    // |df| >= lambda on segments with both ends interior
  TerminalMagnitude,    // |df| >= lambda/2 on every segment when k >= 1
  ExtremumAttainment,   // partition points attain the local max/min
  EndBand,              // no lambda/2 excursion against the first/last segment
  NoReverseTick,        // an uptick contains no lambda-downtick and vice versa
};

constexpr std::string_view to_string(StructureCondition c) {
  switch (c) {
    case StructureCondition::Alternation: return "alternation";
    case StructureCondition::InteriorMagnitude: return "interior_magnitude";
    case StructureCondition::TerminalMagnitude: return "terminal_magnitude";
    case StructureCondition::ExtremumAttainment: return "extremum_attainment";
    case StructureCondition::EndBand: return "end_band";
    case StructureCondition::NoReverseTick: return "no_reverse_tick";
  }
  return "unknown";
}

struct StructureViolation {
  StructureCondition condition;
  std::size_t index;  // j of the offending point t_j or segment [t_{j-1}, t_j]

  friend bool operator==(const StructureViolation&, const StructureViolation&) = default;
};

struct StructureReport {
  bool alternation_ok = true;
  bool interior_magnitude_ok = true;
  bool terminal_magnitude_ok = true;
  bool extremum_attainment_ok = true;
  bool end_band_ok = true;
  bool no_reverse_tick_ok = true;
  std::vector<StructureViolation> violations;

  bool ok() const noexcept { return violations.empty(); }

  void flag(StructureCondition c, std::size_t j) {
    violations.push_back({c, j});
    switch (c) {
      case StructureCondition::Alternation: alternation_ok = false; break;
      case StructureCondition::InteriorMagnitude: interior_magnitude_ok = false; break;
      case StructureCondition::TerminalMagnitude: terminal_magnitude_ok = false; break;
      case StructureCondition::ExtremumAttainment: extremum_attainment_ok = false; break;
      case StructureCondition::EndBand: end_band_ok = false; break;
      case StructureCondition::NoReverseTick: no_reverse_tick_ok = false; break;
    }
  }
};

// Evaluates the necessary conditions satisfied by an optimal partition of
// maximal size. Interval extrema are taken over grid knots, which is exact for
// the piecewise-linear interpolant.
inline StructureReport check_structure(const SampledPath& path, double lambda,
                                       const Partition& partition) {
  check_lambda(lambda);
  check_partition(path, partition);
  const auto v = path.values();
  const std::size_t k = partition.k();
  constexpr double tol = kStructureTolerance;

  // pts[j] is the knot index of t_j, j = 0..k+1.
  std::vector<std::size_t> pts;
  pts.push_back(0);
  for (double t : partition.interior) {
    const std::size_t idx = path.knot_index(t);
    if (idx == path.size()) {
      throw Error(ErrorCode::PartitionNotOnGrid,
                  "partition point " + std::to_string(t) + " is not a knot");
    }
    pts.push_back(idx);
  }
  pts.push_back(path.size() - 1);

  auto f = [&](std::size_t j) { return v[pts[j]]; };
  auto delta = [&](std::size_t j) { return f(j) - f(j - 1); };
  auto max_on = [&](std::size_t lo, std::size_t hi) {
    double m = v[lo];
    for (std::size_t i = lo; i <= hi; ++i) m = std::max(m, v[i]);
    return m;
  };
  auto min_on = [&](std::size_t lo, std::size_t hi) {
    double m = v[lo];
    for (std::size_t i = lo; i <= hi; ++i) m = std::min(m, v[i]);
    return m;
  };
  // Largest fall (rise when sign < 0) inside knots lo..hi.
  auto largest_reversal = [&](std::size_t lo, std::size_t hi, double sign) {
    double extreme = sign * v[lo];
    double worst = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) {
      extreme = std::max(extreme, sign * v[i]);
      worst = std::max(worst, extreme - sign * v[i]);
    }
    return worst;
  };

  StructureReport report;

  for (std::size_t j = 1; j <= k; ++j) {
    const double left = f(j) - f(j - 1);
    const double right = f(j) - f(j + 1);
    const bool same_sign = (left > tol && right > tol) || (left < -tol && right < -tol);
    if (!same_sign) report.flag(StructureCondition::Alternation, j);
  }

  for (std::size_t j = 1; j <= k + 1; ++j) {
    const double d = delta(j);
    if (d == 0.0) continue;
    const double sign = d > 0 ? 1.0 : -1.0;
    const std::size_t lo = pts[j - 1];
    const std::size_t hi = pts[j];
    bool attained = true;
    if (j - 1 >= 1) {
      // t_{j-1} > a: the segment starts at its own min (uptick) or max (downtick).
      if (sign > 0 && min_on(lo, hi) < f(j - 1) - tol) attained = false;
      if (sign < 0 && max_on(lo, hi) > f(j - 1) + tol) attained = false;
    }
    if (j <= k) {
      // t_j < b: the segment ends at its own max (uptick) or min (downtick), and
      // t_j also dominates the following segment.
      const std::size_t next = pts[j + 1];
      if (sign > 0 && (max_on(lo, hi) > f(j) + tol || max_on(lo, next) > f(j) + tol)) {
        attained = false;
      }
      if (sign < 0 && (min_on(lo, hi) < f(j) - tol || min_on(lo, next) < f(j) - tol)) {
        attained = false;
      }
    }
    if (!attained) report.flag(StructureCondition::ExtremumAttainment, j);
  }

  for (std::size_t j = 2; j <= k; ++j) {
    if (std::abs(delta(j)) < lambda - tol) report.flag(StructureCondition::InteriorMagnitude, j);
  }

  if (k >= 1) {
    for (std::size_t j = 1; j <= k + 1; ++j) {
      if (std::abs(delta(j)) < lambda / 2 - tol) {
        report.flag(StructureCondition::TerminalMagnitude, j);
      }
    }
  }

  {
    const double d = delta(1);
    const double fa = f(0);
    if ((d > 0 && min_on(pts[0], pts[1]) <= fa - lambda / 2 - tol) ||
        (d < 0 && max_on(pts[0], pts[1]) >= fa + lambda / 2 + tol)) {
      report.flag(StructureCondition::EndBand, 1);
    }
    const double e = delta(k + 1);
    const double fb = f(k + 1);
    if ((e > 0 && max_on(pts[k], pts[k + 1]) >= fb + lambda / 2 + tol) ||
        (e < 0 && min_on(pts[k], pts[k + 1]) <= fb - lambda / 2 - tol)) {
      report.flag(StructureCondition::EndBand, k + 1);
    }
  }

  for (std::size_t j = 1; j <= k + 1; ++j) {
    const double d = delta(j);
    if (d == 0.0) continue;
    if (largest_reversal(pts[j - 1], pts[j], d > 0 ? 1.0 : -1.0) >= lambda + tol) {
      report.flag(StructureCondition::NoReverseTick, j);
    }
  }

  return report;
}

}  // namespace regtv
