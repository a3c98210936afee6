#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "regtv/error.hpp"
#include "regtv/path.hpp"
#include "regtv/stops.hpp"

namespace regtv {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for one member of a family (path index, ensemble id, ...). Depends only
// on the pair, so per-path streams do not depend on how work is scheduled.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return mix64(parent ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// Calls visit(t_i, W_{t_i}) for i = 0..n_steps on the uniform grid over
// [0, horizon], W_0 = 0. The Gaussian stream is mt19937_64 through Boost's
// ziggurat normal sampler, which is the same on every platform.
template <class Visit>
void walk_brownian(std::size_t n_steps, double horizon, std::uint64_t seed, Visit&& visit) {
  if (n_steps < 1 || !std::isfinite(horizon) || !(horizon > 0)) {
    throw Error(ErrorCode::InvalidParameter, "need n_steps >= 1 and horizon > 0");
  }
  std::mt19937_64 engine(seed);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(horizon / static_cast<double>(n_steps));
  const double n = static_cast<double>(n_steps);
  double w = 0.0;
  visit(0.0, w);
  for (std::size_t i = 1; i <= n_steps; ++i) {
    w += sd * normal(engine);
    visit(horizon * (static_cast<double>(i) / n), w);
  }
}

inline SampledPath sample_brownian(std::size_t n_steps, double horizon, std::uint64_t seed) {
  std::vector<double> times;
  std::vector<double> values;
  times.reserve(n_steps + 1);
  values.reserve(n_steps + 1);
  walk_brownian(n_steps, horizon, seed, [&](double t, double w) {
    times.push_back(t);
    values.push_back(w);
  });
  return SampledPath::validate(std::move(times), std::move(values));
}

// Stop-time trace of a Brownian sample without materializing the path.
// Identical to scan_stops(sample_brownian(n_steps, horizon, seed), lambda).
inline StopTimeTrace brownian_trace(std::size_t n_steps, double horizon, std::uint64_t seed,
                                    double lambda) {
  StopScanner scanner(lambda);
  walk_brownian(n_steps, horizon, seed, [&](double t, double w) { scanner.push(t, w); });
  return scanner.finish();
}

}  // namespace regtv
