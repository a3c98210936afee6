#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "regtv/path.hpp"

namespace regtv::testing {

// Random-walk values on irregular increasing times.
inline SampledPath random_walk(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> step(0.0, 1.0);
  std::uniform_real_distribution<double> gap(0.05, 1.0);
  std::vector<double> t(n);
  std::vector<double> v(n);
  t[0] = gap(rng);
  v[0] = step(rng);
  for (std::size_t i = 1; i < n; ++i) {
    t[i] = t[i - 1] + gap(rng);
    v[i] = v[i - 1] + step(rng);
  }
  return validate_path(std::move(t), std::move(v));
}

// Integer-valued walk with flat steps; produces exact ties and exact
// lambda-sized moves for integer and half-integer lambda.
inline SampledPath integer_walk(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> step(-2, 2);
  std::vector<double> t(n);
  std::vector<double> v(n);
  v[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i);
    if (i > 0) v[i] = v[i - 1] + step(rng);
  }
  return validate_path(std::move(t), std::move(v));
}

// A few sinusoids plus noise.
inline SampledPath smooth_mix(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.05);
  const double f1 = 1 + 10 * u(rng);
  const double f2 = 1 + 30 * u(rng);
  const double a1 = 2 * u(rng);
  const double a2 = u(rng);
  std::vector<double> t(n);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    v[i] = a1 * std::sin(f1 * t[i]) + a2 * std::cos(f2 * t[i]) + noise(rng);
  }
  return validate_path(std::move(t), std::move(v));
}

}  // namespace regtv::testing
