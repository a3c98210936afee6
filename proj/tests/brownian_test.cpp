#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "regtv/brownian.hpp"
#include "regtv/oracle.hpp"
#include "regtv/stats.hpp"

namespace regtv {
namespace {

TEST(DeriveSeed, DistinctAndStable) {
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 1));
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_NE(derive_seed(0, 0), 0u);
}

TEST(SampleBrownian, GridAndDeterminism) {
  auto a = sample_brownian(1000, 2.0, 11);
  auto b = sample_brownian(1000, 2.0, 11);
  auto c = sample_brownian(1000, 2.0, 12);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == c);
  ASSERT_EQ(a.size(), 1001u);
  EXPECT_EQ(a.start(), 0.0);
  EXPECT_EQ(a.end(), 2.0);
  EXPECT_EQ(a.front_value(), 0.0);
  EXPECT_DOUBLE_EQ(a.times()[500], 1.0);
}

TEST(SampleBrownian, RejectsBadArguments) {
  EXPECT_THROW(sample_brownian(0, 1.0, 1), Error);
  EXPECT_THROW(sample_brownian(10, 0.0, 1), Error);
  EXPECT_THROW(sample_brownian(10, -1.0, 1), Error);
}

TEST(SampleBrownian, EndpointLaw) {
  // W_b ~ N(0, b): check mean and variance over many seeds.
  const double b = 3.0;
  std::vector<double> end;
  std::vector<double> sq;
  for (std::uint64_t s = 0; s < 20000; ++s) {
    const double w = sample_brownian(16, b, derive_seed(99, s)).back_value();
    end.push_back(w);
    sq.push_back(w * w);
  }
  const auto m = stats::moments(end);
  const auto v = stats::moments(sq);
  EXPECT_LT(std::abs(m.mean), 4 * m.stderr_);
  EXPECT_LT(std::abs(v.mean - b), 4 * v.stderr_);
}

TEST(SampleBrownian, IncrementsIndependentOfResolution) {
  // Quadratic variation over [0, b] approaches b.
  auto p = sample_brownian(200000, 2.0, 5);
  double qv = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double d = p.values()[i] - p.values()[i - 1];
    qv += d * d;
  }
  EXPECT_NEAR(qv, 2.0, 0.05);
}

TEST(BrownianTrace, MatchesMaterializedPath) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto path = sample_brownian(5000, 1.5, s);
    auto streamed = brownian_trace(5000, 1.5, s, 0.3);
    auto direct = scan_stops(path, 0.3);
    EXPECT_EQ(phi_explicit(streamed), phi_explicit(direct));
    EXPECT_EQ(streamed.k_prime, direct.k_prime);
    ASSERT_EQ(streamed.stops.size(), direct.stops.size());
    for (std::size_t j = 0; j < direct.stops.size(); ++j) {
      EXPECT_EQ(streamed.stops[j].time, direct.stops[j].time);
    }
  }
}

TEST(BrownianTrace, FastAgreesWithDpOnSamples) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto path = sample_brownian(800, 1.0, 1000 + s);
    for (double lambda : {0.1, 0.5}) {
      EXPECT_NEAR(phi_fast(path, lambda).value, dp_optimal(path, lambda).value, 1e-9);
    }
  }
}

TEST(Stats, MomentsAndCompensatedSum) {
  const std::vector<double> x{1, 2, 3, 4};
  const auto m = stats::moments(x);
  EXPECT_EQ(m.n, 4u);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.sd, std::sqrt(5.0 / 3), 1e-15);
  EXPECT_NEAR(m.stderr_, std::sqrt(5.0 / 3) / 2, 1e-15);
}

TEST(Stats, KsStatistic) {
  EXPECT_EQ(stats::ks_statistic({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_EQ(stats::ks_statistic({1, 2, 3}, {4, 5, 6}), 1.0);
  EXPECT_NEAR(stats::ks_statistic({1, 2, 3, 4}, {3, 4, 5, 6}), 0.5, 1e-15);
  // Ties across samples are handled as a joint step.
  EXPECT_NEAR(stats::ks_statistic({1, 1, 2}, {1, 2, 2}), 1.0 / 3, 1e-15);
}

TEST(Stats, KsCriticalValue) {
  // c(0.01) = sqrt(-ln(0.005) / 2) ~= 1.6276
  EXPECT_NEAR(stats::ks_critical_value(100, 100, 0.01), 1.62762 * std::sqrt(0.02), 1e-4);
}

}  // namespace
}  // namespace regtv
