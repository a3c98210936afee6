#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "regtv/oracle.hpp"
#include "test_util.hpp"

namespace regtv {
namespace {

// Test-only enumeration over bitmasks of interior knots, scored through
// partition_objective: the largest TV sum over subsets with exactly k points.
double enumerate_tv(const SampledPath& p, std::size_t k) {
  const std::size_t m = p.size() - 2;
  double best = -1;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    Partition part;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1u << i)) part.interior.push_back(p.times()[i + 1]);
    }
    best = std::max(best, partition_objective(p, 0.0, part));
  }
  return best;
}

const SampledPath& zigzag() {
  static const SampledPath p = validate_path({0, 1.0 / 3, 2.0 / 3, 1}, {0, 1, 0, 1});
  return p;
}

TEST(TvFixedK, SmallExamples) {
  auto bump = validate_path({0, 1, 2}, {0, 1, 0});
  EXPECT_EQ(tv_fixed_k(bump, 0), 0.0);
  EXPECT_EQ(tv_fixed_k(bump, 1), 2.0);
  // Either single interior knot of the zigzag yields 1 (enumerated below).
  EXPECT_EQ(enumerate_tv(zigzag(), 1), 1.0);
  EXPECT_EQ(tv_fixed_k(zigzag(), 1), 1.0);
  EXPECT_EQ(tv_fixed_k(zigzag(), 2), 3.0);
}

TEST(TvFixedK, KTooLarge) {
  try {
    tv_fixed_k(zigzag(), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::KTooLarge);
  }
}

TEST(TvFixedK, MatchesEnumerationAndIsMonotone) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = testing::random_walk(rng, 3 + trial % 10);
    double prev = -1;
    for (std::size_t k = 0; k + 2 <= p.size(); ++k) {
      const double tv = tv_fixed_k(p, k);
      EXPECT_NEAR(tv, enumerate_tv(p, k), 1e-12);
      EXPECT_GE(tv, prev - 1e-12);
      prev = tv;
    }
  }
}

TEST(DpOptimal, ConstantPath) {
  auto r = dp_optimal(validate_path({0, 1}, {0, 0}), 0.7);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.partition.k(), 0u);
}

TEST(DpOptimal, Zigzag) {
  auto r = dp_optimal(zigzag(), 0.5);
  EXPECT_EQ(r.value, 2.0);
  ASSERT_EQ(r.partition.k(), 2u);
  EXPECT_EQ(r.partition.interior[0], 1.0 / 3);
  EXPECT_EQ(r.partition.interior[1], 2.0 / 3);

  auto big = dp_optimal(zigzag(), 3.0);
  EXPECT_EQ(big.value, 1.0);
  EXPECT_EQ(big.partition.k(), 0u);
}

TEST(DpOptimal, TiesGoToLargerPartition) {
  // Adding the dip at t=1 changes the value by 2*0.5 - 1 = 0.
  auto p = validate_path({0, 1, 2}, {0, -0.5, 1});
  auto r = dp_optimal(p, 1.0);
  EXPECT_EQ(r.value, 1.0);
  EXPECT_EQ(r.partition.k(), 1u);
  EXPECT_EQ(exhaustive_optimal(p, 1.0).partition.k(), 1u);
}

TEST(DpOptimal, RejectsBadLambda) {
  EXPECT_THROW(dp_optimal(zigzag(), 0.0), Error);
  EXPECT_THROW(dp_optimal(zigzag(), -1.0), Error);
}

TEST(DpOptimal, ResultIsSelfConsistent) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    auto p = testing::random_walk(rng, 2 + trial % 60);
    for (double lambda : {0.1, 0.3, 1.0, 3.0}) {
      auto r = dp_optimal(p, lambda);
      const double recomputed = partition_objective(p, lambda, r.partition);
      EXPECT_NEAR(r.value, recomputed, 1e-12 * std::max(1.0, std::abs(recomputed)));
      EXPECT_GE(r.value, std::abs(p.back_value() - p.front_value()) - 1e-12);
    }
  }
}

TEST(ExhaustiveOptimal, Examples) {
  auto two = validate_path({0, 1}, {0.25, -1});
  auto r = exhaustive_optimal(two, 0.4);
  EXPECT_EQ(r.value, 1.25);
  EXPECT_EQ(r.partition.k(), 0u);
  EXPECT_EQ(exhaustive_optimal(zigzag(), 0.5).value, 2.0);
}

TEST(ExhaustiveOptimal, TooManyPoints) {
  std::mt19937_64 rng(23);
  auto p = testing::random_walk(rng, 23);
  try {
    exhaustive_optimal(p, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooManyPoints);
  }
}

TEST(ExhaustiveOptimal, AgreesWithDpOnRandomTenPointPaths) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> lam(0.05, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    auto p = trial % 3 == 0 ? testing::integer_walk(rng, 10) : testing::random_walk(rng, 10);
    const double lambda = trial % 3 == 0 ? 0.5 * (1 + trial % 5) : lam(rng);
    auto dp = dp_optimal(p, lambda);
    auto ex = exhaustive_optimal(p, lambda);
    EXPECT_NEAR(dp.value, ex.value, 1e-12);
    EXPECT_EQ(dp.partition.k(), ex.partition.k());
  }
}

TEST(DpOptimal, NonincreasingInLambda) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = testing::random_walk(rng, 40);
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda = 0.01; lambda < 5; lambda *= 1.3) {
      const double v = dp_optimal(p, lambda).value;
      EXPECT_LE(v, prev + 1e-12);
      prev = v;
    }
  }
}

TEST(DpOptimal, SmallLambdaApproachesFullVariation) {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = testing::random_walk(rng, 30);
    double tv = 0;
    for (std::size_t i = 1; i < p.size(); ++i) tv += std::abs(p.values()[i] - p.values()[i - 1]);
    const double lambda = 1e-9;
    const double v = dp_optimal(p, lambda).value;
    EXPECT_LE(v, tv + 1e-12);
    EXPECT_GE(v, tv - lambda * static_cast<double>(p.size()) - 1e-12);
  }
}

TEST(DpOptimal, EqualsBestOverFixedK) {
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = testing::random_walk(rng, 3 + trial % 30);
    for (double lambda : {0.1, 0.3, 1.0, 3.0}) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k + 2 <= p.size(); ++k) {
        best = std::max(best, tv_fixed_k(p, k) - lambda * static_cast<double>(k));
      }
      EXPECT_NEAR(dp_optimal(p, lambda).value, best, 1e-12);
    }
  }
}

TEST(DpOptimal, Invariances) {
  std::mt19937_64 rng(28);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = trial % 2 ? testing::random_walk(rng, 30) : testing::integer_walk(rng, 30);
    const double lambda = 0.5 + trial % 4;
    auto base = dp_optimal(p, lambda);

    auto neg = dp_optimal(transform_path(p, Negate{}), lambda);
    EXPECT_EQ(neg.value, base.value);
    EXPECT_EQ(neg.partition, base.partition);

    auto shifted = dp_optimal(transform_path(p, AddConstant{4}), lambda);
    EXPECT_NEAR(shifted.value, base.value, 1e-9);
    if (trial % 2 == 0) {
      EXPECT_EQ(shifted.partition, base.partition);
    }

    auto scaled = dp_optimal(transform_path(p, ScaleValues{2}), 2 * lambda);
    EXPECT_EQ(scaled.value, 2 * base.value);
    EXPECT_EQ(scaled.partition, base.partition);
  }
}

TEST(CheckStructure, OptimalZigzagPasses) {
  auto r = dp_optimal(zigzag(), 0.5);
  auto report = check_structure(zigzag(), 0.5, r.partition);
  EXPECT_TRUE(report.ok());
  EXPECT_TRUE(report.alternation_ok && report.interior_magnitude_ok &&
              report.terminal_magnitude_ok && report.extremum_attainment_ok &&
              report.end_band_ok && report.no_reverse_tick_ok);
}

TEST(CheckStructure, SmallBumpViolatesMagnitude) {
  auto p = validate_path({0, 1.0 / 3, 1}, {0, 0.1, 0});
  auto report = check_structure(p, 1.0, {{1.0 / 3}});
  EXPECT_FALSE(report.terminal_magnitude_ok);
  // With k = 1 no segment has both ends interior.
  EXPECT_TRUE(report.interior_magnitude_ok);
  EXPECT_FALSE(report.ok());
  const auto hit = std::find(report.violations.begin(), report.violations.end(),
                             StructureViolation{StructureCondition::TerminalMagnitude, 1});
  EXPECT_NE(hit, report.violations.end());
}

TEST(CheckStructure, InteriorMagnitudeViolation) {
  // Segment [t_1, t_2] rises by 0.6 < lambda.
  auto p = validate_path({0, 1, 2, 3}, {0, -1, -0.4, -2});
  auto report = check_structure(p, 1.0, {{1, 2}});
  EXPECT_FALSE(report.interior_magnitude_ok);
  EXPECT_TRUE(report.alternation_ok);
}

TEST(CheckStructure, EmptyPartitionIsVacuous) {
  auto p = validate_path({0, 1, 2}, {0, 0.2, 0.3});
  auto report = check_structure(p, 1.0, {});
  EXPECT_TRUE(report.alternation_ok);
  EXPECT_TRUE(report.interior_magnitude_ok);
  EXPECT_TRUE(report.terminal_magnitude_ok);
  EXPECT_TRUE(report.ok());
}

TEST(CheckStructure, DetectsEachCondition) {
  auto p = validate_path({0, 1, 2, 3, 4}, {0, 2, 1, 3, 0});
  // Alternation: [0, 1] and [1, 3] both rise.
  auto alt = check_structure(p, 0.5, {{1, 3}});
  EXPECT_FALSE(alt.alternation_ok);
  // Extremum attainment: t_1 = 2 (value 1) is not the max of [0, 2].
  auto ext = check_structure(p, 0.5, {{2}});
  EXPECT_FALSE(ext.extremum_attainment_ok);
  // Reverse tick: [0, 3] rises by 3 but contains the fall 2 -> 1 of size 1 >= lambda.
  auto rev = check_structure(p, 0.9, {{3}});
  EXPECT_FALSE(rev.no_reverse_tick_ok);
  EXPECT_TRUE(check_structure(p, 1.5, {{3}}).no_reverse_tick_ok);
  // End band: k = 0 on a path that dips by lambda/2 before rising.
  auto dip = validate_path({0, 1, 2}, {0, -0.6, 1});
  EXPECT_FALSE(check_structure(dip, 1.0, {}).end_band_ok);
  EXPECT_TRUE(check_structure(dip, 1.0, {{1}}).ok());
}

TEST(CheckStructure, PartitionNotOnGrid) {
  try {
    check_structure(zigzag(), 0.5, {{0.5}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PartitionNotOnGrid);
  }
}

TEST(CheckStructure, MaxKOptimalPartitionsPass) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + trial % 49;
    auto p = trial % 4 == 0 ? testing::integer_walk(rng, n)
             : trial % 4 == 1 ? testing::smooth_mix(rng, n)
                              : testing::random_walk(rng, n);
    for (double lambda : {0.1, 0.5, 1.0, 3.0}) {
      auto r = dp_optimal(p, lambda);
      auto report = check_structure(p, lambda, r.partition);
      EXPECT_TRUE(report.ok()) << "trial " << trial << " lambda " << lambda << " first violation "
                               << to_string(report.violations.front().condition) << " at "
                               << report.violations.front().index;
    }
  }
}

}  // namespace
}  // namespace regtv
