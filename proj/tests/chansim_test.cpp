#include "survmap/chansim.hpp"

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <set>

#include "survmap/errors.hpp"

namespace survmap {
namespace {

TEST(Seeds, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL}) {
    for (std::uint64_t r = 0; r < 1000; ++r) seen.insert(derive_seed(seed, r));
  }
  EXPECT_EQ(seen.size(), 3000u);
  EXPECT_NE(mix64(0), 0u);
}

TEST(RandomStream, UniformInUnitInterval) {
  RandomStream rng(5);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
}

TEST(Gilbert, MappingFromNetworkParams) {
  const auto g = gilbert_from_network_params(network_params_from_per(0.01, 2.0));
  EXPECT_DOUBLE_EQ(g.to_good, 0.5);
  EXPECT_NEAR(g.to_bad, 1.0 / 198.0, 1e-18);
  EXPECT_NEAR(g.loss_ratio(), 0.01, 1e-16);
  const auto back = network_params_from_gilbert(g);
  EXPECT_DOUBLE_EQ(back.down_exit(), 0.5);
  EXPECT_THROW(network_params_from_gilbert({0.0, 0.5}), InvalidInput);
  EXPECT_THROW(GilbertChannel({0.1, 1.5}, 1), InvalidInput);
}

TEST(Gilbert, AlternatesWhenBothTransitionsAreCertain) {
  const auto trace = generate({1.0, 1.0}, 100, 9, StartState::up);
  for (std::size_t i = 0; i < trace.size(); ++i) EXPECT_EQ(trace[i], i % 2 == 0 ? 1 : 0);
}

TEST(Gilbert, CertainRecoveryGivesSingleCycleBursts) {
  const auto stats = run_stats(generate({0.3, 1.0}, 100000, 11));
  ASSERT_FALSE(stats.down_runs.empty());
  for (auto k : stats.down_runs) ASSERT_EQ(k, 1u);
}

TEST(Gilbert, Deterministic) {
  const GilbertParams g{0.01, 0.4};
  EXPECT_EQ(generate(g, 50000, 77), generate(g, 50000, 77));
  EXPECT_NE(generate(g, 50000, 77), generate(g, 50000, 78));
  EXPECT_EQ(bernoulli(0.1, 1000, 3), bernoulli(0.1, 1000, 3));
}

TEST(Gilbert, LossRatioAndBurstLength) {
  const auto params = network_params_from_per(0.05, 4.0);
  const auto stats = run_stats(generate(gilbert_from_network_params(params), 4'000'000, 21));
  EXPECT_NEAR(stats.per, 0.05, 0.05 * 0.05);
  EXPECT_NEAR(*stats.mean_down, 4.0, 4.0 * 0.02);
  EXPECT_NEAR(*stats.mean_up, params.mean_up(), params.mean_up() * 0.02);
}

// Down-run lengths of the simple Gilbert channel are geometric with
// success probability 1/tau.
class GeometricBursts : public ::testing::TestWithParam<double> {};

TEST_P(GeometricBursts, ChiSquareGoodnessOfFit) {
  const double tau = GetParam();
  const GilbertParams g{0.2, 1.0 / tau};
  constexpr std::uint64_t kRuns = 1'000'000;

  GilbertChannel channel(g, 1000 + static_cast<std::uint64_t>(tau * 10), StartState::up);
  std::map<std::uint64_t, std::uint64_t> counts;
  std::uint64_t runs = 0;
  std::uint64_t current = 0;
  while (runs < kRuns) {
    if (channel.next() == 0) {
      ++current;
    } else if (current > 0) {
      ++counts[current];
      ++runs;
      current = 0;
    }
  }

  const double q = 1.0 / tau;
  double chi2 = 0.0;
  int bins = 0;
  double tail_prob = 1.0;
  std::uint64_t tail_count = kRuns;
  for (std::uint64_t k = 1;; ++k) {
    const double prob = std::pow(1.0 - q, static_cast<double>(k - 1)) * q;
    const double expected = prob * kRuns;
    if (tail_prob * kRuns - expected < 5.0 || expected < 5.0) break;
    const auto observed = static_cast<double>(counts[k]);
    chi2 += (observed - expected) * (observed - expected) / expected;
    tail_prob -= prob;
    tail_count -= counts[k];
    ++bins;
  }
  const double tail_expected = tail_prob * kRuns;
  chi2 += (static_cast<double>(tail_count) - tail_expected) * (static_cast<double>(tail_count) - tail_expected) /
          tail_expected;
  ++bins;

  const boost::math::chi_squared dist(bins - 1);
  const double p_value = boost::math::cdf(boost::math::complement(dist, chi2));
  EXPECT_GT(p_value, 0.01) << "chi2=" << chi2 << " bins=" << bins;
}

INSTANTIATE_TEST_SUITE_P(BurstLengths, GeometricBursts, ::testing::Values(1.5, 2.0, 5.0));

TEST(Bernoulli, Statistics) {
  const auto stats = run_stats(bernoulli(0.1, 2'000'000, 4));
  EXPECT_NEAR(stats.per, 0.1, 0.002);
  EXPECT_NEAR(*stats.mean_down, 1.0 / 0.9, 0.01);
  EXPECT_THROW(bernoulli(1.0, 10, 1), InvalidInput);
  EXPECT_THROW(bernoulli(0.1, 0, 1), InvalidInput);
}

TEST(Bernoulli, SurvivalLevelsWithinStatisticalError) {
  for (int n : {0, 1, 2}) {
    const auto r = monte_carlo_validate_independent(0.03, n, 1'000'000, 10, 2024);
    EXPECT_NEAR(r.mean_unavailability, std::pow(0.03, n + 1), 4.0 * r.stderr_availability) << "N_sv=" << n;
  }
}

TEST(MonteCarlo, IndependentOfThreadCount) {
  const auto params = network_params_from_per(0.02, 3.0);
  const auto one = monte_carlo_validate(params, 2, 50000, 6, 99, {1});
  const auto many = monte_carlo_validate(params, 2, 50000, 6, 99, {4});
  EXPECT_EQ(one.mean_availability, many.mean_availability);
  EXPECT_EQ(one.stderr_availability, many.stderr_availability);
  EXPECT_EQ(one.mean_reliability, many.mean_reliability);
  EXPECT_EQ(one.failure_event_count, many.failure_event_count);
}

TEST(MonteCarlo, StreamingMatchesMaterializedTraces) {
  const auto params = network_params_from_per(0.02, 3.0);
  const auto gilbert = gilbert_from_network_params(params);
  const auto mc = monte_carlo_validate(params, 1, 20000, 3, 5, {1});
  double availability = 0.0;
  for (std::uint64_t r = 0; r < 3; ++r) {
    availability += app_metrics_from_trace(generate(gilbert, 20000, derive_seed(5, r)), 1).app_availability;
  }
  EXPECT_DOUBLE_EQ(mc.mean_availability, availability / 3.0);
}

TEST(MonteCarlo, ZeroSurvivalMatchesNetworkLevel) {
  const auto r = monte_carlo_validate(network_params_from_per(0.05, 2.0), 0, 200000, 4, 8);
  EXPECT_EQ(r.mean_availability, r.mean_network_availability);
  EXPECT_NEAR(1.0 - r.mean_availability, 0.05, 0.005);
}

TEST(MonteCarlo, AgreesWithClosedForm) {
  const auto params = network_params_from_per(0.03, 2.41);
  const auto r = monte_carlo_validate(params, 2, 1'000'000, 8, 13);
  const double expected = 1.0 - app_availability(params, 2);
  EXPECT_NEAR(1.0 - r.mean_availability, expected, 0.05 * expected);
  ASSERT_TRUE(r.mean_reliability.has_value());
  EXPECT_NEAR(*r.mean_reliability, app_reliability(params, 2).cycles(), 0.05 * app_reliability(params, 2).cycles());
}

TEST(MonteCarlo, BurstyChannelLessAvailableThanIndependent) {
  const auto bursty = monte_carlo_validate(network_params_from_per(0.03, 5.0), 2, 500000, 4, 1);
  const auto independent = monte_carlo_validate_independent(0.03, 2, 500000, 4, 1);
  EXPECT_LT(bursty.mean_availability, independent.mean_availability);
}

TEST(MonteCarlo, RejectsTinyRuns) {
  const auto params = network_params_from_per(0.03, 5.0);
  EXPECT_THROW(monte_carlo_validate(params, 1, 9999, 4, 1), InvalidInput);
  EXPECT_THROW(monte_carlo_validate(params, 1, 10000, 1, 1), InvalidInput);
  EXPECT_THROW(monte_carlo_validate(params, -1, 10000, 2, 1), InvalidInput);
}

TEST(MonteCarlo, CountsUnboundedReplications) {
  const auto r = monte_carlo_validate(network_params_from_per(0.1, 1.0), 1, 10000, 3, 1);
  EXPECT_EQ(r.unbounded_replications, 3u);
  EXPECT_FALSE(r.mean_reliability.has_value());
  EXPECT_EQ(r.mean_availability, 1.0);
}

}  // namespace
}  // namespace survmap
