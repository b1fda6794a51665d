#include "survmap/trace.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "survmap/errors.hpp"

namespace survmap {
namespace {

using Bits = std::vector<BinaryTrace::Bit>;

BinaryTrace make(Bits bits, std::optional<Seconds> period = std::nullopt) {
  return BinaryTrace(std::move(bits), period);
}

Bits bits_of(const BinaryTrace& t) { return Bits(t.bits().begin(), t.bits().end()); }

// Reference filter: walk the trace with a survival counter.
Bits reference_filter(const Bits& in, int nsv, bool assume_up = true) {
  Bits out;
  bool after_up = assume_up;
  int depth = 0;
  for (const auto b : in) {
    if (b == 1) {
      depth = 0;
      after_up = true;
      out.push_back(1);
    } else {
      ++depth;
      out.push_back(after_up && depth <= nsv ? 1 : 0);
    }
  }
  return out;
}

Bits random_bits(std::mt19937_64& rng, std::size_t n) {
  // Mix of burst lengths: alternate runs with geometric-ish lengths.
  std::uniform_int_distribution<int> len(1, 8);
  std::bernoulli_distribution start(0.5);
  Bits out;
  BinaryTrace::Bit b = start(rng) ? 1 : 0;
  while (out.size() < n) {
    out.insert(out.end(), static_cast<std::size_t>(len(rng)), b);
    b ^= 1;
  }
  out.resize(n);
  return out;
}

TEST(BinaryTrace, Validates) {
  EXPECT_THROW(make({}), InvalidInput);
  EXPECT_THROW(make({1, 2}), InvalidInput);
  EXPECT_THROW(make({1}, 0.0), InvalidInput);
  EXPECT_EQ(make({1, 0}).size(), 2u);
}

TEST(RunLength, EncodeDecode) {
  const Bits bits{1, 1, 0, 1, 0, 0, 1};
  const auto runs = run_length_encode(bits);
  EXPECT_EQ(runs, (std::vector<survmap::Run>{{1, 2}, {0, 1}, {1, 1}, {0, 2}, {1, 1}}));
  EXPECT_EQ(run_length_decode(runs), bits);
}

TEST(RunLength, RoundTripProperty) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> n(1, 500);
  for (int i = 0; i < 500; ++i) {
    const auto bits = random_bits(rng, n(rng));
    const auto runs = run_length_encode(bits);
    EXPECT_EQ(run_length_decode(runs), bits);
    for (std::size_t k = 1; k < runs.size(); ++k) EXPECT_NE(runs[k].bit, runs[k - 1].bit);
  }
}

TEST(RunStats, HandExample) {
  const auto s = run_stats(make({1, 1, 0, 1, 0, 0, 1}));
  EXPECT_EQ(s.n_total, 7u);
  EXPECT_EQ(s.n_failed, 3u);
  EXPECT_DOUBLE_EQ(s.per, 3.0 / 7.0);
  EXPECT_EQ(s.down_runs, (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(s.up_runs, (std::vector<std::uint64_t>{2, 1, 1}));
  EXPECT_DOUBLE_EQ(*s.mean_down, 1.5);
  EXPECT_DOUBLE_EQ(*s.mean_up, 4.0 / 3.0);
}

TEST(RunStats, DegenerateTraces) {
  const auto ones = run_stats(make({1, 1, 1}));
  EXPECT_EQ(ones.per, 0.0);
  EXPECT_FALSE(ones.mean_down.has_value());
  EXPECT_EQ(*ones.mean_up, 3.0);
  const auto zeros = run_stats(make({0, 0}));
  EXPECT_EQ(zeros.per, 1.0);
  EXPECT_FALSE(zeros.mean_up.has_value());
}

TEST(RunStats, StrictModeDropsBoundaryRuns) {
  RunOptions strict;
  strict.include_boundary_runs = false;
  const auto s = run_stats(make({0, 0, 1, 1, 1, 0, 1, 0, 0, 0}), strict);
  EXPECT_EQ(s.down_runs, (std::vector<std::uint64_t>{1}));
  EXPECT_EQ(s.up_runs, (std::vector<std::uint64_t>{3, 1}));
  EXPECT_EQ(s.n_failed, 6u);
  EXPECT_FALSE(run_stats(make({1, 1}), strict).mean_up.has_value());
}

TEST(RunStats, RunsPartitionTheTrace) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto s = run_stats(make(random_bits(rng, 1 + i * 7)));
    std::uint64_t sum = 0;
    for (auto r : s.up_runs) sum += r;
    std::uint64_t down = 0;
    for (auto r : s.down_runs) down += r;
    EXPECT_EQ(sum + down, s.n_total);
    EXPECT_EQ(down, s.n_failed);
    EXPECT_EQ(s.per, static_cast<double>(s.n_failed) / static_cast<double>(s.n_total));
  }
}

TEST(SurvivalFilter, Examples) {
  EXPECT_EQ(bits_of(survival_filter(make({1, 0, 1}), 1)), (Bits{1, 1, 1}));
  EXPECT_EQ(bits_of(survival_filter(make({1, 0, 0, 0, 1}), 1)), (Bits{1, 1, 0, 0, 1}));
  const auto t = make({0, 1, 0, 0, 1, 0});
  EXPECT_EQ(survival_filter(t, 0), t);
}

TEST(SurvivalFilter, LeadingBurst) {
  const auto t = make({0, 0, 1, 0, 0});
  EXPECT_EQ(bits_of(survival_filter(t, 1)), (Bits{1, 0, 1, 1, 0}));
  FilterOptions literal;
  literal.assume_up_before_start = false;
  EXPECT_EQ(bits_of(survival_filter(t, 1, literal)), (Bits{0, 0, 1, 1, 0}));
}

TEST(SurvivalFilter, KeepsCyclePeriod) {
  EXPECT_EQ(survival_filter(make({1, 0}, 2e-3), 1).cycle_period(), 2e-3);
}

TEST(SurvivalFilter, MatchesReferenceStateMachine) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> n(1, 2000);
  for (int i = 0; i < 2000; ++i) {
    const auto bits = random_bits(rng, n(rng));
    const int nsv = i % 6;
    const bool assume_up = i % 7 != 0;
    FilterOptions options;
    options.assume_up_before_start = assume_up;
    ASSERT_EQ(bits_of(survival_filter(make(bits), nsv, options)), reference_filter(bits, nsv, assume_up));
  }
}

TEST(SurvivalFilter, DownRunsShrinkByTheSurvivalTime) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 300; ++i) {
    const auto trace = make(random_bits(rng, 50 + i));
    const int nsv = i % 6;
    std::vector<std::uint64_t> expected;
    for (auto k : run_stats(trace).down_runs) {
      if (k > static_cast<std::uint64_t>(nsv)) expected.push_back(k - nsv);
    }
    auto got = run_stats(survival_filter(trace, nsv)).down_runs;
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, expected);

    double previous = -1.0;
    for (int m = 0; m < 6; ++m) {
      const double ones = 1.0 - run_stats(survival_filter(trace, m)).per;
      EXPECT_GE(ones, previous);
      previous = ones;
    }
  }
}

TEST(SurvivalFilter, SurvivableTraceBecomesAllOnes) {
  const auto filtered = survival_filter(make({1, 0, 0, 1, 0, 1, 0, 0, 0, 1}), 3);
  EXPECT_EQ(run_stats(filtered).n_failed, 0u);
}

TEST(AppMetrics, NoFailureIsUnbounded) {
  const auto r = app_metrics_from_trace(make({1, 0, 1, 1}), 1);
  EXPECT_EQ(r.app_availability, 1.0);
  EXPECT_EQ(r.app_reliability, Reliability::unbounded());
  EXPECT_EQ(r.transition_rate, 0.0);
  EXPECT_FALSE(r.app_mean_downtime.has_value());
  EXPECT_DOUBLE_EQ(r.network_availability, 0.75);
}

TEST(AppMetrics, HandExample) {
  const auto r = app_metrics_from_trace(make({1, 0, 0, 1}), 1);
  EXPECT_DOUBLE_EQ(r.app_availability, 0.75);
  EXPECT_EQ(*r.app_mean_downtime, 1.0);
  EXPECT_DOUBLE_EQ(r.app_reliability.cycles(), 1.5);
  EXPECT_DOUBLE_EQ(r.transition_rate, 0.25);
  EXPECT_DOUBLE_EQ(r.network_availability, 0.5);
  EXPECT_EQ(*r.network_mean_downtime, 2.0);
}

TEST(AppMetrics, NeverUpIsUndefined) {
  const auto r = app_metrics_from_trace(make({0, 0, 0}), 1, {{false}, {}});
  EXPECT_EQ(r.app_reliability.kind(), Reliability::Kind::undefined);
  EXPECT_EQ(r.app_availability, 0.0);
}

TEST(AppMetrics, AccumulatorMatchesBatchPath) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 500; ++i) {
    const auto trace = make(random_bits(rng, 1 + (i * 37) % 3000), 1e-3);
    const int nsv = i % 5;
    TraceAnalysisOptions options;
    options.filter.assume_up_before_start = i % 3 != 0;
    const auto batch = app_metrics_from_trace(trace, nsv, options);
    AppMetricsAccumulator acc(nsv, 1e-3, options.filter);
    for (const auto b : trace.bits()) acc.push(b);
    const auto streamed = acc.report();
    EXPECT_DOUBLE_EQ(streamed.app_availability, batch.app_availability);
    EXPECT_DOUBLE_EQ(streamed.app_unavailability, batch.app_unavailability);
    EXPECT_DOUBLE_EQ(streamed.network_availability, batch.network_availability);
    EXPECT_DOUBLE_EQ(streamed.transition_rate, batch.transition_rate);
    ASSERT_EQ(streamed.app_reliability.kind(), batch.app_reliability.kind());
    if (batch.app_reliability.is_finite()) {
      EXPECT_DOUBLE_EQ(streamed.app_reliability.cycles(), batch.app_reliability.cycles());
    }
    EXPECT_EQ(streamed.app_mean_downtime.has_value(), batch.app_mean_downtime.has_value());
    if (batch.app_mean_downtime) EXPECT_DOUBLE_EQ(*streamed.app_mean_downtime, *batch.app_mean_downtime);
    if (batch.network_mean_downtime) {
      EXPECT_DOUBLE_EQ(*streamed.network_mean_downtime, *batch.network_mean_downtime);
    }
  }
}

TEST(AppMetrics, FlowBalanceOnTraces) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const auto r = app_metrics_from_trace(make(random_bits(rng, 100 + i)), i % 4);
    if (r.app_mean_downtime) {
      EXPECT_NEAR(r.app_availability, 1.0 - r.transition_rate * *r.app_mean_downtime, 1e-15);
    }
    EXPECT_LE(r.network_availability, r.app_availability);
  }
}

TEST(PacketLog, AllReceivedInTime) {
  std::vector<PacketLogRecord> records;
  for (std::uint64_t i = 0; i < 5; ++i) records.push_back({i, 1e-3});
  EXPECT_EQ(bits_of(from_packet_log(records, 5, 2e-3, 2e-3)), (Bits{1, 1, 1, 1, 1}));
}

TEST(PacketLog, MissingLateAndTail) {
  const std::vector<PacketLogRecord> records{{0, 1e-3}, {1, 1e-3}, {2, 1e-3}, {4, 1e-3}};
  EXPECT_EQ(bits_of(from_packet_log(records, 5, 2e-3, 2e-3)), (Bits{1, 1, 1, 0, 1}));

  const std::vector<PacketLogRecord> late{{0, 1e-3}, {1, 2e-3}, {2, 2.5e-3}, {3, std::nullopt}};
  EXPECT_EQ(bits_of(from_packet_log(late, 6, 2e-3, 2e-3)), (Bits{1, 1, 0, 0, 0, 0}));
}

TEST(PacketLog, Errors) {
  const std::vector<PacketLogRecord> dup{{0, 1e-3}, {0, 1e-3}};
  EXPECT_THROW(from_packet_log(dup, 2, 2e-3, 2e-3), InvalidInput);
  const std::vector<PacketLogRecord> outside{{2, 1e-3}};
  EXPECT_THROW(from_packet_log(outside, 2, 2e-3, 2e-3), InvalidInput);
  EXPECT_THROW(from_packet_log({}, 0, 2e-3, 2e-3), InvalidInput);
}

TEST(DowntimeCdf, HandExample) {
  const auto cdf = downtime_cdf(make({1, 0, 0, 1}, 2e-3));
  ASSERT_EQ(cdf.size(), 2u);
  EXPECT_EQ(cdf[0].downtime, 0.0);
  EXPECT_EQ(cdf[0].cumulative_fraction, 0.5);
  EXPECT_DOUBLE_EQ(cdf[1].downtime, 4e-3);
  EXPECT_EQ(cdf[1].cumulative_fraction, 1.0);
}

TEST(DowntimeCdf, AllOnes) {
  const auto cdf = downtime_cdf(make({1, 1, 1}, 2e-3));
  ASSERT_EQ(cdf.size(), 1u);
  EXPECT_EQ(cdf[0].cumulative_fraction, 1.0);
}

TEST(DowntimeCdf, NeedsCyclePeriod) { EXPECT_THROW(downtime_cdf(make({1, 0})), InvalidInput); }

TEST(DowntimeCdf, MonotoneStartsAtOneMinusPEndsAtOne) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const auto trace = make(random_bits(rng, 10 + i * 13), 2e-3);
    const auto cdf = downtime_cdf(trace);
    EXPECT_DOUBLE_EQ(cdf.front().cumulative_fraction, 1.0 - run_stats(trace).per);
    EXPECT_EQ(cdf.back().cumulative_fraction, 1.0);
    for (std::size_t k = 1; k < cdf.size(); ++k) {
      EXPECT_GT(cdf[k].downtime, cdf[k - 1].downtime);
      EXPECT_GT(cdf[k].cumulative_fraction, cdf[k - 1].cumulative_fraction);
    }
  }
}

}  // namespace
}  // namespace survmap
