#include "survmap/trace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "survmap/errors.hpp"

namespace survmap {
namespace {

std::optional<double> mean_of(const std::vector<std::uint64_t>& values) {
  if (values.empty()) return std::nullopt;
  const auto sum = std::accumulate(values.begin(), values.end(), std::uint64_t{0});
  return static_cast<double>(sum) / static_cast<double>(values.size());
}

void check_survival_cycles(int survival_cycles) {
  if (survival_cycles < 0) throw InvalidInput("survival cycles must be non-negative");
}

}  // namespace

BinaryTrace::BinaryTrace(std::vector<Bit> bits, std::optional<Seconds> cycle_period)
    : bits_(std::move(bits)), cycle_period_(cycle_period) {
  if (bits_.empty()) throw InvalidInput("a trace needs at least one cycle");
  if (cycle_period_ && !(*cycle_period_ > 0.0)) throw InvalidInput("cycle period must be > 0");
  const auto bad = std::find_if(bits_.begin(), bits_.end(), [](Bit b) { return b > 1; });
  if (bad != bits_.end()) {
    throw InvalidInput("trace value at cycle " + std::to_string(bad - bits_.begin()) + " is not 0 or 1");
  }
}

std::vector<Run> run_length_encode(std::span<const BinaryTrace::Bit> bits) {
  std::vector<Run> runs;
  for (const auto bit : bits) {
    if (runs.empty() || runs.back().bit != bit) {
      runs.push_back({bit, 1});
    } else {
      ++runs.back().length;
    }
  }
  return runs;
}

std::vector<BinaryTrace::Bit> run_length_decode(std::span<const Run> runs) {
  std::vector<BinaryTrace::Bit> bits;
  for (const auto& run : runs) bits.insert(bits.end(), run.length, run.bit);
  return bits;
}

RunStats run_stats(const BinaryTrace& trace, const RunOptions& options) {
  RunStats stats;
  stats.n_total = trace.size();
  stats.n_failed = static_cast<std::uint64_t>(std::count(trace.bits().begin(), trace.bits().end(), 0));
  stats.per = static_cast<double>(stats.n_failed) / static_cast<double>(stats.n_total);

  const auto runs = run_length_encode(trace.bits());
  std::size_t first = 0;
  std::size_t last = runs.size();
  if (!options.include_boundary_runs) {
    first = 1;
    last = runs.size() > 1 ? runs.size() - 1 : 0;
  }
  for (std::size_t i = first; i < last; ++i) {
    (runs[i].bit != 0 ? stats.up_runs : stats.down_runs).push_back(runs[i].length);
  }
  stats.mean_up = mean_of(stats.up_runs);
  stats.mean_down = mean_of(stats.down_runs);
  return stats;
}

BinaryTrace survival_filter(const BinaryTrace& trace, int survival_cycles, const FilterOptions& options) {
  check_survival_cycles(survival_cycles);
  auto runs = run_length_encode(trace.bits());
  const auto tolerated = static_cast<std::uint64_t>(survival_cycles);
  std::vector<Run> filtered;
  filtered.reserve(runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Run& run = runs[i];
    const bool leading = i == 0;
    if (run.bit != 0 || (leading && !options.assume_up_before_start)) {
      filtered.push_back(run);
      continue;
    }
    const auto survived = std::min(run.length, tolerated);
    if (survived > 0) filtered.push_back({1, survived});
    if (run.length > survived) filtered.push_back({0, run.length - survived});
  }
  return BinaryTrace(run_length_decode(filtered), trace.cycle_period());
}

ReliabilityReport app_metrics_from_trace(const BinaryTrace& trace, int survival_cycles,
                                         const TraceAnalysisOptions& options) {
  const auto filtered = survival_filter(trace, survival_cycles, options.filter);
  const auto app = run_stats(filtered, options.runs);
  const auto network = run_stats(trace, options.runs);
  const auto n = static_cast<double>(trace.size());

  ReliabilityReport report;
  report.survival_cycles = survival_cycles;
  report.app_availability = 1.0 - app.per;
  report.app_unavailability = app.per;
  report.network_availability = 1.0 - network.per;
  report.transition_rate = static_cast<double>(app.down_runs.size()) / n;
  if (app.n_failed == 0) {
    report.app_reliability = Reliability::unbounded();
  } else if (app.mean_up) {
    report.app_reliability = Reliability::finite(*app.mean_up);
  } else {
    report.app_reliability = Reliability::undefined();
  }
  report.app_mean_downtime = app.mean_down;
  report.network_mean_downtime = network.mean_down;
  report.cycle_period = trace.cycle_period();
  return report;
}

AppMetricsAccumulator::AppMetricsAccumulator(int survival_cycles, std::optional<Seconds> cycle_period,
                                             const FilterOptions& filter)
    : survival_cycles_(static_cast<std::uint64_t>(std::max(survival_cycles, 0))),
      cycle_period_(cycle_period),
      assume_up_before_start_(filter.assume_up_before_start) {
  check_survival_cycles(survival_cycles);
}

ReliabilityReport AppMetricsAccumulator::report() const {
  if (total_ == 0) throw InvalidInput("no cycles accumulated");
  const auto n = static_cast<double>(total_);
  ReliabilityReport report;
  report.survival_cycles = static_cast<int>(survival_cycles_);
  report.app_unavailability = static_cast<double>(app_zeros_) / n;
  report.app_availability = 1.0 - report.app_unavailability;
  report.network_availability = 1.0 - static_cast<double>(failed_) / n;
  report.transition_rate = static_cast<double>(app_down_runs_) / n;
  if (app_down_runs_ == 0) {
    report.app_reliability = Reliability::unbounded();
  } else if (app_up_runs_ == 0) {
    report.app_reliability = Reliability::undefined();
  } else {
    report.app_reliability =
        Reliability::finite(static_cast<double>(total_ - app_zeros_) / static_cast<double>(app_up_runs_));
  }
  if (app_down_runs_ > 0) {
    report.app_mean_downtime = static_cast<double>(app_zeros_) / static_cast<double>(app_down_runs_);
  }
  if (network_down_runs_ > 0) {
    report.network_mean_downtime = static_cast<double>(failed_) / static_cast<double>(network_down_runs_);
  }
  report.cycle_period = cycle_period_;
  return report;
}

BinaryTrace from_packet_log(std::span<const PacketLogRecord> records, std::uint64_t expected_count,
                            Seconds delay_bound, Seconds cycle_period) {
  if (expected_count == 0) throw InvalidInput("expected packet count must be >= 1");
  if (!(delay_bound > 0.0)) throw InvalidInput("delay bound must be > 0");
  if (!(cycle_period > 0.0)) throw InvalidInput("cycle period must be > 0");

  std::vector<BinaryTrace::Bit> bits(expected_count, 0);
  std::vector<bool> seen(expected_count, false);
  for (const auto& record : records) {
    if (record.seq >= expected_count) {
      throw InvalidInput("sequence number " + std::to_string(record.seq) + " outside [0, " +
                         std::to_string(expected_count) + ")");
    }
    if (seen[record.seq]) throw InvalidInput("duplicate sequence number " + std::to_string(record.seq));
    seen[record.seq] = true;
    if (record.delay && *record.delay <= delay_bound) bits[record.seq] = 1;
  }
  return BinaryTrace(std::move(bits), cycle_period);
}

std::vector<CdfPoint> downtime_cdf(const BinaryTrace& trace) {
  const auto period = trace.cycle_period();
  if (!period) throw InvalidInput("downtime CDF needs the cycle period of the trace");

  // Cycles covered by down runs of each length.
  std::map<std::uint64_t, std::uint64_t> cycles_by_length;
  std::uint64_t ones = 0;
  for (const auto& run : run_length_encode(trace.bits())) {
    if (run.bit != 0) {
      ones += run.length;
    } else {
      cycles_by_length[run.length] += run.length;
    }
  }
  const auto n = static_cast<double>(trace.size());
  std::vector<CdfPoint> cdf;
  cdf.reserve(cycles_by_length.size() + 1);
  std::uint64_t covered = ones;
  cdf.push_back({0.0, static_cast<double>(covered) / n});
  for (const auto& [length, cycles] : cycles_by_length) {
    covered += cycles;
    cdf.push_back({static_cast<double>(length) * *period, static_cast<double>(covered) / n});
  }
  return cdf;
}

}  // namespace survmap
