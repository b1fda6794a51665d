#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "survmap/reliability.hpp"

namespace survmap {

/// One transmitted packet as seen by the receiver. `delay` is absent when
/// the packet never arrived.
struct PacketLogRecord {
  std::uint64_t seq = 0;
  std::optional<Seconds> delay;
};

/// Per-cycle delivery outcome: 1 = received within the delay bound.
class BinaryTrace {
 public:
  using Bit = std::uint8_t;

  /// Throws InvalidInput on an empty sequence or values other than 0/1.
  explicit BinaryTrace(std::vector<Bit> bits, std::optional<Seconds> cycle_period = std::nullopt);

  std::span<const Bit> bits() const { return bits_; }
  std::size_t size() const { return bits_.size(); }
  Bit operator[](std::size_t i) const { return bits_[i]; }
  std::optional<Seconds> cycle_period() const { return cycle_period_; }

  friend bool operator==(const BinaryTrace&, const BinaryTrace&) = default;

 private:
  std::vector<Bit> bits_;
  std::optional<Seconds> cycle_period_;
};

/// Maximal run of identical bits.
struct Run {
  BinaryTrace::Bit bit;
  std::uint64_t length;

  friend bool operator==(const Run&, const Run&) = default;
};

std::vector<Run> run_length_encode(std::span<const BinaryTrace::Bit> bits);
std::vector<BinaryTrace::Bit> run_length_decode(std::span<const Run> runs);

struct RunOptions {
  /// When false, the first and last runs of the trace (which may be cut by
  /// the observation window) are left out of the run lists and means.
  bool include_boundary_runs = true;
};

struct RunStats {
  std::uint64_t n_total = 0;
  std::uint64_t n_failed = 0;
  double per = 0.0;
  std::vector<std::uint64_t> up_runs;
  std::vector<std::uint64_t> down_runs;
  std::optional<double> mean_up;
  std::optional<double> mean_down;
};

RunStats run_stats(const BinaryTrace& trace, const RunOptions& options = {});

struct FilterOptions {
  /// Treat the cycle before the trace as up, so a leading burst is filtered
  /// like any other. When false a leading burst passes through untouched.
  bool assume_up_before_start = true;
};

/// Application view of a trace: the first min(k, N_sv) zeros of every
/// k-long burst become ones.
BinaryTrace survival_filter(const BinaryTrace& trace, int survival_cycles, const FilterOptions& options = {});

struct TraceAnalysisOptions {
  FilterOptions filter;
  RunOptions runs;
};

/// Empirical counterpart of full_report(): application metrics from the
/// filtered trace, network metrics from the raw one.
ReliabilityReport app_metrics_from_trace(const BinaryTrace& trace, int survival_cycles,
                                         const TraceAnalysisOptions& options = {});

/// Single-pass equivalent of app_metrics_from_trace() with boundary runs
/// included, for traces that are never materialized.
class AppMetricsAccumulator {
 public:
  explicit AppMetricsAccumulator(int survival_cycles, std::optional<Seconds> cycle_period = std::nullopt,
                                 const FilterOptions& filter = {});

  void push(BinaryTrace::Bit bit) {
    ++total_;
    BinaryTrace::Bit app_bit = 1;
    if (bit != 0) {
      zeros_in_burst_ = 0;
      seen_up_ = true;
    } else {
      ++failed_;
      if (zeros_in_burst_++ == 0) {
        ++network_down_runs_;
        burst_filterable_ = seen_up_ || assume_up_before_start_;
      }
      if (!burst_filterable_ || zeros_in_burst_ > survival_cycles_) app_bit = 0;
    }
    if (total_ == 1 || app_bit != app_prev_) {
      if (app_bit != 0) ++app_up_runs_; else ++app_down_runs_;
    }
    if (app_bit == 0) ++app_zeros_;
    app_prev_ = app_bit;
  }

  std::uint64_t cycles() const { return total_; }
  /// Application failures (down runs of the filtered view) so far.
  std::uint64_t app_down_runs() const { return app_down_runs_; }

  ReliabilityReport report() const;

 private:
  std::uint64_t survival_cycles_;
  std::optional<Seconds> cycle_period_;
  bool assume_up_before_start_;

  std::uint64_t total_ = 0;
  std::uint64_t failed_ = 0;
  std::uint64_t zeros_in_burst_ = 0;
  std::uint64_t network_down_runs_ = 0;
  bool seen_up_ = false;
  bool burst_filterable_ = true;
  std::uint64_t app_up_runs_ = 0;
  std::uint64_t app_down_runs_ = 0;
  std::uint64_t app_zeros_ = 0;
  BinaryTrace::Bit app_prev_ = 1;
};

/// Receiver log -> per-cycle outcomes. Bit i is 1 iff packet i arrived and
/// its delay is within `delay_bound`. The trace always has `expected_count`
/// cycles, so packets missing at the tail count as losses.
BinaryTrace from_packet_log(std::span<const PacketLogRecord> records, std::uint64_t expected_count,
                            Seconds delay_bound, Seconds cycle_period);

struct CdfPoint {
  Seconds downtime;
  double cumulative_fraction;
};

/// Packet-weighted downtime CDF: at x, the fraction of cycles that are
/// either up or inside a down run no longer than x. One step per distinct
/// down-run length; the first point is at x = 0. Needs the cycle period.
std::vector<CdfPoint> downtime_cdf(const BinaryTrace& trace);

// File formats.

/// One `0`/`1` per line; lines starting with `#` are comments.
BinaryTrace read_trace(std::istream& in, std::optional<Seconds> cycle_period = std::nullopt);
BinaryTrace read_trace_file(const std::filesystem::path& path, std::optional<Seconds> cycle_period = std::nullopt);
void write_trace(std::ostream& out, const BinaryTrace& trace);
void write_trace_file(const std::filesystem::path& path, const BinaryTrace& trace);

/// CSV with header `seq,delay_us`; an empty delay means never received.
std::vector<PacketLogRecord> read_packet_log(std::istream& in);
std::vector<PacketLogRecord> read_packet_log_file(const std::filesystem::path& path);

/// CSV with header `downtime_ms,cdf`.
void write_cdf(std::ostream& out, std::span<const CdfPoint> cdf);

}  // namespace survmap
