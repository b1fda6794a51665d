#pragma once

#include <optional>

namespace survmap {

/// Seconds. Internal computations are in cycles; seconds only appear at the
/// edges via the cycle period.
using Seconds = double;

/// Cyclic traffic description: one packet every `cycle_period`, tolerated
/// outage `survival_time`, per-packet deadline `delay_bound`.
struct CyclicTrafficSpec {
  Seconds cycle_period = 0.0;
  Seconds survival_time = 0.0;
  Seconds delay_bound = 0.0;
  std::optional<unsigned> packet_size_bytes;

  /// Throws InvalidInput when a field is out of range.
  void validate() const;
  int survival_cycles() const;
};

/// Number of consecutive failed cycles the application tolerates:
/// floor(survival_time / cycle_period). Quotients within 1e-9 relative of an
/// integer snap to it so that e.g. 6 ms / 2 ms yields 3.
int survival_cycles(Seconds survival_time, Seconds cycle_period);

/// Network-level two-state description, stored as per-cycle exit
/// probabilities of the up state (r_u = 1/tau_UN) and the down state
/// (r_d = 1/tau_DN). Both lie in (0, 1], so every run spans at least one cycle.
class NetworkParams {
 public:
  static NetworkParams from_rates(double up_exit, double down_exit);
  /// From packet error ratio and mean burst length in cycles.
  static NetworkParams from_per(double per, double mean_down_cycles);
  static NetworkParams from_mean_times(double mean_up_cycles, double mean_down_cycles);

  double up_exit() const { return up_exit_; }
  double down_exit() const { return down_exit_; }

  /// Packet error ratio p = r_u / (r_u + r_d).
  double per() const { return up_exit_ / (up_exit_ + down_exit_); }
  double mean_up() const { return 1.0 / up_exit_; }
  double mean_down() const { return 1.0 / down_exit_; }

  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;

 private:
  NetworkParams(double up_exit, double down_exit) : up_exit_(up_exit), down_exit_(down_exit) {}

  double up_exit_;
  double down_exit_;
};

/// Same as NetworkParams::from_per.
NetworkParams network_params_from_per(double per, double mean_down_cycles);

/// Application-level targets.
struct AppRequirements {
  double availability = 0.0;
  std::optional<double> reliability_cycles;
  int survival_cycles = 0;

  void validate() const;
};

/// Mean uninterrupted up time. `unbounded` means the application never
/// fails; `undefined` means it is never up (only produced by trace estimates).
class Reliability {
 public:
  enum class Kind { finite, unbounded, undefined };

  static Reliability finite(double cycles) { return Reliability(Kind::finite, cycles); }
  static Reliability unbounded() { return Reliability(Kind::unbounded, 0.0); }
  static Reliability undefined() { return Reliability(Kind::undefined, 0.0); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::finite; }
  /// Cycles; only meaningful when is_finite().
  double cycles() const { return cycles_; }

  friend bool operator==(const Reliability&, const Reliability&) = default;

 private:
  Reliability(Kind kind, double cycles) : kind_(kind), cycles_(cycles) {}

  Kind kind_;
  double cycles_;
};

const char* to_string(Reliability::Kind kind);

struct ReliabilityReport {
  int survival_cycles = 0;
  double app_availability = 1.0;
  /// 1 - A, carried separately so tiny values keep full precision.
  double app_unavailability = 0.0;
  Reliability app_reliability = Reliability::unbounded();
  double network_availability = 1.0;
  /// Application failures per cycle.
  double transition_rate = 0.0;
  /// Cycles; absent when the application never goes down.
  std::optional<double> app_mean_downtime;
  /// Cycles; absent when the network never goes down.
  std::optional<double> network_mean_downtime;
  std::optional<Seconds> cycle_period;

  std::optional<Seconds> app_reliability_seconds() const;
  std::optional<Seconds> app_mean_downtime_seconds() const;
  std::optional<Seconds> network_mean_downtime_seconds() const;
};

/// A_N = 1 - p.
double network_availability(const NetworkParams& params);

/// A = 1 - p (1 - r_d)^N_sv.
double app_availability(const NetworkParams& params, int survival_cycles);

/// 1 - A = p (1 - r_d)^N_sv, without the cancellation of 1 - A.
double app_unavailability(const NetworkParams& params, int survival_cycles);

/// L_z = p r_d (1 - r_d)^N_sv, application failures (equivalently recoveries)
/// per cycle.
double transition_rate(const NetworkParams& params, int survival_cycles);

/// R = A / L_z = 1 / (p r_d (1 - r_d)^N_sv) - tau_DN in cycles; unbounded when every
/// burst is survived (r_d = 1 with N_sv >= 1).
Reliability app_reliability(const NetworkParams& params, int survival_cycles);

/// Availability when losses are independent, i.e. r_d = 1 - p:
/// A = 1 - p^(N_sv + 1).
double independent_app_availability(double per, int survival_cycles);

/// All analytic metrics. `cycle_period` enables the seconds views.
ReliabilityReport full_report(const NetworkParams& params, int survival_cycles,
                              std::optional<Seconds> cycle_period = std::nullopt);

}  // namespace survmap
