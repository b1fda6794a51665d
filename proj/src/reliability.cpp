#include "survmap/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "survmap/errors.hpp"

namespace survmap {
namespace {

void check_survival_cycles(int survival_cycles) {
  if (survival_cycles < 0) {
    throw InvalidInput("survival cycles must be non-negative, got " + std::to_string(survival_cycles));
  }
}

// (1 - r_d)^N_sv, the probability that a burst outlives the survival time.
double burst_survives_prob(const NetworkParams& params, int survival_cycles) {
  return std::pow(1.0 - params.down_exit(), survival_cycles);
}

std::optional<Seconds> to_seconds(std::optional<double> cycles, std::optional<Seconds> period) {
  if (!cycles || !period) return std::nullopt;
  return *cycles * *period;
}

}  // namespace

void CyclicTrafficSpec::validate() const {
  if (!(cycle_period > 0.0)) throw InvalidInput("cycle period must be > 0");
  if (!(survival_time >= 0.0)) throw InvalidInput("survival time must be >= 0");
  if (!(delay_bound > 0.0)) throw InvalidInput("delay bound must be > 0");
}

int CyclicTrafficSpec::survival_cycles() const {
  validate();
  return survmap::survival_cycles(survival_time, cycle_period);
}

int survival_cycles(Seconds survival_time, Seconds cycle_period) {
  if (!(cycle_period > 0.0) || !std::isfinite(cycle_period)) {
    throw InvalidInput("cycle period must be a positive finite duration");
  }
  if (!(survival_time >= 0.0) || !std::isfinite(survival_time)) {
    throw InvalidInput("survival time must be a non-negative finite duration");
  }
  const double quotient = survival_time / cycle_period;
  const double nearest = std::round(quotient);
  const double cycles = std::abs(quotient - nearest) <= 1e-9 * std::max(1.0, nearest) ? nearest
                                                                                       : std::floor(quotient);
  if (cycles > static_cast<double>(std::numeric_limits<int>::max())) {
    throw InvalidInput("survival time spans too many cycles");
  }
  return static_cast<int>(cycles);
}

NetworkParams NetworkParams::from_rates(double up_exit, double down_exit) {
  if (!(up_exit > 0.0 && up_exit <= 1.0)) {
    throw InfeasibleParameters("up-state exit probability must lie in (0, 1], got " + std::to_string(up_exit));
  }
  if (!(down_exit > 0.0 && down_exit <= 1.0)) {
    throw InfeasibleParameters("down-state exit probability must lie in (0, 1], got " +
                               std::to_string(down_exit));
  }
  return NetworkParams(up_exit, down_exit);
}

NetworkParams NetworkParams::from_per(double per, double mean_down_cycles) {
  if (!(per > 0.0 && per < 1.0)) {
    throw InvalidInput("packet error ratio must lie in (0, 1), got " + std::to_string(per));
  }
  if (!(mean_down_cycles >= 1.0) || !std::isfinite(mean_down_cycles)) {
    throw InvalidInput("mean down time must be >= 1 cycle, got " + std::to_string(mean_down_cycles));
  }
  const double down_exit = 1.0 / mean_down_cycles;
  double up_exit = per * down_exit / (1.0 - per);
  // Admit the boundary p = tau/(1+tau) despite rounding in the line above.
  if (up_exit > 1.0 && up_exit <= 1.0 + 1e-12) up_exit = 1.0;
  if (up_exit > 1.0) {
    throw InfeasibleParameters("packet error ratio " + std::to_string(per) + " with mean down time " +
                               std::to_string(mean_down_cycles) + " cycles implies a mean up time of " +
                               std::to_string(1.0 / up_exit) + " < 1 cycle");
  }
  return from_rates(up_exit, down_exit);
}

NetworkParams NetworkParams::from_mean_times(double mean_up_cycles, double mean_down_cycles) {
  if (!(mean_up_cycles >= 1.0) || !std::isfinite(mean_up_cycles)) {
    throw InfeasibleParameters("mean up time must be >= 1 cycle");
  }
  if (!(mean_down_cycles >= 1.0) || !std::isfinite(mean_down_cycles)) {
    throw InfeasibleParameters("mean down time must be >= 1 cycle");
  }
  return from_rates(1.0 / mean_up_cycles, 1.0 / mean_down_cycles);
}

NetworkParams network_params_from_per(double per, double mean_down_cycles) {
  return NetworkParams::from_per(per, mean_down_cycles);
}

void AppRequirements::validate() const {
  if (!(availability > 0.0 && availability < 1.0)) {
    throw InvalidInput("availability target must lie in (0, 1)");
  }
  if (reliability_cycles && !(*reliability_cycles > 0.0)) {
    throw InvalidInput("reliability target must be > 0 cycles");
  }
  check_survival_cycles(survival_cycles);
}

const char* to_string(Reliability::Kind kind) {
  switch (kind) {
    case Reliability::Kind::finite: return "finite";
    case Reliability::Kind::unbounded: return "unbounded";
    case Reliability::Kind::undefined: return "undefined";
  }
  return "unknown";
}

std::optional<Seconds> ReliabilityReport::app_reliability_seconds() const {
  if (!app_reliability.is_finite()) return std::nullopt;
  return to_seconds(app_reliability.cycles(), cycle_period);
}

std::optional<Seconds> ReliabilityReport::app_mean_downtime_seconds() const {
  return to_seconds(app_mean_downtime, cycle_period);
}

std::optional<Seconds> ReliabilityReport::network_mean_downtime_seconds() const {
  return to_seconds(network_mean_downtime, cycle_period);
}

double network_availability(const NetworkParams& params) {
  return 1.0 - params.per();
}

double app_availability(const NetworkParams& params, int survival_cycles) {
  check_survival_cycles(survival_cycles);
  if (survival_cycles == 0) return network_availability(params);
  return 1.0 - params.per() * burst_survives_prob(params, survival_cycles);
}

double app_unavailability(const NetworkParams& params, int survival_cycles) {
  check_survival_cycles(survival_cycles);
  if (survival_cycles == 0) return params.per();
  return params.per() * burst_survives_prob(params, survival_cycles);
}

double transition_rate(const NetworkParams& params, int survival_cycles) {
  check_survival_cycles(survival_cycles);
  return params.per() * params.down_exit() * burst_survives_prob(params, survival_cycles);
}

Reliability app_reliability(const NetworkParams& params, int survival_cycles) {
  check_survival_cycles(survival_cycles);
  const double rate = transition_rate(params, survival_cycles);
  if (rate == 0.0) return Reliability::unbounded();
  // A / L_z; same as 1/L_z - tau_DN but without the subtraction.
  const double cycles = app_availability(params, survival_cycles) / rate;
  if (!std::isfinite(cycles)) {
    throw NumericalFailure("application reliability overflows double precision");
  }
  return Reliability::finite(cycles);
}

double independent_app_availability(double per, int survival_cycles) {
  if (!(per >= 0.0 && per < 1.0)) {
    throw InvalidInput("packet error ratio must lie in [0, 1), got " + std::to_string(per));
  }
  check_survival_cycles(survival_cycles);
  return 1.0 - std::pow(per, survival_cycles + 1);
}

ReliabilityReport full_report(const NetworkParams& params, int survival_cycles,
                              std::optional<Seconds> cycle_period) {
  if (cycle_period && !(*cycle_period > 0.0)) throw InvalidInput("cycle period must be > 0");
  ReliabilityReport report;
  report.survival_cycles = survival_cycles;
  report.app_availability = app_availability(params, survival_cycles);
  report.app_unavailability = app_unavailability(params, survival_cycles);
  report.app_reliability = app_reliability(params, survival_cycles);
  report.network_availability = network_availability(params);
  report.transition_rate = transition_rate(params, survival_cycles);
  if (report.transition_rate > 0.0) {
    report.app_mean_downtime = report.app_unavailability / report.transition_rate;
  }
  report.network_mean_downtime = params.mean_down();
  report.cycle_period = cycle_period;
  return report;
}

}  // namespace survmap
