#pragma once

#include <string>
#include <utility>
#include <vector>

#include "survmap/reliability.hpp"

namespace survmap {

// Inverse mappings: which network parameters satisfy application targets.
// Targets are non-strict (A >= A_req, R >= R_req).

struct Interval {
  double low;
  double high;

  friend bool operator==(const Interval&, const Interval&) = default;
};

struct FeasibilityResult {
  enum class Kind { bound, unconstrained, infeasible, interval_set };

  Kind kind = Kind::infeasible;
  /// The bound (p or tau_DN) when kind == bound.
  double value = 0.0;
  /// Sorted, disjoint sub-intervals of [1, tau_cap] when kind == interval_set.
  std::vector<Interval> intervals;
  std::string diagnostic;

  static FeasibilityResult bound(double value, std::string diagnostic = {});
  static FeasibilityResult unconstrained(std::string diagnostic);
  static FeasibilityResult infeasible(std::string diagnostic);
  static FeasibilityResult interval_set(std::vector<Interval> intervals, std::string diagnostic = {});
};

const char* to_string(FeasibilityResult::Kind kind);

/// Largest p with A(p, tau_DN, N_sv) >= A_req.
FeasibilityResult max_per_for_availability(double availability, double mean_down_cycles, int survival_cycles);

/// Largest tau_DN with A(p, tau_DN, N_sv) >= A_req.
FeasibilityResult max_tau_dn_for_availability(double availability, double per, int survival_cycles);

/// Largest p with R(p, tau_DN, N_sv) >= R_req.
FeasibilityResult max_per_for_reliability(double reliability_cycles, double mean_down_cycles,
                                          int survival_cycles);

struct IntervalSearchOptions {
  double tau_cap = 1e9;
  int scan_points = 512;
};

/// The set of tau_DN in [1, tau_cap] with R(p, tau_DN, N_sv) >= R_req.
/// For N_sv >= 1, R diverges at both ends of the domain with one interior
/// minimum, so the set is [1, a] U [b, tau_cap] or the whole domain.
FeasibilityResult tau_dn_intervals_for_reliability(double reliability_cycles, double per, int survival_cycles,
                                                   const IntervalSearchOptions& options = {});

struct JointSolution {
  double per;
  double mean_down_cycles;
};

/// (p, tau_DN) meeting both targets with equality. Throws
/// InfeasibleRequirement when the pair cannot be realized by the chain.
JointSolution joint_solve(double availability, double reliability_cycles, int survival_cycles);

/// R as a function of (p, tau_DN) without constructing NetworkParams, so it
/// can be probed outside the feasibility floor. +inf when unbounded.
double reliability_formula(double per, double mean_down_cycles, int survival_cycles);

}  // namespace survmap
