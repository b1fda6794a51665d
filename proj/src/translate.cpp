#include "survmap/translate.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "survmap/errors.hpp"

namespace survmap {
namespace {

constexpr int kMaxBisectionIterations = 200;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_availability(double a) {
  if (!(a > 0.0 && a < 1.0)) throw InvalidInput("availability target must lie in (0, 1)");
}
void require_per(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("packet error ratio must lie in (0, 1)");
}
void require_tau(double tau) {
  if (!(tau >= 1.0) || !std::isfinite(tau)) throw InvalidInput("mean down time must be >= 1 cycle");
}
void require_nsv(int n) {
  if (n < 0) throw InvalidInput("survival cycles must be non-negative");
}
void require_reliability(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("reliability target must be a positive number of cycles");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Bisection for the point where pred flips. `inside` and `outside` may be
// in either order; the returned point is on the `inside` end of the final
// bracket, so pred holds there. Runs until the bracket ends are adjacent
// doubles.
template <typename Pred>
double bisect(Pred pred, double inside, double outside) {
  if (!pred(inside) || pred(outside)) {
    throw NumericalFailure("bisection bracket does not straddle the boundary");
  }
  for (int i = 0; i < kMaxBisectionIterations; ++i) {
    const double mid = 0.5 * (inside + outside);
    if (mid == inside || mid == outside) break;
    if (pred(mid)) inside = mid; else outside = mid;
  }
  return inside;
}

// Golden-section minimization of f on [lo, hi] in log-space.
template <typename F>
double golden_minimize_log(F f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(lo);
  double b = std::log(hi);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(std::exp(c));
  double fd = f(std::exp(d));
  for (int i = 0; i < kMaxBisectionIterations && b - a > 1e-15; ++i) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(std::exp(c));
    } else {
      a = c; c = d; fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(std::exp(d));
    }
  }
  return std::exp(0.5 * (a + b));
}

}  // namespace

FeasibilityResult FeasibilityResult::bound(double value, std::string diagnostic) {
  FeasibilityResult r;
  r.kind = Kind::bound;
  r.value = value;
  r.diagnostic = std::move(diagnostic);
  return r;
}

FeasibilityResult FeasibilityResult::unconstrained(std::string diagnostic) {
  FeasibilityResult r;
  r.kind = Kind::unconstrained;
  r.diagnostic = std::move(diagnostic);
  return r;
}

FeasibilityResult FeasibilityResult::infeasible(std::string diagnostic) {
  FeasibilityResult r;
  r.kind = Kind::infeasible;
  r.diagnostic = std::move(diagnostic);
  return r;
}

FeasibilityResult FeasibilityResult::interval_set(std::vector<Interval> intervals, std::string diagnostic) {
  FeasibilityResult r;
  r.kind = Kind::interval_set;
  r.intervals = std::move(intervals);
  r.diagnostic = std::move(diagnostic);
  return r;
}

const char* to_string(FeasibilityResult::Kind kind) {
  switch (kind) {
    case FeasibilityResult::Kind::bound: return "bound";
    case FeasibilityResult::Kind::unconstrained: return "unconstrained";
    case FeasibilityResult::Kind::infeasible: return "infeasible";
    case FeasibilityResult::Kind::interval_set: return "interval_set";
  }
  return "unknown";
}

double reliability_formula(double per, double mean_down_cycles, int survival_cycles) {
  const double rd = 1.0 / mean_down_cycles;
  const double rate = per * rd * std::pow(1.0 - rd, survival_cycles);
  if (rate == 0.0) return kInf;
  return 1.0 / rate - mean_down_cycles;
}

FeasibilityResult max_per_for_availability(double availability, double mean_down_cycles, int survival_cycles) {
  require_availability(availability);
  require_tau(mean_down_cycles);
  require_nsv(survival_cycles);
  const double survive = std::pow(1.0 - 1.0 / mean_down_cycles, survival_cycles);
  if (survive == 0.0) {
    return FeasibilityResult::unconstrained("single-cycle bursts are always survived; A = 1 for any p");
  }
  const double p_max = (1.0 - availability) / survive;
  if (p_max >= 1.0) {
    return FeasibilityResult::unconstrained("required availability holds for every p < 1 (bound " + fmt(p_max) + ")");
  }
  return FeasibilityResult::bound(p_max);
}

FeasibilityResult max_tau_dn_for_availability(double availability, double per, int survival_cycles) {
  require_availability(availability);
  require_per(per);
  require_nsv(survival_cycles);
  const double unavailability = 1.0 - availability;
  if (per <= unavailability) {
    return FeasibilityResult::unconstrained("p already meets the target without survival time");
  }
  if (survival_cycles == 0) {
    return FeasibilityResult::infeasible("without survival time A = 1 - p = " + fmt(1.0 - per) +
                                         " regardless of burst length");
  }
  const double q = std::pow(unavailability / per, 1.0 / survival_cycles);
  return FeasibilityResult::bound(1.0 / (1.0 - q));
}

FeasibilityResult max_per_for_reliability(double reliability_cycles, double mean_down_cycles,
                                          int survival_cycles) {
  require_reliability(reliability_cycles);
  require_tau(mean_down_cycles);
  require_nsv(survival_cycles);
  const double rd = 1.0 / mean_down_cycles;
  const double survive = std::pow(1.0 - rd, survival_cycles);
  if (survive == 0.0) {
    return FeasibilityResult::unconstrained("single-cycle bursts are always survived; R is unbounded");
  }
  const double p_max = 1.0 / (rd * survive * (reliability_cycles + mean_down_cycles));
  if (p_max >= 1.0) {
    return FeasibilityResult::unconstrained("required reliability holds for every p < 1 (bound " + fmt(p_max) + ")");
  }
  return FeasibilityResult::bound(p_max);
}

FeasibilityResult tau_dn_intervals_for_reliability(double reliability_cycles, double per, int survival_cycles,
                                                   const IntervalSearchOptions& options) {
  require_reliability(reliability_cycles);
  require_per(per);
  require_nsv(survival_cycles);
  const double cap = options.tau_cap;
  if (!(cap > 1.0) || !std::isfinite(cap)) throw InvalidInput("tau cap must be a finite value > 1");
  if (options.scan_points < 3) throw InvalidInput("scan needs at least 3 points");

  if (survival_cycles == 0) {
    // R = tau (1 - p) / p is increasing in tau.
    const double threshold = reliability_cycles * per / (1.0 - per);
    if (threshold <= 1.0) return FeasibilityResult::interval_set({{1.0, cap}}, "requirement met on the whole domain");
    if (threshold > cap) return FeasibilityResult::infeasible("requirement needs tau_DN > cap " + fmt(cap));
    return FeasibilityResult::interval_set({{threshold, cap}});
  }

  auto reliability = [&](double tau) { return reliability_formula(per, tau, survival_cycles); };
  auto meets = [&](double tau) { return reliability(tau) >= reliability_cycles; };

  // Geometric scan to seat the golden-section search near the minimum.
  const double log_cap = std::log(cap);
  double best_value = reliability(cap);
  int best_index = options.scan_points - 1;
  std::vector<double> grid(static_cast<std::size_t>(options.scan_points));
  for (int i = 0; i < options.scan_points; ++i) {
    // Skip tau = 1 exactly where R is infinite.
    const double t = (i + 0.5) / options.scan_points;
    grid[static_cast<std::size_t>(i)] = std::exp(t * log_cap);
    const double v = reliability(grid[static_cast<std::size_t>(i)]);
    if (v < best_value) {
      best_value = v;
      best_index = i;
    }
  }
  const double lo = best_index > 0 ? grid[static_cast<std::size_t>(best_index - 1)] : 1.0 + 1e-12;
  const double hi = best_index + 1 < options.scan_points ? grid[static_cast<std::size_t>(best_index + 1)] : cap;
  const double tau_min = golden_minimize_log(reliability, std::max(lo, 1.0 + 1e-12), hi);
  const double r_min = reliability(tau_min);

  if (r_min >= reliability_cycles) {
    return FeasibilityResult::interval_set({{1.0, cap}}, "requirement weaker than the worst case R = " + fmt(r_min));
  }
  // Left: R decreases from +inf at tau = 1 to r_min. The predicate holds at
  // 1 (R infinite) and fails at tau_min.
  const double left = bisect(meets, 1.0, tau_min);
  std::vector<Interval> intervals{{1.0, left}};
  // Right: R grows like tau (1 - p) / p beyond the minimum; the branch may
  // not come back above the target before the cap.
  if (meets(cap)) intervals.push_back({bisect(meets, cap, tau_min), cap});
  return FeasibilityResult::interval_set(std::move(intervals),
                                         "R dips below the target around tau_DN = " + fmt(tau_min));
}

JointSolution joint_solve(double availability, double reliability_cycles, int survival_cycles) {
  require_availability(availability);
  require_reliability(reliability_cycles);
  require_nsv(survival_cycles);
  const double u = 1.0 - availability;
  // With A met by equality, pi_D = u and L_z = u / tau_DN, so
  // R = A / L_z = tau_DN (1 - u) / u.
  const double tau = reliability_cycles * u / (1.0 - u);
  if (tau < 1.0) {
    throw InfeasibleRequirement("requirement pair implies mean down time " + fmt(tau) + " < 1 cycle");
  }
  const double survive = std::pow(1.0 - 1.0 / tau, survival_cycles);
  const double per = survive > 0.0 ? u / survive : kInf;
  if (!(per < 1.0)) {
    throw InfeasibleRequirement("requirement pair implies packet error ratio " + fmt(per) + " >= 1");
  }
  // Mean up time tau (1 - p) / p must be at least one cycle.
  if (per > tau / (1.0 + tau)) {
    throw InfeasibleRequirement("requirement pair implies mean up time " + fmt(tau * (1.0 - per) / per) +
                                " < 1 cycle");
  }
  return {per, tau};
}

}  // namespace survmap
