#include "survmap/chansim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "survmap/errors.hpp"

namespace survmap {
namespace {

constexpr std::uint64_t kMinCycles = 10'000;

template <typename Channel>
BinaryTrace fill(Channel channel, std::uint64_t n_cycles, std::optional<Seconds> cycle_period) {
  if (n_cycles == 0) throw InvalidInput("trace length must be >= 1 cycle");
  std::vector<BinaryTrace::Bit> bits(n_cycles);
  for (auto& bit : bits) bit = channel.next();
  return BinaryTrace(std::move(bits), cycle_period);
}

struct Summary {
  double mean = 0.0;
  double standard_error = 0.0;
};

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  const auto n = static_cast<double>(values.size());
  for (const double v : values) s.mean += v;
  s.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.standard_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return s;
}

// Runs `replicate(r)` for every replication on a small pool. Each result
// lands in its own slot, so aggregation order is fixed.
struct Replication {
  ReliabilityReport report;
  std::uint64_t failures = 0;
};

template <typename Replicate>
std::vector<Replication> run_replications(std::uint64_t replications, unsigned threads, Replicate replicate) {
  std::vector<Replication> reports(replications);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, replications));

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (auto r = next++; r < replications; r = next++) {
      try {
        reports[r] = replicate(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return reports;
}

MonteCarloResult aggregate(const std::vector<Replication>& replications, std::uint64_t n_cycles,
                           std::uint64_t seed) {
  MonteCarloResult result;
  result.replications = replications.size();
  result.cycles_per_rep = n_cycles;
  result.seed = seed;

  std::vector<double> availability;
  std::vector<double> unavailability;
  std::vector<double> network_availability;
  std::vector<double> reliability;
  for (const auto& [report, failures] : replications) {
    availability.push_back(report.app_availability);
    unavailability.push_back(report.app_unavailability);
    network_availability.push_back(report.network_availability);
    result.failure_event_count += failures;
    if (report.app_reliability.is_finite()) {
      reliability.push_back(report.app_reliability.cycles());
    } else {
      ++result.unbounded_replications;
    }
  }
  const auto a = summarize(availability);
  result.mean_availability = a.mean;
  result.stderr_availability = a.standard_error;
  result.mean_unavailability = summarize(unavailability).mean;
  result.mean_network_availability = summarize(network_availability).mean;
  if (!reliability.empty()) {
    const auto r = summarize(reliability);
    result.mean_reliability = r.mean;
    result.stderr_reliability = r.standard_error;
  }
  return result;
}

void check_monte_carlo_inputs(int survival_cycles, std::uint64_t n_cycles, std::uint64_t replications) {
  if (survival_cycles < 0) throw InvalidInput("survival cycles must be non-negative");
  if (n_cycles < kMinCycles) throw InvalidInput("Monte Carlo needs at least 10^4 cycles per replication");
  if (replications < 2) throw InvalidInput("Monte Carlo needs at least 2 replications");
}

template <typename Channel>
Replication stream_replication(Channel channel, int survival_cycles, std::uint64_t n_cycles) {
  AppMetricsAccumulator acc(survival_cycles);
  for (std::uint64_t i = 0; i < n_cycles; ++i) acc.push(channel.next());
  return {acc.report(), acc.app_down_runs()};
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replication) {
  // seed + (r + 1) * odd constant is injective in r modulo 2^64, and mix64 is
  // a bijection, so replications never collide.
  return mix64(seed + (replication + 1) * 0xD1B54A32D192ED03ULL);
}

void GilbertParams::validate() const {
  if (!(to_bad > 0.0 && to_bad <= 1.0)) throw InvalidInput("good->bad probability must lie in (0, 1]");
  if (!(to_good > 0.0 && to_good <= 1.0)) throw InvalidInput("bad->good probability must lie in (0, 1]");
}

GilbertParams gilbert_from_network_params(const NetworkParams& params) {
  return {params.up_exit(), params.down_exit()};
}

NetworkParams network_params_from_gilbert(const GilbertParams& gilbert) {
  gilbert.validate();
  return NetworkParams::from_rates(gilbert.to_bad, gilbert.to_good);
}

GilbertChannel::GilbertChannel(const GilbertParams& params, std::uint64_t seed, StartState start)
    : params_(params), rng_(seed) {
  params_.validate();
  good_ = start == StartState::up || !rng_.bernoulli(params_.loss_ratio());
}

BernoulliChannel::BernoulliChannel(double loss, std::uint64_t seed) : loss_(loss), rng_(seed) {
  if (!(loss >= 0.0 && loss < 1.0)) throw InvalidInput("loss probability must lie in [0, 1)");
}

BinaryTrace generate(const GilbertParams& gilbert, std::uint64_t n_cycles, std::uint64_t seed, StartState start,
                     std::optional<Seconds> cycle_period) {
  return fill(GilbertChannel(gilbert, seed, start), n_cycles, cycle_period);
}

BinaryTrace bernoulli(double loss, std::uint64_t n_cycles, std::uint64_t seed,
                      std::optional<Seconds> cycle_period) {
  return fill(BernoulliChannel(loss, seed), n_cycles, cycle_period);
}

MonteCarloResult monte_carlo_validate(const NetworkParams& params, int survival_cycles, std::uint64_t n_cycles,
                                      std::uint64_t replications, std::uint64_t seed,
                                      const MonteCarloOptions& options) {
  check_monte_carlo_inputs(survival_cycles, n_cycles, replications);
  const auto gilbert = gilbert_from_network_params(params);
  const auto reports = run_replications(replications, options.threads, [&](std::uint64_t r) {
    return stream_replication(GilbertChannel(gilbert, derive_seed(seed, r)), survival_cycles, n_cycles);
  });
  return aggregate(reports, n_cycles, seed);
}

MonteCarloResult monte_carlo_validate_independent(double loss, int survival_cycles, std::uint64_t n_cycles,
                                                  std::uint64_t replications, std::uint64_t seed,
                                                  const MonteCarloOptions& options) {
  check_monte_carlo_inputs(survival_cycles, n_cycles, replications);
  if (!(loss >= 0.0 && loss < 1.0)) throw InvalidInput("loss probability must lie in [0, 1)");
  const auto reports = run_replications(replications, options.threads, [&](std::uint64_t r) {
    return stream_replication(BernoulliChannel(loss, derive_seed(seed, r)), survival_cycles, n_cycles);
  });
  return aggregate(reports, n_cycles, seed);
}

}  // namespace survmap
