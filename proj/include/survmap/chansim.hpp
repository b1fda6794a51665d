#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "survmap/reliability.hpp"
#include "survmap/trace.hpp"

namespace survmap {

/// Identifier of the random stream construction. Bump the suffix whenever
/// the mapping from (seed, replication) to bits changes.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64+splitmix64/v1";

/// splitmix64 finalizer; a bijection on 64-bit values.
std::uint64_t mix64(std::uint64_t x);

/// Seed of replication `replication` under master seed `seed`. Distinct
/// replications of the same master seed never share a seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replication);

/// Engine plus the portable uniform draw used by all channels. std
/// distributions are implementation-defined, so they are not used.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double probability) { return uniform() < probability; }

 private:
  std::mt19937_64 engine_;
};

/// Simple Gilbert channel: the good state always delivers, the bad state
/// always loses. `to_bad` and `to_good` are per-cycle transition
/// probabilities.
struct GilbertParams {
  double to_bad;
  double to_good;

  double loss_ratio() const { return to_bad / (to_bad + to_good); }
  void validate() const;

  friend bool operator==(const GilbertParams&, const GilbertParams&) = default;
};

GilbertParams gilbert_from_network_params(const NetworkParams& params);
NetworkParams network_params_from_gilbert(const GilbertParams& gilbert);

enum class StartState { stationary, up };

class GilbertChannel {
 public:
  GilbertChannel(const GilbertParams& params, std::uint64_t seed, StartState start = StartState::stationary);

  BinaryTrace::Bit next() {
    if (!first_) {
      good_ = good_ ? !rng_.bernoulli(params_.to_bad) : rng_.bernoulli(params_.to_good);
    }
    first_ = false;
    return good_ ? 1 : 0;
  }

 private:
  GilbertParams params_;
  RandomStream rng_;
  bool good_ = true;
  bool first_ = true;
};

class BernoulliChannel {
 public:
  BernoulliChannel(double loss, std::uint64_t seed);

  BinaryTrace::Bit next() { return rng_.bernoulli(loss_) ? 0 : 1; }

 private:
  double loss_;
  RandomStream rng_;
};

BinaryTrace generate(const GilbertParams& gilbert, std::uint64_t n_cycles, std::uint64_t seed,
                     StartState start = StartState::stationary,
                     std::optional<Seconds> cycle_period = std::nullopt);

/// Independent losses with probability `loss` per cycle.
BinaryTrace bernoulli(double loss, std::uint64_t n_cycles, std::uint64_t seed,
                      std::optional<Seconds> cycle_period = std::nullopt);

struct MonteCarloResult {
  std::uint64_t replications = 0;
  std::uint64_t cycles_per_rep = 0;
  std::uint64_t seed = 0;
  double mean_availability = 0.0;
  double stderr_availability = 0.0;
  /// Averaged from per-replication failed-cycle fractions, not 1 - mean.
  double mean_unavailability = 0.0;
  /// Mean over replications with at least one application failure; absent
  /// when no replication failed.
  std::optional<double> mean_reliability;
  std::optional<double> stderr_reliability;
  /// Replications without any application failure (reliability unbounded).
  std::uint64_t unbounded_replications = 0;
  std::uint64_t failure_event_count = 0;
  double mean_network_availability = 0.0;
};

struct MonteCarloOptions {
  /// 0 = hardware concurrency. Results do not depend on this value.
  unsigned threads = 0;
};

/// Replication r streams generate(gilbert, n_cycles, derive_seed(seed, r))
/// through the survival filter and aggregates the application metrics.
MonteCarloResult monte_carlo_validate(const NetworkParams& params, int survival_cycles, std::uint64_t n_cycles,
                                      std::uint64_t replications, std::uint64_t seed,
                                      const MonteCarloOptions& options = {});

/// Same as monte_carlo_validate() on an independent-loss channel.
MonteCarloResult monte_carlo_validate_independent(double loss, int survival_cycles, std::uint64_t n_cycles,
                                                  std::uint64_t replications, std::uint64_t seed,
                                                  const MonteCarloOptions& options = {});

}  // namespace survmap
