#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "aobc/geometry.hpp"
#include "aobc/params.hpp"
#include "aobc/rng.hpp"

namespace aobc {

inline constexpr double kDefaultTruncationRelTol = 0.005;

struct SimConfig {
  NetworkParams params;
  Mode mode = Mode::broadcast;
  std::int64_t slots_per_trial = 250'000;
  /// Discarded leading slots; unset selects max(1e4, 20 x the largest
  /// per-node mean delay) capped at 1e6 and at half the trial.
  std::optional<std::int64_t> warmup_slots;
  std::int64_t trials = 1;
  std::int64_t realizations = 1;
  std::uint64_t master_seed = 1;
  double truncation_rel_tol = kDefaultTruncationRelTol;
  /// Extension: separate interferer intensity (default: params.lambda).
  std::optional<double> lambda_interferers;
  /// Condition the node count instead of sampling it (uniform placement).
  std::optional<std::int64_t> fixed_node_count;
  /// Worker threads; 0 = hardware concurrency. Results do not depend on it.
  unsigned threads = 0;

  void validate() const;

  bool operator==(const SimConfig&) const = default;
};

struct SimResult {
  double mean_age = 0.0;
  double ci_half_width = 0.0;  // 95 %, normal approximation
  std::vector<double> per_trial_means;
  std::int64_t realization_count = 0;
  double elapsed_seconds = 0.0;
};

/// Mean and 95 % normal half-width of a sample; the half-width is +inf for
/// fewer than two values.
struct MeanInterval {
  double mean = 0.0;
  double half_width = 0.0;
};
MeanInterval mean_interval(const std::vector<double>& values);

/// Warmup chosen when SimConfig::warmup_slots is unset.
std::int64_t auto_warmup(const Realization& realization, const SimConfig& config);

/// Time-average of AoB (broadcast) or AoC (collection) over post-warmup
/// slots of one fixed realization, averaged over trials. Trial t draws from
/// derive_stream(master_seed, {realization_index, t, channel}).
SimResult run_instance(const Realization& realization, const SimConfig& config,
                       std::uint64_t realization_index = 0);

/// Realization k is drawn from derive_stream(master_seed, {k, geometry}).
Realization sample_realization(const SimConfig& config, std::uint64_t realization_index);

/// Outer average of run_instance means over sampled realizations; the CI is
/// taken across realizations.
SimResult run_spatial_average(const SimConfig& config);

/// Runs fn(0..count-1) on up to `threads` workers and returns the results in
/// index order.
std::vector<double> parallel_map(std::size_t count, unsigned threads,
                                 const std::function<double(std::size_t)>& fn);

}  // namespace aobc
