#include "aobc/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "aobc/age_dynamics.hpp"
#include "aobc/analytics.hpp"
#include "aobc/channel.hpp"
#include "aobc/errors.hpp"
#include "aobc/summation.hpp"

namespace aobc {
namespace {

constexpr double kZ95 = 1.959963984540054;

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double trial_time_average(SlotSampler& sampler, Mode mode, std::int64_t warmup,
                          std::int64_t slots, RandomStream& rng) {
  AgeLedger ledger = AgeLedger::initial(sampler.node_count(), mode);
  SlotOutcome outcome;
  std::int64_t total = 0;
  for (std::int64_t t = 0; t < slots; ++t) {
    sampler.draw(rng, outcome);
    step_age_in_place(ledger, outcome);
    if (t >= warmup) total += mode == Mode::broadcast ? aob(ledger) : aoc(ledger);
  }
  return static_cast<double>(total) / static_cast<double>(slots - warmup);
}

}  // namespace

void SimConfig::validate() const {
  params.validate();
  if (slots_per_trial < 1) throw InvalidParameter("slots_per_trial must be >= 1");
  if (warmup_slots && (*warmup_slots < 0 || *warmup_slots >= slots_per_trial)) {
    throw InvalidParameter("warmup_slots must satisfy 0 <= warmup < slots_per_trial");
  }
  if (trials < 1) throw InvalidParameter("trials must be >= 1");
  if (realizations < 1) throw InvalidParameter("realizations must be >= 1");
  if (!(truncation_rel_tol > 0.0 && truncation_rel_tol < 1.0)) {
    throw InvalidParameter("truncation_rel_tol must lie in (0, 1)");
  }
  if (lambda_interferers && !(std::isfinite(*lambda_interferers) && *lambda_interferers >= 0.0)) {
    throw InvalidParameter("lambda_interferers must be finite and >= 0");
  }
  if (fixed_node_count && *fixed_node_count < 0) {
    throw InvalidParameter("fixed_node_count must be >= 0");
  }
}

MeanInterval mean_interval(const std::vector<double>& values) {
  if (values.empty()) return {};
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  const double n = static_cast<double>(values.size());
  const double mean = sum.value() / n;
  if (values.size() < 2) return {mean, std::numeric_limits<double>::infinity()};
  CompensatedSum squares;
  for (double v : values) squares.add((v - mean) * (v - mean));
  const double variance = squares.value() / (n - 1.0);
  return {mean, kZ95 * std::sqrt(variance / n)};
}

std::int64_t auto_warmup(const Realization& realization, const SimConfig& config) {
  double slowest = 1.0;
  if (!realization.nodes.empty()) {
    const auto mu = config.mode == Mode::broadcast
                        ? broadcast_success_probs(realization, config.params)
                        : collection_success_probs(realization, config.params);
    for (double m : mu) slowest = std::max(slowest, 1.0 / m);
  }
  const double wanted = std::min(std::max(1e4, 20.0 * slowest), 1e6);
  return std::min(static_cast<std::int64_t>(wanted), config.slots_per_trial / 2);
}

std::vector<double> parallel_map(std::size_t count, unsigned threads,
                                 const std::function<double(std::size_t)>& fn) {
  std::vector<double> results(count, 0.0);
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          results[i] = fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return results;
}

SimResult run_instance(const Realization& realization, const SimConfig& config,
                       std::uint64_t realization_index) {
  config.validate();
  realization.validate();
  const auto start = std::chrono::steady_clock::now();
  SimResult result;
  result.realization_count = 1;
  if (realization.nodes.empty()) {
    result.per_trial_means.assign(static_cast<std::size_t>(config.trials), 0.0);
    result.elapsed_seconds = elapsed_since(start);
    return result;
  }
  const std::int64_t warmup =
      config.warmup_slots ? *config.warmup_slots : auto_warmup(realization, config);
  const SlotSampler prototype(realization, config.mode, config.params);
  result.per_trial_means = parallel_map(
      static_cast<std::size_t>(config.trials), config.threads, [&](std::size_t trial) {
        SlotSampler sampler = prototype;
        RandomStream rng = derive_stream(
            config.master_seed, {realization_index, trial, label(StreamPurpose::channel)});
        return trial_time_average(sampler, config.mode, warmup, config.slots_per_trial, rng);
      });
  const MeanInterval summary = mean_interval(result.per_trial_means);
  result.mean_age = summary.mean;
  result.ci_half_width = summary.half_width;
  result.elapsed_seconds = elapsed_since(start);
  return result;
}

Realization sample_realization(const SimConfig& config, std::uint64_t realization_index) {
  const NetworkParams& params = config.params;
  RandomStream rng =
      derive_stream(config.master_seed, {realization_index, label(StreamPurpose::geometry)});
  Realization realization;
  realization.node_radius = params.r;
  realization.window_radius = truncation_window_radius(params, config.truncation_rel_tol);
  realization.nodes = config.fixed_node_count
                          ? sample_uniform_disk(static_cast<std::size_t>(*config.fixed_node_count),
                                                params.r, rng)
                          : sample_node_process(params.lambda, params.r, rng);
  realization.interferers = sample_interferer_process(
      config.lambda_interferers.value_or(params.lambda), realization.window_radius, rng);
  return realization;
}

SimResult run_spatial_average(const SimConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  SimConfig inner = config;
  // Parallelism is spent on realizations; each instance runs its trials inline.
  inner.threads = 1;
  SimResult result;
  result.per_trial_means = parallel_map(
      static_cast<std::size_t>(config.realizations), config.threads, [&](std::size_t k) {
        const Realization realization = sample_realization(config, k);
        return run_instance(realization, inner, k).mean_age;
      });
  result.realization_count = config.realizations;
  const MeanInterval summary = mean_interval(result.per_trial_means);
  result.mean_age = summary.mean;
  result.ci_half_width = summary.half_width;
  result.elapsed_seconds = elapsed_since(start);
  return result;
}

}  // namespace aobc
