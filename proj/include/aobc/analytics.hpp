#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aobc/channel.hpp"
#include "aobc/geometry.hpp"
#include "aobc/params.hpp"

namespace aobc {

/// Which per-node success probability feeds the collection analytics.
/// `conditional`: conditioned on nodes and interferers of the realization.
/// `semi`: conditioned on the nodes only, averaged over the interferer process.
enum class CollectionProbability { conditional, semi };

inline constexpr std::size_t kBroadcastNodeCap = 12;
inline constexpr std::size_t kCollectionNodeCap = 20;
inline constexpr double kDefaultTailTol = 1e-9;

/// Joint success and failure probabilities of every node subset for one
/// broadcast instance, indexed by bitmask (bit i = node i).
class SubsetProbabilityTable {
 public:
  static SubsetProbabilityTable build(const Realization& realization,
                                      const NetworkParams& params,
                                      std::size_t node_cap = kBroadcastNodeCap);

  /// Builds directly from joint-success values (joint_success[0] must be 1).
  static SubsetProbabilityTable from_joint_success(std::vector<double> joint_success);

  std::size_t node_count() const { return node_count_; }
  double joint_success(std::uint32_t mask) const { return joint_success_[mask]; }
  double joint_failure(std::uint32_t mask) const { return joint_failure_[mask]; }

  /// Probability that exactly the nodes in `received` get the slot and the
  /// rest do not.
  double reception_pattern_probability(std::uint32_t received) const;

  /// P(D > k): some node still without a reception after k slots.
  double delay_survival(std::int64_t k) const;

  /// P(D = k) for k >= 1.
  double delay_pmf(std::int64_t k) const;

  /// Largest single-node failure probability.
  double worst_single_failure() const;

 private:
  std::size_t node_count_ = 0;
  std::vector<double> joint_success_;
  std::vector<double> joint_failure_;
};

/// Delay law truncated where the certified remainder of sum k P(D = k) drops
/// below tail_tol. Element k-1 holds P(D = k).
std::vector<double> broadcast_delay_law(const SubsetProbabilityTable& table,
                                        double tail_tol = kDefaultTailTol);

/// Expected broadcast age of one instance as sum_k k P(D = k), truncated with a
/// certified error below tail_tol. 0 for an empty node set; CapacityError
/// above node_cap.
double exact_eaob(const Realization& realization, const NetworkParams& params,
                  double tail_tol = kDefaultTailTol,
                  std::size_t node_cap = kBroadcastNodeCap);

double exact_eaob(const SubsetProbabilityTable& table, double tail_tol = kDefaultTailTol);

/// sum over nonempty J of (-1)^{|J|+1} / (1 - w_J); the untruncated series.
double eaob_closed_form(const SubsetProbabilityTable& table);

/// E[max of independent geometrics with success probabilities mu].
double expected_max_independent_geometric(std::span<const double> mu);

/// Broadcast age if receptions were independent across nodes with the same
/// marginals.
double independent_bound_eaob(const Realization& realization, const NetworkParams& params,
                              std::size_t node_cap = kCollectionNodeCap);

/// Per-node collection success probabilities for a realization.
std::vector<double> collection_success_probs(
    const Realization& realization, const NetworkParams& params,
    CollectionProbability kind = CollectionProbability::conditional,
    FactorForm form = FactorForm::derived);

/// Per-node broadcast success probabilities for a realization.
std::vector<double> broadcast_success_probs(const Realization& realization,
                                            const NetworkParams& params,
                                            FactorForm form = FactorForm::derived);

/// Expected time to collect from every transmitter when at most one
/// reception happens per slot and transmitter u succeeds with mu[u]:
/// sum over nonempty A of (-1)^{|A|+1} / sum_{u in A} mu_u.
double expected_collection_time(std::span<const double> mu,
                                std::size_t node_cap = kCollectionNodeCap);

/// Exact expected age of collection for one instance.
double exact_eaoc(const Realization& realization, const NetworkParams& params,
                  CollectionProbability kind = CollectionProbability::conditional,
                  std::size_t node_cap = kCollectionNodeCap);

/// Alternating sum of subset minima; equals max(values).
double max_min_identity(std::span<const double> values);

/// Instance-independent broadcast age bound for radius r:
/// (1 / (p^2 C)) (exp(p lambda pi C r^2) - 1).
double aob_upper_bound(double r, const NetworkParams& params);

/// Collection age bound conditioned on n nodes with none closer than epsilon:
/// H_n / mu_bar, where mu_bar is the success probability of a node at
/// distance r facing n - 1 nodes at distance epsilon.
double aoc_upper_bound(std::int64_t n, double r, double epsilon,
                       const NetworkParams& params,
                       FactorForm form = FactorForm::derived);

/// aoc_upper_bound averaged over a Poisson(lambda pi r^2) node count (0 for
/// no nodes).
double aoc_upper_bound_poisson(double r, double epsilon, const NetworkParams& params,
                               FactorForm form = FactorForm::derived);

/// n-th harmonic number.
double harmonic(std::int64_t n);

}  // namespace aobc
