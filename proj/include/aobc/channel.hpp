#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aobc/geometry.hpp"
#include "aobc/params.hpp"
#include "aobc/rng.hpp"

namespace aobc {

/// Per-interferer factor used in the conditional success products.
///
/// `derived`: 1 - p + p / (1 + theta * l(interferer->rx) / l(tx->rx)), the
/// Rayleigh Laplace transform averaged over the interferer's access draw.
/// This is the form the SIR simulator agrees with and the default.
///
/// `printed`: 1 - p / (1 + theta * l(tx->rx) / l(interferer->rx)), kept for
/// comparison only. It places theta on the other side of the gain ratio.
enum class FactorForm { derived, printed };

/// l(x) = |x|^-beta. Throws SingularityError at the origin.
double path_loss(Point x, double beta);

/// C = Gamma(1 + delta) Gamma(1 - delta) theta^delta, delta = 2 / beta.
double constant_C(double theta, double beta);

/// Spatially averaged success probability mu(d) = p exp(-p lambda pi C d^2).
double succ_prob_spatial_average(double d, const NetworkParams& params);

/// One interferer's multiplicative factor for signal gain `signal_gain` and
/// interference gain `interference_gain` at the same receiver.
double interference_factor(double signal_gain, double interference_gain,
                           const NetworkParams& params,
                           FactorForm form = FactorForm::derived);

/// Success probability at receiver y for a broadcast from the origin, given
/// the interferer positions.
double succ_prob_broadcast_conditional(Point y, std::span<const Point> interferers,
                                       const NetworkParams& params,
                                       FactorForm form = FactorForm::derived);

/// Success probability at the origin for transmitter x, given every other
/// transmitter (interferers and the remaining nodes) in `others`.
double succ_prob_collection_conditional(Point x, std::span<const Point> others,
                                        const NetworkParams& params,
                                        FactorForm form = FactorForm::derived);

/// Collection success for transmitter y averaged over the interferer process
/// but conditioned on the co-located nodes: mu(|y|) times one factor per
/// co-node.
double succ_prob_collection_semi(Point y, std::span<const Point> co_nodes,
                                 const NetworkParams& params,
                                 FactorForm form = FactorForm::derived);

/// Probability that every node in `subset` receives the same broadcast slot:
/// p * prod_x [1 - p + p * prod_{i in subset} 1 / (1 + theta l(x - i) / l(i))].
double joint_succ_prob_broadcast(std::span<const std::size_t> subset,
                                 const Realization& realization,
                                 const NetworkParams& params);

/// Probability that no node in `subset` receives the slot, by inclusion-
/// exclusion over the joint successes of its sub-subsets.
double joint_fail_prob_broadcast(std::span<const std::size_t> subset,
                                 const Realization& realization,
                                 const NetworkParams& params);

/// Per-slot access and reception indicators.
struct SlotOutcome {
  bool base_active = false;
  std::vector<std::uint8_t> node_active;  // collection mode only
  std::vector<std::uint8_t> received;     // one per node

  std::size_t reception_count() const;
};

/// Precomputed gains for repeated slot draws on one realization. Draws every
/// access indicator as Bernoulli(p) and every fading power as Exp(1), fresh per
/// slot and link; received[i] = 1 iff the transmitter is active and SIR > theta
/// (zero interference counts as infinite SIR). Draws that cannot influence the
/// outcome of a slot are skipped; the outcome law is unchanged.
class SlotSampler {
 public:
  SlotSampler(const Realization& realization, Mode mode, const NetworkParams& params);

  void draw(RandomStream& rng, SlotOutcome& out);
  SlotOutcome draw(RandomStream& rng);

  std::size_t node_count() const { return node_count_; }
  Mode mode() const { return mode_; }

 private:
  void draw_broadcast(RandomStream& rng, SlotOutcome& out);
  void draw_collection(RandomStream& rng, SlotOutcome& out);
  // Marks active interferers and returns their indices in `active_list_`.
  void draw_interferer_access(RandomStream& rng);

  Mode mode_;
  NetworkParams params_;
  std::size_t node_count_ = 0;
  std::size_t interferer_count_ = 0;

  // Broadcast: signal gain per node, and per node the interferer gains
  // sorted in descending order with their interferer indices.
  std::vector<double> node_signal_gain_;
  std::vector<std::vector<double>> sorted_gain_;
  std::vector<std::vector<std::uint32_t>> sorted_index_;
  std::vector<std::uint8_t> interferer_active_;
  std::vector<std::uint32_t> active_list_;

  // Collection: interferer gains toward the origin, descending.
  std::vector<double> interferer_gain_to_origin_;
  std::vector<double> node_power_;
};

/// Convenience single-slot draw.
SlotOutcome draw_slot(const Realization& realization, Mode mode,
                      const NetworkParams& params, RandomStream& rng);

}  // namespace aobc
