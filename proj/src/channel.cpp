#include "aobc/channel.hpp"

#include <algorithm>
#include <numeric>
#include <numbers>
#include <string>

#include "aobc/errors.hpp"

namespace aobc {
namespace {

// Products over more factors than this are accumulated as sums of logs.
constexpr std::size_t kLogSpaceThreshold = 64;

// Accumulates prod (1 - deficit_k) either directly or via log1p.
class FactorProduct {
 public:
  explicit FactorProduct(std::size_t expected_count)
      : log_space_(expected_count > kLogSpaceThreshold) {}

  void multiply_by_one_minus(double deficit) {
    if (log_space_) {
      log_sum_ += std::log1p(-deficit);
    } else {
      product_ *= 1.0 - deficit;
    }
  }

  double value() const { return log_space_ ? std::exp(log_sum_) : product_; }

 private:
  bool log_space_;
  double product_ = 1.0;
  double log_sum_ = 0.0;
};

// 1 - factor, computed without cancellation.
double factor_deficit(double signal_gain, double interference_gain,
                      const NetworkParams& params, FactorForm form) {
  if (form == FactorForm::derived) {
    const double a = params.theta * interference_gain / signal_gain;
    return params.p * a / (1.0 + a);
  }
  return params.p / (1.0 + params.theta * signal_gain / interference_gain);
}

void check_mask_width(std::size_t size) {
  if (size > 24) throw CapacityError("joint probabilities limited to 24-node subsets");
}

void check_subset(std::span<const std::size_t> subset, const Realization& realization) {
  if (subset.empty()) throw InvalidParameter("subset must be nonempty");
  check_mask_width(subset.size());
  for (std::size_t i : subset) {
    if (i >= realization.nodes.size()) throw InvalidParameter("subset index out of range");
  }
  std::vector<std::size_t> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidParameter("subset indices must be distinct");
  }
}

// Weaker check than NetworkParams::validate: the simulator also accepts p = 0.
void check_sampler_params(const NetworkParams& params) {
  if (!(params.p >= 0.0 && params.p <= 1.0)) {
    throw InvalidParameter("p must lie in [0, 1]");
  }
  if (!(params.theta > 0.0) || !(params.beta > 0.0)) {
    throw InvalidParameter("theta and beta must be positive");
  }
}

}  // namespace

const char* to_string(Mode mode) {
  return mode == Mode::broadcast ? "broadcast" : "collection";
}

void NetworkParams::validate() const {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw InvalidParameter("lambda must be finite and >= 0");
  }
  if (!std::isfinite(theta) || !(theta > 1.0)) {
    throw InvalidParameter("theta must be finite and > 1");
  }
  if (!(p > 0.0 && p <= 1.0)) {
    throw InvalidParameter("p (medium access probability) must lie in (0, 1]");
  }
  if (!std::isfinite(beta)) throw InvalidParameter("beta must be finite");
  if (!(beta > 2.0)) {
    throw DivergenceError("beta (path loss exponent) must be > 2");
  }
  if (!std::isfinite(r) || !(r > 0.0)) {
    throw InvalidParameter("r must be finite and > 0");
  }
}

double path_loss(Point x, double beta) {
  const double d2 = x.norm2();
  if (d2 == 0.0) throw SingularityError("path loss evaluated at zero distance");
  return std::pow(d2, -0.5 * beta);
}

double constant_C(double theta, double beta) {
  if (!(beta > 2.0)) throw DivergenceError("beta must be > 2");
  if (!(theta > 0.0)) throw InvalidParameter("theta must be > 0");
  const double delta = 2.0 / beta;
  return std::tgamma(1.0 + delta) * std::tgamma(1.0 - delta) * std::pow(theta, delta);
}

double succ_prob_spatial_average(double d, const NetworkParams& params) {
  params.validate();
  if (!(d >= 0.0)) throw InvalidParameter("distance must be >= 0");
  const double c = constant_C(params.theta, params.beta);
  return params.p * std::exp(-params.p * params.lambda * std::numbers::pi * c * d * d);
}

double interference_factor(double signal_gain, double interference_gain,
                           const NetworkParams& params, FactorForm form) {
  return 1.0 - factor_deficit(signal_gain, interference_gain, params, form);
}

double succ_prob_broadcast_conditional(Point y, std::span<const Point> interferers,
                                       const NetworkParams& params, FactorForm form) {
  params.validate();
  const double signal = path_loss(y, params.beta);
  FactorProduct product(interferers.size());
  for (const Point& x : interferers) {
    product.multiply_by_one_minus(
        factor_deficit(signal, path_loss(x - y, params.beta), params, form));
  }
  return params.p * product.value();
}

double succ_prob_collection_conditional(Point x, std::span<const Point> others,
                                        const NetworkParams& params, FactorForm form) {
  params.validate();
  const double signal = path_loss(x, params.beta);
  FactorProduct product(others.size());
  for (const Point& y : others) {
    if (y == x) throw SingularityError("interfering transmitter coincides with x");
    product.multiply_by_one_minus(
        factor_deficit(signal, path_loss(y, params.beta), params, form));
  }
  return params.p * product.value();
}

double succ_prob_collection_semi(Point y, std::span<const Point> co_nodes,
                                 const NetworkParams& params, FactorForm form) {
  const double signal = path_loss(y, params.beta);
  const double result = succ_prob_spatial_average(y.norm(), params);
  FactorProduct product(co_nodes.size());
  for (const Point& j : co_nodes) {
    if (j == y) throw SingularityError("co-node coincides with y");
    product.multiply_by_one_minus(factor_deficit(signal, path_loss(j, params.beta), params, form));
  }
  return result * product.value();
}

double joint_succ_prob_broadcast(std::span<const std::size_t> subset,
                                 const Realization& realization,
                                 const NetworkParams& params) {
  params.validate();
  check_subset(subset, realization);
  std::vector<double> signal(subset.size());
  for (std::size_t k = 0; k < subset.size(); ++k) {
    signal[k] = path_loss(realization.nodes[subset[k]], params.beta);
  }
  FactorProduct product(realization.interferers.size());
  for (const Point& x : realization.interferers) {
    // log of prod_i 1 / (1 + a_i)
    double log_pass = 0.0;
    for (std::size_t k = 0; k < subset.size(); ++k) {
      const Point& rx = realization.nodes[subset[k]];
      const double a = params.theta * path_loss(x - rx, params.beta) / signal[k];
      log_pass -= std::log1p(a);
    }
    product.multiply_by_one_minus(params.p * -std::expm1(log_pass));
  }
  return params.p * product.value();
}

double joint_fail_prob_broadcast(std::span<const std::size_t> subset,
                                 const Realization& realization,
                                 const NetworkParams& params) {
  check_subset(subset, realization);
  const std::size_t n = subset.size();
  // Strata by subset size; same-sign terms are summed before alternating.
  std::vector<double> strata(n + 1, 0.0);
  strata[0] = 1.0;
  std::vector<std::size_t> members;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    members.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (1u << k)) members.push_back(subset[k]);
    }
    strata[members.size()] += joint_succ_prob_broadcast(members, realization, params);
  }
  double total = 0.0;
  for (std::size_t k = n + 1; k-- > 0;) total += (k % 2 == 0 ? 1.0 : -1.0) * strata[k];
  return total;
}

std::size_t SlotOutcome::reception_count() const {
  return static_cast<std::size_t>(std::count(received.begin(), received.end(), 1));
}

SlotSampler::SlotSampler(const Realization& realization, Mode mode,
                         const NetworkParams& params)
    : mode_(mode),
      params_(params),
      node_count_(realization.nodes.size()),
      interferer_count_(realization.interferers.size()) {
  check_sampler_params(params);
  const double beta = params.beta;
  if (mode == Mode::broadcast) {
    node_signal_gain_.resize(node_count_);
    sorted_gain_.resize(node_count_);
    sorted_index_.resize(node_count_);
    for (std::size_t i = 0; i < node_count_; ++i) {
      const Point& rx = realization.nodes[i];
      node_signal_gain_[i] = path_loss(rx, beta);
      std::vector<std::pair<double, std::uint32_t>> gains;
      gains.reserve(interferer_count_);
      for (std::size_t x = 0; x < interferer_count_; ++x) {
        gains.emplace_back(path_loss(realization.interferers[x] - rx, beta),
                           static_cast<std::uint32_t>(x));
      }
      std::sort(gains.begin(), gains.end(), [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
      });
      for (const auto& [gain, index] : gains) {
        sorted_gain_[i].push_back(gain);
        sorted_index_[i].push_back(index);
      }
    }
    interferer_active_.assign(interferer_count_, 0);
    active_list_.reserve(interferer_count_);
  } else {
    node_signal_gain_.resize(node_count_);
    for (std::size_t i = 0; i < node_count_; ++i) {
      node_signal_gain_[i] = path_loss(realization.nodes[i], beta);
    }
    interferer_gain_to_origin_.reserve(interferer_count_);
    for (const Point& x : realization.interferers) {
      interferer_gain_to_origin_.push_back(path_loss(x, beta));
    }
    std::sort(interferer_gain_to_origin_.begin(), interferer_gain_to_origin_.end(),
              std::greater<>());
    node_power_.resize(node_count_);
  }
}

SlotOutcome SlotSampler::draw(RandomStream& rng) {
  SlotOutcome out;
  draw(rng, out);
  return out;
}

void SlotSampler::draw(RandomStream& rng, SlotOutcome& out) {
  out.received.assign(node_count_, 0);
  out.base_active = false;
  if (mode_ == Mode::broadcast) {
    out.node_active.clear();
    draw_broadcast(rng, out);
  } else {
    out.node_active.assign(node_count_, 0);
    draw_collection(rng, out);
  }
}

void SlotSampler::draw_interferer_access(RandomStream& rng) {
  for (std::uint32_t x : active_list_) interferer_active_[x] = 0;
  active_list_.clear();
  if (params_.p <= 0.0 || interferer_count_ == 0) return;
  if (params_.p >= 1.0) {
    for (std::size_t x = 0; x < interferer_count_; ++x) {
      interferer_active_[x] = 1;
      active_list_.push_back(static_cast<std::uint32_t>(x));
    }
    return;
  }
  // Gaps between active interferers are geometric; equivalent to one
  // Bernoulli(p) per interferer.
  std::geometric_distribution<std::int64_t> gap(params_.p);
  std::int64_t index = -1;
  for (;;) {
    index += 1 + gap(rng);
    if (index >= static_cast<std::int64_t>(interferer_count_)) break;
    interferer_active_[static_cast<std::size_t>(index)] = 1;
    active_list_.push_back(static_cast<std::uint32_t>(index));
  }
}

void SlotSampler::draw_broadcast(RandomStream& rng, SlotOutcome& out) {
  if (params_.p <= 0.0) return;
  out.base_active = params_.p >= 1.0 || draw_bernoulli(rng, params_.p);
  if (!out.base_active || node_count_ == 0) return;
  draw_interferer_access(rng);
  const double theta = params_.theta;
  for (std::size_t i = 0; i < node_count_; ++i) {
    const double signal = draw_fading(rng) * node_signal_gain_[i];
    double interference = 0.0;
    bool ok = true;
    if (!active_list_.empty()) {
      const auto& gains = sorted_gain_[i];
      const auto& index = sorted_index_[i];
      for (std::size_t k = 0; k < gains.size(); ++k) {
        if (!interferer_active_[index[k]]) continue;
        interference += draw_fading(rng) * gains[k];
        if (!(signal > theta * interference)) {
          ok = false;
          break;
        }
      }
    }
    // interference == 0 means infinite SIR.
    out.received[i] = ok && signal > theta * interference ? 1 : 0;
  }
}

void SlotSampler::draw_collection(RandomStream& rng, SlotOutcome& out) {
  if (params_.p <= 0.0 || node_count_ == 0) return;
  std::size_t best = node_count_;
  std::size_t active_count = 0;
  for (std::size_t i = 0; i < node_count_; ++i) {
    const bool active = params_.p >= 1.0 || draw_bernoulli(rng, params_.p);
    out.node_active[i] = active ? 1 : 0;
    node_power_[i] = 0.0;
    if (!active) continue;
    ++active_count;
    node_power_[i] = draw_fading(rng) * node_signal_gain_[i];
    if (best == node_count_ || node_power_[i] > node_power_[best]) best = i;
  }
  if (active_count == 0) return;

  // With theta > 1 only the strongest active node can clear the threshold.
  const double signal = node_power_[best];
  const double theta = params_.theta;
  double interference = 0.0;
  for (std::size_t i = 0; i < node_count_; ++i) {
    if (i != best) interference += node_power_[i];
  }
  if (!(signal > theta * interference)) return;

  const std::size_t count = interferer_gain_to_origin_.size();
  if (count > 0) {
    if (params_.p >= 1.0) {
      for (std::size_t x = 0; x < count; ++x) {
        interference += draw_fading(rng) * interferer_gain_to_origin_[x];
        if (!(signal > theta * interference)) return;
      }
    } else {
      std::geometric_distribution<std::int64_t> gap(params_.p);
      std::int64_t index = -1;
      for (;;) {
        index += 1 + gap(rng);
        if (index >= static_cast<std::int64_t>(count)) break;
        interference +=
            draw_fading(rng) * interferer_gain_to_origin_[static_cast<std::size_t>(index)];
        if (!(signal > theta * interference)) return;
      }
    }
  }
  out.received[best] = 1;
}

SlotOutcome draw_slot(const Realization& realization, Mode mode,
                      const NetworkParams& params, RandomStream& rng) {
  SlotSampler sampler(realization, mode, params);
  return sampler.draw(rng);
}

}  // namespace aobc
