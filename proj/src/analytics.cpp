#include "aobc/analytics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "aobc/errors.hpp"
#include "aobc/summation.hpp"

namespace aobc {
namespace {

constexpr std::size_t kLogSpaceThreshold = 64;
constexpr std::size_t kMaskBits = 24;

void check_cap(std::size_t n, std::size_t cap, const char* what) {
  if (n > cap || n > kMaskBits) {
    throw CapacityError(std::string(what) + ": " + std::to_string(n) +
                        " nodes exceeds the cap of " + std::to_string(std::min(cap, kMaskBits)));
  }
}

double sign_for_size(int size) { return size % 2 == 1 ? 1.0 : -1.0; }

// Alternating sum over nonempty subsets grouped by size: per-size strata are
// single-signed, then combined in descending magnitude.
class AlternatingStrata {
 public:
  explicit AlternatingStrata(std::size_t n) : strata_(n + 1) {}

  void add(std::uint32_t mask, double value) {
    strata_[static_cast<std::size_t>(std::popcount(mask))].add(value);
  }

  // sum_k (-1)^{k+1} stratum_k
  double value() const {
    std::vector<double> terms;
    terms.reserve(strata_.size());
    for (std::size_t k = 1; k < strata_.size(); ++k) {
      terms.push_back(sign_for_size(static_cast<int>(k)) * strata_[k].value());
    }
    return sum_descending_magnitude(std::move(terms));
  }

 private:
  std::vector<CompensatedSum> strata_;
};

}  // namespace

SubsetProbabilityTable SubsetProbabilityTable::build(const Realization& realization,
                                                     const NetworkParams& params,
                                                     std::size_t node_cap) {
  params.validate();
  const std::size_t n = realization.nodes.size();
  check_cap(n, node_cap, "broadcast subset table");
  const std::size_t masks = std::size_t{1} << n;
  const bool log_space = realization.interferers.size() > kLogSpaceThreshold;

  std::vector<double> signal(n);
  for (std::size_t i = 0; i < n; ++i) signal[i] = path_loss(realization.nodes[i], params.beta);

  // Either a running product or a running log, per mask.
  std::vector<double> accum(masks, log_space ? 0.0 : 1.0);
  std::vector<double> a(n);
  std::vector<double> log_pass(masks, 0.0);
  for (const Point& x : realization.interferers) {
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = params.theta * path_loss(x - realization.nodes[i], params.beta) / signal[i];
    }
    for (std::size_t mask = 1; mask < masks; ++mask) {
      const auto low = static_cast<std::size_t>(std::countr_zero(mask));
      const std::size_t rest = mask & (mask - 1);
      log_pass[mask] = log_pass[rest] - std::log1p(a[low]);
      const double deficit = rest == 0 ? params.p * a[low] / (1.0 + a[low])
                                       : params.p * -std::expm1(log_pass[mask]);
      if (log_space) {
        accum[mask] += std::log1p(-deficit);
      } else {
        accum[mask] *= 1.0 - deficit;
      }
    }
  }
  std::vector<double> success(masks, 1.0);
  for (std::size_t mask = 1; mask < masks; ++mask) {
    success[mask] = params.p * (log_space ? std::exp(accum[mask]) : accum[mask]);
  }
  return from_joint_success(std::move(success));
}

SubsetProbabilityTable SubsetProbabilityTable::from_joint_success(
    std::vector<double> joint_success) {
  const std::size_t masks = joint_success.size();
  if (masks == 0 || !std::has_single_bit(masks)) {
    throw InvalidParameter("joint success table must have 2^n entries");
  }
  SubsetProbabilityTable table;
  table.node_count_ = static_cast<std::size_t>(std::countr_zero(masks));
  check_cap(table.node_count_, kMaskBits, "subset table");
  if (joint_success[0] != 1.0) throw InvalidParameter("empty-set success must be 1");
  table.joint_success_ = std::move(joint_success);
  table.joint_failure_.assign(masks, 1.0);

  // w_J = sum_{S subset J} (-1)^{|S|} mu_S, by subset size strata.
  const std::size_t n = table.node_count_;
  std::vector<CompensatedSum> strata(n + 1);
  std::vector<double> terms(n + 1);
  for (std::uint32_t j = 1; j < masks; ++j) {
    for (auto& s : strata) s = CompensatedSum{};
    for (std::uint32_t s = j;; s = (s - 1) & j) {
      strata[static_cast<std::size_t>(std::popcount(s))].add(table.joint_success_[s]);
      if (s == 0) break;
    }
    for (std::size_t k = 0; k <= n; ++k) {
      terms[k] = (k % 2 == 0 ? 1.0 : -1.0) * strata[k].value();
    }
    table.joint_failure_[j] = sum_descending_magnitude(terms);
  }
  return table;
}

double SubsetProbabilityTable::reception_pattern_probability(std::uint32_t received) const {
  const std::uint32_t full = static_cast<std::uint32_t>((std::size_t{1} << node_count_) - 1);
  if (received > full) throw InvalidParameter("pattern mask out of range");
  const std::uint32_t missed = full & ~received;
  // sum over L subset of missed of (-1)^{|L|} mu_{received u L}
  std::vector<double> terms;
  for (std::uint32_t l = missed;; l = (l - 1) & missed) {
    const double sign = std::popcount(l) % 2 == 0 ? 1.0 : -1.0;
    terms.push_back(sign * joint_success_[received | l]);
    if (l == 0) break;
  }
  return sum_descending_magnitude(std::move(terms));
}

double SubsetProbabilityTable::delay_survival(std::int64_t k) const {
  if (k < 0) throw InvalidParameter("delay index must be >= 0");
  if (node_count_ == 0) return 0.0;
  const std::size_t masks = joint_failure_.size();
  AlternatingStrata strata(node_count_);
  for (std::uint32_t j = 1; j < masks; ++j) {
    strata.add(j, std::pow(joint_failure_[j], static_cast<double>(k)));
  }
  return strata.value();
}

double SubsetProbabilityTable::delay_pmf(std::int64_t k) const {
  if (k < 1) throw InvalidParameter("delay is at least one slot");
  return delay_survival(k - 1) - delay_survival(k);
}

double SubsetProbabilityTable::worst_single_failure() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < node_count_; ++i) {
    worst = std::max(worst, joint_failure_[std::size_t{1} << i]);
  }
  return worst;
}

std::vector<double> broadcast_delay_law(const SubsetProbabilityTable& table,
                                        double tail_tol) {
  if (!(tail_tol > 0.0)) throw InvalidParameter("tail_tol must be > 0");
  const std::size_t n = table.node_count();
  if (n == 0) return {};
  const double q = table.worst_single_failure();
  if (!(q < 1.0)) throw InvalidParameter("a node never receives; the delay is unbounded");

  // Remainder of sum_k k P(D = k) beyond K is at most n q^K (K + 1 / (1 - q)).
  auto remainder_bound = [&](double k) {
    return static_cast<double>(n) * std::pow(q, k) * (k + 1.0 / (1.0 - q));
  };
  std::int64_t horizon = 1;
  while (remainder_bound(static_cast<double>(horizon)) >= tail_tol) {
    horizon = horizon < 64 ? horizon + 1 : horizon + horizon / 8;
  }

  const std::size_t masks = std::size_t{1} << n;
  std::vector<double> power(masks, 1.0);  // w_J^k
  std::vector<double> law;
  law.reserve(static_cast<std::size_t>(horizon));
  double previous = 1.0;  // P(D > 0)
  for (std::int64_t k = 1; k <= horizon; ++k) {
    AlternatingStrata strata(n);
    for (std::uint32_t j = 1; j < masks; ++j) {
      power[j] *= table.joint_failure(j);
      strata.add(j, power[j]);
    }
    const double survival = strata.value();
    law.push_back(previous - survival);
    previous = survival;
  }
  return law;
}

double exact_eaob(const SubsetProbabilityTable& table, double tail_tol) {
  if (table.node_count() == 0) return 0.0;
  const std::vector<double> law = broadcast_delay_law(table, tail_tol);
  CompensatedSum mean;
  for (std::size_t k = 0; k < law.size(); ++k) {
    mean.add(static_cast<double>(k + 1) * law[k]);
  }
  return mean.value();
}

double exact_eaob(const Realization& realization, const NetworkParams& params,
                  double tail_tol, std::size_t node_cap) {
  if (realization.nodes.empty()) return 0.0;
  return exact_eaob(SubsetProbabilityTable::build(realization, params, node_cap), tail_tol);
}

double eaob_closed_form(const SubsetProbabilityTable& table) {
  const std::size_t masks = std::size_t{1} << table.node_count();
  AlternatingStrata strata(table.node_count());
  for (std::uint32_t j = 1; j < masks; ++j) strata.add(j, 1.0 / (1.0 - table.joint_failure(j)));
  return strata.value();
}

double expected_max_independent_geometric(std::span<const double> mu) {
  const std::size_t n = mu.size();
  if (n == 0) return 0.0;
  check_cap(n, kCollectionNodeCap, "independent geometric maximum");
  for (double m : mu) {
    if (!(m > 0.0 && m <= 1.0)) throw InvalidParameter("success probabilities must lie in (0, 1]");
  }
  const std::size_t masks = std::size_t{1} << n;
  std::vector<double> log_fail(masks, 0.0);
  AlternatingStrata strata(n);
  for (std::size_t mask = 1; mask < masks; ++mask) {
    const auto low = static_cast<std::size_t>(std::countr_zero(mask));
    log_fail[mask] = log_fail[mask & (mask - 1)] + std::log1p(-mu[low]);
    // min over the subset is geometric with parameter 1 - prod (1 - mu_i)
    strata.add(static_cast<std::uint32_t>(mask), 1.0 / -std::expm1(log_fail[mask]));
  }
  return strata.value();
}

std::vector<double> broadcast_success_probs(const Realization& realization,
                                            const NetworkParams& params, FactorForm form) {
  std::vector<double> mu;
  mu.reserve(realization.nodes.size());
  for (const Point& y : realization.nodes) {
    mu.push_back(succ_prob_broadcast_conditional(y, realization.interferers, params, form));
  }
  return mu;
}

double independent_bound_eaob(const Realization& realization, const NetworkParams& params,
                              std::size_t node_cap) {
  if (realization.nodes.empty()) throw InvalidParameter("independent bound needs >= 1 node");
  check_cap(realization.nodes.size(), node_cap, "independent bound");
  const auto mu = broadcast_success_probs(realization, params);
  return expected_max_independent_geometric(mu);
}

std::vector<double> collection_success_probs(const Realization& realization,
                                             const NetworkParams& params,
                                             CollectionProbability kind, FactorForm form) {
  const std::size_t n = realization.nodes.size();
  std::vector<double> mu(n);
  std::vector<Point> others;
  for (std::size_t u = 0; u < n; ++u) {
    others.clear();
    if (kind == CollectionProbability::conditional) {
      others.insert(others.end(), realization.interferers.begin(),
                    realization.interferers.end());
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (j != u) others.push_back(realization.nodes[j]);
    }
    mu[u] = kind == CollectionProbability::conditional
                ? succ_prob_collection_conditional(realization.nodes[u], others, params, form)
                : succ_prob_collection_semi(realization.nodes[u], others, params, form);
  }
  return mu;
}

double expected_collection_time(std::span<const double> mu, std::size_t node_cap) {
  const std::size_t n = mu.size();
  if (n == 0) return 0.0;
  check_cap(n, node_cap, "collection time");
  CompensatedSum total;
  for (double m : mu) {
    if (!(m > 0.0 && m <= 1.0)) throw InvalidParameter("success probabilities must lie in (0, 1]");
    total.add(m);
  }
  if (total.value() > 1.0 + 1e-12) {
    throw InvalidParameter("disjoint reception probabilities sum above 1");
  }
  const std::size_t masks = std::size_t{1} << n;
  std::vector<double> rate(masks, 0.0);
  AlternatingStrata strata(n);
  for (std::size_t mask = 1; mask < masks; ++mask) {
    const auto low = static_cast<std::size_t>(std::countr_zero(mask));
    rate[mask] = rate[mask & (mask - 1)] + mu[low];
    // min over the subset is geometric with parameter sum mu (disjoint events)
    strata.add(static_cast<std::uint32_t>(mask), 1.0 / rate[mask]);
  }
  return strata.value();
}

double exact_eaoc(const Realization& realization, const NetworkParams& params,
                  CollectionProbability kind, std::size_t node_cap) {
  if (realization.nodes.empty()) return 0.0;
  check_cap(realization.nodes.size(), node_cap, "exact collection age");
  const auto mu = collection_success_probs(realization, params, kind);
  return expected_collection_time(mu, node_cap);
}

double max_min_identity(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) throw InvalidParameter("max-min identity needs a nonempty set");
  check_cap(n, kCollectionNodeCap, "max-min identity");
  const std::size_t masks = std::size_t{1} << n;
  std::vector<double> minimum(masks, std::numeric_limits<double>::infinity());
  AlternatingStrata strata(n);
  for (std::size_t mask = 1; mask < masks; ++mask) {
    const auto low = static_cast<std::size_t>(std::countr_zero(mask));
    minimum[mask] = std::min(minimum[mask & (mask - 1)], values[low]);
    strata.add(static_cast<std::uint32_t>(mask), minimum[mask]);
  }
  return strata.value();
}

double aob_upper_bound(double r, const NetworkParams& params) {
  params.validate();
  if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidParameter("r must be finite and >= 0");
  const double c = constant_C(params.theta, params.beta);
  const double exponent = params.p * params.lambda * std::numbers::pi * c * r * r;
  return std::expm1(exponent) / (params.p * params.p * c);
}

double aoc_upper_bound(std::int64_t n, double r, double epsilon, const NetworkParams& params,
                       FactorForm form) {
  params.validate();
  if (n < 1) throw InvalidParameter("aoc bound needs n >= 1");
  if (!(epsilon > 0.0 && epsilon < r)) throw InvalidParameter("epsilon must lie in (0, r)");
  const double factor =
      interference_factor(std::pow(r, -params.beta), std::pow(epsilon, -params.beta), params,
                          form);
  const double mu_bar =
      std::pow(factor, static_cast<double>(n - 1)) * succ_prob_spatial_average(r, params);
  return harmonic(n) / mu_bar;
}

double aoc_upper_bound_poisson(double r, double epsilon, const NetworkParams& params,
                               FactorForm form) {
  params.validate();
  const double mean = params.lambda * std::numbers::pi * r * r;
  if (mean == 0.0) return 0.0;
  // Poisson weights in log space; stop well past the mode once terms vanish.
  CompensatedSum total;
  const auto mode = static_cast<std::int64_t>(mean);
  for (std::int64_t n = 1;; ++n) {
    const double log_weight =
        static_cast<double>(n) * std::log(mean) - mean - std::lgamma(static_cast<double>(n) + 1.0);
    const double term = std::exp(log_weight) * aoc_upper_bound(n, r, epsilon, params, form);
    total.add(term);
    if (n > mode + 10 && term < 1e-15 * total.value()) break;
  }
  return total.value();
}

double harmonic(std::int64_t n) {
  if (n < 0) throw InvalidParameter("harmonic number needs n >= 0");
  CompensatedSum sum;
  for (std::int64_t k = n; k >= 1; --k) sum.add(1.0 / static_cast<double>(k));
  return sum.value();
}

}  // namespace aobc
