#pragma once
// Reference computations for tests. Each one takes a different route from the
// library code it checks: direct enumeration, plain per-link simulation or
// numerical quadrature.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "aobc/geometry.hpp"
#include "aobc/params.hpp"
#include "aobc/rng.hpp"

namespace oracle {

// P(SIR > theta) at receiver y for a transmitter at tx, given the set of
// active interferers: prod 1 / (1 + theta g_x / g_tx) with g = |.|^-beta.
inline double rayleigh_success_given_active(aobc::Point tx, aobc::Point y,
                                            std::span<const aobc::Point> active,
                                            const aobc::NetworkParams& params) {
  const double g_tx = std::pow((y - tx).norm2(), -params.beta / 2);
  double s = 1.0;
  for (const auto& x : active) {
    const double g_x = std::pow((y - x).norm2(), -params.beta / 2);
    s /= 1.0 + params.theta * g_x / g_tx;
  }
  return s;
}

// Plain per-slot broadcast draw: every access flag and every fading power,
// no precomputation, no early exits.
inline std::vector<std::uint8_t> naive_broadcast_slot(const aobc::Realization& rz,
                                                      const aobc::NetworkParams& params,
                                                      std::mt19937_64& rng) {
  std::bernoulli_distribution access(params.p);
  std::exponential_distribution<double> fading(1.0);
  const bool base = access(rng);
  std::vector<std::uint8_t> active(rz.interferers.size());
  for (auto& a : active) a = access(rng);
  std::vector<std::uint8_t> received(rz.nodes.size(), 0);
  for (std::size_t i = 0; i < rz.nodes.size(); ++i) {
    const auto y = rz.nodes[i];
    const double signal = fading(rng) * std::pow(y.norm2(), -params.beta / 2);
    double interference = 0.0;
    for (std::size_t k = 0; k < rz.interferers.size(); ++k) {
      const double h = fading(rng);
      if (active[k]) interference += h * std::pow((y - rz.interferers[k]).norm2(), -params.beta / 2);
    }
    received[i] = base && signal > params.theta * interference;
  }
  return received;
}

// Same for collection: the base station decodes transmitter u when its SIR
// against every other active transmitter (nodes and interferers) clears theta.
inline std::vector<std::uint8_t> naive_collection_slot(const aobc::Realization& rz,
                                                       const aobc::NetworkParams& params,
                                                       std::mt19937_64& rng) {
  std::bernoulli_distribution access(params.p);
  std::exponential_distribution<double> fading(1.0);
  std::vector<double> power;
  std::vector<int> owner;  // node index or -1 for an interferer
  for (std::size_t i = 0; i < rz.nodes.size(); ++i) {
    const double h = fading(rng);
    if (access(rng)) {
      power.push_back(h * std::pow(rz.nodes[i].norm2(), -params.beta / 2));
      owner.push_back(static_cast<int>(i));
    }
  }
  for (const auto& x : rz.interferers) {
    const double h = fading(rng);
    if (access(rng)) {
      power.push_back(h * std::pow(x.norm2(), -params.beta / 2));
      owner.push_back(-1);
    }
  }
  double total = 0.0;
  for (double v : power) total += v;
  std::vector<std::uint8_t> received(rz.nodes.size(), 0);
  for (std::size_t k = 0; k < power.size(); ++k) {
    if (owner[k] >= 0 && power[k] > params.theta * (total - power[k])) received[owner[k]] = 1;
  }
  return received;
}

// Probability of each reception pattern (bitmask over nodes) in one broadcast
// slot, by enumerating every interferer access pattern. Given the access
// pattern, receptions are independent across nodes.
inline std::vector<double> broadcast_pattern_law(const aobc::Realization& rz,
                                                 const aobc::NetworkParams& params) {
  const std::size_t n = rz.nodes.size();
  const std::size_t m = rz.interferers.size();
  std::vector<double> law(std::size_t{1} << n, 0.0);
  law[0] += 1.0 - params.p;
  std::vector<aobc::Point> active;
  std::vector<double> s(n);
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << m); ++a) {
    active.clear();
    for (std::size_t k = 0; k < m; ++k) {
      if (a >> k & 1) active.push_back(rz.interferers[k]);
    }
    const double weight = params.p * std::pow(params.p, static_cast<double>(active.size())) *
                          std::pow(1.0 - params.p, static_cast<double>(m - active.size()));
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = rayleigh_success_given_active({0.0, 0.0}, rz.nodes[i], active, params);
    }
    for (std::uint32_t pat = 0; pat < law.size(); ++pat) {
      double w = weight;
      for (std::size_t i = 0; i < n; ++i) w *= (pat >> i & 1) ? s[i] : 1.0 - s[i];
      law[pat] += w;
    }
  }
  return law;
}

// Expected absorption time of the chain whose state is the set of nodes that
// have received so far, started empty and absorbed at the full set.
inline double absorbing_chain_delay(const std::vector<double>& pattern_law, std::size_t n) {
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  std::vector<double> t(full + 1, 0.0);
  for (std::uint32_t u = full; u-- > 0;) {
    double stay = 0.0, rest = 1.0;
    for (std::uint32_t pat = 0; pat <= full; ++pat) {
      const std::uint32_t next = u | pat;
      if (next == u) {
        stay += pattern_law[pat];
      } else {
        rest += pattern_law[pat] * t[next];
      }
    }
    t[u] = rest / (1.0 - stay);
  }
  return t[0];
}

// Monte Carlo coupon collector with disjoint categories: each slot yields
// coupon u with probability mu[u] or nothing. Simulated through its jump
// chain: with unseen set U the wait for the next new coupon is geometric in
// sum_{U} mu and the coupon is drawn proportionally to mu within U.
// Returns mean and standard error of the episode length.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

inline Estimate categorical_collector(const std::vector<double>& mu, std::int64_t episodes,
                                      std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> unseen(mu.size());
  double sum = 0.0, sum2 = 0.0;
  for (std::int64_t e = 0; e < episodes; ++e) {
    unseen = mu;
    double mass = 0.0;
    for (double m : mu) mass += m;
    std::int64_t slots = 0;
    for (std::size_t left = mu.size(); left > 0; --left) {
      slots += std::geometric_distribution<std::int64_t>(mass)(rng) + 1;
      double pick = unit(rng) * mass;
      std::size_t u = 0;
      while (u + 1 < unseen.size() && (unseen[u] == 0.0 || pick >= unseen[u])) {
        pick -= unseen[u];
        ++u;
      }
      while (unseen[u] == 0.0) --u;  // rounding at the top end
      mass -= unseen[u];
      unseen[u] = 0.0;
      if (left > 1) {
        mass = 0.0;
        for (double m : unseen) mass += m;
      }
    }
    const auto x = static_cast<double>(slots);
    sum += x;
    sum2 += x * x;
  }
  const double n = static_cast<double>(episodes);
  const double mean = sum / n;
  return {mean, std::sqrt((sum2 / n - mean * mean) / (n - 1))};
}

// lambda * integral over the disk of 1 / mu(|x|), by composite Simpson in the
// radius, with mu(d) = p exp(-p lambda pi C d^2) and C from the Beta-function
// form pi delta / sin(pi delta) theta^delta.
inline double integrated_inverse_mu(double r, const aobc::NetworkParams& params,
                                    int panels = 20000) {
  const double delta = 2.0 / params.beta;
  const double c = std::numbers::pi * delta / std::sin(std::numbers::pi * delta) *
                   std::pow(params.theta, delta);
  auto f = [&](double x) {
    const double mu = params.p * std::exp(-params.p * params.lambda * std::numbers::pi * c * x * x);
    return 2.0 * std::numbers::pi * x / mu;
  };
  const double h = r / panels;
  double s = f(0.0) + f(r);
  for (int k = 1; k < panels; ++k) s += f(k * h) * (k % 2 ? 4.0 : 2.0);
  return params.lambda * s * h / 3.0;
}

}  // namespace oracle
