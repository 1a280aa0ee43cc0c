#include <doctest.h>

#include <cmath>
#include <numbers>

#include "aobc/channel.hpp"
#include "aobc/errors.hpp"
#include "aobc/geometry.hpp"
#include "oracles.hpp"

using namespace aobc;

namespace {

Realization small_instance() {
  Realization rz;
  rz.node_radius = 5.0;
  rz.window_radius = 15.0;
  rz.nodes = {{1.5, 0.5}, {-2.0, 2.5}, {0.3, -3.9}};
  rz.interferers = {{6.0, 1.0}, {-4.0, 6.5}, {2.0, -8.0}, {-9.0, -3.0}, {11.0, 7.0}};
  return rz;
}

double sum_over_supersets(const std::vector<double>& law, std::uint32_t s) {
  double total = 0.0;
  for (std::uint32_t pat = 0; pat < law.size(); ++pat) {
    if ((pat & s) == s) total += law[pat];
  }
  return total;
}

}  // namespace

TEST_CASE("path loss") {
  CHECK(path_loss({3, 4}, 4.0) == doctest::Approx(1.0 / 625.0));
  CHECK(path_loss({0, 2}, 3.0) == doctest::Approx(0.125));
  CHECK_THROWS_AS(path_loss({0, 0}, 4.0), SingularityError);
}

TEST_CASE("constant C against the Beta-function form") {
  CHECK(constant_C(1.0, 4.0) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
  CHECK(constant_C(5.0, 4.0) == doctest::Approx(3.51240736552036).epsilon(1e-13));
  for (double beta : {2.5, 3.0, 3.7, 5.0}) {
    const double delta = 2.0 / beta;
    const double want = std::numbers::pi * delta / std::sin(std::numbers::pi * delta) *
                        std::pow(2.0, delta);
    CHECK(constant_C(2.0, beta) == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK_THROWS_AS(constant_C(5.0, 2.0), DivergenceError);
}

TEST_CASE("spatially averaged success") {
  const NetworkParams params;
  CHECK(succ_prob_spatial_average(0.0, params) == doctest::Approx(params.p));
  const double c = constant_C(5.0, 4.0);
  CHECK(succ_prob_spatial_average(10.0, params) ==
        doctest::Approx(0.2 * std::exp(-0.2 * 0.01 * std::numbers::pi * c * 100)));
  CHECK(succ_prob_spatial_average(10.0, params) == doctest::Approx(0.02200).epsilon(1e-3));
}

TEST_CASE("interference factor forms") {
  const NetworkParams params;
  const double gs = 1.0 / 16.0, gi = 1.0 / 81.0;
  CHECK(interference_factor(gs, gi, params) ==
        doctest::Approx(1 - 0.2 + 0.2 / (1 + 5.0 * gi / gs)));
  CHECK(interference_factor(gs, gi, params, FactorForm::printed) ==
        doctest::Approx(1 - 0.2 / (1 + 5.0 * gs / gi)));
  // a far interferer barely matters under the derived form
  CHECK(interference_factor(1.0, 1e-12, params) == doctest::Approx(1.0));
}

TEST_CASE("conditional broadcast success matches enumeration") {
  const NetworkParams params;
  const auto rz = small_instance();
  const auto law = oracle::broadcast_pattern_law(rz, params);
  for (std::size_t i = 0; i < rz.nodes.size(); ++i) {
    const double want = sum_over_supersets(law, 1u << i);
    CHECK(succ_prob_broadcast_conditional(rz.nodes[i], rz.interferers, params) ==
          doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("joint success and failure match enumeration") {
  const NetworkParams params;
  const auto rz = small_instance();
  const auto law = oracle::broadcast_pattern_law(rz, params);
  const std::vector<std::vector<std::size_t>> subsets{{0}, {1, 2}, {0, 2}, {0, 1, 2}};
  for (const auto& s : subsets) {
    std::uint32_t mask = 0;
    for (auto i : s) mask |= 1u << i;
    CHECK(joint_succ_prob_broadcast(s, rz, params) ==
          doctest::Approx(sum_over_supersets(law, mask)).epsilon(1e-12));
    double none = 0.0;
    for (std::uint32_t pat = 0; pat < law.size(); ++pat) {
      if ((pat & mask) == 0) none += law[pat];
    }
    CHECK(joint_fail_prob_broadcast(s, rz, params) == doctest::Approx(none).epsilon(1e-12));
  }
  const std::vector<std::size_t> repeated{1, 1};
  CHECK_THROWS_AS(joint_succ_prob_broadcast(repeated, rz, params), InvalidParameter);
}

TEST_CASE("broadcast sampler agrees with the plain simulator") {
  const NetworkParams params;
  const auto rz = small_instance();
  SlotSampler sampler(rz, Mode::broadcast, params);
  auto rng = derive_stream(10, {label(StreamPurpose::channel)});
  std::mt19937_64 ref_rng(99);
  const int slots = 200000;
  std::vector<double> fast(3), slow(3);
  double fast_all = 0, slow_all = 0;
  SlotOutcome out;
  for (int t = 0; t < slots; ++t) {
    sampler.draw(rng, out);
    const auto ref = oracle::naive_broadcast_slot(rz, params, ref_rng);
    for (int i = 0; i < 3; ++i) {
      fast[i] += out.received[i];
      slow[i] += ref[i];
    }
    fast_all += out.reception_count() == 3;
    slow_all += ref[0] && ref[1] && ref[2];
  }
  auto agree = [&](double a, double b) {
    const double pa = a / slots, pb = b / slots;
    const double se = std::sqrt((pa * (1 - pa) + pb * (1 - pb)) / slots);
    return std::abs(pa - pb) < 4 * se + 1e-12;
  };
  for (int i = 0; i < 3; ++i) CHECK(agree(fast[i], slow[i]));
  CHECK(agree(fast_all, slow_all));
}

TEST_CASE("collection sampler agrees with the plain simulator and the formula") {
  const NetworkParams params;
  const auto rz = small_instance();
  SlotSampler sampler(rz, Mode::collection, params);
  auto rng = derive_stream(11, {label(StreamPurpose::channel)});
  std::mt19937_64 ref_rng(98);
  const int slots = 200000;
  std::vector<double> fast(3), slow(3);
  SlotOutcome out;
  for (int t = 0; t < slots; ++t) {
    sampler.draw(rng, out);
    CHECK_LE(out.reception_count(), 1u);
    const auto ref = oracle::naive_collection_slot(rz, params, ref_rng);
    for (int i = 0; i < 3; ++i) {
      fast[i] += out.received[i];
      slow[i] += ref[i];
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<Point> others = rz.interferers;
    for (std::size_t j = 0; j < 3; ++j) {
      if (j != i) others.push_back(rz.nodes[j]);
    }
    const double mu = succ_prob_collection_conditional(rz.nodes[i], others, params);
    const double se = std::sqrt(mu * (1 - mu) / slots);
    CHECK(std::abs(fast[i] / slots - mu) < 4 * se);
    CHECK(std::abs(slow[i] / slots - mu) < 4 * se);
  }
}

TEST_CASE("semi collection success averages the conditional one") {
  NetworkParams params;
  params.r = 5.0;
  const Point y{3.0, 1.0};
  const std::vector<Point> co{{-1.0, 2.0}, {0.5, -4.0}};
  const double semi = succ_prob_collection_semi(y, co, params);
  auto rng = derive_stream(12, {label(StreamPurpose::oracle)});
  const double rw = truncation_window_radius(params, 1e-4);
  const int reps = 3000;
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < reps; ++k) {
    auto others = sample_interferer_process(params.lambda, rw, rng);
    others.insert(others.end(), co.begin(), co.end());
    const double v = succ_prob_collection_conditional(y, others, params);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum2 / reps - mean * mean) / reps);
  CHECK(std::abs(mean - semi) < 4 * se + 1e-3 * semi);
}

TEST_CASE("silent network") {
  NetworkParams params;
  params.p = 1e-300;
  const auto rz = small_instance();
  SlotSampler sampler(rz, Mode::broadcast, params);
  auto rng = derive_stream(13, {label(StreamPurpose::channel)});
  for (int t = 0; t < 1000; ++t) CHECK(sampler.draw(rng).reception_count() == 0);
}

TEST_CASE("no interferers means only fading-free success") {
  const NetworkParams params;
  Realization rz{{{1, 0}, {0, 2}}, {}, 3.0, 6.0};
  CHECK(succ_prob_broadcast_conditional(rz.nodes[0], rz.interferers, params) ==
        doctest::Approx(params.p));
  const std::vector<std::size_t> both{0, 1};
  CHECK(joint_succ_prob_broadcast(both, rz, params) == doctest::Approx(params.p));
}
