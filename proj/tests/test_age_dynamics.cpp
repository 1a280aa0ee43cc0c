#include <doctest.h>

#include <cmath>
#include <sstream>

#include "aobc/age_dynamics.hpp"
#include "aobc/errors.hpp"

using namespace aobc;

namespace {

SlotOutcome outcome(std::vector<std::uint8_t> received) {
  SlotOutcome o;
  o.base_active = true;
  o.received = std::move(received);
  return o;
}

}  // namespace

TEST_CASE("ledger starts at one and resets on reception") {
  auto ledger = AgeLedger::initial(3, Mode::broadcast);
  CHECK(ledger.ages == std::vector<std::int64_t>{1, 1, 1});
  ledger = step_age(ledger, outcome({0, 1, 0}));
  CHECK(ledger.ages == std::vector<std::int64_t>{2, 1, 2});
  step_age_in_place(ledger, outcome({1, 0, 0}));
  CHECK(ledger.ages == std::vector<std::int64_t>{1, 2, 3});
  CHECK(aob(ledger) == 3);
  CHECK_THROWS_AS(aoc(ledger), InvalidParameter);
  CHECK_THROWS_AS(step_age(ledger, outcome({1, 0})), InvalidParameter);
}

TEST_CASE("age of collection and empty ledgers") {
  auto ledger = AgeLedger::initial(2, Mode::collection);
  step_age_in_place(ledger, outcome({0, 0}));
  CHECK(aoc(ledger) == 2);
  CHECK_THROWS_AS(aob(ledger), InvalidParameter);
  CHECK(aob(AgeLedger::initial(0, Mode::broadcast)) == 0);
  CHECK(aoc(AgeLedger::initial(0, Mode::collection)) == 0);
}

TEST_CASE("single node delay is geometric") {
  NetworkParams params;
  params.p = 0.25;
  Realization rz{{{1.0, 0.0}}, {}, 2.0, 4.0};
  SlotSampler sampler(rz, Mode::broadcast, params);
  auto rng = derive_stream(3, {label(StreamPurpose::delay)});
  const int reps = 40000;
  double sum = 0.0;
  std::int64_t start = 0;
  for (int k = 0; k < reps; ++k) {
    const auto rec = measure_delay(sampler, rng, start);
    CHECK(rec.delay() >= 1);
    CHECK(rec.per_node_first_reception[0] == rec.completion_slot);
    sum += static_cast<double>(rec.delay());
    start = rec.completion_slot;
  }
  // mean 1/p = 4, variance (1-p)/p^2 = 12
  CHECK(std::abs(sum / reps - 4.0) < 4.0 * std::sqrt(12.0 / reps));
}

TEST_CASE("delay timeout keeps the partial record") {
  NetworkParams params;
  params.p = 1e-12;
  Realization rz{{{1.0, 0.0}, {0.0, 1.0}}, {}, 2.0, 4.0};
  auto rng = derive_stream(4, {label(StreamPurpose::delay)});
  try {
    measure_delay(rz, Mode::broadcast, params, rng, 100, 50);
    FAIL("expected a timeout");
  } catch (const DelayTimeout& e) {
    CHECK(e.partial().start_slot == 100);
    CHECK(e.partial().per_node_first_reception == std::vector<std::int64_t>{0, 0});
  }
  Realization empty{{}, {}, 2.0, 4.0};
  CHECK_THROWS_AS(measure_delay(empty, Mode::broadcast, params, rng, 0), InvalidParameter);
}

TEST_CASE("time average age of a scripted schedule") {
  // receptions every third slot for one node: ages cycle 1,2,3
  auto ledger = AgeLedger::initial(1, Mode::broadcast);
  std::int64_t total = 0;
  for (int t = 0; t < 300; ++t) {
    step_age_in_place(ledger, outcome({static_cast<std::uint8_t>(t % 3 == 2)}));
    total += aob(ledger);
  }
  CHECK(static_cast<double>(total) / 300 == doctest::Approx(2.0));
}

TEST_CASE("trace writer") {
  std::ostringstream out;
  AgeTraceWriter writer(out);
  auto ledger = AgeLedger::initial(2, Mode::broadcast);
  writer.write(0, ledger);
  step_age_in_place(ledger, outcome({1, 0}));
  writer.write(1, ledger);
  CHECK(out.str() == "slot,node_index,age\n0,0,1\n0,1,1\n1,0,1\n1,1,2\n");
}
