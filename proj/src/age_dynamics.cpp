#include "aobc/age_dynamics.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "aobc/errors.hpp"

namespace aobc {

AgeLedger AgeLedger::initial(std::size_t node_count, Mode mode) {
  return AgeLedger{std::vector<std::int64_t>(node_count, 1), mode};
}

void step_age_in_place(AgeLedger& ledger, const SlotOutcome& outcome) {
  if (outcome.received.size() != ledger.ages.size()) {
    throw InvalidParameter("slot outcome has " + std::to_string(outcome.received.size()) +
                           " receivers, ledger has " + std::to_string(ledger.ages.size()));
  }
  for (std::size_t i = 0; i < ledger.ages.size(); ++i) {
    ledger.ages[i] = outcome.received[i] ? 1 : ledger.ages[i] + 1;
  }
}

AgeLedger step_age(AgeLedger ledger, const SlotOutcome& outcome) {
  step_age_in_place(ledger, outcome);
  return ledger;
}

namespace {

std::int64_t max_age(const AgeLedger& ledger) {
  if (ledger.ages.empty()) return 0;
  return *std::max_element(ledger.ages.begin(), ledger.ages.end());
}

}  // namespace

std::int64_t aob(const AgeLedger& ledger) {
  if (ledger.mode != Mode::broadcast) throw InvalidParameter("aob requires a broadcast ledger");
  return max_age(ledger);
}

std::int64_t aoc(const AgeLedger& ledger) {
  if (ledger.mode != Mode::collection) {
    throw InvalidParameter("aoc requires a collection ledger");
  }
  return max_age(ledger);
}

DelayRecord measure_delay(SlotSampler& sampler, RandomStream& rng, std::int64_t start_slot,
                          std::int64_t slot_cap) {
  const std::size_t n = sampler.node_count();
  if (n == 0) throw InvalidParameter("delay is undefined for an empty node set");
  DelayRecord record;
  record.start_slot = start_slot;
  record.completion_slot = start_slot;
  record.per_node_first_reception.assign(n, 0);
  std::size_t outstanding = n;
  SlotOutcome outcome;
  for (std::int64_t elapsed = 0; outstanding > 0; ++elapsed) {
    if (elapsed >= slot_cap) {
      throw DelayTimeout("delay exceeded " + std::to_string(slot_cap) + " slots", record);
    }
    sampler.draw(rng, outcome);
    const std::int64_t slot = start_slot + elapsed;
    for (std::size_t i = 0; i < n; ++i) {
      if (outcome.received[i] && record.per_node_first_reception[i] == 0) {
        record.per_node_first_reception[i] = slot + 1;
        record.completion_slot = slot + 1;
        --outstanding;
      }
    }
  }
  return record;
}

DelayRecord measure_delay(const Realization& realization, Mode mode,
                          const NetworkParams& params, RandomStream& rng,
                          std::int64_t start_slot, std::int64_t slot_cap) {
  if (realization.nodes.empty()) {
    throw InvalidParameter("delay is undefined for an empty node set");
  }
  SlotSampler sampler(realization, mode, params);
  return measure_delay(sampler, rng, start_slot, slot_cap);
}

AgeTraceWriter::AgeTraceWriter(std::ostream& out, bool write_header) : out_(out) {
  if (write_header) out_ << "slot,node_index,age\n";
}

void AgeTraceWriter::write(std::int64_t slot, const AgeLedger& ledger) {
  for (std::size_t i = 0; i < ledger.ages.size(); ++i) {
    out_ << slot << ',' << i << ',' << ledger.ages[i] << '\n';
  }
}

}  // namespace aobc
