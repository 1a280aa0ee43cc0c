#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "aobc/channel.hpp"
#include "aobc/geometry.hpp"
#include "aobc/params.hpp"
#include "aobc/rng.hpp"

namespace aobc {

/// Per-node age of information, in whole slots. Under generate-at-will an
/// age resets to 1 in the slot after a reception and grows by one otherwise.
struct AgeLedger {
  std::vector<std::int64_t> ages;
  Mode mode = Mode::broadcast;

  /// All ages start at 1.
  static AgeLedger initial(std::size_t node_count, Mode mode);

  bool operator==(const AgeLedger&) const = default;
};

/// age_i <- 1 if received[i], else age_i + 1. Throws InvalidParameter when
/// the outcome is not sized to the ledger.
AgeLedger step_age(AgeLedger ledger, const SlotOutcome& outcome);
void step_age_in_place(AgeLedger& ledger, const SlotOutcome& outcome);

/// Age of broadcast: max age over receivers, 0 for an empty node set.
std::int64_t aob(const AgeLedger& ledger);

/// Age of collection: max age at the base station over transmitters.
std::int64_t aoc(const AgeLedger& ledger);

/// Broadcast (or collection) delay sample: the slot by which every node has
/// received (delivered) at least once since start_slot. Slot s covers
/// [s, s + 1); a reception in slot s is recorded as s + 1.
struct DelayRecord {
  std::int64_t start_slot = 0;
  std::int64_t completion_slot = 0;
  std::vector<std::int64_t> per_node_first_reception;  // 0 = not yet

  std::int64_t delay() const { return completion_slot - start_slot; }
};

class DelayTimeout : public std::runtime_error {
 public:
  DelayTimeout(const std::string& what, DelayRecord partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const DelayRecord& partial() const { return partial_; }

 private:
  DelayRecord partial_;
};

inline constexpr std::int64_t kDefaultDelaySlotCap = 100'000'000;

/// Simulates forward from start_slot until every node has at least one
/// reception. Throws InvalidParameter for an empty node set and DelayTimeout
/// (carrying the partial record) when slot_cap slots elapse first.
DelayRecord measure_delay(const Realization& realization, Mode mode,
                          const NetworkParams& params, RandomStream& rng,
                          std::int64_t start_slot,
                          std::int64_t slot_cap = kDefaultDelaySlotCap);

/// Same, reusing a prepared sampler.
DelayRecord measure_delay(SlotSampler& sampler, RandomStream& rng,
                          std::int64_t start_slot,
                          std::int64_t slot_cap = kDefaultDelaySlotCap);

/// Writes `slot,node_index,age` rows.
class AgeTraceWriter {
 public:
  explicit AgeTraceWriter(std::ostream& out, bool write_header = true);
  void write(std::int64_t slot, const AgeLedger& ledger);

 private:
  std::ostream& out_;
};

}  // namespace aobc
