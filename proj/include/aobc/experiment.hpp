#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aobc/analytics.hpp"
#include "aobc/channel.hpp"
#include "aobc/monte_carlo.hpp"

namespace aobc {

enum class SweepParameter { r, lambda, p };

enum class Output {
  mc_aob,
  mc_aoc,
  exact_aob,
  exact_aoc,
  bound_aob_diffeq,
  bound_aoc_cc,
  conj_indep_aob,
};

const char* to_string(SweepParameter parameter);
const char* to_string(Output output);
const std::vector<Output>& all_outputs();

/// A parameter sweep: every output evaluated at every grid point.
struct SweepSpec {
  SweepParameter swept_parameter = SweepParameter::r;
  std::vector<double> grid{10.0};
  SimConfig base;
  std::vector<Output> outputs = all_outputs();

  double epsilon = 1.0;  // exclusion radius for the collection bound
  double tail_tol = kDefaultTailTol;
  FactorForm factor_form = FactorForm::derived;
  CollectionProbability collection_probability = CollectionProbability::conditional;
  std::int64_t broadcast_node_cap = static_cast<std::int64_t>(kBroadcastNodeCap);
  std::int64_t collection_node_cap = static_cast<std::int64_t>(kCollectionNodeCap);
  /// When false the runtime_s column is written as 0 so that repeated runs
  /// are byte-identical.
  bool record_runtime = false;

  /// Base config with the swept parameter set to `value`.
  SimConfig at(double value) const;

  bool operator==(const SweepSpec&) const = default;
};

/// Config parse or validation failure. Line and column are 1-based; 0 when
/// the problem is not tied to a position.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Flat `section.key = value` text; `#` starts a comment. Unknown keys and
/// invariant violations throw ConfigError.
SweepSpec parse_config(std::string_view text);
SweepSpec load_config(const std::filesystem::path& path);
std::string emit_config(const SweepSpec& spec);

struct SweepRow {
  std::string sweep_param;
  double value = 0.0;
  Output output = Output::mc_aob;
  double mean = 0.0;
  double ci95 = 0.0;
  std::uint64_t seed = 0;
  std::int64_t slots = 0;
  std::int64_t trials = 0;
  std::int64_t realizations = 0;
  double runtime_s = 0.0;
  std::string error;  // nonempty when the point failed (capacity, timeout, ...)

  bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  bool has_errors() const;
};

using RowSink = std::function<void(const SweepRow&)>;

/// Evaluates every requested output at every grid point, in grid order.
/// Failures are recorded in-row and the sweep continues; `sink` sees each row
/// as soon as it is ready.
SweepResult run_sweep(const SweepSpec& spec, const RowSink& sink = {});

/// All outputs for one fixed realization. sweep_param is "instance" and value
/// is the node count.
SweepResult run_instance_report(const Realization& realization, const SweepSpec& spec,
                                const RowSink& sink = {});

inline constexpr std::string_view kCsvHeader =
    "sweep_param,value,output,mean,ci95,seed,slots,trials,realizations,runtime_s";

std::string format_csv_row(const SweepRow& row);
void write_csv(std::ostream& out, const SweepResult& result);
void emit_csv(const SweepResult& result, const std::filesystem::path& path);

}  // namespace aobc
