#include "aobc/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "aobc/age_dynamics.hpp"
#include "aobc/errors.hpp"

namespace aobc {
namespace {

// ---------------------------------------------------------------- values

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw std::invalid_argument("expected a finite number, got '" + std::string(text) + "'");
  }
  return value;
}

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

std::uint64_t parse_uint(std::string_view text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("expected a nonnegative integer, got '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw std::invalid_argument("expected true or false, got '" + std::string(text) + "'");
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> items;
  while (true) {
    const auto comma = text.find(',');
    items.push_back(trim(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  for (auto item : items) {
    if (item.empty()) throw std::invalid_argument("empty list element");
  }
  return items;
}

SweepParameter parse_sweep_parameter(std::string_view text) {
  if (text == "r") return SweepParameter::r;
  if (text == "lambda") return SweepParameter::lambda;
  if (text == "p") return SweepParameter::p;
  throw std::invalid_argument("sweep parameter must be one of r, lambda, p");
}

Output parse_output(std::string_view text) {
  for (Output o : all_outputs()) {
    if (text == to_string(o)) return o;
  }
  throw std::invalid_argument("unknown output '" + std::string(text) + "'");
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string format_sig9(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.9g", value);
  return buffer;
}

// ---------------------------------------------------------------- keys

using Setter = void (*)(SweepSpec&, std::string_view);

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table{
      {"params.lambda", [](SweepSpec& s, std::string_view v) { s.base.params.lambda = parse_double(v); }},
      {"params.theta", [](SweepSpec& s, std::string_view v) { s.base.params.theta = parse_double(v); }},
      {"params.p", [](SweepSpec& s, std::string_view v) { s.base.params.p = parse_double(v); }},
      {"params.beta", [](SweepSpec& s, std::string_view v) { s.base.params.beta = parse_double(v); }},
      {"params.r", [](SweepSpec& s, std::string_view v) { s.base.params.r = parse_double(v); }},
      {"params.lambda_interferers",
       [](SweepSpec& s, std::string_view v) { s.base.lambda_interferers = parse_double(v); }},
      {"sim.slots_per_trial",
       [](SweepSpec& s, std::string_view v) { s.base.slots_per_trial = parse_int(v); }},
      {"sim.warmup_slots",
       [](SweepSpec& s, std::string_view v) {
         if (v == "auto") {
           s.base.warmup_slots.reset();
         } else {
           s.base.warmup_slots = parse_int(v);
         }
       }},
      {"sim.trials", [](SweepSpec& s, std::string_view v) { s.base.trials = parse_int(v); }},
      {"sim.realizations",
       [](SweepSpec& s, std::string_view v) { s.base.realizations = parse_int(v); }},
      {"sim.master_seed",
       [](SweepSpec& s, std::string_view v) { s.base.master_seed = parse_uint(v); }},
      {"sim.truncation_rel_tol",
       [](SweepSpec& s, std::string_view v) { s.base.truncation_rel_tol = parse_double(v); }},
      {"sim.fixed_node_count",
       [](SweepSpec& s, std::string_view v) { s.base.fixed_node_count = parse_int(v); }},
      {"sim.threads",
       [](SweepSpec& s, std::string_view v) {
         const auto t = parse_uint(v);
         if (t > 1024) throw std::invalid_argument("threads must be <= 1024");
         s.base.threads = static_cast<unsigned>(t);
       }},
      {"sweep.parameter",
       [](SweepSpec& s, std::string_view v) { s.swept_parameter = parse_sweep_parameter(v); }},
      {"sweep.grid",
       [](SweepSpec& s, std::string_view v) {
         s.grid.clear();
         for (auto item : split_list(v)) s.grid.push_back(parse_double(item));
       }},
      {"sweep.outputs",
       [](SweepSpec& s, std::string_view v) {
         s.outputs.clear();
         for (auto item : split_list(v)) {
           const Output o = parse_output(item);
           if (std::find(s.outputs.begin(), s.outputs.end(), o) != s.outputs.end()) {
             throw std::invalid_argument("output listed twice");
           }
           s.outputs.push_back(o);
         }
       }},
      {"analytics.epsilon", [](SweepSpec& s, std::string_view v) { s.epsilon = parse_double(v); }},
      {"analytics.tail_tol", [](SweepSpec& s, std::string_view v) { s.tail_tol = parse_double(v); }},
      {"analytics.factor_form",
       [](SweepSpec& s, std::string_view v) {
         if (v == "derived") {
           s.factor_form = FactorForm::derived;
         } else if (v == "printed") {
           s.factor_form = FactorForm::printed;
         } else {
           throw std::invalid_argument("factor_form must be derived or printed");
         }
       }},
      {"analytics.collection_probability",
       [](SweepSpec& s, std::string_view v) {
         if (v == "conditional") {
           s.collection_probability = CollectionProbability::conditional;
         } else if (v == "semi") {
           s.collection_probability = CollectionProbability::semi;
         } else {
           throw std::invalid_argument("collection_probability must be conditional or semi");
         }
       }},
      {"analytics.broadcast_node_cap",
       [](SweepSpec& s, std::string_view v) { s.broadcast_node_cap = parse_int(v); }},
      {"analytics.collection_node_cap",
       [](SweepSpec& s, std::string_view v) { s.collection_node_cap = parse_int(v); }},
      {"output.record_runtime",
       [](SweepSpec& s, std::string_view v) { s.record_runtime = parse_bool(v); }},
  };
  return table;
}

// Named invariant checks; `key` is reported in the message.
void check(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError(std::string(key) + ": " + what, 0, 0);
}

void check_params(const NetworkParams& params, const char* prefix) {
  auto key = [prefix](const char* field) { return std::string(prefix) + field; };
  check(params.lambda >= 0.0, key("lambda").c_str(), "intensity must be >= 0");
  check(params.theta > 1.0, key("theta").c_str(), "SIR threshold must be > 1");
  check(params.p > 0.0 && params.p <= 1.0, key("p").c_str(),
        "medium access probability must lie in (0, 1]");
  check(params.beta > 2.0, key("beta").c_str(), "path loss exponent must be > 2");
  check(params.r > 0.0, key("r").c_str(), "radius must be > 0");
}

void validate_spec(const SweepSpec& spec) {
  check_params(spec.base.params, "params.");
  const SimConfig& b = spec.base;
  check(b.slots_per_trial >= 1, "sim.slots_per_trial", "must be >= 1");
  check(!b.warmup_slots || (*b.warmup_slots >= 0 && *b.warmup_slots < b.slots_per_trial),
        "sim.warmup_slots", "must satisfy 0 <= warmup < slots_per_trial");
  check(b.trials >= 1, "sim.trials", "must be >= 1");
  check(b.realizations >= 1, "sim.realizations", "must be >= 1");
  check(b.truncation_rel_tol > 0.0 && b.truncation_rel_tol < 1.0, "sim.truncation_rel_tol",
        "must lie in (0, 1)");
  check(!b.lambda_interferers || *b.lambda_interferers >= 0.0, "params.lambda_interferers",
        "intensity must be >= 0");
  check(!b.fixed_node_count || *b.fixed_node_count >= 0, "sim.fixed_node_count",
        "must be >= 0");
  check(!spec.grid.empty(), "sweep.grid", "must be nonempty");
  check(std::adjacent_find(spec.grid.begin(), spec.grid.end(), std::greater_equal<>()) ==
            spec.grid.end(),
        "sweep.grid", "must be strictly increasing");
  for (double v : spec.grid) {
    try {
      check_params(spec.at(v).params, "sweep.grid -> params.");
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " (grid value " + format_sig9(v) + ")", 0, 0);
    }
  }
  check(!spec.outputs.empty(), "sweep.outputs", "must be nonempty");
  check(spec.epsilon > 0.0, "analytics.epsilon", "must be > 0");
  check(spec.tail_tol > 0.0 && spec.tail_tol < 1.0, "analytics.tail_tol", "must lie in (0, 1)");
  check(spec.broadcast_node_cap >= 1 && spec.broadcast_node_cap <= 20,
        "analytics.broadcast_node_cap", "must lie in [1, 20]");
  check(spec.collection_node_cap >= 1 && spec.collection_node_cap <= 24,
        "analytics.collection_node_cap", "must lie in [1, 24]");
}

// ---------------------------------------------------------------- sweep

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct PointContext {
  const SweepSpec& spec;
  SimConfig config;
  std::string sweep_param;
  double value;
};

SweepRow evaluate(const PointContext& ctx, Output output) {
  const SweepSpec& spec = ctx.spec;
  const SimConfig& config = ctx.config;
  SweepRow row;
  row.sweep_param = ctx.sweep_param;
  row.value = ctx.value;
  row.output = output;
  row.seed = config.master_seed;
  const auto start = std::chrono::steady_clock::now();

  auto over_realizations = [&](auto per_realization) {
    const auto values = parallel_map(static_cast<std::size_t>(config.realizations),
                                     config.threads, [&](std::size_t k) {
                                       return per_realization(sample_realization(config, k));
                                     });
    const MeanInterval summary = mean_interval(values);
    row.mean = summary.mean;
    row.ci95 = summary.half_width;
    row.realizations = config.realizations;
  };

  try {
    switch (output) {
      case Output::mc_aob:
      case Output::mc_aoc: {
        SimConfig mc = config;
        mc.mode = output == Output::mc_aob ? Mode::broadcast : Mode::collection;
        const SimResult result = run_spatial_average(mc);
        row.mean = result.mean_age;
        row.ci95 = result.ci_half_width;
        row.slots = mc.slots_per_trial;
        row.trials = mc.trials;
        row.realizations = mc.realizations;
        break;
      }
      case Output::exact_aob:
        over_realizations([&](const Realization& rz) {
          return exact_eaob(rz, config.params, spec.tail_tol,
                            static_cast<std::size_t>(spec.broadcast_node_cap));
        });
        break;
      case Output::exact_aoc:
        over_realizations([&](const Realization& rz) {
          return exact_eaoc(rz, config.params, spec.collection_probability,
                            static_cast<std::size_t>(spec.collection_node_cap));
        });
        break;
      case Output::conj_indep_aob:
        over_realizations([&](const Realization& rz) {
          if (rz.nodes.empty()) return 0.0;
          return independent_bound_eaob(rz, config.params,
                                        static_cast<std::size_t>(spec.collection_node_cap));
        });
        break;
      case Output::bound_aob_diffeq:
        row.mean = aob_upper_bound(config.params.r, config.params);
        break;
      case Output::bound_aoc_cc:
        if (config.fixed_node_count) {
          row.mean = *config.fixed_node_count == 0
                         ? 0.0
                         : aoc_upper_bound(*config.fixed_node_count, config.params.r,
                                           spec.epsilon, config.params, spec.factor_form);
        } else {
          row.mean = aoc_upper_bound_poisson(config.params.r, spec.epsilon, config.params,
                                             spec.factor_form);
        }
        break;
    }
  } catch (const std::exception& e) {
    row.mean = std::numeric_limits<double>::quiet_NaN();
    row.ci95 = std::numeric_limits<double>::quiet_NaN();
    row.error = e.what();
    if (row.error.empty()) row.error = "error";
  }
  row.runtime_s = spec.record_runtime ? seconds_since(start) : 0.0;
  return row;
}

}  // namespace

const char* to_string(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::r:
      return "r";
    case SweepParameter::lambda:
      return "lambda";
    case SweepParameter::p:
      return "p";
  }
  return "?";
}

const char* to_string(Output output) {
  switch (output) {
    case Output::mc_aob:
      return "mc_aob";
    case Output::mc_aoc:
      return "mc_aoc";
    case Output::exact_aob:
      return "exact_aob";
    case Output::exact_aoc:
      return "exact_aoc";
    case Output::bound_aob_diffeq:
      return "bound_aob_diffeq";
    case Output::bound_aoc_cc:
      return "bound_aoc_cc";
    case Output::conj_indep_aob:
      return "conj_indep_aob";
  }
  return "?";
}

const std::vector<Output>& all_outputs() {
  static const std::vector<Output> outputs{
      Output::mc_aob,           Output::mc_aoc,       Output::exact_aob,     Output::exact_aoc,
      Output::bound_aob_diffeq, Output::bound_aoc_cc, Output::conj_indep_aob};
  return outputs;
}

SimConfig SweepSpec::at(double value) const {
  SimConfig config = base;
  switch (swept_parameter) {
    case SweepParameter::r:
      config.params.r = value;
      break;
    case SweepParameter::lambda:
      config.params.lambda = value;
      break;
    case SweepParameter::p:
      config.params.p = value;
      break;
  }
  return config;
}

ConfigError::ConfigError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(line == 0 ? message
                                   : "line " + std::to_string(line) + ", column " +
                                         std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

SweepSpec parse_config(std::string_view text) {
  SweepSpec spec;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty() || line_no == 0) {
    ++line_no;
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    if (trim(line).empty()) {
      if (text.empty()) break;
      continue;
    }
    const auto eq = line.find('=');
    const std::size_t key_column = line.find_first_not_of(" \t") + 1;
    if (eq == std::string_view::npos) {
      throw ConfigError("expected 'key = value'", line_no, key_column);
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view raw_value = line.substr(eq + 1);
    const std::string_view value = trim(raw_value);
    const std::size_t value_column =
        eq + 2 + (value.empty() ? 0 : raw_value.find_first_not_of(" \t"));
    const auto setter = setters().find(key);
    if (setter == setters().end()) {
      throw ConfigError("unknown key '" + std::string(key) + "'", line_no, key_column);
    }
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError("duplicate key '" + std::string(key) + "'", line_no, key_column);
    }
    if (value.empty()) throw ConfigError("missing value", line_no, value_column);
    try {
      setter->second(spec, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string(key) + ": " + e.what(), line_no, value_column);
    }
    if (text.empty()) break;
  }
  validate_spec(spec);
  return spec;
}

SweepSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string(), 0, 0);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string emit_config(const SweepSpec& spec) {
  std::ostringstream out;
  const SimConfig& b = spec.base;
  out << "params.lambda = " << format_double(b.params.lambda) << '\n';
  out << "params.theta = " << format_double(b.params.theta) << '\n';
  out << "params.p = " << format_double(b.params.p) << '\n';
  out << "params.beta = " << format_double(b.params.beta) << '\n';
  out << "params.r = " << format_double(b.params.r) << '\n';
  if (b.lambda_interferers) {
    out << "params.lambda_interferers = " << format_double(*b.lambda_interferers) << '\n';
  }
  out << "sim.slots_per_trial = " << b.slots_per_trial << '\n';
  out << "sim.warmup_slots = "
      << (b.warmup_slots ? std::to_string(*b.warmup_slots) : std::string("auto")) << '\n';
  out << "sim.trials = " << b.trials << '\n';
  out << "sim.realizations = " << b.realizations << '\n';
  out << "sim.master_seed = " << b.master_seed << '\n';
  out << "sim.truncation_rel_tol = " << format_double(b.truncation_rel_tol) << '\n';
  if (b.fixed_node_count) out << "sim.fixed_node_count = " << *b.fixed_node_count << '\n';
  out << "sim.threads = " << b.threads << '\n';
  out << "sweep.parameter = " << to_string(spec.swept_parameter) << '\n';
  out << "sweep.grid = ";
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    out << (i ? ", " : "") << format_double(spec.grid[i]);
  }
  out << '\n' << "sweep.outputs = ";
  for (std::size_t i = 0; i < spec.outputs.size(); ++i) {
    out << (i ? ", " : "") << to_string(spec.outputs[i]);
  }
  out << '\n';
  out << "analytics.epsilon = " << format_double(spec.epsilon) << '\n';
  out << "analytics.tail_tol = " << format_double(spec.tail_tol) << '\n';
  out << "analytics.factor_form = "
      << (spec.factor_form == FactorForm::derived ? "derived" : "printed") << '\n';
  out << "analytics.collection_probability = "
      << (spec.collection_probability == CollectionProbability::conditional ? "conditional"
                                                                            : "semi")
      << '\n';
  out << "analytics.broadcast_node_cap = " << spec.broadcast_node_cap << '\n';
  out << "analytics.collection_node_cap = " << spec.collection_node_cap << '\n';
  out << "output.record_runtime = " << (spec.record_runtime ? "true" : "false") << '\n';
  return out.str();
}

bool SweepResult::has_errors() const {
  return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); });
}

SweepResult run_sweep(const SweepSpec& spec, const RowSink& sink) {
  validate_spec(spec);
  SweepResult result;
  for (double value : spec.grid) {
    const PointContext ctx{spec, spec.at(value), to_string(spec.swept_parameter), value};
    for (Output output : spec.outputs) {
      result.rows.push_back(evaluate(ctx, output));
      if (sink) sink(result.rows.back());
    }
  }
  return result;
}

SweepResult run_instance_report(const Realization& realization, const SweepSpec& spec,
                                const RowSink& sink) {
  validate_spec(spec);
  realization.validate();
  SimConfig config = spec.base;
  config.params.r = realization.node_radius;
  config.fixed_node_count = static_cast<std::int64_t>(realization.nodes.size());
  const auto n = static_cast<double>(realization.nodes.size());

  SweepResult result;
  for (Output output : spec.outputs) {
    SweepRow row;
    row.sweep_param = "instance";
    row.value = n;
    row.output = output;
    row.seed = config.master_seed;
    row.realizations = 1;
    const auto start = std::chrono::steady_clock::now();
    try {
      switch (output) {
        case Output::mc_aob:
        case Output::mc_aoc: {
          SimConfig mc = config;
          mc.mode = output == Output::mc_aob ? Mode::broadcast : Mode::collection;
          const SimResult sim = run_instance(realization, mc);
          row.mean = sim.mean_age;
          row.ci95 = sim.ci_half_width;
          row.slots = mc.slots_per_trial;
          row.trials = mc.trials;
          break;
        }
        case Output::exact_aob:
          row.mean = exact_eaob(realization, config.params, spec.tail_tol,
                                static_cast<std::size_t>(spec.broadcast_node_cap));
          break;
        case Output::exact_aoc:
          row.mean = exact_eaoc(realization, config.params, spec.collection_probability,
                                static_cast<std::size_t>(spec.collection_node_cap));
          break;
        case Output::conj_indep_aob:
          row.mean = realization.nodes.empty()
                         ? 0.0
                         : independent_bound_eaob(
                               realization, config.params,
                               static_cast<std::size_t>(spec.collection_node_cap));
          break;
        case Output::bound_aob_diffeq:
          row.mean = aob_upper_bound(config.params.r, config.params);
          row.realizations = 0;
          break;
        case Output::bound_aoc_cc:
          row.mean = realization.nodes.empty()
                         ? 0.0
                         : aoc_upper_bound(static_cast<std::int64_t>(realization.nodes.size()),
                                           config.params.r, spec.epsilon, config.params,
                                           spec.factor_form);
          row.realizations = 0;
          break;
      }
    } catch (const std::exception& e) {
      row.mean = std::numeric_limits<double>::quiet_NaN();
      row.ci95 = std::numeric_limits<double>::quiet_NaN();
      row.error = e.what();
    }
    row.runtime_s = spec.record_runtime ? seconds_since(start) : 0.0;
    result.rows.push_back(row);
    if (sink) sink(result.rows.back());
  }
  return result;
}

std::string format_csv_row(const SweepRow& row) {
  std::string line = row.sweep_param;
  line += ',' + format_sig9(row.value);
  line += ',';
  line += to_string(row.output);
  line += ',' + format_sig9(row.mean);
  line += ',' + format_sig9(row.ci95);
  line += ',' + std::to_string(row.seed);
  line += ',' + std::to_string(row.slots);
  line += ',' + std::to_string(row.trials);
  line += ',' + std::to_string(row.realizations);
  line += ',' + format_sig9(row.runtime_s);
  return line;
}

void write_csv(std::ostream& out, const SweepResult& result) {
  out << kCsvHeader << '\n';
  for (const SweepRow& row : result.rows) out << format_csv_row(row) << '\n';
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out, result);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace aobc
