// aobc: sweeps, single instances, bounds and a quick self check.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aobc/analytics.hpp"
#include "aobc/channel.hpp"
#include "aobc/errors.hpp"
#include "aobc/experiment.hpp"
#include "aobc/geometry.hpp"
#include "aobc/monte_carlo.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

// Rows go out as soon as they are ready so an interrupted sweep keeps what it has.
class CsvOut {
 public:
  explicit CsvOut(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw std::runtime_error("cannot write " + path);
    }
    stream() << aobc::kCsvHeader << '\n' << std::flush;
  }
  void operator()(const aobc::SweepRow& row) {
    stream() << aobc::format_csv_row(row) << '\n' << std::flush;
    if (!row.error.empty()) {
      std::cerr << "aobc: " << row.sweep_param << '=' << row.value << ' '
                << aobc::to_string(row.output) << ": " << row.error << '\n';
    }
  }

 private:
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  std::unique_ptr<std::ofstream> file_;
};

int finish(const aobc::SweepResult& result) {
  return result.has_errors() ? kExitPartial : kExitOk;
}

int run_sweep_verb(const std::string& config_path, const std::string& out_path) {
  const aobc::SweepSpec spec = aobc::load_config(config_path);
  CsvOut out(out_path);
  return finish(aobc::run_sweep(spec, [&](const aobc::SweepRow& row) { out(row); }));
}

int run_bounds_verb(const std::string& config_path, const std::string& out_path) {
  aobc::SweepSpec spec = aobc::load_config(config_path);
  spec.outputs = {aobc::Output::bound_aob_diffeq, aobc::Output::bound_aoc_cc};
  CsvOut out(out_path);
  return finish(aobc::run_sweep(spec, [&](const aobc::SweepRow& row) { out(row); }));
}

int run_instance_verb(const std::string& realization_path, const std::string& config_path,
                      const std::string& out_path) {
  const aobc::SweepSpec spec = aobc::load_config(config_path);
  std::ifstream in(realization_path);
  if (!in) throw aobc::ConfigError("cannot read realization file " + realization_path, 0, 0);
  aobc::Realization realization;
  try {
    realization = aobc::read_realization(in);
  } catch (const std::invalid_argument& e) {
    throw aobc::ConfigError(realization_path + ": " + e.what(), 0, 0);
  }
  CsvOut out(out_path);
  return finish(aobc::run_instance_report(realization, spec,
                                          [&](const aobc::SweepRow& row) { out(row); }));
}

int run_realize_verb(const std::string& config_path, std::uint64_t index,
                     const std::string& out_path) {
  const aobc::SweepSpec spec = aobc::load_config(config_path);
  const aobc::Realization realization =
      aobc::sample_realization(spec.at(spec.grid.front()), index);
  if (out_path.empty()) {
    aobc::write_realization(std::cout, realization);
  } else {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    aobc::write_realization(out, realization);
  }
  return kExitOk;
}

// Closed-form anchors plus one small simulation against its exact value.
int run_selftest() {
  int failures = 0;
  auto report = [&](const char* name, bool ok, double got, double want) {
    std::printf("%s %s (got %.12g, want %.12g)\n", ok ? "PASS" : "FAIL", name, got, want);
    if (!ok) ++failures;
  };
  auto close = [](double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::abs(b);
  };

  const aobc::NetworkParams defaults;
  const double c14 = aobc::constant_C(1.0, 4.0);
  report("C(theta=1, beta=4) = pi/2", close(c14, std::numbers::pi / 2, 1e-12), c14,
         std::numbers::pi / 2);
  const double c54 = aobc::constant_C(5.0, 4.0);
  report("C(theta=5, beta=4)", close(c54, 3.51240736552036, 1e-12), c54, 3.51240736552036);
  const double mu10 = aobc::succ_prob_spatial_average(10.0, defaults);
  const double mu10_ref = 0.2 * std::exp(-0.2 * 0.01 * std::numbers::pi * c54 * 100.0);
  report("mu(10)", close(mu10, mu10_ref, 1e-12), mu10, mu10_ref);
  const double bound = aobc::aob_upper_bound(10.0, defaults);
  report("broadcast bound at r=10 near 57.5", close(bound, 57.5, 2e-3), bound, 57.5);

  const std::vector<double> uniform{1.0 / 3, 1.0 / 3, 1.0 / 3};
  const double cc = aobc::expected_collection_time(uniform);
  report("coupon collector n=3", close(cc, 5.5, 1e-12), cc, 5.5);

  aobc::Realization rz;
  rz.node_radius = 4.0;
  rz.window_radius = 12.0;
  rz.nodes = {{1.0, 0.5}, {-2.0, 1.5}};
  rz.interferers = {{6.0, 0.0}, {0.0, -7.5}, {-5.0, -5.0}};
  const double exact = aobc::exact_eaob(rz, defaults);
  aobc::SimConfig config;
  config.params = defaults;
  config.params.r = rz.node_radius;
  config.mode = aobc::Mode::broadcast;
  config.slots_per_trial = 400000;
  config.trials = 4;
  config.master_seed = 7;
  const aobc::SimResult sim = aobc::run_instance(rz, config);
  const double sigma = sim.ci_half_width / 1.96;
  report("simulated broadcast age vs exact", std::abs(sim.mean_age - exact) <= 4 * sigma,
         sim.mean_age, exact);

  std::printf("%s\n", failures == 0 ? "selftest ok" : "selftest FAILED");
  return failures == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age of broadcast and collection under slotted ALOHA"};
  app.require_subcommand(1);

  std::string config_path, realization_path, out_path;
  std::uint64_t index = 0;

  auto* sweep = app.add_subcommand("sweep", "Run every output at every grid point, CSV out");
  sweep->add_option("config", config_path, "Config file")->required();
  sweep->add_option("-o,--output", out_path, "CSV path (default stdout)");

  auto* instance = app.add_subcommand("instance", "All outputs for one fixed realization");
  instance->add_option("realization", realization_path, "Realization file")->required();
  instance->add_option("config", config_path, "Config file")->required();
  instance->add_option("-o,--output", out_path, "CSV path (default stdout)");

  auto* bounds = app.add_subcommand("bounds", "Closed-form bounds over the grid only");
  bounds->add_option("config", config_path, "Config file")->required();
  bounds->add_option("-o,--output", out_path, "CSV path (default stdout)");

  auto* realize = app.add_subcommand("realize", "Sample realization k at the first grid point");
  realize->add_option("config", config_path, "Config file")->required();
  realize->add_option("-k,--index", index, "Realization index");
  realize->add_option("-o,--output", out_path, "Output path (default stdout)");

  auto* selftest = app.add_subcommand("selftest", "Quick consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sweep) return run_sweep_verb(config_path, out_path);
    if (*instance) return run_instance_verb(realization_path, config_path, out_path);
    if (*bounds) return run_bounds_verb(config_path, out_path);
    if (*realize) return run_realize_verb(config_path, index, out_path);
    if (*selftest) return run_selftest();
  } catch (const aobc::ConfigError& e) {
    std::cerr << "aobc: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const aobc::CapacityError& e) {
    std::cerr << "aobc: " << e.what() << '\n';
    return kExitPartial;
  } catch (const std::exception& e) {
    std::cerr << "aobc: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
