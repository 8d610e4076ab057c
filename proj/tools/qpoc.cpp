// Command-line front end: solve one problem or run a sample study.

#include "qpoc/bench.hpp"
#include "qpoc/config.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<std::string> out;
  std::optional<int> relaxation_order;
  std::optional<int> multistart;
  std::optional<int> threads;
};

void add_flags(CLI::App* cmd, Overrides& o, bool bench) {
  cmd->add_option("--config", o.config, "Run configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Random seed");
  if (bench) cmd->add_option("--samples", o.samples, "Number of samples")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--relaxation-order", o.relaxation_order,
                  "Relaxation order d (0 = smallest admissible, -1 = skip the relaxation)");
  cmd->add_option("--multistart", o.multistart, "Number of multistart refinements")->check(CLI::NonNegativeNumber);
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
}

qpoc::RunConfig load(const Overrides& o) {
  qpoc::RunConfig cfg = qpoc::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.samples) cfg.samples = *o.samples;
  if (o.out) cfg.out = *o.out;
  if (o.relaxation_order) cfg.relaxation_order = *o.relaxation_order;
  if (o.multistart) cfg.multistart = *o.multistart;
  if (o.threads) cfg.threads = *o.threads;
  if (cfg.relaxation_order < 0 && cfg.multistart == 0) {
    throw qpoc::ConfigError("the relaxation and multistart cannot both be disabled");
  }
  return cfg;
}

void expect_mode(const qpoc::RunConfig& cfg, qpoc::Mode mode) {
  if (cfg.mode != mode) {
    throw qpoc::ConfigError(fmt::format("config mode '{}' does not match subcommand '{}'", qpoc::to_string(cfg.mode),
                                        qpoc::to_string(mode)));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum control as polynomial optimization"};
  app.require_subcommand(1);
  Overrides solve_o, coherent_o, identify_o;
  auto* solve_cmd = app.add_subcommand("solve", "Solve the single problem described by a config");
  add_flags(solve_cmd, solve_o, false);
  auto* coherent_cmd = app.add_subcommand("bench-coherent", "Gate-synthesis sample study");
  add_flags(coherent_cmd, coherent_o, true);
  auto* identify_cmd = app.add_subcommand("bench-identify", "Hamiltonian identification sample study");
  add_flags(identify_cmd, identify_o, true);
  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) {
      const auto cfg = load(solve_o);
      const auto doc = qpoc::run_single(cfg);
      std::filesystem::create_directories(cfg.out);
      const auto path = std::filesystem::path(cfg.out) / "solution.json";
      std::ofstream(path) << doc.dump(2) << "\n";
      std::cout << doc.dump(2) << "\n";
    } else if (*coherent_cmd) {
      const auto cfg = load(coherent_o);
      expect_mode(cfg, qpoc::Mode::bench_coherent);
      const auto bench = qpoc::run_bench_coherent(cfg);
      const auto sum = qpoc::summary(bench);
      qpoc::write_bench(cfg.out, qpoc::to_csv(bench), sum);
      std::cout << sum.dump(2) << "\n";
    } else {
      const auto cfg = load(identify_o);
      expect_mode(cfg, qpoc::Mode::bench_identify);
      const auto bench = qpoc::run_bench_identify(cfg);
      const auto sum = qpoc::summary(bench);
      qpoc::write_bench(cfg.out, qpoc::to_csv(bench), sum);
      std::cout << sum.dump(2) << "\n";
    }
  } catch (const qpoc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
