#pragma once

#include "qpoc/objective.hpp"
#include "qpoc/oracle.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qpoc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { gate, state, min_time_gate, min_time_state, identify, bench_coherent, bench_identify };

Mode parse_mode(std::string_view name);
std::string to_string(Mode mode);

/// Everything a run needs. Field names match the config keys documented in README.md.
struct RunConfig {
  Mode mode = Mode::gate;
  int dim = 0;
  Eigen::MatrixXcd drift;    ///< key H0
  Eigen::MatrixXcd control;  ///< key V (fixed part of V(z) in identification modes)
  double horizon = 0.5;      ///< key T; the horizon guess for min-time modes
  int controls = 3;
  Truncation truncation;
  int relaxation_order = 0;
  int multistart = 16;
  std::uint64_t seed = 1;
  int samples = 100;
  double box = 1.0;     ///< x* and known controls are drawn from [-box, box]^m
  double radius = 2.0;  ///< multistart box and min-time ball radius
  int oracle_steps = kDefaultOracleSteps;
  std::optional<Eigen::MatrixXcd> target;
  std::optional<std::vector<double>> target_from_x;
  std::optional<Eigen::VectorXcd> psi0;
  std::optional<Eigen::VectorXcd> psi_target;
  double eps = 0.1;
  std::optional<double> t_max;
  std::vector<CouplingEntry> coupling;
  std::vector<double> z_true;
  std::vector<double> control_x;  ///< key control: known x for identify
  std::string out = "out";
  int threads = 0;  ///< 0 = hardware concurrency

  bool identification() const { return mode == Mode::identify || mode == Mode::bench_identify; }
  QuantumSystem system() const;
  CouplingPattern pattern() const;
  ControlAnsatz ansatz() const { return ControlAnsatz::fixed(controls, horizon); }
};

/// Parses `key = <JSON value>` lines. `#` starts a comment; a value may span
/// several lines while brackets are open. Throws ConfigError with the line number.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace qpoc
