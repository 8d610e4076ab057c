#pragma once

#include "qpoc/config.hpp"
#include "qpoc/popsolve.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qpoc {

/// Seed of sample `id` derived from the run seed (splitmix64 mixing).
std::uint64_t sample_seed(std::uint64_t seed, int id);

/// One row of the coherent-control study.
struct CoherentSample {
  int id = 0;
  std::vector<double> x_star;
  std::vector<double> x_hat;
  double conv_x_star = 0.0;  ///< int_0^T ||A||_2 dt at x*
  double conv_x_hat = 0.0;
  int relaxation_order = 0;
  std::string sdp_status;
  double lower_bound = 0.0;
  double singular_ratio = 0.0;
  bool rank_one = false;
  double f_x_star = 0.0;  ///< surrogate objective at x*
  double f_x_hat = 0.0;
  double true_residual = 0.0;  ///< ||U(x_hat) - U*||_F from the oracle
  double seconds = 0.0;
  bool ok = false;
  std::string error;
};

struct IdentifySample {
  int id = 0;
  std::vector<double> control;
  std::vector<double> z_hat;      ///< representative closest to z_true within the symmetry orbit
  std::vector<double> abs_error;  ///< |z_hat - z_true| per component
  double max_error = 0.0;
  int orbit_size = 1;  ///< sign flips leaving the objective unchanged (1 = none)
  int relaxation_order = 0;
  std::string sdp_status;
  double lower_bound = 0.0;
  double f_z_true = 0.0;
  double f_z_hat = 0.0;
  double true_residual = 0.0;  ///< ||U(z_hat) - U*||_F
  double seconds = 0.0;
  bool ok = false;
  std::string error;
};

template <class Sample>
struct BenchResult {
  RunConfig config;
  std::vector<Sample> samples;
  double seconds = 0.0;
};

using CoherentBench = BenchResult<CoherentSample>;
using IdentifyBench = BenchResult<IdentifySample>;

CoherentBench run_bench_coherent(const RunConfig& cfg);
IdentifyBench run_bench_identify(const RunConfig& cfg);

/// CSV text; deterministic for a given config (no timings).
std::string to_csv(const CoherentBench& bench);
std::string to_csv(const IdentifyBench& bench);
std::vector<std::string> coherent_columns(int controls);
std::vector<std::string> identify_columns(int controls, int unknowns);

nlohmann::json summary(const CoherentBench& bench);
nlohmann::json summary(const IdentifyBench& bench);

/// Solves the single problem described by a non-bench config.
nlohmann::json run_single(const RunConfig& cfg);

/// Writes samples.csv and summary.json into `dir` (created if needed).
void write_bench(const std::filesystem::path& dir, const std::string& csv, const nlohmann::json& summary);

/// Orbit of sign patterns s in {+1,-1}^n with f(s * x) == f(x) identically.
std::vector<std::vector<int>> sign_symmetries(const RealPolynomial& f);

}  // namespace qpoc
