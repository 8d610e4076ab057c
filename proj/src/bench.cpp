#include "qpoc/bench.hpp"

#include "qpoc/linalg.hpp"
#include "qpoc/oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <thread>

namespace qpoc {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double kBoundSlack = 1e-6;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Runs body(i) for i in [0, n) on a small pool; results land by index.
template <class Body>
void parallel_for(int n, int threads, Body body) {
  int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<double> draw(std::mt19937_64& rng, int count, double half_width) {
  std::uniform_real_distribution<double> dist(-half_width, half_width);
  std::vector<double> v(static_cast<std::size_t>(count));
  for (auto& x : v) x = dist(rng);
  return v;
}

SolveOptions solve_options(const RunConfig& cfg, std::uint64_t seed) {
  SolveOptions o;
  o.relaxation_order = cfg.relaxation_order;
  o.multistart = cfg.multistart;
  o.seed = seed;
  return o;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string csv_text(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line + "\n";
}

double percentile(std::vector<double> v, double q) {
  std::erase_if(v, [](double x) { return !std::isfinite(x); });
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

json stats(const std::vector<double>& v) {
  return {{"median", percentile(v, 0.5)},
          {"p90", percentile(v, 0.9)},
          {"max", percentile(v, 1.0)},
          {"min", percentile(v, 0.0)}};
}

json timing(const std::vector<double>& per_sample, double total) {
  return {{"total_seconds", total},
          {"median_sample_seconds", percentile(per_sample, 0.5)},
          {"max_sample_seconds", percentile(per_sample, 1.0)}};
}

json to_json(const LocalResult& r) {
  return {{"point", r.point},
          {"value", r.value},
          {"gradient_norm", r.gradient_norm},
          {"min_constraint", std::isfinite(r.min_constraint) ? json(r.min_constraint) : json(nullptr)},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"feasible", r.feasible}};
}

json to_json(const SolveReport& report) {
  json j;
  if (report.relaxation) {
    const auto& r = *report.relaxation;
    j["relaxation"] = {{"order", r.order},
                       {"moment_matrix_size", r.moment_matrix_size},
                       {"sdp_status", to_string(r.status)},
                       {"sdp_iterations", r.iterations},
                       {"lower_bound", r.lower_bound},
                       {"extracted_point", r.extraction.point},
                       {"extracted_value", r.extracted_value},
                       {"rank_one", r.extraction.rank_one},
                       {"singular_ratio", r.extraction.singular_ratio},
                       {"numerical_rank", r.extraction.numerical_rank},
                       {"moment_matrix_min_eigenvalue", r.extraction.min_eigenvalue},
                       {"refined", to_json(r.refined)}};
  }
  if (report.multistart) {
    j["multistart"] = {{"starts", report.multistart->runs.size()},
                       {"best", to_json(report.multistart->best)}};
  }
  j["solution"] = to_json(report.solution);
  return j;
}

json problem_json(const PopProblem& p) {
  return {{"variables", p.variables.names()},
          {"degree", p.max_degree()},
          {"objective_terms", p.objective.terms().size()},
          {"constraints", p.constraints.size()}};
}

std::string relaxation_status(const SolveReport& r) {
  return r.relaxation ? to_string(r.relaxation->status) : std::string("skipped");
}

CoherentSample coherent_sample(const RunConfig& cfg, const QuantumSystem& sys, int id) {
  CoherentSample s;
  s.id = id;
  std::mt19937_64 rng(sample_seed(cfg.seed, id));
  s.x_star = draw(rng, cfg.controls, cfg.box);
  const auto t0 = Clock::now();
  try {
    const auto ansatz = cfg.ansatz();
    const Eigen::MatrixXcd target = propagate(sys, ansatz, s.x_star, cfg.oracle_steps).unitary;
    s.conv_x_star = convergence_functional(sys, ansatz, s.x_star);
    PopProblem prob = gate_objective(sys, ansatz, GateTarget(target), cfg.truncation);
    prob.box_radius = cfg.radius;
    const SolveReport report = solve(prob, solve_options(cfg, rng()));
    s.x_hat = report.solution.point;
    s.conv_x_hat = convergence_functional(sys, ansatz, s.x_hat);
    s.sdp_status = relaxation_status(report);
    s.relaxation_order = report.relaxation ? report.relaxation->order : 0;
    s.lower_bound = report.lower_bound();
    if (report.relaxation) {
      s.singular_ratio = report.relaxation->extraction.singular_ratio;
      s.rank_one = report.relaxation->extraction.rank_one;
    } else {
      s.singular_ratio = kNaN;
    }
    s.f_x_star = prob.objective_at(s.x_star);
    s.f_x_hat = report.solution.value;
    const Eigen::MatrixXcd u_hat = propagate(sys, ansatz, s.x_hat, cfg.oracle_steps).unitary;
    s.true_residual = std::sqrt(frob_distance_sq(u_hat, target));
    s.ok = true;
  } catch (const std::exception& e) {
    s.ok = false;
    s.error = e.what();
    s.x_hat.assign(s.x_star.size(), kNaN);
  }
  s.seconds = seconds_since(t0);
  return s;
}

IdentifySample identify_sample(const RunConfig& cfg, const CouplingPattern& pattern, int id) {
  IdentifySample s;
  s.id = id;
  std::mt19937_64 rng(sample_seed(cfg.seed, id));
  s.control = draw(rng, cfg.controls, cfg.box);
  const auto q = static_cast<std::size_t>(pattern.unknowns());
  const auto t0 = Clock::now();
  try {
    const auto ansatz = cfg.ansatz();
    const QuantumSystem truth(cfg.drift, pattern.matrix(cfg.z_true));
    const Eigen::MatrixXcd target = propagate(truth, ansatz, s.control, cfg.oracle_steps).unitary;
    PopProblem prob =
        identification_objective(cfg.drift, pattern, s.control, ansatz, GateTarget(target), cfg.truncation);
    prob.box_radius = cfg.radius;
    const SolveReport report = solve(prob, solve_options(cfg, rng()));
    const auto& z = report.solution.point;

    const auto orbit = sign_symmetries(prob.objective);
    s.orbit_size = static_cast<int>(orbit.size());
    s.max_error = std::numeric_limits<double>::infinity();
    for (const auto& signs : orbit) {
      std::vector<double> cand(q), err(q);
      double worst = 0.0;
      for (std::size_t k = 0; k < q; ++k) {
        cand[k] = signs[k] * z[k];
        err[k] = std::abs(cand[k] - cfg.z_true[k]);
        worst = std::max(worst, err[k]);
      }
      if (worst < s.max_error) {
        s.max_error = worst;
        s.z_hat = cand;
        s.abs_error = err;
      }
    }
    s.sdp_status = relaxation_status(report);
    s.relaxation_order = report.relaxation ? report.relaxation->order : 0;
    s.lower_bound = report.lower_bound();
    s.f_z_true = prob.objective_at(cfg.z_true);
    s.f_z_hat = report.solution.value;
    const QuantumSystem fitted(cfg.drift, pattern.matrix(s.z_hat));
    s.true_residual = std::sqrt(frob_distance_sq(propagate(fitted, ansatz, s.control, cfg.oracle_steps).unitary, target));
    s.ok = true;
  } catch (const std::exception& e) {
    s.ok = false;
    s.error = e.what();
    s.z_hat.assign(q, kNaN);
    s.abs_error.assign(q, kNaN);
    s.max_error = kNaN;
  }
  s.seconds = seconds_since(t0);
  return s;
}

template <class Sample, class Fn>
BenchResult<Sample> run_samples(const RunConfig& cfg, Fn one) {
  BenchResult<Sample> bench;
  bench.config = cfg;
  bench.samples.resize(static_cast<std::size_t>(cfg.samples));
  const auto t0 = Clock::now();
  parallel_for(cfg.samples, cfg.threads, [&](int i) { bench.samples[static_cast<std::size_t>(i)] = one(i); });
  bench.seconds = seconds_since(t0);
  return bench;
}

void append_numbered(std::vector<std::string>& cols, const std::string& stem, int count) {
  for (int k = 1; k <= count; ++k) cols.push_back(stem + std::to_string(k));
}

void append_values(std::vector<std::string>& cells, const std::vector<double>& v) {
  for (double x : v) cells.push_back(num(x));
}

Eigen::MatrixXcd gate_target(const RunConfig& cfg, const QuantumSystem& sys) {
  if (cfg.target) return *cfg.target;
  return propagate(sys, cfg.ansatz(), *cfg.target_from_x, cfg.oracle_steps).unitary;
}

Eigen::VectorXcd state_target(const RunConfig& cfg, const QuantumSystem& sys) {
  if (cfg.psi_target) return *cfg.psi_target;
  return propagate(sys, cfg.ansatz(), *cfg.target_from_x, cfg.oracle_steps).unitary * *cfg.psi0;
}

TimeOptimalOptions time_options(const RunConfig& cfg) {
  TimeOptimalOptions o;
  o.eps = cfg.eps;
  o.radius = cfg.radius;
  o.horizon_guess = cfg.horizon;
  if (cfg.t_max) o.horizon_factor = *cfg.t_max / cfg.horizon;
  return o;
}

}  // namespace

std::uint64_t sample_seed(std::uint64_t seed, int id) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(id) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::vector<int>> sign_symmetries(const RealPolynomial& f) {
  const std::size_t n = f.variables().size();
  std::vector<std::vector<int>> orbit;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool invariant = true;
    for (const auto& [mono, c] : f.terms()) {
      int parity = 0;
      for (std::size_t v = 0; v < n; ++v) {
        if (mask & (1u << v)) parity += mono.exponent(v);
      }
      if (parity % 2 != 0) {
        invariant = false;
        break;
      }
    }
    if (!invariant) continue;
    std::vector<int> s(n, 1);
    for (std::size_t v = 0; v < n; ++v) {
      if (mask & (1u << v)) s[v] = -1;
    }
    orbit.push_back(std::move(s));
  }
  return orbit;
}

CoherentBench run_bench_coherent(const RunConfig& cfg) {
  const QuantumSystem sys = cfg.system();
  return run_samples<CoherentSample>(cfg, [&](int i) { return coherent_sample(cfg, sys, i); });
}

IdentifyBench run_bench_identify(const RunConfig& cfg) {
  if (cfg.z_true.empty()) throw ConfigError("bench-identify needs 'z_true'");
  const CouplingPattern pattern = cfg.pattern();
  return run_samples<IdentifySample>(cfg, [&](int i) { return identify_sample(cfg, pattern, i); });
}

std::vector<std::string> coherent_columns(int controls) {
  std::vector<std::string> c{"sample"};
  append_numbered(c, "x_star_", controls);
  append_numbered(c, "x_hat_", controls);
  for (const char* name : {"conv_x_star", "conv_x_hat", "conv_ok_x_star", "conv_ok_x_hat", "relaxation_order",
                           "sdp_status", "lower_bound", "rank_one", "singular_ratio", "f_x_star", "f_x_hat",
                           "bound_minus_f_x_star", "true_residual", "ok", "error"}) {
    c.emplace_back(name);
  }
  return c;
}

std::vector<std::string> identify_columns(int controls, int unknowns) {
  std::vector<std::string> c{"sample"};
  append_numbered(c, "control_", controls);
  append_numbered(c, "z_hat_", unknowns);
  append_numbered(c, "abs_error_", unknowns);
  for (const char* name : {"max_error", "orbit_size", "relaxation_order", "sdp_status", "lower_bound", "f_z_true",
                           "f_z_hat", "true_residual", "ok", "error"}) {
    c.emplace_back(name);
  }
  return c;
}

std::string to_csv(const CoherentBench& bench) {
  std::string out = join(coherent_columns(bench.config.controls));
  for (const auto& s : bench.samples) {
    std::vector<std::string> cells{std::to_string(s.id)};
    append_values(cells, s.x_star);
    append_values(cells, s.x_hat);
    cells.push_back(num(s.conv_x_star));
    cells.push_back(num(s.conv_x_hat));
    cells.push_back(s.conv_x_star < std::numbers::pi ? "1" : "0");
    cells.push_back(s.conv_x_hat < std::numbers::pi ? "1" : "0");
    cells.push_back(std::to_string(s.relaxation_order));
    cells.push_back(s.sdp_status);
    cells.push_back(num(s.lower_bound));
    cells.push_back(s.rank_one ? "1" : "0");
    cells.push_back(num(s.singular_ratio));
    cells.push_back(num(s.f_x_star));
    cells.push_back(num(s.f_x_hat));
    cells.push_back(num(s.lower_bound - s.f_x_star));
    cells.push_back(num(s.true_residual));
    cells.push_back(s.ok ? "1" : "0");
    cells.push_back(csv_text(s.error));
    out += join(cells);
  }
  return out;
}

std::string to_csv(const IdentifyBench& bench) {
  const int q = bench.config.pattern().unknowns();
  std::string out = join(identify_columns(bench.config.controls, q));
  for (const auto& s : bench.samples) {
    std::vector<std::string> cells{std::to_string(s.id)};
    append_values(cells, s.control);
    append_values(cells, s.z_hat);
    append_values(cells, s.abs_error);
    cells.push_back(num(s.max_error));
    cells.push_back(std::to_string(s.orbit_size));
    cells.push_back(std::to_string(s.relaxation_order));
    cells.push_back(s.sdp_status);
    cells.push_back(num(s.lower_bound));
    cells.push_back(num(s.f_z_true));
    cells.push_back(num(s.f_z_hat));
    cells.push_back(num(s.true_residual));
    cells.push_back(s.ok ? "1" : "0");
    cells.push_back(csv_text(s.error));
    out += join(cells);
  }
  return out;
}

json summary(const CoherentBench& bench) {
  std::vector<double> residual, conv_star, conv_hat, bound, secs;
  int failures = 0, conv_bad_star = 0, conv_bad_hat = 0, bound_star = 0, bound_hat = 0;
  json status_counts = json::object();
  for (const auto& s : bench.samples) {
    secs.push_back(s.seconds);
    if (!s.ok) {
      ++failures;
      continue;
    }
    residual.push_back(s.true_residual);
    conv_star.push_back(s.conv_x_star);
    conv_hat.push_back(s.conv_x_hat);
    bound.push_back(s.lower_bound);
    if (s.conv_x_star >= std::numbers::pi) ++conv_bad_star;
    if (s.conv_x_hat >= std::numbers::pi) ++conv_bad_hat;
    if (s.lower_bound > s.f_x_star + kBoundSlack) ++bound_star;
    if (s.lower_bound > s.f_x_hat + kBoundSlack) ++bound_hat;
    status_counts[s.sdp_status] = status_counts.value(s.sdp_status, 0) + 1;
  }
  return {{"mode", "bench-coherent"},
          {"samples", bench.samples.size()},
          {"seed", bench.config.seed},
          {"failures", failures},
          {"true_residual", stats(residual)},
          {"conv_x_star", stats(conv_star)},
          {"conv_x_hat", stats(conv_hat)},
          {"conv_violations_x_star", conv_bad_star},
          {"conv_violations_x_hat", conv_bad_hat},
          {"lower_bound", stats(bound)},
          {"bound_violations_x_star", bound_star},
          {"bound_violations_x_hat", bound_hat},
          {"sdp_status_counts", status_counts},
          {"timing", timing(secs, bench.seconds)}};
}

json summary(const IdentifyBench& bench) {
  std::vector<double> err, residual, secs;
  int failures = 0, symmetric = 0;
  json status_counts = json::object();
  for (const auto& s : bench.samples) {
    secs.push_back(s.seconds);
    if (!s.ok) {
      ++failures;
      continue;
    }
    err.push_back(s.max_error);
    residual.push_back(s.true_residual);
    if (s.orbit_size > 1) ++symmetric;
    status_counts[s.sdp_status] = status_counts.value(s.sdp_status, 0) + 1;
  }
  return {{"mode", "bench-identify"},
          {"samples", bench.samples.size()},
          {"seed", bench.config.seed},
          {"z_true", bench.config.z_true},
          {"failures", failures},
          {"max_error", stats(err)},
          {"true_residual", stats(residual)},
          {"samples_with_sign_symmetry", symmetric},
          {"sdp_status_counts", status_counts},
          {"timing", timing(secs, bench.seconds)}};
}

json run_single(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  json doc{{"mode", to_string(cfg.mode)}, {"seed", cfg.seed}};
  const SolveOptions opts = solve_options(cfg, cfg.seed);
  const Truncation& trunc = cfg.truncation;
  switch (cfg.mode) {
    case Mode::gate: {
      const QuantumSystem sys = cfg.system();
      const auto ansatz = cfg.ansatz();
      const Eigen::MatrixXcd target = gate_target(cfg, sys);
      PopProblem prob = gate_objective(sys, ansatz, GateTarget(target), trunc);
      prob.box_radius = cfg.radius;
      const SolveReport report = solve(prob, opts);
      const auto& x = report.solution.point;
      doc["problem"] = problem_json(prob);
      doc["report"] = to_json(report);
      doc["true_residual"] = std::sqrt(frob_distance_sq(propagate(sys, ansatz, x, cfg.oracle_steps).unitary, target));
      doc["convergence_functional"] = convergence_functional(sys, ansatz, x);
      break;
    }
    case Mode::state: {
      const QuantumSystem sys = cfg.system();
      const auto ansatz = cfg.ansatz();
      const StatePair pair(*cfg.psi0, state_target(cfg, sys));
      PopProblem prob = state_objective(sys, ansatz, pair, trunc);
      prob.box_radius = cfg.radius;
      const SolveReport report = solve(prob, opts);
      const auto& x = report.solution.point;
      doc["problem"] = problem_json(prob);
      doc["report"] = to_json(report);
      doc["true_residual"] = std::sqrt(state_distance_sq(propagate(sys, ansatz, x, cfg.oracle_steps).unitary,
                                                         pair.initial(), pair.target()));
      doc["convergence_functional"] = convergence_functional(sys, ansatz, x);
      break;
    }
    case Mode::min_time_gate:
    case Mode::min_time_state: {
      const QuantumSystem sys = cfg.system();
      const bool gate = cfg.mode == Mode::min_time_gate;
      PopProblem prob;
      Eigen::MatrixXcd target;
      std::optional<StatePair> pair;
      if (gate) {
        target = gate_target(cfg, sys);
        prob = min_time_gate(sys, cfg.controls, GateTarget(target), trunc, time_options(cfg));
      } else {
        pair.emplace(*cfg.psi0, state_target(cfg, sys));
        prob = min_time_state(sys, cfg.controls, *pair, trunc, time_options(cfg));
      }
      const SolveReport report = solve(prob, opts);
      const auto& sol = report.solution.point;
      const double horizon = sol.back();
      doc["problem"] = problem_json(prob);
      doc["report"] = to_json(report);
      doc["horizon"] = horizon;
      if (horizon > 0.0) {
        const auto ansatz = ControlAnsatz::fixed(cfg.controls, horizon);
        const std::vector<double> x(sol.begin(), sol.end() - 1);
        const Eigen::MatrixXcd u = propagate(sys, ansatz, x, cfg.oracle_steps).unitary;
        doc["true_residual"] = gate ? std::sqrt(frob_distance_sq(u, target))
                                    : std::sqrt(state_distance_sq(u, pair->initial(), pair->target()));
        doc["convergence_functional"] = convergence_functional(sys, ansatz, x);
      }
      break;
    }
    case Mode::identify: {
      const CouplingPattern pattern = cfg.pattern();
      const auto ansatz = cfg.ansatz();
      Eigen::MatrixXcd target;
      if (cfg.target) {
        target = *cfg.target;
      } else {
        const QuantumSystem truth(cfg.drift, pattern.matrix(cfg.z_true));
        target = propagate(truth, ansatz, cfg.control_x, cfg.oracle_steps).unitary;
      }
      PopProblem prob =
          identification_objective(cfg.drift, pattern, cfg.control_x, ansatz, GateTarget(target), trunc);
      prob.box_radius = cfg.radius;
      const SolveReport report = solve(prob, opts);
      const auto& z = report.solution.point;
      doc["problem"] = problem_json(prob);
      doc["report"] = to_json(report);
      doc["sign_symmetries"] = sign_symmetries(prob.objective);
      const QuantumSystem fitted(cfg.drift, pattern.matrix(z));
      doc["true_residual"] =
          std::sqrt(frob_distance_sq(propagate(fitted, ansatz, cfg.control_x, cfg.oracle_steps).unitary, target));
      if (!cfg.z_true.empty()) {
        std::vector<double> err;
        for (std::size_t k = 0; k < z.size(); ++k) err.push_back(std::abs(z[k] - cfg.z_true[k]));
        doc["abs_error"] = err;
      }
      break;
    }
    case Mode::bench_coherent:
    case Mode::bench_identify:
      throw ConfigError("bench modes are run with the bench-coherent and bench-identify subcommands");
  }
  doc["seconds"] = seconds_since(t0);
  return doc;
}

void write_bench(const std::filesystem::path& dir, const std::string& csv, const json& summary_doc) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "samples.csv", std::ios::binary) << csv;
  std::ofstream(dir / "summary.json", std::ios::binary) << summary_doc.dump(2) << "\n";
}

}  // namespace qpoc
