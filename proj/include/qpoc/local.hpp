#pragma once

#include "qpoc/objective.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qpoc {

struct LocalOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-10;
  /// Largest allowed step (infinity norm) per iteration.
  double max_step = 0.5;
  /// Penalty weights used in turn for constrained problems.
  std::vector<double> penalties{1e2, 1e4, 1e6, 1e8};
};

struct LocalResult {
  std::vector<double> point;
  double value = 0.0;           ///< objective at point
  double gradient_norm = 0.0;   ///< infinity norm of the (penalized) gradient
  double min_constraint = 0.0;  ///< +inf when unconstrained
  int iterations = 0;
  bool converged = false;       ///< gradient_norm below tolerance
  bool feasible = true;         ///< min_constraint >= -1e-6
};

/// Armijo-backtracking descent: gradient steps while the finite-difference
/// Hessian of the polynomial gradient is indefinite, Newton steps once it is
/// positive definite, and a negative-curvature step at saddle points.
/// Constrained problems are handled by a quadratic penalty on g_j < 0.
/// Throws std::runtime_error on non-finite values.
LocalResult local_refine(const PopProblem& problem, std::span<const double> x0,
                         const LocalOptions& options = {});

inline LocalResult local_refine(const PopProblem& problem, std::span<const double> x0,
                                int max_iterations) {
  LocalOptions o;
  o.max_iterations = max_iterations;
  return local_refine(problem, x0, o);
}

/// True when `a` is a better solution than `b`: feasible first, then lower value.
bool better_solution(const LocalResult& a, const LocalResult& b);

struct MultistartResult {
  LocalResult best;
  std::vector<LocalResult> runs;
};

/// K refinements from uniform starts in [-R, R]^n (R = problem.box_radius).
/// Deterministic for a given seed.
MultistartResult multistart_runs(const PopProblem& problem, int starts, std::uint64_t seed,
                                 const LocalOptions& options = {});

}  // namespace qpoc
