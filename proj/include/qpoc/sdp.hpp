#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace qpoc {

/// One stored entry of a sparse symmetric block matrix; (row, col) and (col, row)
/// both carry `value`. Entries must satisfy row <= col.
struct SdpEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

using BlockMatrix = std::vector<Eigen::MatrixXd>;

/// Block-diagonal SDP in the pair
///   primal:  min <C, X>   s.t. <A_i, X> = b_i,            X >= 0
///   dual:    max b^T y    s.t. Z = C - sum_i y_i A_i,      Z >= 0
struct SdpProblem {
  std::vector<int> block_sizes;
  BlockMatrix c;
  std::vector<std::vector<SdpEntry>> a;
  Eigen::VectorXd b;

  int constraints() const { return static_cast<int>(a.size()); }
  /// Throws std::invalid_argument on malformed blocks or entries.
  void validate() const;
};

enum class SdpStatus {
  optimal,            ///< relative gap < 1e-7 and both residuals < 1e-8
  degraded,           ///< stopped early (stall or lost interior); answer is approximate
  max_iterations,
  numerical_failure,  ///< could not compute a search direction
  dual_unbounded,     ///< dual objective diverges (primal infeasible)
};

std::string to_string(SdpStatus s);

struct SdpSolution {
  SdpStatus status = SdpStatus::numerical_failure;
  BlockMatrix x;
  BlockMatrix z;
  Eigen::VectorXd y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;

  bool optimal() const { return status == SdpStatus::optimal; }
};

struct SdpOptions {
  double gap_tolerance = 1e-8;
  double feasibility_tolerance = 1e-8;
  int max_iterations = 200;
};

/// Infeasible primal-dual path following with Nesterov-Todd scaling and a
/// Mehrotra predictor-corrector step.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

}  // namespace qpoc
