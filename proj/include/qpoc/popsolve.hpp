#pragma once

#include "qpoc/local.hpp"
#include "qpoc/objective.hpp"
#include "qpoc/relaxation.hpp"
#include "qpoc/sdp.hpp"

#include <cstdint>
#include <limits>
#include <optional>

namespace qpoc {

struct SolveOptions {
  /// Relaxation order d; 0 picks the smallest admissible order, a negative value skips the relaxation.
  int relaxation_order = 0;
  int multistart = 16;
  std::uint64_t seed = 1;
  LocalOptions local;
  SdpOptions sdp;
};

struct RelaxationReport {
  int order = 0;
  int moment_matrix_size = 0;
  SdpStatus status = SdpStatus::numerical_failure;
  int iterations = 0;
  double lower_bound = std::numeric_limits<double>::quiet_NaN();
  Extraction extraction;
  double extracted_value = std::numeric_limits<double>::quiet_NaN();
  /// Local refinement started from the extracted point.
  LocalResult refined;
};

/// Outcome of one solve. `solution` is the better of the refined extraction and
/// the best multistart run.
struct SolveReport {
  std::optional<RelaxationReport> relaxation;
  std::optional<MultistartResult> multistart;
  LocalResult solution;

  double lower_bound() const {
    return relaxation ? relaxation->lower_bound : std::numeric_limits<double>::quiet_NaN();
  }
};

/// K local refinements from uniform starts in [-R, R]^n.
SolveReport multistart(const PopProblem& problem, int starts, std::uint64_t seed,
                       const LocalOptions& options = {});

/// Relaxation (when enabled) followed by refinement of the extracted point, plus
/// multistart (when K > 0). At least one of the two must be enabled.
SolveReport solve(const PopProblem& problem, const SolveOptions& options = {});

}  // namespace qpoc
