#include "qpoc/popsolve.hpp"

#include <stdexcept>

namespace qpoc {

SolveReport multistart(const PopProblem& problem, int starts, std::uint64_t seed,
                       const LocalOptions& options) {
  SolveReport report;
  report.multistart = multistart_runs(problem, starts, seed, options);
  report.solution = report.multistart->best;
  return report;
}

SolveReport solve(const PopProblem& problem, const SolveOptions& options) {
  const bool relax = options.relaxation_order >= 0;
  if (!relax && options.multistart < 1) {
    throw std::invalid_argument("solve: both the relaxation and multistart are disabled");
  }
  SolveReport report;
  if (relax) {
    const int order =
        options.relaxation_order == 0 ? minimal_relaxation_order(problem) : options.relaxation_order;
    const MomentRelaxation rel = build_relaxation(problem, order);
    const SdpSolution sol = solve_sdp(rel.sdp, options.sdp);
    RelaxationReport r;
    r.order = order;
    r.moment_matrix_size = static_cast<int>(rel.basis.size());
    r.status = sol.status;
    r.iterations = sol.iterations;
    r.lower_bound = rel.lower_bound(sol);
    r.extraction = extract_minimizer(rel, sol);
    r.extracted_value = problem.objective_at(r.extraction.point);
    r.refined = local_refine(problem, r.extraction.point, options.local);
    report.solution = r.refined;
    report.relaxation = std::move(r);
  }
  if (options.multistart > 0) {
    report.multistart = multistart_runs(problem, options.multistart, options.seed, options.local);
    if (!relax || better_solution(report.multistart->best, report.solution)) {
      report.solution = report.multistart->best;
    }
  }
  return report;
}

}  // namespace qpoc
