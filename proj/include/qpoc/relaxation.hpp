#pragma once

#include "qpoc/objective.hpp"
#include "qpoc/polyalg.hpp"
#include "qpoc/sdp.hpp"

#include <Eigen/Dense>

#include <unordered_map>
#include <vector>

namespace qpoc {

/// One PSD block of the relaxation: the moment matrix (constraint == -1) or the
/// localizing matrix of constraint g_j, indexed by monomials of degree <= basis_degree.
struct LocalizingBlock {
  int constraint = -1;
  int basis_degree = 0;
  int size = 0;
};

/// Order-d Lasserre moment relaxation compiled to a dense block SDP.
///
/// Pseudo-moments y_alpha (|alpha| <= 2d, graded lex) are shared between all
/// blocks; y_0 = 1 is substituted. SDP dual variable i is y_{moments[i + 1]}.
/// The objective and each constraint are rescaled by their largest coefficient
/// before compilation.
struct MomentRelaxation {
  int order = 0;
  Variables variables;
  std::vector<Monomial> basis;
  std::vector<Monomial> moments;
  std::unordered_map<Monomial, int, MonomialHash> moment_index;
  std::vector<LocalizingBlock> blocks;
  SdpProblem sdp;
  double objective_constant = 0.0;
  double objective_scale = 1.0;

  /// Full pseudo-moment vector (y_0 = 1 first) from an SDP solution.
  Eigen::VectorXd pseudo_moments(const SdpSolution& sol) const;
  /// M_d(y)
  Eigen::MatrixXd moment_matrix(const Eigen::VectorXd& y) const;
  /// Relaxation value L_y(f) at the returned moments.
  double lower_bound(const SdpSolution& sol) const;
};

/// Throws std::invalid_argument when 2d is below the degree of the objective or a constraint.
MomentRelaxation build_relaxation(const PopProblem& problem, int order);

/// Smallest order that admits every polynomial of the problem.
int minimal_relaxation_order(const PopProblem& problem);

struct Extraction {
  std::vector<double> point;     ///< first-order moments
  bool rank_one = false;         ///< sigma_2 / sigma_1 < 1e-6
  double singular_ratio = 0.0;   ///< sigma_2 / sigma_1
  int numerical_rank = 0;        ///< singular values above 1e-6 sigma_1
  double min_eigenvalue = 0.0;   ///< of M_d(y)
};

/// Rank-one-or-heuristic extraction: always returns the first-order moments
/// and flags whether the moment matrix certifies them.
Extraction extract_minimizer(const MomentRelaxation& rel, const SdpSolution& sol);

}  // namespace qpoc
