#pragma once

#include "qpoc/magnus.hpp"

#include <Eigen/Dense>

#include <span>

namespace qpoc {

inline constexpr int kDefaultOracleSteps = 2000;

struct PropagationResult {
  Eigen::MatrixXcd unitary;
  int steps = 0;
  double unitarity_defect = 0.0;
};

/// U(T) of dU/dt = A(t) U, U(0) = 1, by midpoint exponential stepping:
/// U(T) = prod_j expm(dt A(t_j + dt/2)), later factors on the left.
PropagationResult propagate(const QuantumSystem& sys, const ControlAnsatz& ansatz,
                            std::span<const double> x, int steps = kDefaultOracleSteps);

/// ||U - U*||_F^2
double frob_distance_sq(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& target);

/// ||U psi0 - psi*||^2
double state_distance_sq(const Eigen::MatrixXcd& u, const Eigen::VectorXcd& psi0,
                         const Eigen::VectorXcd& psi_target);

}  // namespace qpoc
