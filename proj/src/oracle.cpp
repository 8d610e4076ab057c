#include "qpoc/oracle.hpp"

#include "qpoc/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <stdexcept>

namespace qpoc {

PropagationResult propagate(const QuantumSystem& sys, const ControlAnsatz& ansatz,
                            std::span<const double> x, int steps) {
  if (steps < 1) throw std::invalid_argument("propagate: steps must be >= 1");
  const double horizon = ansatz.horizon();
  const double dt = horizon / steps;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(sys.dim(), sys.dim());
  for (int j = 0; j < steps; ++j) {
    const double tm = (j + 0.5) * dt;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sys.hamiltonian(ansatz.field(x, tm)));
    const Eigen::VectorXcd phases =
        es.eigenvalues().unaryExpr([dt](double l) { return std::exp(-kI * (dt * l)); });
    u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint() * u;
  }
  PropagationResult r;
  r.unitarity_defect = unitarity_defect(u);
  r.unitary = std::move(u);
  r.steps = steps;
  return r;
}

double frob_distance_sq(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& target) {
  if (u.rows() != target.rows() || u.cols() != target.cols()) {
    throw std::invalid_argument("frob_distance_sq: shape mismatch");
  }
  return (u - target).squaredNorm();
}

double state_distance_sq(const Eigen::MatrixXcd& u, const Eigen::VectorXcd& psi0,
                         const Eigen::VectorXcd& psi_target) {
  if (u.cols() != psi0.size() || u.rows() != psi_target.size()) {
    throw std::invalid_argument("state_distance_sq: shape mismatch");
  }
  return (u * psi0 - psi_target).squaredNorm();
}

}  // namespace qpoc
