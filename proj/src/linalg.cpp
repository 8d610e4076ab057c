#include "qpoc/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace qpoc {

double hermiticity_defect(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
  if (u.size() == 0) return 0.0;
  return (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd expm_antihermitian(const Eigen::MatrixXcd& omega) {
  // omega = -i H with H Hermitian; exp(omega) = Q exp(-i Lambda) Q^dagger.
  const Eigen::MatrixXcd h = kI * omega;
  const Eigen::MatrixXcd hs = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hs);
  const Eigen::VectorXcd phases =
      es.eigenvalues().unaryExpr([](double l) { return std::exp(-kI * l); });
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd logm_unitary(const Eigen::MatrixXcd& u) {
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
  const Eigen::MatrixXcd& q = schur.matrixU();
  const Eigen::MatrixXcd& t = schur.matrixT();
  Eigen::VectorXcd logs(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) logs(i) = kI * std::arg(t(i, i));
  return q * logs.asDiagonal() * q.adjoint();
}

double normal_spectral_radius(const Eigen::MatrixXcd& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace qpoc
