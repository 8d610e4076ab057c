#pragma once

#include <Eigen/Dense>

#include <complex>

namespace qpoc {

using Complex = std::complex<double>;
inline constexpr Complex kI{0.0, 1.0};

/// max |M - M^dagger|
double hermiticity_defect(const Eigen::MatrixXcd& m);

/// max |U^dagger U - 1|
double unitarity_defect(const Eigen::MatrixXcd& u);

/// exp(Omega) for anti-Hermitian Omega via the eigendecomposition of i*Omega.
Eigen::MatrixXcd expm_antihermitian(const Eigen::MatrixXcd& omega);

/// Principal logarithm of a unitary matrix (anti-Hermitian result).
Eigen::MatrixXcd logm_unitary(const Eigen::MatrixXcd& u);

/// Spectral radius of an anti-Hermitian (or Hermitian) matrix.
double normal_spectral_radius(const Eigen::MatrixXcd& m);

/// Largest singular value.
double spectral_norm(const Eigen::MatrixXcd& m);

}  // namespace qpoc
