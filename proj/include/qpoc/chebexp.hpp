#pragma once

#include "qpoc/polyalg.hpp"

namespace qpoc {

inline constexpr int kDefaultChebyshevOrder = 5;

/// Bessel function of the first kind J_k(z) from its ascending power series.
double bessel_j(int k, double z);

/// exp_p(sign * Omega / 2) = J0(1/2) 1 + 2 sum_{k=1..p} J_k(1/2) T_k(sign * Omega)
/// with T_0 = 1, T_1 = sign*Omega, T_{k+1} = 2 (sign*Omega) T_k + T_{k-1}.
///
/// For Omega = iH the recurrence gives T_k = i^k T^_k(H) (T^_k the ordinary
/// Chebyshev polynomial), so the sum is the Jacobi-Anger series of exp(iH/2).
struct ChebExpansion {
  int order = 0;
  int sign = 1;
  ComplexMatrixPolynomial result;
};

ChebExpansion cheb_exp(const ComplexMatrixPolynomial& omega, int order, int sign);

/// Same expansion applied to a numeric matrix.
Eigen::MatrixXcd cheb_exp_value(const Eigen::MatrixXcd& omega, int order, int sign);

struct ExpValidation {
  double error = 0.0;            ///< ||exp_p(Omega/2) - expm(Omega/2)||_F
  double spectral_radius = 0.0;  ///< of Omega
  bool radius_warning = false;   ///< spectral radius above 1
};

ExpValidation validate_exp(const Eigen::MatrixXcd& omega, int order);

}  // namespace qpoc
