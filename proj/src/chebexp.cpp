#include "qpoc/chebexp.hpp"

#include "qpoc/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace qpoc {

double bessel_j(int k, double z) {
  if (k < 0) throw std::invalid_argument("bessel_j: negative order");
  const double half = 0.5 * z;
  // Leading term (z/2)^k / k!
  double term = 1.0;
  for (int j = 1; j <= k; ++j) term *= half / j;
  double sum = term;
  const double q = half * half;
  for (int s = 1; s < 500; ++s) {
    term *= -q / (static_cast<double>(s) * (k + s));
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

namespace {

template <class M, class Identity, class Times>
M chebyshev_sum(const M& arg, int order, const Identity& identity, const Times& times) {
  if (order < 0) throw std::invalid_argument("Chebyshev order must be nonnegative");
  M prev = identity;
  M result = identity * bessel_j(0, 0.5);
  if (order == 0) return result;
  M cur = arg;
  result = result + cur * (2.0 * bessel_j(1, 0.5));
  for (int k = 2; k <= order; ++k) {
    M next = times(arg, cur) * 2.0 + prev;
    prev = std::move(cur);
    cur = std::move(next);
    result = result + cur * (2.0 * bessel_j(k, 0.5));
  }
  return result;
}

}  // namespace

ChebExpansion cheb_exp(const ComplexMatrixPolynomial& omega, int order, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  const ComplexMatrixPolynomial arg = sign == 1 ? omega : -omega;
  const auto identity = ComplexMatrixPolynomial::constant(
      omega.variables(), Eigen::MatrixXcd::Identity(omega.dim(), omega.dim()));
  // Polynomial supports scaled() rather than operator*(double); wrap it.
  struct Poly {
    ComplexMatrixPolynomial p;
    Poly operator*(double s) const { return {p.scaled(s)}; }
    Poly operator+(const Poly& o) const { return {p + o.p}; }
  };
  const Poly result = chebyshev_sum<Poly>(
      Poly{arg}, order, Poly{identity},
      [](const Poly& a, const Poly& b) { return Poly{a.p * b.p}; });
  return {order, sign, result.p};
}

Eigen::MatrixXcd cheb_exp_value(const Eigen::MatrixXcd& omega, int order, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  const Eigen::MatrixXcd arg = sign * omega;
  const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(omega.rows(), omega.cols());
  return chebyshev_sum<Eigen::MatrixXcd>(
      arg, order, identity,
      [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return Eigen::MatrixXcd(a * b); });
}

ExpValidation validate_exp(const Eigen::MatrixXcd& omega, int order) {
  ExpValidation v;
  v.spectral_radius = normal_spectral_radius(omega);
  v.radius_warning = v.spectral_radius > 1.0;
  const Eigen::MatrixXcd exact = expm_antihermitian(0.5 * omega);
  v.error = (cheb_exp_value(omega, order, 1) - exact).norm();
  return v;
}

}  // namespace qpoc
