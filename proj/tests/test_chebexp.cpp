#include "test_support.hpp"

#include "qpoc/chebexp.hpp"
#include "qpoc/linalg.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace qpoc;
using namespace qpoc::test;

namespace {

/// expm(Omega/2) from the eigendecomposition of the Hermitian matrix i*Omega.
Eigen::MatrixXcd half_exp_oracle(const Eigen::MatrixXcd& omega) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(kI * omega));
  const Eigen::VectorXcd phases = (-0.5 * kI * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Truncated Jacobi-Anger series applied eigenvalue by eigenvalue: Omega = -iH has
/// eigenvalues -i*lambda, and T_k(-i*lambda) = (-i)^k cos(k arccos lambda).
Eigen::MatrixXcd jacobi_anger_oracle(const Eigen::MatrixXcd& omega, int p) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(kI * omega));
  Eigen::VectorXcd d(omega.rows());
  for (Eigen::Index i = 0; i < omega.rows(); ++i) {
    const double theta = std::acos(std::clamp(es.eigenvalues()(i), -1.0, 1.0));
    Complex v = bessel_j(0, 0.5);
    for (int k = 1; k <= p; ++k) v += 2.0 * std::pow(-kI, k) * bessel_j(k, 0.5) * std::cos(k * theta);
    d(i) = v;
  }
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

/// 2 * sum_{k > 5} J_k(1/2), the worst-case scalar truncation error at p = 5 (scipy.special.jv).
constexpr double kTail5 = 6.969417333171423e-07;
/// Same tail for p = 8.
constexpr double kTail8 = 2.1428306886455094e-11;

}  // namespace

TEST_SUITE("chebexp") {
  TEST_CASE("bessel_j values") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    for (int k = 1; k < 6; ++k) CHECK(bessel_j(k, 0.0) == 0.0);
    // Reference values from an independent implementation (scipy.special.jv).
    CHECK(std::abs(bessel_j(0, 0.5) - 0.938469807240813) < 1e-12);
    CHECK(std::abs(bessel_j(1, 0.5) - 0.2422684576748739) < 1e-12);
    CHECK(std::abs(bessel_j(2, 0.5) - 0.030604023458682638) < 1e-14);
    CHECK(std::abs(bessel_j(5, 0.5) - 8.053627241357477e-06) < 1e-17);
    CHECK_THROWS_AS(bessel_j(-1, 0.5), std::invalid_argument);
  }

  TEST_CASE("cheb_exp of the zero matrix is (J0 + 2 J2 + 2 J4) times the identity") {
    const auto vars = Variables::numbered("x", 1);
    const auto zero = ComplexMatrixPolynomial(vars, 3);
    const auto e = cheb_exp(zero, 5, 1);
    const std::vector<double> pt{0.3};
    // sqrt(3) * 2 * (J6 + J8 + ...)(1/2), from scipy.special.jv.
    CHECK(std::abs((e.result.evaluate(pt) - Eigen::MatrixXcd::Identity(3, 3)).norm() - 1.1654780973471041e-06) <
          1e-15);
    CHECK((cheb_exp(zero, 8, 1).result.evaluate(pt) - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-10);
    CHECK(e.order == 5);
    CHECK(e.sign == 1);
  }

  TEST_CASE("scalar case reproduces cos(1/2) + i sin(1/2)") {
    Eigen::MatrixXcd omega(1, 1);
    omega(0, 0) = kI;
    const Complex v = cheb_exp_value(omega, 5, 1)(0, 0);
    CHECK(std::abs(v - Complex(0.8775825618903728, 0.479425538604203)) < kTail5);
    CHECK(std::abs(v - jacobi_anger_oracle(omega, 5)(0, 0)) < 1e-15);
    const Complex v8 = cheb_exp_value(omega, 8, 1)(0, 0);
    CHECK(std::abs(v8 - Complex(0.8775825618903728, 0.479425538604203)) < kTail8);
  }

  TEST_CASE("plus-sign recurrence on diag(i, -i) gives T_2 = -1") {
    // exp_2 - exp_1 = 2 J_2(1/2) T_2, so T_2 can be read off from two truncations.
    Eigen::MatrixXcd omega = Eigen::MatrixXcd::Zero(2, 2);
    omega(0, 0) = kI;
    omega(1, 1) = -kI;
    const Eigen::MatrixXcd t2 =
        (cheb_exp_value(omega, 2, 1) - cheb_exp_value(omega, 1, 1)) / (2.0 * bessel_j(2, 0.5));
    CHECK((t2 + Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-14);
  }

  TEST_CASE("polynomial expansion degree bound and pointwise agreement") {
    std::mt19937_64 rng(2);
    const auto vars = Variables::numbered("x", 2);
    const Eigen::MatrixXcd a = random_antihermitian(rng, 3, 0.4);
    const Eigen::MatrixXcd b = random_antihermitian(rng, 3, 0.4);
    const auto omega = matrix_term(vars, Monomial::unit(0), a) + matrix_term(vars, Monomial::unit(1), b);
    for (int p : {1, 3, 5}) {
      const auto e = cheb_exp(omega, p, 1);
      CHECK(e.result.degree() <= p * omega.degree());
      const auto x = random_point(rng, 2, 1.0);
      CHECK((e.result.evaluate(x) - cheb_exp_value(omega.evaluate(x), p, 1)).norm() < 1e-13);
    }
  }

  TEST_CASE("validate_exp examples") {
    const auto v0 = validate_exp(Eigen::MatrixXcd::Zero(3, 3), 5);
    CHECK(std::abs(v0.error - 1.1654780973471041e-06) < 1e-15);
    CHECK_FALSE(v0.radius_warning);

    std::mt19937_64 rng(99);
    double worst5 = 0.0, worst8 = 0.0;
    int improved = 0;
    for (int k = 0; k < 100; ++k) {
      const Eigen::MatrixXcd om = random_antihermitian(rng, 3, 1.0);
      const auto v5 = validate_exp(om, 5);
      const auto v3 = validate_exp(om, 3);
      CHECK_FALSE(v5.radius_warning);
      CHECK(std::abs(v5.error - (cheb_exp_value(om, 5, 1) - half_exp_oracle(om)).norm()) < 1e-14);
      CHECK((cheb_exp_value(om, 5, 1) - jacobi_anger_oracle(om, 5)).norm() < 1e-13);
      worst5 = std::max(worst5, v5.error);
      worst8 = std::max(worst8, validate_exp(om, 8).error);
      if (v5.error < v3.error) ++improved;
    }
    CHECK(worst5 <= std::sqrt(3.0) * kTail5);
    CHECK(worst8 <= std::sqrt(3.0) * kTail8 + 1e-14);
    CHECK(improved >= 99);

    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(2, 2);
    big(0, 0) = 2.0 * kI;
    CHECK(validate_exp(big, 5).radius_warning);
  }

  TEST_CASE("property: monotone improvement in p") {
    std::mt19937_64 rng(123);
    for (int k = 0; k < 50; ++k) {
      const Eigen::MatrixXcd om = random_antihermitian(rng, 3, 1.0);
      double prev = validate_exp(om, 1).error;
      for (int p = 2; p <= 8; ++p) {
        const double e = validate_exp(om, p).error;
        CHECK(e <= prev + 1e-12);
        prev = e;
      }
    }
  }

  TEST_CASE("property: sign -1 equals substituting -Omega") {
    std::mt19937_64 rng(7);
    const auto vars = Variables::numbered("x", 2);
    const auto omega = matrix_term(vars, Monomial::unit(0), random_antihermitian(rng, 3, 0.5)) +
                       matrix_term(vars, Monomial::unit(0) * Monomial::unit(1), random_antihermitian(rng, 3, 0.5));
    const auto minus = cheb_exp(omega, 5, -1).result;
    const auto negated = cheb_exp(-omega, 5, 1).result;
    for (int k = 0; k < 10; ++k) {
      const auto x = random_point(rng, 2, 1.0);
      CHECK((minus.evaluate(x) - negated.evaluate(x)).norm() < 1e-14);
    }
  }

  TEST_CASE("property: unitarity defect bounded by the truncation tail") {
    std::mt19937_64 rng(31);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(3, 3);
    for (int k = 0; k < 50; ++k) {
      const Eigen::MatrixXcd om = random_antihermitian(rng, 3, 1.0);
      const Eigen::MatrixXcd e5 = cheb_exp_value(om, 5, 1);
      const Eigen::MatrixXcd e8 = cheb_exp_value(om, 8, 1);
      CHECK((e5 * e5.adjoint() - id).cwiseAbs().maxCoeff() <= 2.0 * kTail5 + kTail5 * kTail5);
      CHECK((e8 * e8.adjoint() - id).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}
